#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fabtwin/machine_spec.hpp"

namespace fabtwin {

// Parses a JSON machine description. Unknown fields are rejected, every
// node_type / link_class / switch_type reference is resolved, and counts must
// be strictly positive. Throws fabtwin::Error; syntax errors carry the byte
// offset of the failure.
MachineSpec parse_spec(std::string_view text);

MachineSpec load_spec(const std::filesystem::path& path);

// Canonical form: sorted keys, two-space indent, trailing newline.
// parse_spec(serialize_spec(s)) == s for every parsed spec.
std::string serialize_spec(const MachineSpec& spec);

std::string read_text_file(const std::filesystem::path& path);

struct Violation {
    std::string path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

// Checks the semantic invariants that parsing does not. Empty result means
// the machine description is valid. Ordering of violations is deterministic.
std::vector<Violation> validate_spec(const MachineSpec& spec);

}  // namespace fabtwin
