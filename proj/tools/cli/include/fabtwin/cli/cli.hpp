#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fabtwin/machine_spec.hpp"
#include "json.hpp"

namespace fabtwin::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 success, 1 spec/validation/topology findings, 2 usage errors.
struct Outcome {
    int exit_code = 0;
    std::string out;
    std::string err;
};

// `args` excludes the program name.
Outcome run(const std::vector<std::string>& args);

struct DataFiles {
    std::filesystem::path benchmarks;
    std::filesystem::path scaling_series;
};

// Bundled benchmark records and scaling series.
DataFiles default_data_files();

// Consolidated document: `results` holds one section per query, `units` maps
// each numeric leaf (dotted path, `[]` for list items) to its unit, and
// `warnings` lists every known discrepancy against published figures.
struct Report {
    nlohmann::json results = nlohmann::json::object();
    std::map<std::string, std::string> units;
    std::vector<std::string> warnings;
};

Report report_all(const MachineSpec& spec, const DataFiles& data);

}  // namespace fabtwin::cli
