#pragma once

#include <stdexcept>
#include <string>

namespace fabtwin {

enum class Errc {
    syntax,
    unknown_field,
    unresolved_reference,
    non_positive,
    invalid_value,
    port_budget,
    uneven_global_links,
    unknown_cell,
    unknown_node,
    unknown_tier,
    unknown_model,
    not_available,
    over_allocation,
    disconnected,
    invalid_argument,
    io,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

}  // namespace fabtwin
