#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fabtwin/machine_spec.hpp"

namespace fabtwin {

// Raw capacity of a tier in decimal PB. Throws Errc::unknown_tier.
double tier_raw_capacity(const MachineSpec& spec, const std::string& tier);

// Raw capacity of one appliance of a model, decimal PB. Throws Errc::unknown_model.
double per_module_capacity(const MachineSpec& spec, const std::string& model);

struct TierSummary {
    std::string name;
    double raw_pb = 0.0;
    std::optional<double> declared_raw_pb;
    std::optional<double> delta_fraction;  // (computed - declared) / declared
};

struct NamespaceSummary {
    std::string path;
    double net_size_pib = 0.0;  // declared
    double bandwidth_gbs = 0.0; // declared
    std::map<std::string, std::uint32_t> appliance_mix;
    double raw_pb = 0.0;  // sum of the mix's module capacities
};

struct StorageSummary {
    std::vector<TierSummary> tiers;
    std::vector<NamespaceSummary> namespaces;
};

// Declared namespace figures next to the raw capacity of their appliance mix.
// Throws Errc::over_allocation when tiers or namespaces claim more appliances
// of a model than the inventory holds, Errc::unknown_model for a mix entry
// naming no appliance.
StorageSummary namespace_summary(const MachineSpec& spec);

}  // namespace fabtwin
