#include "fabtwin/storage_model.hpp"

#include "fabtwin/error.hpp"

namespace fabtwin {

namespace {

const ApplianceSpec& appliance(const MachineSpec& spec, const std::string& model) {
    auto it = spec.storage.appliances.find(model);
    if (it == spec.storage.appliances.end()) throw Error(Errc::unknown_model, "unknown appliance model '" + model + "'");
    return it->second;
}

void check_inventory(const MachineSpec& spec, const std::map<std::string, std::uint32_t>& used, const char* what) {
    for (const auto& [model, count] : used) {
        const auto available = appliance(spec, model).count;
        if (count > available) {
            throw Error(Errc::over_allocation, std::string(what) + " allocate " + std::to_string(count) + " " + model +
                                                   " appliances, inventory holds " + std::to_string(available));
        }
    }
}

}  // namespace

double per_module_capacity(const MachineSpec& spec, const std::string& model) {
    const auto& a = appliance(spec, model);
    return a.drives.count * a.drives.size_tb / 1000.0;
}

double tier_raw_capacity(const MachineSpec& spec, const std::string& tier) {
    auto it = spec.storage.tiers.find(tier);
    if (it == spec.storage.tiers.end()) throw Error(Errc::unknown_tier, "unknown storage tier '" + tier + "'");
    double total = 0.0;
    for (const auto& [model, count] : it->second.appliances) total += count * per_module_capacity(spec, model);
    return total;
}

StorageSummary namespace_summary(const MachineSpec& spec) {
    std::map<std::string, std::uint32_t> tier_use;
    for (const auto& [name, tier] : spec.storage.tiers) {
        for (const auto& [model, count] : tier.appliances) tier_use[model] += count;
    }
    check_inventory(spec, tier_use, "tiers");

    std::map<std::string, std::uint32_t> ns_use;
    for (const auto& ns : spec.storage.namespaces) {
        for (const auto& [model, count] : ns.appliance_mix) ns_use[model] += count;
    }
    check_inventory(spec, ns_use, "namespaces");

    StorageSummary out;
    for (const auto& [name, tier] : spec.storage.tiers) {
        TierSummary t{name, tier_raw_capacity(spec, name), tier.declared_raw_pb, std::nullopt};
        if (tier.declared_raw_pb && *tier.declared_raw_pb > 0) {
            t.delta_fraction = (t.raw_pb - *tier.declared_raw_pb) / *tier.declared_raw_pb;
        }
        out.tiers.push_back(std::move(t));
    }
    for (const auto& ns : spec.storage.namespaces) {
        NamespaceSummary n{ns.path, ns.declared_net_size_pib, ns.declared_bandwidth_gbs, ns.appliance_mix, 0.0};
        for (const auto& [model, count] : ns.appliance_mix) n.raw_pb += count * per_module_capacity(spec, model);
        out.namespaces.push_back(std::move(n));
    }
    return out;
}

}  // namespace fabtwin
