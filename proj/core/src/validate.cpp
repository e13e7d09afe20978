#include <cmath>
#include <set>

#include "fabtwin/spec_io.hpp"

namespace fabtwin {

namespace {

class Collector {
  public:
    void require(bool ok, std::string path, std::string message) {
        if (!ok) out_.push_back({std::move(path), std::move(message)});
    }
    std::vector<Violation> take() { return std::move(out_); }

  private:
    std::vector<Violation> out_;
};

std::string idx(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void check_gpu(Collector& c, const GpuSpec& gpu, const std::string& path) {
    c.require(gpu.hbm_bw_gbs > 0, path + ".hbm_bw_gbs", "must be > 0");
    for (std::size_t i = 0; i < gpu.peaks.entries.size(); ++i) {
        const auto& e = gpu.peaks.entries[i];
        const auto entry_path = idx(path + ".peaks", i);
        if (e.value) c.require(*e.value >= 0, entry_path + ".value", "peak must be >= 0");
        c.require(!e.sparsity_doubling || e.tensor, entry_path + ".sparsity_doubling",
                  "sparsity doubling applies to tensor entries only");
        if (e.tensor && e.value) {
            const auto* plain = gpu.peaks.find(e.format, false);
            if (plain && plain->value) {
                c.require(*e.value >= *plain->value, entry_path + ".value",
                          "tensor peak below the matching non-tensor peak");
            }
        }
        for (std::size_t k = 0; k < i; ++k) {
            const auto& prior = gpu.peaks.entries[k];
            c.require(!(prior.format == e.format && prior.tensor == e.tensor), entry_path,
                      "duplicate (format, tensor) entry");
        }
    }
}

void check_node(Collector& c, const MachineSpec& spec, const NodeSpec& node, const std::string& path,
                bool compute) {
    c.require(node.cpu.cores > 0, path + ".cpu.cores", "must be > 0");
    c.require(node.cpu.clock_ghz > 0, path + ".cpu.clock_ghz", "must be > 0");
    c.require(node.cpu.flops_per_cycle_per_core > 0, path + ".cpu.flops_per_cycle_per_core", "must be > 0");
    c.require(node.ram_gb > 0, path + ".ram_gb", "must be > 0");
    if (node.dimms) {
        const double total = node.dimms->count * node.dimms->size_gb;
        c.require(std::abs(total - node.ram_gb) < 1e-9, path + ".ram_gb",
                  "does not equal dimm count x dimm size (" + std::to_string(total) + ")");
    }
    if (compute) c.require(!node.nic_ports.empty(), path + ".nic_ports", "compute node type needs NIC ports");
    for (std::size_t i = 0; i < node.nic_ports.size(); ++i) {
        const auto& p = node.nic_ports[i];
        c.require(p.count > 0, idx(path + ".nic_ports", i) + ".count", "must be > 0");
        c.require(spec.link_classes.count(p.link_class) > 0, idx(path + ".nic_ports", i) + ".link_class",
                  "unresolved link_class '" + p.link_class + "'");
    }
    for (std::size_t i = 0; i < node.gpus.size(); ++i) check_gpu(c, node.gpus[i], idx(path + ".gpus", i));
}

void check_allocations(Collector& c, const StorageSpec& storage, const std::string& path,
                       const std::map<std::string, std::uint32_t>& used) {
    for (const auto& [model, count] : used) {
        auto it = storage.appliances.find(model);
        if (it == storage.appliances.end()) {
            c.require(false, path, "unresolved appliance model '" + model + "'");
            continue;
        }
        c.require(count <= it->second.count, path + "." + model,
                  "allocates " + std::to_string(count) + " of " + std::to_string(it->second.count) + " appliances");
    }
}

void check_storage(Collector& c, const StorageSpec& storage) {
    for (const auto& [model, a] : storage.appliances) {
        const auto path = "storage.appliances." + model;
        c.require(a.count > 0, path + ".count", "must be > 0");
        c.require(a.drives.count > 0, path + ".drives.count", "must be > 0");
        c.require(a.drives.size_tb > 0, path + ".drives.size_tb", "must be > 0");
    }
    std::map<std::string, std::uint32_t> tier_use;
    for (const auto& [name, tier] : storage.tiers) {
        for (const auto& [model, count] : tier.appliances) tier_use[model] += count;
    }
    check_allocations(c, storage, "storage.tiers", tier_use);

    std::map<std::string, std::uint32_t> ns_use;
    for (std::size_t i = 0; i < storage.namespaces.size(); ++i) {
        const auto& ns = storage.namespaces[i];
        c.require(!ns.appliance_mix.empty(), idx("storage.namespaces", i) + ".appliance_mix", "must not be empty");
        c.require(ns.declared_net_size_pib >= 0, idx("storage.namespaces", i) + ".declared_net_size_pib",
                  "must be >= 0");
        c.require(ns.declared_bandwidth_gbs >= 0, idx("storage.namespaces", i) + ".declared_bandwidth_gbs",
                  "must be >= 0");
        for (const auto& [model, count] : ns.appliance_mix) ns_use[model] += count;
    }
    check_allocations(c, storage, "storage.namespaces", ns_use);
}

}  // namespace

std::vector<Violation> validate_spec(const MachineSpec& spec) {
    Collector c;

    c.require(!spec.cells.empty(), "cells", "at least one cell is required");
    std::set<int> ids;
    std::set<std::string> compute_types;
    for (std::size_t i = 0; i < spec.cells.size(); ++i) {
        const auto& cell = spec.cells[i];
        const auto path = idx("cells", i);
        c.require(ids.insert(cell.id).second, path + ".id", "duplicate cell id " + std::to_string(cell.id));
        c.require(cell.spines > 0, path + ".spines", "must be > 0");
        c.require(cell.leafs > 0, path + ".leafs", "must be > 0");
        if (cell.kind == CellKind::Hybrid) {
            c.require(cell.rack_groups.size() >= 2, path + ".rack_groups", "Hybrid cell needs at least 2 rack groups");
        }
        if (cell.kind == CellKind::IO) {
            c.require(cell.rack_groups.empty(), path + ".rack_groups", "IO cell must not hold compute rack groups");
        }
        for (std::size_t g = 0; g < cell.rack_groups.size(); ++g) {
            const auto& group = cell.rack_groups[g];
            const auto gpath = idx(path + ".rack_groups", g);
            c.require(group.racks > 0, gpath + ".racks", "must be > 0");
            c.require(group.blades_per_rack > 0, gpath + ".blades_per_rack", "must be > 0");
            c.require(group.nodes_per_blade > 0, gpath + ".nodes_per_blade", "must be > 0");
            c.require(spec.node_types.count(group.node_type) > 0, gpath + ".node_type",
                      "unresolved node_type '" + group.node_type + "'");
            compute_types.insert(group.node_type);
        }
        c.require(cell.leafs <= spec.fabric.spine_downlinks, path + ".leafs",
                  "more leafs than provisioned spine downlinks");
    }

    for (const auto& [name, node] : spec.node_types) {
        check_node(c, spec, node, "node_types." + name, compute_types.count(name) > 0);
    }
    for (const auto& [name, gpu] : spec.gpu_catalog) check_gpu(c, gpu, "gpu_catalog." + name);

    for (const auto& [name, sw] : spec.switch_types) {
        c.require(sw.radix_200g_ports > 0, "switch_types." + name + ".radix_200g_ports", "must be > 0");
        c.require(sw.port_to_port_ns > 0, "switch_types." + name + ".port_to_port_ns", "must be > 0");
    }
    for (const auto& [name, link] : spec.link_classes) {
        const auto path = "link_classes." + name;
        c.require(link.name == name, path + ".name", "must match its key");
        c.require(link.rate_gbps > 0, path + ".rate_gbps", "must be > 0");
        c.require(link.length_m >= 0, path + ".length_m", "must be >= 0");
        c.require(link.endpoint_latency_ns >= 0, path + ".endpoint_latency_ns", "must be >= 0");
    }

    const auto& f = spec.fabric;
    auto sw = spec.switch_types.find(f.switch_type);
    c.require(sw != spec.switch_types.end(), "fabric.switch_type", "unresolved switch_type '" + f.switch_type + "'");
    if (sw != spec.switch_types.end()) {
        c.require(f.spine_uplinks + f.spine_downlinks <= sw->second.radix_200g_ports, "fabric.spine_downlinks",
                  "spine port split exceeds switch radix");
    }
    for (const auto* name : {&f.leaf_spine_link_class, &f.global_link_class, &f.gateway_link_class,
                             &f.storage_hdr_link_class, &f.storage_hdr100_link_class}) {
        c.require(spec.link_classes.count(*name) > 0, "fabric", "unresolved link_class '" + *name + "'");
    }
    c.require(spec.gateways == 0 || f.gateway_ports > 0, "fabric.gateway_ports", "gateways need fabric ports");

    check_storage(c, spec.storage);

    c.require(spec.power.pue >= 1.0, "power.pue", "PUE must be >= 1.0");
    c.require(spec.power.dlc_capacity_mw >= 0, "power.dlc_capacity_mw", "must be >= 0");
    c.require(spec.power.it_load_mw >= 0, "power.it_load_mw", "must be >= 0");

    return c.take();
}

}  // namespace fabtwin
