#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fabtwin {

// Declarative machine description. Units are decimal throughout: network rates
// in Gbps, memory bandwidth in GB/s, capacities in GB/TB/PB. Namespace net
// sizes are kept in PiB exactly as declared and never converted.

enum class CellKind { Booster, DC, Hybrid, IO };

enum class NumericFormat { FP64, FP32, TF32, FP16, BF16, INT8, INT4 };

enum class DriveKind { NVMe, SAS_HDD };

std::string_view to_string(CellKind kind);
std::string_view to_string(NumericFormat format);
std::string_view to_string(DriveKind kind);
std::optional<CellKind> parse_cell_kind(std::string_view text);
std::optional<NumericFormat> parse_numeric_format(std::string_view text);
std::optional<DriveKind> parse_drive_kind(std::string_view text);

struct RackGroup {
    std::uint32_t racks = 0;
    std::uint32_t blades_per_rack = 0;
    std::uint32_t nodes_per_blade = 0;
    std::string node_type;

    std::uint64_t blades() const { return std::uint64_t{racks} * blades_per_rack; }
    std::uint64_t nodes() const { return blades() * nodes_per_blade; }

    bool operator==(const RackGroup&) const = default;
};

struct CellSpec {
    int id = 0;
    CellKind kind = CellKind::Booster;
    std::vector<RackGroup> rack_groups;
    std::uint32_t spines = 0;
    std::uint32_t leafs = 0;

    bool operator==(const CellSpec&) const = default;
};

struct CpuSpec {
    std::string model;
    std::uint32_t cores = 0;
    double clock_ghz = 0.0;
    std::uint32_t flops_per_cycle_per_core = 0;  // FP64
    std::uint32_t mem_channels = 0;
    double channel_bw_gbs = 0.0;

    bool operator==(const CpuSpec&) const = default;
};

// One cell of a device peak table. An entry with no value is an explicit
// "not available" (e.g. tensor math on Volta in the comparison table).
struct PeakEntry {
    NumericFormat format = NumericFormat::FP64;
    bool tensor = false;
    std::optional<double> value;  // teraFLOPS, or teraOPS for integer formats
    bool sparsity_doubling = false;

    bool operator==(const PeakEntry&) const = default;
};

struct PeakTable {
    std::vector<PeakEntry> entries;

    const PeakEntry* find(NumericFormat format, bool tensor) const;

    bool operator==(const PeakTable&) const = default;
};

struct GpuSpec {
    std::string model;
    std::uint32_t sm_count = 0;
    double max_clock_mhz = 0.0;
    double hbm_gb = 0.0;
    double hbm_bw_gbs = 0.0;
    double tdp_w = 0.0;
    PeakTable peaks;

    bool operator==(const GpuSpec&) const = default;
};

struct NicPorts {
    std::string link_class;
    std::uint32_t count = 0;

    bool operator==(const NicPorts&) const = default;
};

struct Dimms {
    std::uint32_t count = 0;
    double size_gb = 0.0;

    bool operator==(const Dimms&) const = default;
};

struct NodeSpec {
    CpuSpec cpu;
    std::vector<GpuSpec> gpus;
    double ram_gb = 0.0;
    double ram_bw_gbs = 0.0;
    std::vector<NicPorts> nic_ports;
    double pcie_per_gpu_gbs = 0.0;
    double nvlink_pair_gbs = 0.0;
    std::optional<Dimms> dimms;

    bool has_gpus() const { return !gpus.empty(); }
    std::uint32_t port_count() const;

    bool operator==(const NodeSpec&) const = default;
};

struct SwitchSpec {
    std::string model;
    std::uint32_t radix_200g_ports = 0;
    double port_to_port_ns = 0.0;
    bool split_mode_supported = false;

    bool operator==(const SwitchSpec&) const = default;
};

struct LinkClass {
    std::string name;
    std::uint32_t rate_gbps = 0;
    double endpoint_latency_ns = 0.0;  // NIC cost when the link terminates at a node
    double length_m = 0.0;

    bool operator==(const LinkClass&) const = default;
};

// Which switch model and link class each hop role of the fabric uses, and the
// fixed spine port split (global uplinks vs provisioned downlinks).
struct FabricSpec {
    std::string switch_type;
    std::string leaf_spine_link_class;
    std::string global_link_class;
    std::string gateway_link_class;
    std::string storage_hdr_link_class;
    std::string storage_hdr100_link_class;
    std::uint32_t spine_uplinks = 0;
    std::uint32_t spine_downlinks = 0;
    std::uint32_t gateway_ports = 0;

    bool operator==(const FabricSpec&) const = default;
};

struct DriveSet {
    std::uint32_t count = 0;
    double size_tb = 0.0;
    DriveKind kind = DriveKind::NVMe;

    bool operator==(const DriveSet&) const = default;
};

struct ApplianceSpec {
    std::uint32_t count = 0;
    DriveSet drives;
    std::uint32_t hdr_ports = 0;
    std::uint32_t hdr100_ports = 0;
    std::optional<double> declared_module_tb;

    bool operator==(const ApplianceSpec&) const = default;
};

struct TierSpec {
    std::map<std::string, std::uint32_t> appliances;
    std::optional<double> declared_raw_pb;

    bool operator==(const TierSpec&) const = default;
};

struct NamespaceSpec {
    std::string path;
    std::map<std::string, std::uint32_t> appliance_mix;
    double declared_net_size_pib = 0.0;
    double declared_bandwidth_gbs = 0.0;

    bool operator==(const NamespaceSpec&) const = default;
};

struct StorageSpec {
    std::map<std::string, ApplianceSpec> appliances;
    std::map<std::string, TierSpec> tiers;
    std::vector<NamespaceSpec> namespaces;

    bool operator==(const StorageSpec&) const = default;
};

struct PowerSpec {
    double pue = 1.0;
    double dlc_capacity_mw = 0.0;
    double it_load_mw = 0.0;

    bool operator==(const PowerSpec&) const = default;
};

// A documented disagreement between sources for a dataset value.
struct Note {
    std::string field;
    std::string text;

    bool operator==(const Note&) const = default;
};

struct MachineSpec {
    std::string name;
    std::vector<CellSpec> cells;
    std::map<std::string, NodeSpec> node_types;
    std::map<std::string, SwitchSpec> switch_types;
    std::map<std::string, LinkClass> link_classes;
    FabricSpec fabric;
    StorageSpec storage;
    PowerSpec power;
    std::uint32_t gateways = 0;
    std::map<std::string, GpuSpec> gpu_catalog;
    std::map<std::string, double> reference;  // published figures for cross-checks
    std::vector<Note> notes;

    const CellSpec* find_cell(int id) const;
    const NodeSpec& node_type(const std::string& name) const;
    const LinkClass& link_class(const std::string& name) const;
    const SwitchSpec& fabric_switch() const;
    std::optional<double> reference_value(const std::string& key) const;

    bool operator==(const MachineSpec&) const = default;
};

struct Census {
    std::uint64_t gpu_nodes = 0;
    std::uint64_t cpu_nodes = 0;
    std::uint64_t racks = 0;
    std::uint64_t blades = 0;

    std::uint64_t total_nodes() const { return gpu_nodes + cpu_nodes; }
    Census& operator+=(const Census& other);

    bool operator==(const Census&) const = default;
};

// Nodes are classified as GPU nodes when their node type carries any GPU.
Census node_census(const MachineSpec& spec);
Census cell_census(const MachineSpec& spec, const CellSpec& cell);

}  // namespace fabtwin
