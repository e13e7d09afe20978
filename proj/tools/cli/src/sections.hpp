#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fabtwin/path_analytics.hpp"
#include "fabtwin/perf_model.hpp"
#include "fabtwin/topology.hpp"
#include "report.hpp"

namespace fabtwin::cli {

using Warnings = std::vector<std::string>;

Section census_section(const MachineSpec& spec);
Section topology_section(const MachineSpec& spec, const FabricGraph& graph, Warnings& warnings);
Section leaf_ports_section(const FabricGraph& graph, int cell_id);
Section oversubscription_section(const MachineSpec& spec, const FabricGraph& graph, std::optional<int> cell_id);
Section route_section(const FabricGraph& graph, const LatencyModel& model, std::uint32_t from, std::uint32_t to);
Section worst_latency_section(const MachineSpec& spec, const FabricGraph& graph, Warnings& warnings);
Section bisection_section(const FabricGraph& graph, const std::vector<int>& cells_on_a);

struct PeakQuery {
    NumericFormat format = NumericFormat::FP64;
    bool tensor = false;
    bool sparse = false;
    std::string scope = "machine";  // gpu, node, machine
    std::string node_type;          // empty: first GPU node type
    std::string gpu;                // gpu_catalog key; empty: the node type's first GPU
    bool include_cpu = false;
};

Section peak_section(const MachineSpec& spec, const PeakQuery& query, Warnings& warnings);
Section machine_peaks_section(const MachineSpec& spec, Warnings& warnings);
Section roofline_section(const MachineSpec& spec, const std::string& node_type, double intensity);
Section scaling_section(const ScalingSeries& series, std::optional<std::uint32_t> baseline, Warnings& warnings);
Section energy_section(const MachineSpec& spec, const BenchmarkSet* benchmarks, Warnings& warnings);
Section storage_section(const MachineSpec& spec, Warnings& warnings);

std::string gpu_node_type(const MachineSpec& spec);

}  // namespace fabtwin::cli
