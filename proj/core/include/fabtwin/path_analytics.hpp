#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fabtwin/machine_spec.hpp"
#include "fabtwin/topology.hpp"

namespace fabtwin {

// Component delays used to price a path. Defaults are the HDR fabric figures:
// 600 ns per terminating NIC, 90 ns per switch traversal, light in fiber at
// 5 ns/m, and 1 m / 5 m / 20 m cables for node-leaf / leaf-spine / spine-spine.
struct LatencyModel {
    double nic_ns = 600.0;
    double switch_ns = 90.0;
    double fiber_ns_per_m = 5.0;
    double endpoint_leaf_m = 1.0;
    double leaf_spine_m = 5.0;
    double spine_spine_m = 20.0;

    // Constants taken from the compute NIC link class, fabric switch
    // and hop-role link classes; the fiber constant keeps its default.
    static LatencyModel from_spec(const MachineSpec& spec);

    // Latency of the canonical compute-to-compute path with this many
    // switches (1: leaf, 3: leaf-spine-leaf, 4: leaf-spine-spine-leaf).
    double nominal_latency_ns(std::uint32_t switch_count) const;

    bool operator==(const LatencyModel&) const = default;
};

struct Path {
    std::uint32_t source = 0;
    std::uint32_t target = 0;
    std::vector<std::uint32_t> hops;   // switch ids, source side first
    std::vector<std::uint32_t> edges;  // edge indices, hops.size() + 1 of them
    double total_length_m = 0.0;
    std::uint32_t switch_count = 0;

    bool operator==(const Path&) const = default;
};

// Minimum-switch-count route between two terminals; ties go to the shortest
// total cable length, then to the lexicographically lowest switch sequence.
Path route(const FabricGraph& graph, std::uint32_t source, std::uint32_t target);

// 2 x NIC + switches x switch delay + fiber x cable length.
double path_latency(const Path& path, const LatencyModel& model);

enum class SearchMode { Auto, Exhaustive, Representative };

struct WorstCase {
    double latency_ns = 0.0;
    std::uint32_t source = 0;
    std::uint32_t target = 0;
    std::uint32_t switch_count = 0;
    bool exhaustive = false;
};

// Largest compute-to-compute latency. Representative mode prices one node per
// leaf-attachment class; Auto switches to all pairs at 64 compute nodes or
// fewer. A graph with fewer than two compute nodes yields 0.
WorstCase worst_case_latency(const FabricGraph& graph, const LatencyModel& model,
                             SearchMode mode = SearchMode::Auto);

// Exact rational; `display` rounds for presentation only.
struct Ratio {
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 1;

    static Ratio make(std::uint64_t numerator, std::uint64_t denominator);
    double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
    std::string display(int precision = 2) const;

    bool operator==(const Ratio&) const = default;
};

struct LeafRatio {
    std::uint32_t switch_id = 0;
    Ratio ratio;
};

struct Oversubscription {
    int cell_id = 0;
    std::vector<LeafRatio> per_leaf;
    std::optional<Ratio> common;  // set when every leaf has the same ratio
};

// Downlink over uplink bandwidth per leaf.
Oversubscription leaf_oversubscription(const FabricGraph& graph, int cell_id);

// Provisioned spine downlinks over global uplinks. Throws
// Errc::invalid_value when spines carry no uplinks.
Ratio spine_pruning(const FabricGraph& graph, int cell_id);

struct Bipartition {
    std::vector<std::uint32_t> side_a;
    std::vector<std::uint32_t> side_b;
};

Bipartition cell_split(const FabricGraph& graph, const std::set<int>& cells_on_a);
// First half of the cells (rounded down) against the rest.
Bipartition half_cells_split(const FabricGraph& graph);

// Bandwidth of the links crossing the given compute-node bipartition. Each
// cell's switches sit with the side holding most of its compute nodes; cells
// without compute nodes follow the overall majority. Throws
// Errc::invalid_argument unless the two sides exactly cover the compute nodes.
std::uint64_t bisection_bandwidth(const FabricGraph& graph, const Bipartition& partition);

// Maximum flow between two disjoint terminal sets with link rates as
// capacities; terminals outside both sets do not forward traffic.
std::uint64_t min_cut_gbps(const FabricGraph& graph, const std::vector<std::uint32_t>& side_a,
                           const std::vector<std::uint32_t>& side_b);

struct AllocationReport {
    std::vector<std::uint32_t> nodes;
    double max_pair_latency_ns = 0.0;
    std::uint32_t witness_source = 0;
    std::uint32_t witness_target = 0;
    std::uint64_t min_internal_bisection_gbps = 0;
    std::uint32_t cells_spanned = 0;
};

// Placement quality of a node set: worst pairwise latency, the min cut between
// the lower and upper halves of the sorted set, and how many cells it touches.
AllocationReport evaluate_allocation(const FabricGraph& graph, const std::vector<std::uint32_t>& nodes,
                                     const LatencyModel& model);

}  // namespace fabtwin
