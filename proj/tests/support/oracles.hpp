#pragma once

// Brute-force reference implementations and fixtures shared by the unit tests
// and the acceptance runner. Nothing here calls the routines it checks.

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fabtwin/machine_spec.hpp"
#include "fabtwin/path_analytics.hpp"
#include "fabtwin/topology.hpp"

namespace fabtwin::testing {

std::filesystem::path data_dir();
std::filesystem::path golden_dir();
MachineSpec load_data_spec(const std::string& file);

// Best route by exhaustive simple-path enumeration: fewest switches, then
// shortest cable, then lexicographically smallest switch sequence.
struct BrutePath {
    std::vector<std::uint32_t> hops;
    double length_m = 0.0;
    bool found = false;
};
BrutePath brute_route(const FabricGraph& graph, std::uint32_t source, std::uint32_t target);

double brute_latency(const BrutePath& path, const LatencyModel& model);

// Max over all compute pairs of brute_route latency.
double brute_worst_latency(const FabricGraph& graph, const LatencyModel& model);

// Sum of link rates whose two ends fall on different sides, each side
// decided from cell membership alone (switches and ports by cell).
std::uint64_t brute_cell_cut(const FabricGraph& graph, const std::set<int>& cells_on_a);

// Minimum over every assignment of switches to sides of the rate crossing
// between the two terminal sets. Exponential in switch count.
std::uint64_t brute_min_cut(const FabricGraph& graph, const std::vector<std::uint32_t>& side_a,
                            const std::vector<std::uint32_t>& side_b);

// Port accounting recomputed from edges: half-port units per switch.
std::vector<std::uint32_t> recount_half_ports(const FabricGraph& graph, const MachineSpec& spec);

// Small random spec that builds: 1-4 cells, mixed single/dual-port nodes.
MachineSpec random_spec(std::mt19937_64& rng);

// Copy of a spec reduced to its first `cells` cells, fabric uplinks cleared
// when a single cell remains.
MachineSpec first_cells(const MachineSpec& spec, std::size_t cells);

}  // namespace fabtwin::testing
