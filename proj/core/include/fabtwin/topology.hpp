#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fabtwin/machine_spec.hpp"

namespace fabtwin {

enum class Tier { Leaf, Spine, Gateway };
enum class TerminalKind { Compute, Storage };

std::string_view to_string(Tier tier);

// Vertices share one id space: switches occupy [0, switches.size()), endpoint
// ports follow at switches.size() + endpoint index.
using VertexId = std::uint32_t;

// A machine attached to the fabric: a compute node or one storage appliance.
// Compute nodes are numbered first, in cell order then rack-group order.
struct Terminal {
    std::uint32_t node_id = 0;
    TerminalKind kind = TerminalKind::Compute;
    int cell_id = 0;
    std::string type;  // node_type name, or appliance model
    std::uint32_t local_index = 0;  // index within its rack group / appliance model

    bool operator==(const Terminal&) const = default;
};

struct Endpoint {
    std::uint32_t node_id = 0;
    std::uint32_t port_index = 0;
    std::string link_class;

    bool operator==(const Endpoint&) const = default;
};

struct Switch {
    std::uint32_t id = 0;
    Tier tier = Tier::Leaf;
    int cell_id = 0;
    std::uint32_t index_in_cell = 0;
    std::uint32_t radix = 0;           // physical 200G ports
    std::uint32_t half_ports_used = 0; // an HDR100 split link takes one half

    double ports_used() const { return half_ports_used / 2.0; }

    bool operator==(const Switch&) const = default;
};

struct Edge {
    VertexId a = 0;  // a < b
    VertexId b = 0;
    std::string link_class;
    double length_m = 0.0;
    std::uint32_t rate_gbps = 0;

    bool operator==(const Edge&) const = default;
};

struct Adjacency {
    VertexId to = 0;
    std::uint32_t edge = 0;
};

struct SpinePortSplit {
    std::uint32_t uplinks = 0;
    std::uint32_t downlinks = 0;

    bool operator==(const SpinePortSplit&) const = default;
};

class FabricGraph {
  public:
    FabricGraph() = default;
    FabricGraph(std::vector<Terminal> terminals, std::vector<Endpoint> endpoints, std::vector<Switch> switches,
                std::vector<Edge> edges, std::vector<int> cell_ids, SpinePortSplit spine_split);

    const std::vector<Terminal>& terminals() const { return terminals_; }
    const std::vector<Endpoint>& endpoints() const { return endpoints_; }
    const std::vector<Switch>& switches() const { return switches_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& cell_ids() const { return cell_ids_; }
    SpinePortSplit spine_split() const { return spine_split_; }

    std::size_t vertex_count() const { return switches_.size() + endpoints_.size(); }
    bool is_switch(VertexId v) const { return v < switches_.size(); }
    VertexId endpoint_vertex(std::size_t endpoint_index) const {
        return static_cast<VertexId>(switches_.size() + endpoint_index);
    }
    const Endpoint& endpoint_at(VertexId v) const { return endpoints_[v - switches_.size()]; }

    std::span<const Adjacency> neighbors(VertexId v) const;
    // Endpoint indices belonging to a terminal, in port order.
    std::span<const std::uint32_t> ports_of(std::uint32_t node_id) const;
    // Sorted, de-duplicated leaf switch ids a terminal is cabled to.
    std::vector<std::uint32_t> attached_leafs(std::uint32_t node_id) const;

    std::vector<std::uint32_t> switches_in(int cell_id, Tier tier) const;
    bool has_cell(int cell_id) const;
    std::size_t compute_count() const { return compute_count_; }

    std::string vertex_name(VertexId v) const;

    bool operator==(const FabricGraph& other) const {
        return terminals_ == other.terminals_ && endpoints_ == other.endpoints_ && switches_ == other.switches_ &&
               edges_ == other.edges_ && cell_ids_ == other.cell_ids_ && spine_split_ == other.spine_split_;
    }

  private:
    std::vector<Terminal> terminals_;
    std::vector<Endpoint> endpoints_;
    std::vector<Switch> switches_;
    std::vector<Edge> edges_;
    std::vector<int> cell_ids_;
    SpinePortSplit spine_split_;
    std::size_t compute_count_ = 0;

    std::vector<std::uint32_t> adjacency_offsets_;
    std::vector<Adjacency> adjacency_;
    std::vector<std::uint32_t> port_offsets_;
    std::vector<std::uint32_t> port_list_;
};

// Expands a spec into its dragonfly+ fabric. Within a cell every leaf is
// cabled once to every spine; spines carry the configured number of global
// uplinks, dealt so each unordered cell pair gets an equal share; compute
// nodes, storage appliances and gateways attach by fixed, deterministic rules.
// Throws Errc::port_budget when a switch exceeds its radix and
// Errc::uneven_global_links when equal shares are impossible.
FabricGraph build_topology(const MachineSpec& spec);

struct SwitchCensus {
    std::uint64_t spines = 0;
    std::uint64_t leafs = 0;
    std::uint64_t gateways = 0;
    std::uint64_t fabric_total = 0;
    std::uint64_t grand_total = 0;

    bool operator==(const SwitchCensus&) const = default;
};

SwitchCensus switch_census(const FabricGraph& graph);

struct LeafPorts {
    std::uint32_t switch_id = 0;
    std::uint32_t downlinks_100g = 0;
    std::uint32_t downlinks_200g = 0;
    std::uint32_t uplinks_100g = 0;
    std::uint32_t uplinks_200g = 0;

    bool operator==(const LeafPorts&) const = default;
};

std::vector<LeafPorts> leaf_downlink_census(const FabricGraph& graph, int cell_id);

// Global (spine-to-spine, inter-cell) link count per unordered cell pair,
// keyed by (smaller cell id, larger cell id).
std::map<std::pair<int, int>, std::uint32_t> global_link_counts(const FabricGraph& graph);

// Structural self-checks: edge endpoints exist, no self edges, radix respected,
// compute terminals mutually reachable. Empty result means healthy.
std::vector<std::string> check_graph_invariants(const FabricGraph& graph);

// One line per edge: `a b rate_gbps length_m class`, canonical order.
std::string export_edge_list(const FabricGraph& graph);
std::string export_graph_json(const FabricGraph& graph);

}  // namespace fabtwin
