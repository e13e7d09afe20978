#include "fabtwin/path_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <tuple>

#include "fabtwin/error.hpp"
#include "max_flow.hpp"

namespace fabtwin {

namespace {

constexpr double kLengthEps = 1e-9;
constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

struct Cost {
    std::uint32_t switches = kUnreached;
    double length = 0.0;

    bool reached() const { return switches != kUnreached; }
};

// -1 / 0 / +1 ordering on (switches, length) with a tolerance on length.
int compare(const Cost& x, const Cost& y) {
    if (x.switches != y.switches) return x.switches < y.switches ? -1 : 1;
    if (std::abs(x.length - y.length) <= kLengthEps) return 0;
    return x.length < y.length ? -1 : 1;
}

// Cost of reaching `target` from every switch: switch count includes the
// starting switch, length includes the target's own port cable.
std::vector<Cost> costs_to(const FabricGraph& graph, std::uint32_t target) {
    std::vector<Cost> dist(graph.switches().size());
    using Item = std::tuple<std::uint32_t, double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (auto port : graph.ports_of(target)) {
        for (const auto& adj : graph.neighbors(graph.endpoint_vertex(port))) {
            const Cost c{1, graph.edges()[adj.edge].length_m};
            if (!dist[adj.to].reached() || compare(c, dist[adj.to]) < 0) {
                dist[adj.to] = c;
                queue.emplace(c.switches, c.length, adj.to);
            }
        }
    }
    while (!queue.empty()) {
        auto [switches, length, v] = queue.top();
        queue.pop();
        if (compare({switches, length}, dist[v]) > 0) continue;
        for (const auto& adj : graph.neighbors(v)) {
            if (!graph.is_switch(adj.to)) continue;
            const Cost c{switches + 1, length + graph.edges()[adj.edge].length_m};
            if (!dist[adj.to].reached() || compare(c, dist[adj.to]) < 0) {
                dist[adj.to] = c;
                queue.emplace(c.switches, c.length, adj.to);
            }
        }
    }
    return dist;
}

struct Entry {
    Cost cost;
    std::uint32_t leaf = 0;
    std::uint32_t edge = 0;
};

// Best first hop out of `source` given costs toward the target.
std::optional<Entry> best_entry(const FabricGraph& graph, const std::vector<Cost>& dist, std::uint32_t source) {
    std::optional<Entry> best;
    for (auto port : graph.ports_of(source)) {
        for (const auto& adj : graph.neighbors(graph.endpoint_vertex(port))) {
            if (!dist[adj.to].reached()) continue;
            const Entry e{{dist[adj.to].switches, dist[adj.to].length + graph.edges()[adj.edge].length_m}, adj.to,
                          adj.edge};
            if (!best) {
                best = e;
                continue;
            }
            const int cmp = compare(e.cost, best->cost);
            if (cmp < 0 || (cmp == 0 && std::tie(e.leaf, e.edge) < std::tie(best->leaf, best->edge))) best = e;
        }
    }
    return best;
}

double latency_of(const Cost& cost, const LatencyModel& model) {
    return 2.0 * model.nic_ns + cost.switches * model.switch_ns + model.fiber_ns_per_m * cost.length;
}

void require_terminal(const FabricGraph& graph, std::uint32_t node) {
    if (node >= graph.terminals().size()) throw Error(Errc::unknown_node, "unknown node id " + std::to_string(node));
}

std::vector<std::uint32_t> compute_nodes(const FabricGraph& graph) {
    std::vector<std::uint32_t> out;
    for (const auto& t : graph.terminals()) {
        if (t.kind == TerminalKind::Compute) out.push_back(t.node_id);
    }
    return out;
}

// Compute nodes grouped by the exact set of leafs they are cabled to.
std::vector<std::vector<std::uint32_t>> attachment_classes(const FabricGraph& graph,
                                                            const std::vector<std::uint32_t>& nodes) {
    std::map<std::vector<std::uint32_t>, std::vector<std::uint32_t>> classes;
    for (auto n : nodes) classes[graph.attached_leafs(n)].push_back(n);
    std::vector<std::vector<std::uint32_t>> out;
    for (auto& [leafs, members] : classes) out.push_back(std::move(members));
    return out;
}

WorstCase worst_over_classes(const FabricGraph& graph, const LatencyModel& model,
                             const std::vector<std::vector<std::uint32_t>>& classes) {
    WorstCase worst;
    bool found = false;
    for (std::size_t j = 0; j < classes.size(); ++j) {
        const auto target = classes[j].front();
        const auto dist = costs_to(graph, target);
        for (std::size_t i = 0; i <= j; ++i) {
            std::uint32_t source = classes[i].front();
            if (i == j) {
                if (classes[j].size() < 2) continue;
                source = classes[j][1];
            }
            const auto entry = best_entry(graph, dist, source);
            if (!entry) {
                throw Error(Errc::disconnected, "nodes " + std::to_string(source) + " and " +
                                                    std::to_string(target) + " are disconnected");
            }
            const double latency = latency_of(entry->cost, model);
            if (!found || latency > worst.latency_ns + kLengthEps) {
                found = true;
                worst = {latency, std::min(source, target), std::max(source, target), entry->cost.switches, false};
            }
        }
    }
    return worst;
}

}  // namespace

LatencyModel LatencyModel::from_spec(const MachineSpec& spec) {
    LatencyModel model;
    model.switch_ns = spec.fabric_switch().port_to_port_ns;
    for (const auto& cell : spec.cells) {
        for (const auto& group : cell.rack_groups) {
            const auto& node = spec.node_type(group.node_type);
            if (node.nic_ports.empty()) continue;
            const auto& link = spec.link_class(node.nic_ports.front().link_class);
            model.nic_ns = link.endpoint_latency_ns;
            model.endpoint_leaf_m = link.length_m;
            goto found_nic;
        }
    }
found_nic:
    model.leaf_spine_m = spec.link_class(spec.fabric.leaf_spine_link_class).length_m;
    model.spine_spine_m = spec.link_class(spec.fabric.global_link_class).length_m;
    return model;
}

double LatencyModel::nominal_latency_ns(std::uint32_t switch_count) const {
    double length = 2 * endpoint_leaf_m;
    if (switch_count >= 3) length += 2 * leaf_spine_m;
    if (switch_count >= 4) length += spine_spine_m * (switch_count - 3);
    return 2 * nic_ns + switch_count * switch_ns + fiber_ns_per_m * length;
}

Path route(const FabricGraph& graph, std::uint32_t source, std::uint32_t target) {
    require_terminal(graph, source);
    require_terminal(graph, target);
    if (source == target) throw Error(Errc::invalid_argument, "route endpoints must differ");

    const auto dist = costs_to(graph, target);
    const auto entry = best_entry(graph, dist, source);
    if (!entry) {
        throw Error(Errc::disconnected,
                    "nodes " + std::to_string(source) + " and " + std::to_string(target) + " are disconnected");
    }

    const auto& edges = graph.edges();
    Path path;
    path.source = source;
    path.target = target;
    path.hops.push_back(entry->leaf);
    path.edges.push_back(entry->edge);
    auto current = entry->leaf;
    while (dist[current].switches > 1) {
        std::optional<Adjacency> next;
        for (const auto& adj : graph.neighbors(current)) {
            if (!graph.is_switch(adj.to) || !dist[adj.to].reached()) continue;
            const Cost via{dist[adj.to].switches + 1, dist[adj.to].length + edges[adj.edge].length_m};
            if (compare(via, dist[current]) != 0) continue;
            if (!next || std::tie(adj.to, adj.edge) < std::tie(next->to, next->edge)) next = adj;
        }
        path.hops.push_back(next->to);
        path.edges.push_back(next->edge);
        current = next->to;
    }
    std::optional<std::uint32_t> last;
    for (auto port : graph.ports_of(target)) {
        for (const auto& adj : graph.neighbors(graph.endpoint_vertex(port))) {
            if (adj.to != current || std::abs(edges[adj.edge].length_m - dist[current].length) > kLengthEps) continue;
            if (!last || adj.edge < *last) last = adj.edge;
        }
    }
    path.edges.push_back(*last);

    path.switch_count = static_cast<std::uint32_t>(path.hops.size());
    for (auto e : path.edges) path.total_length_m += edges[e].length_m;
    return path;
}

double path_latency(const Path& path, const LatencyModel& model) {
    return 2.0 * model.nic_ns + path.switch_count * model.switch_ns + model.fiber_ns_per_m * path.total_length_m;
}

WorstCase worst_case_latency(const FabricGraph& graph, const LatencyModel& model, SearchMode mode) {
    const auto nodes = compute_nodes(graph);
    if (nodes.size() < 2) return {};
    const bool exhaustive =
        mode == SearchMode::Exhaustive || (mode == SearchMode::Auto && nodes.size() <= 64);
    if (!exhaustive) return worst_over_classes(graph, model, attachment_classes(graph, nodes));

    WorstCase worst;
    worst.exhaustive = true;
    bool found = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const auto path = route(graph, nodes[i], nodes[j]);
            const double latency = path_latency(path, model);
            if (!found || latency > worst.latency_ns + kLengthEps) {
                found = true;
                worst.latency_ns = latency;
                worst.source = nodes[i];
                worst.target = nodes[j];
                worst.switch_count = path.switch_count;
            }
        }
    }
    return worst;
}

Ratio Ratio::make(std::uint64_t numerator, std::uint64_t denominator) {
    if (denominator == 0) throw Error(Errc::invalid_value, "ratio with zero denominator");
    const auto g = std::gcd(numerator, denominator);
    return {numerator / g, denominator / g};
}

std::string Ratio::display(int precision) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value());
    return buf;
}

Oversubscription leaf_oversubscription(const FabricGraph& graph, int cell_id) {
    if (!graph.has_cell(cell_id)) throw Error(Errc::unknown_cell, "unknown cell " + std::to_string(cell_id));
    Oversubscription out;
    out.cell_id = cell_id;
    bool uniform = true;
    for (auto leaf : graph.switches_in(cell_id, Tier::Leaf)) {
        std::uint64_t down = 0;
        std::uint64_t up = 0;
        for (const auto& adj : graph.neighbors(leaf)) {
            (graph.is_switch(adj.to) ? up : down) += graph.edges()[adj.edge].rate_gbps;
        }
        if (up == 0) throw Error(Errc::invalid_value, graph.vertex_name(leaf) + " has no uplinks");
        const auto ratio = Ratio::make(down, up);
        if (!out.per_leaf.empty() && !(ratio == out.per_leaf.front().ratio)) uniform = false;
        out.per_leaf.push_back({leaf, ratio});
    }
    if (uniform && !out.per_leaf.empty()) out.common = out.per_leaf.front().ratio;
    return out;
}

Ratio spine_pruning(const FabricGraph& graph, int cell_id) {
    if (!graph.has_cell(cell_id)) throw Error(Errc::unknown_cell, "unknown cell " + std::to_string(cell_id));
    if (graph.switches_in(cell_id, Tier::Spine).empty()) {
        throw Error(Errc::invalid_value, "cell " + std::to_string(cell_id) + " has no spines");
    }
    const auto split = graph.spine_split();
    if (split.uplinks == 0) {
        throw Error(Errc::invalid_value, "cell " + std::to_string(cell_id) + ": spines have zero uplinks");
    }
    return Ratio::make(split.downlinks, split.uplinks);
}

Bipartition cell_split(const FabricGraph& graph, const std::set<int>& cells_on_a) {
    Bipartition p;
    for (const auto& t : graph.terminals()) {
        if (t.kind != TerminalKind::Compute) continue;
        (cells_on_a.count(t.cell_id) ? p.side_a : p.side_b).push_back(t.node_id);
    }
    return p;
}

Bipartition half_cells_split(const FabricGraph& graph) {
    const auto& cells = graph.cell_ids();
    return cell_split(graph, std::set<int>(cells.begin(), cells.begin() + cells.size() / 2));
}

std::uint64_t bisection_bandwidth(const FabricGraph& graph, const Bipartition& partition) {
    const auto& terminals = graph.terminals();
    enum Side : char { Unset, A, B };
    std::vector<Side> node_side(terminals.size(), Unset);
    auto assign = [&](const std::vector<std::uint32_t>& ids, Side side) {
        for (auto id : ids) {
            if (id >= terminals.size() || terminals[id].kind != TerminalKind::Compute) {
                throw Error(Errc::invalid_argument, "partition names non-compute node " + std::to_string(id));
            }
            if (node_side[id] != Unset) {
                throw Error(Errc::invalid_argument, "partition is not a cover: node " + std::to_string(id) +
                                                        " appears twice");
            }
            node_side[id] = side;
        }
    };
    assign(partition.side_a, A);
    assign(partition.side_b, B);

    std::map<int, std::pair<std::size_t, std::size_t>> per_cell;  // (on A, on B)
    std::size_t total_a = 0;
    std::size_t total_b = 0;
    for (const auto& t : terminals) {
        if (t.kind != TerminalKind::Compute) continue;
        if (node_side[t.node_id] == Unset) {
            throw Error(Errc::invalid_argument, "partition is not a cover: node " + std::to_string(t.node_id) +
                                                    " is on neither side");
        }
        auto& counts = per_cell[t.cell_id];
        if (node_side[t.node_id] == A) {
            ++counts.first;
            ++total_a;
        } else {
            ++counts.second;
            ++total_b;
        }
    }
    auto cell_side = [&](int cell) {
        auto it = per_cell.find(cell);
        if (it == per_cell.end()) return total_a > total_b ? A : B;
        return it->second.first >= it->second.second ? A : B;
    };

    std::vector<Side> vertex_side(graph.vertex_count());
    for (const auto& s : graph.switches()) vertex_side[s.id] = cell_side(s.cell_id);
    for (std::size_t e = 0; e < graph.endpoints().size(); ++e) {
        const auto& t = terminals[graph.endpoints()[e].node_id];
        vertex_side[graph.endpoint_vertex(e)] =
            t.kind == TerminalKind::Compute ? node_side[t.node_id] : cell_side(t.cell_id);
    }

    std::uint64_t crossing = 0;
    for (const auto& e : graph.edges()) {
        if (vertex_side[e.a] != vertex_side[e.b]) crossing += e.rate_gbps;
    }
    return crossing;
}

std::uint64_t min_cut_gbps(const FabricGraph& graph, const std::vector<std::uint32_t>& side_a,
                           const std::vector<std::uint32_t>& side_b) {
    const auto switch_count = static_cast<std::uint32_t>(graph.switches().size());
    std::map<std::uint32_t, std::uint32_t> terminal_vertex;
    auto vertex_of = [&](std::uint32_t node) {
        require_terminal(graph, node);
        auto [it, inserted] =
            terminal_vertex.emplace(node, switch_count + static_cast<std::uint32_t>(terminal_vertex.size()));
        if (!inserted) throw Error(Errc::invalid_argument, "node " + std::to_string(node) + " listed twice");
        return it->second;
    };
    std::vector<std::pair<std::uint32_t, bool>> members;
    for (auto n : side_a) members.emplace_back(vertex_of(n), true);
    for (auto n : side_b) members.emplace_back(vertex_of(n), false);

    const auto source = switch_count + static_cast<std::uint32_t>(terminal_vertex.size());
    const auto sink = source + 1;
    detail::MaxFlow flow(sink + 1);
    for (const auto& e : graph.edges()) {
        if (graph.is_switch(e.a) && graph.is_switch(e.b)) flow.add_undirected(e.a, e.b, e.rate_gbps);
    }
    for (const auto& [node, vertex] : terminal_vertex) {
        for (auto port : graph.ports_of(node)) {
            for (const auto& adj : graph.neighbors(graph.endpoint_vertex(port))) {
                flow.add_undirected(vertex, adj.to, graph.edges()[adj.edge].rate_gbps);
            }
        }
    }
    for (const auto& [vertex, on_a] : members) {
        if (on_a) {
            flow.add_directed(source, vertex, detail::MaxFlow::kInfinite);
        } else {
            flow.add_directed(vertex, sink, detail::MaxFlow::kInfinite);
        }
    }
    return flow.run(source, sink);
}

AllocationReport evaluate_allocation(const FabricGraph& graph, const std::vector<std::uint32_t>& nodes,
                                     const LatencyModel& model) {
    if (nodes.size() < 2) throw Error(Errc::invalid_argument, "allocation needs at least two nodes");
    AllocationReport report;
    report.nodes = nodes;
    std::sort(report.nodes.begin(), report.nodes.end());
    if (std::adjacent_find(report.nodes.begin(), report.nodes.end()) != report.nodes.end()) {
        throw Error(Errc::invalid_argument, "allocation lists a node more than once");
    }
    std::set<int> cells;
    for (auto n : report.nodes) {
        if (n >= graph.terminals().size() || graph.terminals()[n].kind != TerminalKind::Compute) {
            throw Error(Errc::unknown_node, "unknown compute node " + std::to_string(n));
        }
        cells.insert(graph.terminals()[n].cell_id);
    }
    report.cells_spanned = static_cast<std::uint32_t>(cells.size());

    const auto worst = worst_over_classes(graph, model, attachment_classes(graph, report.nodes));
    report.max_pair_latency_ns = worst.latency_ns;
    report.witness_source = worst.source;
    report.witness_target = worst.target;

    const auto half = report.nodes.begin() + static_cast<std::ptrdiff_t>(report.nodes.size() / 2);
    report.min_internal_bisection_gbps =
        min_cut_gbps(graph, {report.nodes.begin(), half}, {half, report.nodes.end()});
    return report;
}

}  // namespace fabtwin
