#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "fabtwin/spec_io.hpp"

#ifndef FABTWIN_DATA_DIR
#error "FABTWIN_DATA_DIR must be defined"
#endif
#ifndef FABTWIN_GOLDEN_DIR
#error "FABTWIN_GOLDEN_DIR must be defined"
#endif

namespace fabtwin::testing {

std::filesystem::path data_dir() { return FABTWIN_DATA_DIR; }
std::filesystem::path golden_dir() { return FABTWIN_GOLDEN_DIR; }

MachineSpec load_data_spec(const std::string& file) { return load_spec(data_dir() / file); }

namespace {

// Switches a terminal's ports are cabled to, with the cable length.
std::vector<std::pair<std::uint32_t, double>> port_links(const FabricGraph& graph, std::uint32_t node) {
    std::vector<std::pair<std::uint32_t, double>> out;
    const auto first = graph.switches().size();
    for (std::size_t e = 0; e < graph.endpoints().size(); ++e) {
        if (graph.endpoints()[e].node_id != node) continue;
        const auto v = static_cast<std::uint32_t>(first + e);
        for (const auto& edge : graph.edges()) {
            if (edge.b == v) out.emplace_back(edge.a, edge.length_m);
            if (edge.a == v) out.emplace_back(edge.b, edge.length_m);
        }
    }
    return out;
}

bool better(const BrutePath& x, const BrutePath& y) {
    if (!y.found) return true;
    if (x.hops.size() != y.hops.size()) return x.hops.size() < y.hops.size();
    if (std::abs(x.length_m - y.length_m) > 1e-9) return x.length_m < y.length_m;
    return x.hops < y.hops;
}

}  // namespace

BrutePath brute_route(const FabricGraph& graph, std::uint32_t source, std::uint32_t target) {
    const auto n = graph.switches().size();
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
    for (const auto& e : graph.edges()) {
        if (e.a < n && e.b < n) {
            adj[e.a].emplace_back(e.b, e.length_m);
            adj[e.b].emplace_back(e.a, e.length_m);
        }
    }
    const auto entries = port_links(graph, source);
    const auto exits = port_links(graph, target);

    BrutePath best;
    BrutePath current;
    std::vector<bool> on_path(n, false);
    std::function<void(std::uint32_t, double)> walk = [&](std::uint32_t v, double length) {
        current.hops.push_back(v);
        on_path[v] = true;
        for (const auto& [sw, len] : exits) {
            if (sw != v) continue;
            BrutePath candidate{current.hops, length + len, true};
            if (better(candidate, best)) best = candidate;
        }
        // Longer than the best found cannot win.
        if (!best.found || current.hops.size() < best.hops.size()) {
            for (const auto& [next, len] : adj[v]) {
                if (!on_path[next]) walk(next, length + len);
            }
        }
        on_path[v] = false;
        current.hops.pop_back();
    };
    for (const auto& [sw, len] : entries) walk(sw, len);
    return best;
}

double brute_latency(const BrutePath& path, const LatencyModel& model) {
    return 2 * model.nic_ns + static_cast<double>(path.hops.size()) * model.switch_ns +
           model.fiber_ns_per_m * path.length_m;
}

double brute_worst_latency(const FabricGraph& graph, const LatencyModel& model) {
    std::vector<std::uint32_t> compute;
    for (const auto& t : graph.terminals()) {
        if (t.kind == TerminalKind::Compute) compute.push_back(t.node_id);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < compute.size(); ++i) {
        for (std::size_t j = i + 1; j < compute.size(); ++j) {
            worst = std::max(worst, brute_latency(brute_route(graph, compute[i], compute[j]), model));
        }
    }
    return worst;
}

std::uint64_t brute_cell_cut(const FabricGraph& graph, const std::set<int>& cells_on_a) {
    auto on_a = [&](VertexId v) {
        if (graph.is_switch(v)) return cells_on_a.count(graph.switches()[v].cell_id) > 0;
        const auto& t = graph.terminals()[graph.endpoint_at(v).node_id];
        return cells_on_a.count(t.cell_id) > 0;
    };
    std::uint64_t total = 0;
    for (const auto& e : graph.edges()) {
        if (on_a(e.a) != on_a(e.b)) total += e.rate_gbps;
    }
    return total;
}

std::uint64_t brute_min_cut(const FabricGraph& graph, const std::vector<std::uint32_t>& side_a,
                            const std::vector<std::uint32_t>& side_b) {
    const auto n = graph.switches().size();
    const std::set<std::uint32_t> a(side_a.begin(), side_a.end());
    const std::set<std::uint32_t> b(side_b.begin(), side_b.end());
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        // side of a vertex: 1 = A, 0 = B, -1 = excluded
        auto side = [&](VertexId v) -> int {
            if (graph.is_switch(v)) return (mask >> v) & 1;
            const auto node = graph.endpoint_at(v).node_id;
            if (a.count(node)) return 1;
            if (b.count(node)) return 0;
            return -1;
        };
        std::uint64_t cut = 0;
        for (const auto& e : graph.edges()) {
            const int sa = side(e.a);
            const int sb = side(e.b);
            if (sa >= 0 && sb >= 0 && sa != sb) cut += e.rate_gbps;
        }
        best = std::min(best, cut);
    }
    return best;
}

std::vector<std::uint32_t> recount_half_ports(const FabricGraph& graph, const MachineSpec& spec) {
    const bool split = spec.fabric_switch().split_mode_supported;
    std::vector<std::uint32_t> halves(graph.switches().size(), 0);
    for (const auto& e : graph.edges()) {
        const std::uint32_t cost = (split && e.rate_gbps <= 100) ? 1 : 2;
        if (graph.is_switch(e.a)) halves[e.a] += cost;
        if (graph.is_switch(e.b)) halves[e.b] += cost;
    }
    return halves;
}

MachineSpec random_spec(std::mt19937_64& rng) {
    auto pick = [&](std::uint32_t lo, std::uint32_t hi) {
        return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
    };
    auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    MachineSpec spec = load_data_spec("toy.json");
    spec.name = "random-" + std::to_string(pick(0, 1u << 30));
    const auto cells = pick(1, 4);
    const auto spines = pick(1, 4);
    const auto leafs = pick(2, 4);

    auto& node = spec.node_types.at("toy");
    node.cpu.clock_ghz = real(0.5, 4.0);
    node.ram_gb = real(1.0, 1024.0);
    node.nic_ports.front().count = pick(1, 2);
    node.gpus.front().hbm_bw_gbs = real(10.0, 4000.0);
    spec.node_types["fat"] = node;
    spec.node_types["fat"].nic_ports.front().count = 1;
    spec.node_types["fat"].gpus.clear();

    spec.cells.clear();
    for (std::uint32_t c = 0; c < cells; ++c) {
        CellSpec cell;
        cell.id = static_cast<int>(c);
        cell.spines = spines;
        cell.leafs = leafs;
        cell.rack_groups.push_back({1, pick(1, 3), pick(1, 3), "toy"});
        // A second group needs a leaf beyond the first group's pair.
        if (leafs >= 3 && pick(0, 1) == 1) {
            cell.kind = CellKind::Hybrid;
            cell.rack_groups.push_back({1, pick(1, 2), pick(1, 2), "fat"});
        }
        spec.cells.push_back(cell);
    }
    const auto uplinks = cells > 1 ? (cells - 1) * pick(1, 2) : 0;
    spec.fabric.spine_uplinks = uplinks;
    spec.fabric.spine_downlinks = leafs;
    spec.switch_types.at("toy-switch").radix_200g_ports = 64;
    spec.power.pue = real(1.0, 2.0);
    spec.power.it_load_mw = real(0.0, 20.0);
    spec.storage.namespaces.front().declared_bandwidth_gbs = real(0.0, 1e4);
    return spec;
}

MachineSpec first_cells(const MachineSpec& spec, std::size_t cells) {
    MachineSpec out = spec;
    out.cells.resize(cells);
    if (cells == 1) out.fabric.spine_uplinks = 0;
    return out;
}

}  // namespace fabtwin::testing
