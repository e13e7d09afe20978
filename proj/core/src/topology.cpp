#include "fabtwin/topology.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <tuple>

#include "json.hpp"

#include "fabtwin/error.hpp"

namespace fabtwin {

std::string_view to_string(Tier tier) {
    switch (tier) {
        case Tier::Leaf: return "Leaf";
        case Tier::Spine: return "Spine";
        case Tier::Gateway: return "Gateway";
    }
    return "?";
}

FabricGraph::FabricGraph(std::vector<Terminal> terminals, std::vector<Endpoint> endpoints,
                         std::vector<Switch> switches, std::vector<Edge> edges, std::vector<int> cell_ids,
                         SpinePortSplit spine_split)
    : terminals_(std::move(terminals)),
      endpoints_(std::move(endpoints)),
      switches_(std::move(switches)),
      edges_(std::move(edges)),
      cell_ids_(std::move(cell_ids)),
      spine_split_(spine_split) {
    compute_count_ = static_cast<std::size_t>(std::count_if(
        terminals_.begin(), terminals_.end(), [](const Terminal& t) { return t.kind == TerminalKind::Compute; }));

    // CSR adjacency, neighbours in edge order.
    const auto n = vertex_count();
    adjacency_offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
        ++adjacency_offsets_[e.a + 1];
        ++adjacency_offsets_[e.b + 1];
    }
    for (std::size_t v = 0; v < n; ++v) adjacency_offsets_[v + 1] += adjacency_offsets_[v];
    adjacency_.resize(adjacency_offsets_[n]);
    auto cursor = adjacency_offsets_;
    for (std::uint32_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        adjacency_[cursor[e.a]++] = {e.b, i};
        adjacency_[cursor[e.b]++] = {e.a, i};
    }

    port_offsets_.assign(terminals_.size() + 1, 0);
    for (const auto& ep : endpoints_) ++port_offsets_[ep.node_id + 1];
    for (std::size_t t = 0; t < terminals_.size(); ++t) port_offsets_[t + 1] += port_offsets_[t];
    port_list_.resize(endpoints_.size());
    auto port_cursor = port_offsets_;
    for (std::uint32_t i = 0; i < endpoints_.size(); ++i) port_list_[port_cursor[endpoints_[i].node_id]++] = i;
}

std::span<const Adjacency> FabricGraph::neighbors(VertexId v) const {
    return {adjacency_.data() + adjacency_offsets_[v], adjacency_offsets_[v + 1] - adjacency_offsets_[v]};
}

std::span<const std::uint32_t> FabricGraph::ports_of(std::uint32_t node_id) const {
    if (node_id >= terminals_.size()) {
        throw Error(Errc::unknown_node, "unknown node id " + std::to_string(node_id));
    }
    return {port_list_.data() + port_offsets_[node_id], port_offsets_[node_id + 1] - port_offsets_[node_id]};
}

std::vector<std::uint32_t> FabricGraph::attached_leafs(std::uint32_t node_id) const {
    std::vector<std::uint32_t> leafs;
    for (auto port : ports_of(node_id)) {
        for (const auto& adj : neighbors(endpoint_vertex(port))) leafs.push_back(adj.to);
    }
    std::sort(leafs.begin(), leafs.end());
    leafs.erase(std::unique(leafs.begin(), leafs.end()), leafs.end());
    return leafs;
}

std::vector<std::uint32_t> FabricGraph::switches_in(int cell_id, Tier tier) const {
    std::vector<std::uint32_t> out;
    for (const auto& s : switches_) {
        if (s.cell_id == cell_id && s.tier == tier) out.push_back(s.id);
    }
    return out;
}

bool FabricGraph::has_cell(int cell_id) const {
    return std::find(cell_ids_.begin(), cell_ids_.end(), cell_id) != cell_ids_.end();
}

std::string FabricGraph::vertex_name(VertexId v) const {
    if (is_switch(v)) {
        const auto& s = switches_[v];
        switch (s.tier) {
            case Tier::Leaf:
                return "c" + std::to_string(s.cell_id) + ".leaf" + std::to_string(s.index_in_cell);
            case Tier::Spine:
                return "c" + std::to_string(s.cell_id) + ".spine" + std::to_string(s.index_in_cell);
            case Tier::Gateway:
                return "gw" + std::to_string(s.index_in_cell);
        }
    }
    const auto& ep = endpoint_at(v);
    return "n" + std::to_string(ep.node_id) + ".p" + std::to_string(ep.port_index);
}

namespace {

struct CellLayout {
    int id = 0;
    std::uint32_t first_leaf = 0;
    std::uint32_t leafs = 0;
    std::uint32_t first_spine = 0;
    std::uint32_t spines = 0;
};

struct GroupPlan {
    std::uint32_t first_leaf = 0;  // cell-local
    std::uint32_t leaf_count = 0;
    bool paired = false;
};

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

class Builder {
  public:
    explicit Builder(const MachineSpec& spec)
        : spec_(spec),
          switch_(spec.fabric_switch()),
          leaf_spine_(spec.link_class(spec.fabric.leaf_spine_link_class)),
          global_(spec.link_class(spec.fabric.global_link_class)),
          gateway_(spec.link_class(spec.fabric.gateway_link_class)) {}

    FabricGraph build() {
        create_switches();
        cable_cells();
        attach_compute();
        attach_storage();
        cable_globals();
        cable_gateways();
        return finish();
    }

  private:
    std::uint32_t halves(std::uint32_t rate_gbps) const {
        return (switch_.split_mode_supported && rate_gbps <= 100) ? 1u : 2u;
    }

    void create_switches() {
        for (const auto& cell : spec_.cells) {
            CellLayout layout;
            layout.id = cell.id;
            layout.first_leaf = static_cast<std::uint32_t>(switches_.size());
            layout.leafs = cell.leafs;
            for (std::uint32_t k = 0; k < cell.leafs; ++k) add_switch(Tier::Leaf, cell.id, k);
            layout.first_spine = static_cast<std::uint32_t>(switches_.size());
            layout.spines = cell.spines;
            for (std::uint32_t k = 0; k < cell.spines; ++k) add_switch(Tier::Spine, cell.id, k);
            layouts_.push_back(layout);
        }
        const auto& host = gateway_host();
        gateway_first_ = static_cast<std::uint32_t>(switches_.size());
        for (std::uint32_t g = 0; g < spec_.gateways; ++g) {
            auto& s = add_switch(Tier::Gateway, host.id, g);
            s.radix = spec_.fabric.gateway_ports;
        }
    }

    Switch& add_switch(Tier tier, int cell_id, std::uint32_t index) {
        Switch s;
        s.id = static_cast<std::uint32_t>(switches_.size());
        s.tier = tier;
        s.cell_id = cell_id;
        s.index_in_cell = index;
        s.radix = switch_.radix_200g_ports;
        switches_.push_back(s);
        return switches_.back();
    }

    const CellLayout& gateway_host() const {
        for (std::size_t i = 0; i < spec_.cells.size(); ++i) {
            if (spec_.cells[i].kind == CellKind::IO) return layouts_[i];
        }
        return layouts_.back();
    }

    const CellLayout* io_cell() const {
        for (std::size_t i = 0; i < spec_.cells.size(); ++i) {
            if (spec_.cells[i].kind == CellKind::IO) return &layouts_[i];
        }
        return nullptr;
    }

    void add_switch_edge(std::uint32_t a, std::uint32_t b, const LinkClass& link) {
        switch_edges_.push_back({a, b, link.name, link.length_m, link.rate_gbps});
    }

    void cable_cells() {
        for (const auto& layout : layouts_) {
            for (std::uint32_t l = 0; l < layout.leafs; ++l) {
                for (std::uint32_t s = 0; s < layout.spines; ++s) {
                    add_switch_edge(layout.first_leaf + l, layout.first_spine + s, leaf_spine_);
                }
            }
        }
    }

    std::uint32_t node_halves(const NodeSpec& node) const {
        std::uint32_t total = 0;
        for (const auto& p : node.nic_ports) total += p.count * halves(spec_.link_class(p.link_class).rate_gbps);
        return total;
    }

    // Leafs split among a cell's rack groups: every group but the last takes
    // the fewest leafs (an even number for paired nodes) whose downlinks fit
    // the leaf ports left after uplinks; the last group takes the rest.
    std::vector<GroupPlan> plan_groups(const CellSpec& cell, const CellLayout& layout) const {
        const std::int64_t capacity =
            std::int64_t{2} * switch_.radix_200g_ports - std::int64_t{layout.spines} * halves(leaf_spine_.rate_gbps);
        std::vector<GroupPlan> plans;
        std::uint32_t next = 0;
        for (std::size_t g = 0; g < cell.rack_groups.size(); ++g) {
            const auto& group = cell.rack_groups[g];
            const auto& node = spec_.node_type(group.node_type);
            GroupPlan plan;
            plan.first_leaf = next;
            const auto ports = node.port_count();
            plan.paired = ports >= 2 && ports % 2 == 0;
            const std::uint32_t step = plan.paired ? 2 : 1;
            const std::uint32_t remaining = layout.leafs - next;
            if (remaining < step) {
                throw Error(Errc::port_budget, "cell " + std::to_string(cell.id) + ": no leaf left for rack group " +
                                                   std::to_string(g));
            }
            const bool last = g + 1 == cell.rack_groups.size();
            if (last) {
                plan.leaf_count = plan.paired ? remaining - remaining % 2 : remaining;
            } else {
                const auto per_node = node_halves(node);
                std::uint32_t k = step;
                auto demand = [&](std::uint32_t leafs) -> std::int64_t {
                    if (plan.paired) return ceil_div(group.nodes(), leafs / 2) * (per_node / 2);
                    return ceil_div(group.nodes(), leafs) * per_node;
                };
                while (demand(k) > capacity && k + step <= remaining) k += step;
                plan.leaf_count = k;
            }
            next += plan.leaf_count;
            plans.push_back(plan);
        }
        return plans;
    }

    void attach_compute() {
        for (std::size_t c = 0; c < spec_.cells.size(); ++c) {
            const auto& cell = spec_.cells[c];
            const auto& layout = layouts_[c];
            const auto plans = plan_groups(cell, layout);
            for (std::size_t g = 0; g < cell.rack_groups.size(); ++g) {
                const auto& group = cell.rack_groups[g];
                const auto& node = spec_.node_type(group.node_type);
                const auto& plan = plans[g];
                for (std::uint64_t n = 0; n < group.nodes(); ++n) {
                    const auto node_id = static_cast<std::uint32_t>(terminals_.size());
                    terminals_.push_back(
                        {node_id, TerminalKind::Compute, cell.id, group.node_type, static_cast<std::uint32_t>(n)});
                    std::uint32_t port = 0;
                    for (const auto& nic : node.nic_ports) {
                        for (std::uint32_t k = 0; k < nic.count; ++k, ++port) {
                            std::uint32_t leaf;
                            if (plan.paired) {
                                const auto pair = static_cast<std::uint32_t>(n % (plan.leaf_count / 2));
                                leaf = plan.first_leaf + 2 * pair + port % 2;
                            } else {
                                leaf = plan.first_leaf + static_cast<std::uint32_t>(n % plan.leaf_count);
                            }
                            add_port(node_id, port, nic.link_class, layout.first_leaf + leaf);
                        }
                    }
                }
            }
        }
    }

    void add_port(std::uint32_t node_id, std::uint32_t port, const std::string& link_class, std::uint32_t leaf) {
        endpoints_.push_back({node_id, port, link_class});
        endpoint_leaf_.push_back(leaf);
    }

    void attach_storage() {
        const auto& storage = spec_.storage;
        std::uint64_t total_ports = 0;
        for (const auto& [model, a] : storage.appliances) total_ports += std::uint64_t{a.count} * (a.hdr_ports + a.hdr100_ports);
        const auto* io = io_cell();
        if (total_ports > 0 && io == nullptr) {
            throw Error(Errc::invalid_value, "storage appliances declare fabric ports but no IO cell exists");
        }
        std::uint64_t cursor = 0;
        for (const auto& [model, a] : storage.appliances) {
            for (std::uint32_t unit = 0; unit < a.count; ++unit) {
                const auto node_id = static_cast<std::uint32_t>(terminals_.size());
                terminals_.push_back({node_id, TerminalKind::Storage, io ? io->id : 0, model, unit});
                std::uint32_t port = 0;
                auto attach = [&](std::uint32_t count, const std::string& link_class) {
                    for (std::uint32_t k = 0; k < count; ++k, ++port) {
                        const auto leaf = io->first_leaf + static_cast<std::uint32_t>(cursor++ % io->leafs);
                        add_port(node_id, port, link_class, leaf);
                    }
                };
                attach(a.hdr_ports, spec_.fabric.storage_hdr_link_class);
                attach(a.hdr100_ports, spec_.fabric.storage_hdr100_link_class);
            }
        }
    }

    // Cell i numbers its global ports g = t * (C - 1) + r, where r is the
    // position of the peer cell counted forward from i; port g lives on spine
    // g / uplinks. Every pair then gets U / (C - 1) links.
    void cable_globals() {
        const auto cells = static_cast<std::uint32_t>(layouts_.size());
        if (cells < 2) return;
        const auto up = spec_.fabric.spine_uplinks;
        const std::uint64_t per_cell = std::uint64_t{layouts_.front().spines} * up;
        for (const auto& layout : layouts_) {
            if (std::uint64_t{layout.spines} * up != per_cell) {
                throw Error(Errc::uneven_global_links,
                            "cell " + std::to_string(layout.id) + " offers " +
                                std::to_string(std::uint64_t{layout.spines} * up) + " global uplinks, cell " +
                                std::to_string(layouts_.front().id) + " offers " + std::to_string(per_cell));
            }
        }
        const std::uint64_t peers = cells - 1;
        if (per_cell % peers != 0) {
            throw Error(Errc::uneven_global_links, std::to_string(per_cell) + " global uplinks per cell over " +
                                                       std::to_string(peers) + " peer cells leaves remainder " +
                                                       std::to_string(per_cell % peers));
        }
        const auto per_pair = per_cell / peers;
        if (per_pair == 0) {
            throw Error(Errc::disconnected, "spines carry no global uplinks; cells cannot reach each other");
        }
        for (std::uint32_t i = 0; i < cells; ++i) {
            for (std::uint32_t j = i + 1; j < cells; ++j) {
                const std::uint64_t r_ij = (j + cells - i - 1) % cells;
                const std::uint64_t r_ji = (i + cells - j - 1) % cells;
                for (std::uint64_t t = 0; t < per_pair; ++t) {
                    const auto si = static_cast<std::uint32_t>((t * peers + r_ij) / up);
                    const auto sj = static_cast<std::uint32_t>((t * peers + r_ji) / up);
                    add_switch_edge(layouts_[i].first_spine + si, layouts_[j].first_spine + sj, global_);
                }
            }
        }
    }

    void cable_gateways() {
        const auto& host = gateway_host();
        const auto ports = spec_.fabric.gateway_ports;
        for (std::uint32_t g = 0; g < spec_.gateways; ++g) {
            for (std::uint32_t k = 0; k < ports; ++k) {
                const auto spine = host.first_spine + (g * ports + k) % host.spines;
                add_switch_edge(spine, gateway_first_ + g, gateway_);
            }
        }
    }

    FabricGraph finish() {
        const auto switch_count = static_cast<VertexId>(switches_.size());
        std::vector<Edge> edges = switch_edges_;
        for (std::size_t e = 0; e < endpoints_.size(); ++e) {
            const auto& link = spec_.link_class(endpoints_[e].link_class);
            edges.push_back({endpoint_leaf_[e], switch_count + static_cast<VertexId>(e), link.name, link.length_m,
                             link.rate_gbps});
        }
        for (auto& e : edges) {
            if (e.a > e.b) std::swap(e.a, e.b);
            if (e.a < switch_count) switches_[e.a].half_ports_used += halves(e.rate_gbps);
            if (e.b < switch_count) switches_[e.b].half_ports_used += halves(e.rate_gbps);
        }
        std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
            return std::tie(x.a, x.b, x.link_class, x.length_m) < std::tie(y.a, y.b, y.link_class, y.length_m);
        });

        std::vector<int> cell_ids;
        for (const auto& cell : spec_.cells) cell_ids.push_back(cell.id);
        FabricGraph graph(std::move(terminals_), std::move(endpoints_), std::move(switches_), std::move(edges),
                          std::move(cell_ids), {spec_.fabric.spine_uplinks, spec_.fabric.spine_downlinks});

        for (const auto& s : graph.switches()) {
            if (s.half_ports_used > 2 * s.radix) {
                throw Error(Errc::port_budget, "port budget exceeded on switch " + graph.vertex_name(s.id) +
                                                   ": demand " + std::to_string(s.half_ports_used / 2) +
                                                   (s.half_ports_used % 2 ? ".5" : "") + " of " +
                                                   std::to_string(s.radix) + " ports");
            }
        }
        return graph;
    }

    const MachineSpec& spec_;
    const SwitchSpec& switch_;
    const LinkClass& leaf_spine_;
    const LinkClass& global_;
    const LinkClass& gateway_;

    std::vector<CellLayout> layouts_;
    std::vector<Switch> switches_;
    std::uint32_t gateway_first_ = 0;
    std::vector<Edge> switch_edges_;
    std::vector<Terminal> terminals_;
    std::vector<Endpoint> endpoints_;
    std::vector<std::uint32_t> endpoint_leaf_;
};

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

}  // namespace

FabricGraph build_topology(const MachineSpec& spec) {
    if (spec.cells.empty()) throw Error(Errc::non_positive, "spec has no cells");
    return Builder(spec).build();
}

SwitchCensus switch_census(const FabricGraph& graph) {
    SwitchCensus c;
    for (const auto& s : graph.switches()) {
        switch (s.tier) {
            case Tier::Leaf: ++c.leafs; break;
            case Tier::Spine: ++c.spines; break;
            case Tier::Gateway: ++c.gateways; break;
        }
    }
    c.fabric_total = c.spines + c.leafs;
    c.grand_total = c.fabric_total + c.gateways;
    return c;
}

std::vector<LeafPorts> leaf_downlink_census(const FabricGraph& graph, int cell_id) {
    if (!graph.has_cell(cell_id)) throw Error(Errc::unknown_cell, "unknown cell " + std::to_string(cell_id));
    std::vector<LeafPorts> out;
    for (auto leaf : graph.switches_in(cell_id, Tier::Leaf)) {
        LeafPorts p;
        p.switch_id = leaf;
        for (const auto& adj : graph.neighbors(leaf)) {
            const auto rate = graph.edges()[adj.edge].rate_gbps;
            const bool up = graph.is_switch(adj.to);
            auto& slot = up ? (rate <= 100 ? p.uplinks_100g : p.uplinks_200g)
                            : (rate <= 100 ? p.downlinks_100g : p.downlinks_200g);
            ++slot;
        }
        out.push_back(p);
    }
    return out;
}

std::map<std::pair<int, int>, std::uint32_t> global_link_counts(const FabricGraph& graph) {
    std::map<std::pair<int, int>, std::uint32_t> counts;
    const auto& sw = graph.switches();
    for (const auto& e : graph.edges()) {
        if (!graph.is_switch(e.a) || !graph.is_switch(e.b)) continue;
        const auto& x = sw[e.a];
        const auto& y = sw[e.b];
        if (x.tier != Tier::Spine || y.tier != Tier::Spine || x.cell_id == y.cell_id) continue;
        ++counts[{std::min(x.cell_id, y.cell_id), std::max(x.cell_id, y.cell_id)}];
    }
    return counts;
}

std::vector<std::string> check_graph_invariants(const FabricGraph& graph) {
    std::vector<std::string> problems;
    const auto n = graph.vertex_count();
    for (std::size_t i = 0; i < graph.edges().size(); ++i) {
        const auto& e = graph.edges()[i];
        if (e.a >= n || e.b >= n) problems.push_back("edge " + std::to_string(i) + " references a missing vertex");
        if (e.a == e.b) problems.push_back("edge " + std::to_string(i) + " is a self edge");
    }
    for (const auto& s : graph.switches()) {
        if (s.half_ports_used > 2 * s.radix) problems.push_back(graph.vertex_name(s.id) + " exceeds its radix");
    }
    if (!problems.empty()) return problems;

    std::vector<char> seen(n, 0);
    bool searched = false;
    for (std::uint32_t t = 0; t < graph.terminals().size(); ++t) {
        if (graph.terminals()[t].kind != TerminalKind::Compute) continue;
        auto ports = graph.ports_of(t);
        if (ports.empty()) {
            problems.push_back("compute node " + std::to_string(t) + " has no ports");
            continue;
        }
        if (!searched) {
            searched = true;
            std::deque<VertexId> queue{graph.endpoint_vertex(ports.front())};
            seen[queue.front()] = 1;
            while (!queue.empty()) {
                const auto v = queue.front();
                queue.pop_front();
                for (const auto& adj : graph.neighbors(v)) {
                    if (!seen[adj.to]) {
                        seen[adj.to] = 1;
                        queue.push_back(adj.to);
                    }
                }
            }
        }
        for (auto port : ports) {
            if (!seen[graph.endpoint_vertex(port)]) {
                problems.push_back("compute node " + std::to_string(t) + " is not reachable");
                break;
            }
        }
    }
    return problems;
}

std::string export_edge_list(const FabricGraph& graph) {
    std::string out;
    for (const auto& e : graph.edges()) {
        out += graph.vertex_name(e.a);
        out += ' ';
        out += graph.vertex_name(e.b);
        out += ' ';
        out += std::to_string(e.rate_gbps);
        out += ' ';
        out += format_number(e.length_m);
        out += ' ';
        out += e.link_class;
        out += '\n';
    }
    return out;
}

std::string export_graph_json(const FabricGraph& graph) {
    using nlohmann::json;
    json doc;
    doc["cells"] = graph.cell_ids();
    doc["spine_split"] = {{"uplinks", graph.spine_split().uplinks}, {"downlinks", graph.spine_split().downlinks}};
    doc["switches"] = json::array();
    for (const auto& s : graph.switches()) {
        doc["switches"].push_back({{"id", s.id},
                                   {"name", graph.vertex_name(s.id)},
                                   {"tier", std::string(to_string(s.tier))},
                                   {"cell_id", s.cell_id},
                                   {"ports_used", s.ports_used()},
                                   {"radix", s.radix}});
    }
    doc["terminals"] = json::array();
    for (const auto& t : graph.terminals()) {
        doc["terminals"].push_back({{"node_id", t.node_id},
                                    {"kind", t.kind == TerminalKind::Compute ? "compute" : "storage"},
                                    {"cell_id", t.cell_id},
                                    {"type", t.type}});
    }
    doc["endpoints"] = json::array();
    for (std::size_t i = 0; i < graph.endpoints().size(); ++i) {
        const auto& ep = graph.endpoints()[i];
        doc["endpoints"].push_back({{"name", graph.vertex_name(graph.endpoint_vertex(i))},
                                    {"node_id", ep.node_id},
                                    {"port_index", ep.port_index},
                                    {"link_class", ep.link_class}});
    }
    doc["edges"] = json::array();
    for (const auto& e : graph.edges()) {
        doc["edges"].push_back({{"a", graph.vertex_name(e.a)},
                                {"b", graph.vertex_name(e.b)},
                                {"link_class", e.link_class},
                                {"length_m", e.length_m},
                                {"rate_gbps", e.rate_gbps}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace fabtwin
