#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fabtwin/error.hpp"
#include "fabtwin/topology.hpp"
#include "oracles.hpp"

using namespace fabtwin;
using fabtwin::testing::first_cells;
using fabtwin::testing::load_data_spec;

namespace {

const FabricGraph& leonardo() {
    static const FabricGraph graph = build_topology(load_data_spec("leonardo.json"));
    return graph;
}

std::string golden(const std::string& name) {
    std::ifstream in(fabtwin::testing::golden_dir() / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Errc build_error(const MachineSpec& spec) {
    try {
        build_topology(spec);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "build succeeded";
    return Errc::io;
}

}  // namespace

TEST(Topology, ToyMatchesHandEnumeratedEdgeList) {
    EXPECT_EQ(export_edge_list(build_topology(load_data_spec("toy.json"))), golden("toy_edges.txt"));
}

TEST(Topology, LeonardoSwitchCensus) {
    const auto c = switch_census(leonardo());
    EXPECT_EQ(c.spines, 414u);
    EXPECT_EQ(c.leafs, 405u);
    EXPECT_EQ(c.fabric_total, 819u);
    EXPECT_EQ(c.gateways, 4u);
    EXPECT_EQ(c.grand_total, 823u);
}

TEST(Topology, ToySwitchCensus) {
    const auto c = switch_census(build_topology(load_data_spec("toy.json")));
    EXPECT_EQ(c.spines, 6u);
    EXPECT_EQ(c.leafs, 6u);
    EXPECT_EQ(c.grand_total, c.fabric_total);
}

TEST(Topology, LeonardoBoosterLeafPorts) {
    const auto leafs = leaf_downlink_census(leonardo(), 0);
    ASSERT_EQ(leafs.size(), 18u);
    for (const auto& l : leafs) {
        EXPECT_EQ(l.downlinks_100g, 40u);
        EXPECT_EQ(l.uplinks_200g, 18u);
        EXPECT_EQ(leonardo().switches()[l.switch_id].ports_used(), 38.0);
    }
}

TEST(Topology, LeonardoDcLeafPorts) {
    const auto& spec = load_data_spec("leonardo.json");
    for (const auto& cell : spec.cells) {
        if (cell.kind != CellKind::DC) continue;
        const auto leafs = leaf_downlink_census(leonardo(), cell.id);
        ASSERT_EQ(leafs.size(), 16u);
        for (const auto& l : leafs) EXPECT_EQ(l.downlinks_100g, 39u);
    }
}

TEST(Topology, ToyLeafPorts) {
    for (const auto& l : leaf_downlink_census(build_topology(load_data_spec("toy.json")), 1)) {
        EXPECT_EQ(l.downlinks_100g + l.downlinks_200g, 2u);
    }
}

TEST(Topology, UnknownCellIsRejected) {
    try {
        leaf_downlink_census(leonardo(), 99);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::unknown_cell);
    }
}

TEST(Topology, LeonardoGlobalLinkRegularity) {
    const auto counts = global_link_counts(leonardo());
    EXPECT_EQ(counts.size(), 253u);
    std::uint32_t total = 0;
    for (const auto& [pair, n] : counts) {
        EXPECT_EQ(n, 18u) << pair.first << "-" << pair.second;
        total += n;
    }
    EXPECT_EQ(total, 4554u);
}

TEST(Topology, LeafDemandOverRadixIsPortBudgetError) {
    auto spec = load_data_spec("toy.json");
    spec.cells[0].rack_groups[0].nodes_per_blade = 4;
    EXPECT_EQ(build_error(spec), Errc::port_budget);
}

TEST(Topology, UnevenGlobalShareIsRejected) {
    auto spec = load_data_spec("toy.json");
    auto extra = spec.cells.back();
    extra.id = 3;
    spec.cells.push_back(extra);
    // 2 spines x 2 uplinks = 4 links per cell over 3 peers
    EXPECT_EQ(build_error(spec), Errc::uneven_global_links);
}

TEST(Topology, BuildIsDeterministic) {
    const auto spec = load_data_spec("leonardo.json");
    const auto again = build_topology(spec);
    EXPECT_EQ(export_edge_list(again), export_edge_list(leonardo()));
    EXPECT_EQ(export_graph_json(again), export_graph_json(leonardo()));
}

TEST(Topology, HandshakeAndInvariants) {
    for (const auto* file : {"leonardo.json", "toy.json"}) {
        const auto spec = load_data_spec(file);
        const auto graph = build_topology(spec);
        const auto halves = fabtwin::testing::recount_half_ports(graph, spec);
        for (const auto& sw : graph.switches()) {
            EXPECT_EQ(sw.half_ports_used, halves[sw.id]) << graph.vertex_name(sw.id);
            EXPECT_LE(sw.half_ports_used, 2 * sw.radix) << graph.vertex_name(sw.id);
        }
        EXPECT_TRUE(check_graph_invariants(graph).empty()) << file;
    }
}

TEST(Topology, SingleCellHasNoGlobalLinks) {
    const auto graph = build_topology(first_cells(load_data_spec("toy.json"), 1));
    EXPECT_TRUE(global_link_counts(graph).empty());
    EXPECT_EQ(graph.compute_count(), 4u);
    EXPECT_TRUE(check_graph_invariants(graph).empty());
}

TEST(Topology, EdgeCountLeonardo) { EXPECT_EQ(leonardo().edges().size(), 27516u); }
