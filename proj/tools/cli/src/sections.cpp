#include "sections.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fabtwin/error.hpp"
#include "fabtwin/storage_model.hpp"

namespace fabtwin::cli {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// "label: computed X unit vs published Y unit (+d%)"
std::string versus(const std::string& label, double computed, double published, const std::string& unit) {
    std::string out = label + ": computed " + fmt(computed) + " " + unit + " vs published " + fmt(published) + " " + unit;
    if (published != 0) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " (%+.2f%%)", 100.0 * (computed - published) / published);
        out += buf;
    }
    return out;
}

bool differs(double a, double b) { return std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b)); }

Section census_fields(const Census& c) {
    Section s;
    s.put("gpu_nodes", c.gpu_nodes, "nodes")
        .put("cpu_nodes", c.cpu_nodes, "nodes")
        .put("total_nodes", c.total_nodes(), "nodes")
        .put("racks", c.racks, "racks")
        .put("blades", c.blades, "blades");
    return s;
}

std::string_view kind_of(const MachineSpec& spec, int cell_id) {
    const auto* cell = spec.find_cell(cell_id);
    return cell ? to_string(cell->kind) : std::string_view("?");
}

const GpuSpec& pick_gpu(const MachineSpec& spec, const PeakQuery& q) {
    if (!q.gpu.empty()) {
        auto it = spec.gpu_catalog.find(q.gpu);
        if (it != spec.gpu_catalog.end()) return it->second;
        throw Error(Errc::unknown_model, "unknown GPU '" + q.gpu + "' (see gpu_catalog)");
    }
    const auto& node = spec.node_type(q.node_type.empty() ? gpu_node_type(spec) : q.node_type);
    if (!node.has_gpus()) throw Error(Errc::not_available, "node type has no GPUs");
    return node.gpus.front();
}

}  // namespace

std::string gpu_node_type(const MachineSpec& spec) {
    for (const auto& [name, node] : spec.node_types) {
        if (node.has_gpus()) return name;
    }
    throw Error(Errc::not_available, "no node type carries GPUs");
}

Section census_section(const MachineSpec& spec) {
    auto s = census_fields(node_census(spec));
    std::map<CellKind, Census> by_kind;
    for (const auto& cell : spec.cells) by_kind[cell.kind] += cell_census(spec, cell);
    Section kinds;
    for (const auto& [kind, c] : by_kind) kinds.section(std::string(to_string(kind)), census_fields(c));
    s.put("cells", spec.cells.size(), "cells");
    s.section("by_kind", kinds);
    return s;
}

Section topology_section(const MachineSpec& spec, const FabricGraph& graph, Warnings& warnings) {
    const auto census = switch_census(graph);
    Section switches;
    switches.put("spines", census.spines, "switches")
        .put("leafs", census.leafs, "switches")
        .put("gateways", census.gateways, "switches")
        .put("fabric_total", census.fabric_total, "switches")
        .put("grand_total", census.grand_total, "switches");

    const auto pairs = global_link_counts(graph);
    std::uint64_t total = 0;
    std::uint32_t lo = pairs.empty() ? 0 : pairs.begin()->second;
    std::uint32_t hi = lo;
    for (const auto& [pair, count] : pairs) {
        total += count;
        lo = std::min(lo, count);
        hi = std::max(hi, count);
    }
    Section global;
    global.put("cell_pairs", pairs.size(), "pairs")
        .put("per_pair_min", lo, "links")
        .put("per_pair_max", hi, "links")
        .put("total", total, "links");

    Section s;
    s.section("switch_census", switches);
    s.section("global_links", global);
    s.put("terminals", graph.terminals().size(), "terminals")
        .put("compute_nodes", graph.compute_count(), "nodes")
        .put("endpoints", graph.endpoints().size(), "ports")
        .put("edges", graph.edges().size(), "links");

    if (auto published = spec.reference_value("switches_total")) {
        if (differs(census.grand_total, *published)) {
            warnings.push_back(versus("switch total", census.grand_total, *published, "switches"));
        } else if (census.gateways > 0) {
            warnings.push_back("published switch total " + fmt(*published) + " is reproduced as " +
                               std::to_string(census.fabric_total) + " fabric switches + " +
                               std::to_string(census.gateways) + " gateways; counting gateways is an interpretation");
        }
    }
    return s;
}

Section leaf_ports_section(const FabricGraph& graph, int cell_id) {
    std::vector<Section> leafs;
    for (const auto& p : leaf_downlink_census(graph, cell_id)) {
        Section l;
        l.text("switch", graph.vertex_name(p.switch_id))
            .put("downlinks_100g", p.downlinks_100g, "links")
            .put("downlinks_200g", p.downlinks_200g, "links")
            .put("uplinks_100g", p.uplinks_100g, "links")
            .put("uplinks_200g", p.uplinks_200g, "links")
            .put("ports_used", graph.switches()[p.switch_id].ports_used(), "ports")
            .put("radix", graph.switches()[p.switch_id].radix, "ports");
        leafs.push_back(std::move(l));
    }
    Section s;
    s.put("cell_id", cell_id, "id");
    s.list("leafs", leafs);
    return s;
}

Section oversubscription_section(const MachineSpec& spec, const FabricGraph& graph, std::optional<int> cell_id) {
    auto one = [&](int id, bool detailed) {
        const auto over = leaf_oversubscription(graph, id);
        Section c;
        c.put("cell_id", id, "id").text("kind", std::string(kind_of(spec, id)));
        if (over.common) {
            c.put("leaf_oversubscription", *over.common);
        } else {
            auto by_value = [](const LeafRatio& a, const LeafRatio& b) { return a.ratio.value() < b.ratio.value(); };
            const auto [mn, mx] = std::minmax_element(over.per_leaf.begin(), over.per_leaf.end(), by_value);
            c.put("leaf_oversubscription_min", mn->ratio).put("leaf_oversubscription_max", mx->ratio);
        }
        if (detailed) {
            std::vector<Section> leafs;
            for (const auto& l : over.per_leaf) {
                Section ls;
                ls.text("switch", graph.vertex_name(l.switch_id)).put("ratio", l.ratio);
                leafs.push_back(std::move(ls));
            }
            c.list("per_leaf", leafs);
        }
        c.put("spine_pruning", spine_pruning(graph, id));
        return c;
    };
    if (cell_id) return one(*cell_id, true);
    std::vector<Section> cells;
    for (int id : graph.cell_ids()) cells.push_back(one(id, false));
    Section s;
    s.list("cells", cells);
    return s;
}

Section route_section(const FabricGraph& graph, const LatencyModel& model, std::uint32_t from, std::uint32_t to) {
    const auto path = route(graph, from, to);
    json hops = json::array();
    for (auto h : path.hops) hops.push_back(graph.vertex_name(h));
    Section s;
    s.put("from", from, "node").put("to", to, "node");
    s.text("path", hops);
    s.put("switch_count", path.switch_count, "switches")
        .put("total_length_m", path.total_length_m, "m")
        .put("latency_ns", path_latency(path, model), "ns")
        .put("nic_ns", 2 * model.nic_ns, "ns")
        .put("switching_ns", path.switch_count * model.switch_ns, "ns")
        .put("fiber_ns", model.fiber_ns_per_m * path.total_length_m, "ns");
    return s;
}

Section worst_latency_section(const MachineSpec& spec, const FabricGraph& graph, Warnings& warnings) {
    const auto model = LatencyModel::from_spec(spec);
    const auto worst = worst_case_latency(graph, model);
    Section s;
    s.put("latency_ns", worst.latency_ns, "ns")
        .put("switch_count", worst.switch_count, "switches")
        .put("witness_source", worst.source, "node")
        .put("witness_target", worst.target, "node")
        .text("search", worst.exhaustive ? "exhaustive" : "representative");
    Section nominal;
    nominal.put("same_leaf_ns", model.nominal_latency_ns(1), "ns")
        .put("intra_cell_ns", model.nominal_latency_ns(3), "ns")
        .put("inter_cell_ns", model.nominal_latency_ns(4), "ns");
    s.section("nominal", nominal);
    if (auto bound = spec.reference_value("max_latency_ns")) {
        s.put("published_bound_ns", *bound, "ns");
        s.text("within_bound", worst.latency_ns <= *bound);
        warnings.push_back(versus("worst-case latency", worst.latency_ns, *bound, "ns") +
                           "; the published bound exceeds the sum of component delays");
    }
    return s;
}

Section bisection_section(const FabricGraph& graph, const std::vector<int>& cells_on_a) {
    for (int c : cells_on_a) {
        if (!graph.has_cell(c)) throw Error(Errc::unknown_cell, "unknown cell " + std::to_string(c));
    }
    const auto partition = cell_split(graph, std::set<int>(cells_on_a.begin(), cells_on_a.end()));
    json a = json::array();
    json b = json::array();
    for (int c : graph.cell_ids()) {
        (std::find(cells_on_a.begin(), cells_on_a.end(), c) != cells_on_a.end() ? a : b).push_back(c);
    }
    Section s;
    s.put("cells_a", a, "id").put("cells_b", b, "id");
    s.put("nodes_a", partition.side_a.size(), "nodes")
        .put("nodes_b", partition.side_b.size(), "nodes")
        .put("bandwidth_gbps", bisection_bandwidth(graph, partition), "Gbps");
    return s;
}

Section peak_section(const MachineSpec& spec, const PeakQuery& q, Warnings& warnings) {
    Section s;
    s.text("format", std::string(to_string(q.format))).text("tensor", q.tensor).text("sparse", q.sparse);
    s.text("scope", q.scope);
    if (q.scope == "gpu") {
        const auto& gpu = pick_gpu(spec, q);
        s.text("gpu", gpu.model);
        s.put("tflops", gpu_peak(gpu, q.format, q.tensor, q.sparse), "TFLOPS");
        return s;
    }
    if (q.scope == "node") {
        const auto name = q.node_type.empty() ? gpu_node_type(spec) : q.node_type;
        const double tf = node_peak(spec.node_type(name), q.format, q.tensor, q.sparse, q.include_cpu);
        s.text("node_type", name).text("include_cpu", q.include_cpu);
        s.put("tflops", tf, "TFLOPS");
        if (auto published = spec.reference_value("node_peak_tflops");
            published && q.format == NumericFormat::FP64 && q.tensor && !q.sparse && differs(tf, *published)) {
            warnings.push_back(versus("node peak", tf, *published, "TFLOPS"));
        }
        return s;
    }
    if (q.scope != "machine") throw Error(Errc::invalid_argument, "scope must be gpu, node or machine");
    const double tf = machine_peak(spec, q.format, q.tensor, q.sparse, q.include_cpu);
    s.text("include_cpu", q.include_cpu);
    s.put("tflops", tf, "TFLOPS").put("pflops", tf / 1000.0, "PFLOPS");
    if (auto published = spec.reference_value("rpeak_pflops");
        published && q.format == NumericFormat::FP64 && q.tensor && !q.sparse) {
        s.put("published_rpeak_pflops", *published, "PFLOPS");
        warnings.push_back(versus("machine FP64 tensor peak", tf / 1000.0, *published, "PFLOPS"));
    }
    return s;
}

Section machine_peaks_section(const MachineSpec& spec, Warnings& warnings) {
    std::vector<Section> rows;
    const auto node_name = gpu_node_type(spec);
    const auto& reference_gpu = spec.node_type(node_name).gpus.front();
    for (const auto& entry : reference_gpu.peaks.entries) {
        for (bool sparse : {false, true}) {
            if (sparse && !entry.sparsity_doubling) continue;
            try {
                const double tf = machine_peak(spec, entry.format, entry.tensor, sparse);
                Section r;
                r.text("format", std::string(to_string(entry.format))).text("tensor", entry.tensor).text("sparse", sparse);
                r.put("pflops", tf / 1000.0, "PFLOPS");
                rows.push_back(std::move(r));
            } catch (const Error& e) {
                if (e.code() != Errc::not_available) throw;
            }
        }
    }
    Section s;
    s.list("machine", rows);
    Section node;
    const auto& gpu_node = spec.node_type(node_name);
    node.text("node_type", node_name)
        .put("fp64_tflops", node_peak(gpu_node, NumericFormat::FP64, false, false, false), "TFLOPS")
        .put("fp64_tensor_tflops", node_peak(gpu_node, NumericFormat::FP64, true, false, false), "TFLOPS")
        .put("cpu_fp64_tflops", cpu_peak(gpu_node.cpu), "TFLOPS");
    s.section("node", node);
    s.put("machine_fp64_with_cpu_pflops", machine_peak(spec, NumericFormat::FP64, false, false, true) / 1000.0,
          "PFLOPS");

    PeakQuery rpeak;
    rpeak.tensor = true;
    peak_section(spec, rpeak, warnings);
    rpeak.scope = "node";
    peak_section(spec, rpeak, warnings);
    return s;
}

Section roofline_section(const MachineSpec& spec, const std::string& node_type, double intensity) {
    const auto name = node_type.empty() ? gpu_node_type(spec) : node_type;
    const auto p = roofline(spec.node_type(name), intensity);
    Section s;
    s.text("node_type", name);
    s.put("arithmetic_intensity", p.arithmetic_intensity, "FLOP/B")
        .put("attainable_tflops", p.attainable_tflops, "TFLOPS")
        .text("bound", std::string(to_string(p.bound)))
        .put("peak_tflops", p.peak_tflops, "TFLOPS")
        .put("bandwidth_gbs", p.bandwidth_gbs, "GB/s")
        .put("ridge_point", p.ridge_point, "FLOP/B");
    return s;
}

Section scaling_section(const ScalingSeries& series, std::optional<std::uint32_t> baseline, Warnings& warnings) {
    if (series.rows.empty()) throw Error(Errc::invalid_argument, "empty scaling series");
    const auto base = baseline.value_or(series.rows.front().nodes);
    const auto eff = weak_scaling_efficiency(series, base);
    std::vector<Section> rows;
    double worst = 0.0;
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        const auto& r = series.rows[i];
        const double delta = eff[i] - r.efficiency;
        worst = std::max(worst, std::abs(delta));
        Section row;
        row.put("nodes", r.nodes, "nodes")
            .put("gpus", r.gpus, "GPUs")
            .put("lups_e12", r.lups_e12, "1e12 LUPS")
            .put("recorded_efficiency", r.efficiency, "fraction")
            .put("computed_efficiency", eff[i], "fraction")
            .put("delta", delta, "fraction");
        rows.push_back(std::move(row));
        if (std::abs(delta) > 0.005) {
            warnings.push_back("weak scaling at " + std::to_string(r.nodes) + " nodes: recomputed efficiency " +
                               fmt(num(eff[i])) + " vs recorded " + fmt(r.efficiency));
        }
    }
    Section s;
    s.put("baseline_nodes", base, "nodes");
    s.list("rows", rows);
    s.put("max_abs_delta", worst, "fraction");
    return s;
}

Section energy_section(const MachineSpec& spec, const BenchmarkSet* benchmarks, Warnings& warnings) {
    auto facility = [](const FacilityPower& f, double pue) {
        Section s;
        s.put("it_mw", f.it_mw, "MW")
            .put("pue", pue, "ratio")
            .put("facility_mw", f.facility_mw, "MW")
            .put("overhead_fraction", f.overhead_fraction, "fraction")
            .text("dlc_exceeded", f.dlc_exceeded)
            .put("residual_mw", f.residual_mw, "MW");
        if (f.dlc_capacity_mw) s.put("dlc_capacity_mw", *f.dlc_capacity_mw, "MW");
        return s;
    };
    const auto& power = spec.power;
    Section s;
    const auto nominal = facility_power(power.it_load_mw, power.pue, power.dlc_capacity_mw);
    s.section("facility", facility(nominal, power.pue));
    if (nominal.dlc_exceeded) {
        warnings.push_back("IT load " + fmt(nominal.it_mw) + " MW exceeds the " + fmt(*nominal.dlc_capacity_mw) +
                           " MW direct liquid cooling capacity by " + fmt(num(nominal.residual_mw)) + " MW");
    }
    if (benchmarks == nullptr) return s;
    if (!benchmarks->machine.empty() && benchmarks->machine != spec.name) {
        warnings.push_back("benchmark records describe '" + benchmarks->machine + "', not '" + spec.name + "'");
    }

    for (const auto& r : benchmarks->records) {
        if (r.name != "HPL") continue;
        const double rmax = r.metric("rmax_pflops");
        const double rpeak = r.metric("rpeak_pflops");
        const double mw = r.metric("power_mw");
        const double gfw = energy_efficiency(rmax, mw);
        Section hpl;
        hpl.put("rmax_pflops", rmax, "PFLOPS")
            .put("rpeak_pflops", rpeak, "PFLOPS")
            .put("hpl_efficiency", hpl_efficiency(rmax, rpeak), "fraction")
            .put("power_mw", mw, "MW")
            .put("energy_efficiency_gflops_per_w", gfw, "GFLOPS/W");
        if (r.nodes) hpl.put("nodes", *r.nodes, "nodes");
        const auto at_hpl = facility_power(mw, power.pue, power.dlc_capacity_mw);
        hpl.section("facility", facility(at_hpl, power.pue));
        s.section("hpl", hpl);
        if (auto recorded = r.metrics.find("energy_efficiency_gflops_per_w");
            recorded != r.metrics.end() && std::abs(gfw - recorded->second) > 0.005) {
            warnings.push_back(versus("HPL energy efficiency", num(gfw), recorded->second, "GFLOPS/W"));
        }
    }

    std::vector<Section> apps;
    for (const auto& r : benchmarks->records) {
        if (!r.nodes || !r.metrics.count("tts_s") || !r.metrics.count("ets_kwh")) continue;
        Section a;
        a.text("name", r.name)
            .put("nodes", *r.nodes, "nodes")
            .put("tts_s", r.metric("tts_s"), "s")
            .put("ets_kwh", r.metric("ets_kwh"), "kWh")
            .put("average_power_w_per_node", average_power(r.metric("tts_s"), r.metric("ets_kwh"), *r.nodes),
                 "W/node");
        apps.push_back(std::move(a));
    }
    s.list("applications", apps);
    return s;
}

Section storage_section(const MachineSpec& spec, Warnings& warnings) {
    const auto summary = namespace_summary(spec);
    std::vector<Section> tiers;
    for (const auto& t : summary.tiers) {
        Section ts;
        ts.text("name", t.name).put("raw_pb", t.raw_pb, "PB");
        if (t.declared_raw_pb) {
            ts.put("declared_raw_pb", *t.declared_raw_pb, "PB").put("delta_fraction", *t.delta_fraction, "fraction");
            if (differs(num(t.raw_pb), *t.declared_raw_pb)) {
                warnings.push_back(versus(t.name + " tier raw capacity", num(t.raw_pb), *t.declared_raw_pb, "PB"));
            }
        }
        tiers.push_back(std::move(ts));
    }
    std::vector<Section> modules;
    for (const auto& [model, a] : spec.storage.appliances) {
        const double pb = per_module_capacity(spec, model);
        Section m;
        m.text("model", model)
            .put("count", a.count, "appliances")
            .put("drives", a.drives.count, "drives")
            .put("drive_tb", a.drives.size_tb, "TB")
            .text("drive_kind", std::string(to_string(a.drives.kind)))
            .put("module_pb", pb, "PB")
            .put("module_tb", pb * 1000.0, "TB");
        if (a.declared_module_tb) {
            m.put("declared_module_tb", *a.declared_module_tb, "TB");
            if (differs(num(pb * 1000.0), *a.declared_module_tb)) {
                warnings.push_back(versus(model + " module capacity", num(pb * 1000.0), *a.declared_module_tb, "TB"));
            }
        }
        if (auto body = spec.reference_value("module_capacity_tb." + model + "_body")) {
            warnings.push_back(versus(model + " module capacity (overview figure)", num(pb * 1000.0), *body, "TB"));
        }
        modules.push_back(std::move(m));
    }
    std::vector<Section> namespaces;
    for (const auto& n : summary.namespaces) {
        Section mix;
        for (const auto& [model, count] : n.appliance_mix) mix.put(model, count, "appliances");
        Section ns;
        ns.text("path", n.path)
            .put("declared_net_size_pib", n.net_size_pib, "PiB")
            .put("declared_bandwidth_gbs", n.bandwidth_gbs, "GB/s")
            .put("raw_pb", n.raw_pb, "PB")
            .section("appliance_mix", mix);
        namespaces.push_back(std::move(ns));
    }
    Section s;
    s.list("tiers", tiers).list("modules", modules).list("namespaces", namespaces);
    return s;
}

}  // namespace fabtwin::cli
