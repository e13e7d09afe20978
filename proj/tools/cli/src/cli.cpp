#include "fabtwin/cli/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fabtwin/error.hpp"
#include "fabtwin/spec_io.hpp"
#include "sections.hpp"

#ifndef FABTWIN_DATA_DIR
#define FABTWIN_DATA_DIR "."
#endif

namespace fabtwin::cli {

namespace {

enum Exit { kOk = 0, kFindings = 1, kUsage = 2 };

// Raised for conditions that end the run with a given exit code.
struct Stop {
    int code;
    std::string message;
};

bool is_schema_error(Errc c) {
    return c == Errc::unknown_field || c == Errc::unresolved_reference || c == Errc::non_positive ||
           c == Errc::invalid_value;
}

struct Options {
    std::string spec_path;
    std::string format = "json";
    bool pretty = false;
    std::optional<std::uint32_t> from;
    std::optional<std::uint32_t> to;
    std::optional<int> cell;
    std::vector<int> cells_a;
    std::string format_fp = "FP64";
    bool tensor = false;
    bool sparse = false;
    bool include_cpu = false;
    std::string scope = "machine";
    std::string node_type;
    std::string gpu;
    std::optional<double> ai;
    std::optional<std::uint32_t> baseline;
    std::string series;
    std::string benchmarks;
    std::string export_path;
};

class Runner {
  public:
    Runner(const Options& o, std::string command) : opt_(o) { doc_.command = std::move(command); }

    Outcome execute() {
        try {
            dispatch();
        } catch (const Stop& s) {
            return finish(s.code, s.message);
        } catch (const Error& e) {
            const auto c = e.code();
            const bool findings = c == Errc::port_budget || c == Errc::uneven_global_links ||
                                  c == Errc::disconnected || c == Errc::over_allocation;
            return finish(findings ? kFindings : kUsage, e.what());
        }
        return finish(kOk, "");
    }

  private:
    Outcome finish(int code, const std::string& message) {
        Outcome o;
        o.exit_code = code;
        if (!message.empty()) o.err = "error: " + message + "\n";
        if (code == kOk || has_violations_) o.out = render(doc_, output_format(), opt_.pretty);
        return o;
    }

    OutputFormat output_format() const { return opt_.format == "csv" ? OutputFormat::Csv : OutputFormat::Json; }

    const MachineSpec& spec() {
        if (spec_) return *spec_;
        if (opt_.spec_path.empty()) throw Stop{kUsage, "--spec PATH (or FABRIC_SPEC) is required"};
        doc_.inputs["spec"] = opt_.spec_path;
        std::string text;
        try {
            text = read_text_file(opt_.spec_path);
        } catch (const Error& e) {
            throw Stop{kUsage, e.what()};
        }
        try {
            spec_ = parse_spec(text);
        } catch (const Error& e) {
            throw Stop{is_schema_error(e.code()) ? kFindings : kUsage, e.what()};
        }
        doc_.spec_name = spec_->name;
        const auto violations = validate_spec(*spec_);
        if (!violations.empty() && doc_.command != "validate") report_violations(violations);
        return *spec_;
    }

    [[noreturn]] void report_violations(const std::vector<Violation>& violations) {
        std::vector<Section> items;
        for (const auto& v : violations) {
            Section s;
            s.text("path", v.path).text("message", v.message);
            items.push_back(std::move(s));
        }
        doc_.results = Section();
        doc_.results.list("violations", items);
        doc_.warnings.clear();
        has_violations_ = true;
        throw Stop{kFindings, std::to_string(violations.size()) + " violation(s) in spec"};
    }

    const FabricGraph& graph() {
        if (!graph_) graph_ = build_topology(spec());
        return *graph_;
    }

    NumericFormat numeric_format() const {
        auto f = parse_numeric_format(opt_.format_fp);
        if (!f) throw Stop{kUsage, "unknown numeric format '" + opt_.format_fp + "'"};
        return *f;
    }

    std::string data_path(const std::string& given, const std::filesystem::path& fallback, const char* key) {
        const auto path = given.empty() ? fallback.string() : given;
        doc_.inputs[key] = path;
        return path;
    }

    void write_export(const std::string& content) {
        doc_.inputs["export"] = opt_.export_path;
        std::ofstream out(opt_.export_path, std::ios::binary);
        if (!out || !(out << content)) throw Stop{kUsage, "cannot write '" + opt_.export_path + "'"};
    }

    void dispatch() {
        const auto& cmd = doc_.command;
        auto& r = doc_.results;
        auto& w = doc_.warnings;
        if (cmd == "validate") {
            const auto violations = validate_spec(spec());
            if (!violations.empty()) report_violations(violations);
            r.text("valid", true).list("violations", {});
        } else if (cmd == "census") {
            r = census_section(spec());
        } else if (cmd == "topo") {
            r = topology_section(spec(), graph(), w);
            if (opt_.cell) {
                doc_.inputs["cell"] = *opt_.cell;
                r.section("cell", leaf_ports_section(graph(), *opt_.cell));
            }
            if (!opt_.export_path.empty()) {
                const bool as_json = std::filesystem::path(opt_.export_path).extension() == ".json";
                write_export(as_json ? export_graph_json(graph()) : export_edge_list(graph()));
            }
        } else if (cmd == "latency") {
            if (!opt_.from || !opt_.to) throw Stop{kUsage, "latency needs --from and --to"};
            doc_.inputs["from"] = *opt_.from;
            doc_.inputs["to"] = *opt_.to;
            r = route_section(graph(), LatencyModel::from_spec(spec()), *opt_.from, *opt_.to);
        } else if (cmd == "worst-latency") {
            r = worst_latency_section(spec(), graph(), w);
        } else if (cmd == "oversub") {
            if (opt_.cell) doc_.inputs["cell"] = *opt_.cell;
            try {
                r = oversubscription_section(spec(), graph(), opt_.cell);
            } catch (const Error& e) {
                if (e.code() != Errc::invalid_value) throw;
                report_violations({{"fabric.spine_uplinks", e.what()}});
            }
        } else if (cmd == "bisection") {
            auto cells = opt_.cells_a;
            if (cells.empty()) {
                const auto& ids = graph().cell_ids();
                cells.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(ids.size() / 2));
            }
            doc_.inputs["cells_a"] = cells;
            r = bisection_section(graph(), cells);
        } else if (cmd == "peak") {
            PeakQuery q;
            q.format = numeric_format();
            q.tensor = opt_.tensor;
            q.sparse = opt_.sparse;
            q.scope = opt_.scope;
            q.node_type = opt_.node_type;
            q.gpu = opt_.gpu;
            q.include_cpu = opt_.include_cpu;
            doc_.inputs["format_fp"] = opt_.format_fp;
            doc_.inputs["tensor"] = opt_.tensor;
            doc_.inputs["sparse"] = opt_.sparse;
            doc_.inputs["scope"] = opt_.scope;
            if (!opt_.node_type.empty()) doc_.inputs["node_type"] = opt_.node_type;
            if (!opt_.gpu.empty()) doc_.inputs["gpu"] = opt_.gpu;
            if (opt_.include_cpu) doc_.inputs["include_cpu"] = true;
            r = peak_section(spec(), q, w);
        } else if (cmd == "roofline") {
            if (!opt_.ai) throw Stop{kUsage, "roofline needs --ai"};
            doc_.inputs["ai"] = *opt_.ai;
            if (!opt_.node_type.empty()) doc_.inputs["node_type"] = opt_.node_type;
            r = roofline_section(spec(), opt_.node_type, *opt_.ai);
        } else if (cmd == "scaling") {
            if (!opt_.spec_path.empty()) spec();
            const auto path = data_path(opt_.series, default_data_files().scaling_series, "series");
            const auto series = load_scaling_csv(path);
            if (opt_.baseline) doc_.inputs["baseline"] = *opt_.baseline;
            r = scaling_section(series, opt_.baseline, w);
            if (!opt_.export_path.empty()) {
                ScalingSeries recomputed = series;
                const auto eff = weak_scaling_efficiency(series, opt_.baseline.value_or(series.rows.front().nodes));
                for (std::size_t i = 0; i < eff.size(); ++i) recomputed.rows[i].efficiency = num(eff[i]);
                write_export(to_scaling_csv(recomputed));
            }
        } else if (cmd == "energy") {
            const auto path = data_path(opt_.benchmarks, default_data_files().benchmarks, "benchmarks");
            const auto records = load_benchmarks(path);
            r = energy_section(spec(), &records, w);
        } else if (cmd == "storage") {
            r = storage_section(spec(), w);
        } else if (cmd == "report") {
            DataFiles data = default_data_files();
            if (!opt_.benchmarks.empty()) data.benchmarks = opt_.benchmarks;
            if (!opt_.series.empty()) data.scaling_series = opt_.series;
            auto rep = report_all(spec(), data);
            r = Section::adopt(std::move(rep.results), std::move(rep.units));
            w = std::move(rep.warnings);
        }
    }

    Options opt_;
    Document doc_;
    std::optional<MachineSpec> spec_;
    std::optional<FabricGraph> graph_;
    bool has_violations_ = false;
};

}  // namespace

DataFiles default_data_files() {
    const std::filesystem::path dir = FABTWIN_DATA_DIR;
    return {dir / "benchmarks.json", dir / "lbm_weak_scaling.csv"};
}

Report report_all(const MachineSpec& spec, const DataFiles& data) {
    Report rep;
    const auto graph = build_topology(spec);
    Section s;
    Warnings w;
    s.section("census", census_section(spec));
    s.section("topology", topology_section(spec, graph, w));
    s.section("oversubscription", oversubscription_section(spec, graph, std::nullopt));
    s.section("worst_latency", worst_latency_section(spec, graph, w));
    s.section("peaks", machine_peaks_section(spec, w));
    s.section("storage", storage_section(spec, w));

    std::optional<BenchmarkSet> benchmarks;
    if (!data.benchmarks.empty() && std::filesystem::exists(data.benchmarks)) {
        auto loaded = load_benchmarks(data.benchmarks);
        if (loaded.machine == spec.name) benchmarks = std::move(loaded);
    }
    s.section("energy", energy_section(spec, benchmarks ? &*benchmarks : nullptr, w));
    if (benchmarks && !data.scaling_series.empty() && std::filesystem::exists(data.scaling_series)) {
        s.section("scaling", scaling_section(load_scaling_csv(data.scaling_series), std::nullopt, w));
    }

    for (const auto& n : spec.notes) w.push_back(n.field + ": " + n.text);
    rep.results = s.values();
    rep.units = s.units();
    rep.warnings = std::move(w);
    return rep;
}

Outcome run(const std::vector<std::string>& args) {
    CLI::App app{"fabtwin: machine-description analytics for dragonfly+ clusters", "fabtwin"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kToolVersion);

    Options opt;
    if (const char* env = std::getenv("FABRIC_SPEC")) opt.spec_path = env;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--spec", opt.spec_path, "Machine description (JSON); default $FABRIC_SPEC");
        sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_flag("--pretty", opt.pretty, "Human-readable table instead of JSON/CSV");
    };
    struct Command {
        const char* name;
        const char* help;
    };
    const Command commands[] = {
        {"validate", "Check spec invariants"},
        {"census", "Node, rack and blade counts"},
        {"topo", "Build the fabric; switch census and global-link regularity"},
        {"latency", "Route and price the path between two nodes"},
        {"worst-latency", "Largest node-to-node latency"},
        {"oversub", "Leaf oversubscription and spine pruning"},
        {"bisection", "Bandwidth across a cell bipartition"},
        {"peak", "Peak throughput of a GPU, node or the machine"},
        {"roofline", "Attainable throughput at an arithmetic intensity"},
        {"scaling", "Weak-scaling efficiency of a recorded series"},
        {"energy", "HPL, application and facility power figures"},
        {"storage", "Tier, module and namespace capacities"},
        {"report", "All of the above in one document"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        common(sub);
        subs[c.name] = sub;
    }
    subs["topo"]->add_option("--cell", opt.cell, "Per-leaf port census of one cell");
    subs["topo"]->add_option("--export", opt.export_path, "Write the edge list (.json: graph document)");
    subs["latency"]->add_option("--from", opt.from, "Source node id")->required();
    subs["latency"]->add_option("--to", opt.to, "Target node id")->required();
    subs["oversub"]->add_option("--cell", opt.cell, "Cell id; default all cells");
    subs["bisection"]->add_option("--cells-a", opt.cells_a, "Cells on side A; default first half")->delimiter(',');
    auto* peak = subs["peak"];
    peak->add_option("--format-fp", opt.format_fp, "FP64, FP32, TF32, FP16, BF16, INT8, INT4");
    peak->add_flag("--tensor", opt.tensor, "Tensor-core rate");
    peak->add_flag("--sparse", opt.sparse, "Structured-sparsity rate");
    peak->add_option("--scope", opt.scope, "gpu, node or machine")->check(CLI::IsMember({"gpu", "node", "machine"}));
    peak->add_option("--node-type", opt.node_type, "Node type for node scope");
    peak->add_option("--gpu", opt.gpu, "gpu_catalog entry for gpu scope");
    peak->add_flag("--include-cpu", opt.include_cpu, "Add host CPU FP64 peak");
    subs["roofline"]->add_option("--ai", opt.ai, "Arithmetic intensity, FLOP/byte")->required();
    subs["roofline"]->add_option("--node-type", opt.node_type, "Node type; default first GPU node type");
    subs["scaling"]->add_option("--series", opt.series, "Scaling CSV; default bundled LBM series");
    subs["scaling"]->add_option("--baseline", opt.baseline, "Baseline row node count; default first row");
    subs["scaling"]->add_option("--export", opt.export_path, "Write the series with recomputed efficiency");
    subs["energy"]->add_option("--benchmarks", opt.benchmarks, "Benchmark records; default bundled file");
    subs["report"]->add_option("--benchmarks", opt.benchmarks, "Benchmark records; default bundled file");
    subs["report"]->add_option("--series", opt.series, "Scaling CSV; default bundled LBM series");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = app.exit(e, out, err);
        if (code == 0) return {kOk, out.str(), err.str()};
        return {kUsage, out.str(), err.str()};
    }

    std::string command;
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) command = name;
    }
    return Runner(opt, command).execute();
}

}  // namespace fabtwin::cli
