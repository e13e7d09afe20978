#include "fabtwin/perf_model.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "fabtwin/error.hpp"
#include "fabtwin/spec_io.hpp"
#include "json.hpp"

namespace fabtwin {

using json = nlohmann::json;

double gpu_peak(const GpuSpec& gpu, NumericFormat format, bool tensor, bool sparse) {
    if (sparse && !tensor) throw Error(Errc::invalid_argument, "sparsity applies to tensor math only");
    const auto* entry = gpu.peaks.find(format, tensor);
    const auto label = gpu.model + " " + std::string(to_string(format)) + (tensor ? " tensor" : "");
    if (entry == nullptr || !entry->value) throw Error(Errc::not_available, label + " is not available");
    if (sparse && !entry->sparsity_doubling) throw Error(Errc::not_available, label + " has no sparse mode");
    return sparse ? 2.0 * *entry->value : *entry->value;
}

double cpu_peak(const CpuSpec& cpu) {
    return cpu.cores * static_cast<double>(cpu.flops_per_cycle_per_core) * cpu.clock_ghz / 1000.0;
}

double node_peak(const NodeSpec& node, NumericFormat format, bool tensor, bool sparse, bool include_cpu) {
    double total = 0.0;
    for (const auto& gpu : node.gpus) total += gpu_peak(gpu, format, tensor, sparse);
    if (include_cpu && format == NumericFormat::FP64) total += cpu_peak(node.cpu);
    return total;
}

double machine_peak(const MachineSpec& spec, NumericFormat format, bool tensor, bool sparse, bool include_cpu) {
    double total = 0.0;
    for (const auto& cell : spec.cells) {
        for (const auto& group : cell.rack_groups) {
            const auto& node = spec.node_type(group.node_type);
            if (!node.has_gpus() && !include_cpu) continue;
            total += static_cast<double>(group.nodes()) * node_peak(node, format, tensor, sparse, include_cpu);
        }
    }
    return total;
}

double hpl_efficiency(double rmax, double rpeak) {
    if (rpeak <= 0) throw Error(Errc::invalid_value, "rpeak must be > 0");
    return rmax / rpeak;
}

double energy_efficiency(double rmax_pflops, double power_mw) {
    if (power_mw <= 0) throw Error(Errc::invalid_value, "power must be > 0");
    return rmax_pflops * 1e6 / (power_mw * 1e6);
}

NodeBandwidth node_bandwidth(const NodeSpec& node) {
    NodeBandwidth bw;
    for (const auto& gpu : node.gpus) bw.hbm_aggregate_gbs += gpu.hbm_bw_gbs;
    bw.ddr_gbs = node.ram_bw_gbs;
    bw.pcie_total_gbs = node.pcie_per_gpu_gbs * static_cast<double>(node.gpus.size());
    bw.nvlink_pair_gbs = node.nvlink_pair_gbs;
    return bw;
}

std::string_view to_string(Bound bound) { return bound == Bound::Memory ? "memory" : "compute"; }

RooflinePoint roofline(const NodeSpec& node, double intensity) {
    if (intensity < 0) throw Error(Errc::invalid_value, "arithmetic intensity must be >= 0");
    if (!node.has_gpus()) throw Error(Errc::not_available, "roofline needs a GPU node");
    RooflinePoint p;
    p.arithmetic_intensity = intensity;
    p.peak_tflops = node_peak(node, NumericFormat::FP64, true, false, false);
    p.bandwidth_gbs = node_bandwidth(node).hbm_aggregate_gbs;
    p.ridge_point = p.peak_tflops * 1000.0 / p.bandwidth_gbs;
    const double memory_tflops = intensity * p.bandwidth_gbs / 1000.0;
    if (memory_tflops < p.peak_tflops) {
        p.attainable_tflops = memory_tflops;
        p.bound = Bound::Memory;
    } else {
        p.attainable_tflops = p.peak_tflops;
        p.bound = Bound::Compute;
    }
    return p;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_field(std::string_view text, std::size_t line_no) {
    text = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(Errc::syntax, "line " + std::to_string(line_no) + ": bad number '" + std::string(text) + "'");
    }
    return value;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

ScalingSeries parse_scaling_csv(std::string_view text) {
    ScalingSeries series;
    std::size_t line_no = 0;
    bool header_seen = false;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "nodes,gpus,lups_e12,efficiency") {
                throw Error(Errc::syntax, "expected header nodes,gpus,lups_e12,efficiency");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4) throw Error(Errc::syntax, "line " + std::to_string(line_no) + ": expected 4 fields");
        ScalingRow row{parse_field<std::uint32_t>(fields[0], line_no), parse_field<std::uint32_t>(fields[1], line_no),
                       parse_field<double>(fields[2], line_no), parse_field<double>(fields[3], line_no)};
        if (row.nodes == 0 || row.gpus == 0) {
            throw Error(Errc::non_positive, "line " + std::to_string(line_no) + ": nodes and gpus must be > 0");
        }
        series.rows.push_back(row);
    }
    if (!header_seen) throw Error(Errc::syntax, "empty scaling series");
    return series;
}

ScalingSeries load_scaling_csv(const std::filesystem::path& path) { return parse_scaling_csv(read_text_file(path)); }

std::string to_scaling_csv(const ScalingSeries& series) {
    std::string out = "nodes,gpus,lups_e12,efficiency\n";
    for (const auto& r : series.rows) {
        out += std::to_string(r.nodes) + "," + std::to_string(r.gpus) + "," + format_double(r.lups_e12) + "," +
               format_double(r.efficiency) + "\n";
    }
    return out;
}

std::vector<double> weak_scaling_efficiency(const ScalingSeries& series, std::uint32_t baseline_nodes) {
    const ScalingRow* base = nullptr;
    for (const auto& r : series.rows) {
        if (r.nodes == baseline_nodes) base = &r;
    }
    if (base == nullptr) {
        throw Error(Errc::invalid_argument, "no row with " + std::to_string(baseline_nodes) + " nodes");
    }
    const double per_gpu_base = base->lups_e12 / base->gpus;
    if (per_gpu_base <= 0) throw Error(Errc::invalid_value, "baseline throughput must be > 0");
    std::vector<double> out;
    for (const auto& r : series.rows) out.push_back(r.lups_e12 / r.gpus / per_gpu_base);
    return out;
}

double average_power(double tts_s, double ets_kwh, std::uint32_t nodes) {
    if (tts_s <= 0) throw Error(Errc::invalid_value, "time to solution must be > 0");
    if (nodes == 0) throw Error(Errc::invalid_value, "node count must be > 0");
    return ets_kwh * 3.6e6 / tts_s / nodes;
}

FacilityPower facility_power(double it_mw, double pue, std::optional<double> dlc_capacity_mw) {
    if (pue < 1.0) throw Error(Errc::invalid_value, "PUE must be >= 1");
    FacilityPower p;
    p.it_mw = it_mw;
    p.facility_mw = it_mw * pue;
    p.overhead_fraction = pue - 1.0;
    p.dlc_capacity_mw = dlc_capacity_mw;
    if (dlc_capacity_mw && it_mw > *dlc_capacity_mw) {
        p.dlc_exceeded = true;
        p.residual_mw = it_mw - *dlc_capacity_mw;
    }
    return p;
}

double BenchmarkRecord::metric(const std::string& key) const {
    auto it = metrics.find(key);
    if (it == metrics.end()) throw Error(Errc::not_available, name + " has no metric '" + key + "'");
    return it->second;
}

BenchmarkSet parse_benchmarks(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::syntax, "benchmark file: syntax error at byte " + std::to_string(e.byte));
    }
    if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array()) {
        throw Error(Errc::syntax, "benchmark file: expected an object with a 'records' array");
    }
    BenchmarkSet out;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "machine") {
                out.machine = value.get<std::string>();
            } else if (key != "records") {
                throw Error(Errc::unknown_field, "benchmark file: unknown field '" + key + "'");
            }
        }
        for (const auto& item : doc["records"]) {
            BenchmarkRecord r;
            for (const auto& [key, value] : item.items()) {
                if (key == "name") {
                    r.name = value.get<std::string>();
                } else if (key == "nodes") {
                    const auto n = value.get<std::int64_t>();
                    if (n <= 0) throw Error(Errc::non_positive, "benchmark nodes must be > 0");
                    r.nodes = static_cast<std::uint32_t>(n);
                } else if (key == "metrics") {
                    for (const auto& [metric, v] : value.items()) {
                        const auto x = v.get<double>();
                        if (x < 0) throw Error(Errc::invalid_value, "metric '" + metric + "' must be >= 0");
                        r.metrics[metric] = x;
                    }
                } else {
                    throw Error(Errc::unknown_field, "benchmark record: unknown field '" + key + "'");
                }
            }
            if (r.name.empty()) throw Error(Errc::syntax, "benchmark record without a name");
            out.records.push_back(std::move(r));
        }
    } catch (const json::type_error& e) {
        throw Error(Errc::syntax, std::string("benchmark file: ") + e.what());
    }
    return out;
}

BenchmarkSet load_benchmarks(const std::filesystem::path& path) { return parse_benchmarks(read_text_file(path)); }

const BenchmarkRecord& BenchmarkSet::find(std::string_view name) const {
    for (const auto& r : records) {
        if (r.name == name) return r;
    }
    throw Error(Errc::not_available, "no benchmark record named '" + std::string(name) + "'");
}

}  // namespace fabtwin
