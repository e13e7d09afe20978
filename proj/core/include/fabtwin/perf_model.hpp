#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fabtwin/machine_spec.hpp"

namespace fabtwin {

// Peaks are in teraFLOPS (teraOPS for integer formats).

// Throws Errc::not_available for an absent or "n.a." entry, and
// Errc::invalid_argument for sparse without tensor.
double gpu_peak(const GpuSpec& gpu, NumericFormat format, bool tensor, bool sparse);

// CPU FP64 peak: cores x FLOP/cycle x GHz.
double cpu_peak(const CpuSpec& cpu);

// Sum of the node's GPU peaks, plus the CPU peak for FP64 when include_cpu.
double node_peak(const NodeSpec& node, NumericFormat format, bool tensor, bool sparse, bool include_cpu);

// Sum of node_peak over every compute node of the machine.
double machine_peak(const MachineSpec& spec, NumericFormat format, bool tensor, bool sparse,
                    bool include_cpu = false);

double hpl_efficiency(double rmax, double rpeak);

// GF/W from PF and MW.
double energy_efficiency(double rmax_pflops, double power_mw);

struct NodeBandwidth {
    double hbm_aggregate_gbs = 0.0;
    double ddr_gbs = 0.0;
    double pcie_total_gbs = 0.0;
    double nvlink_pair_gbs = 0.0;
};

NodeBandwidth node_bandwidth(const NodeSpec& node);

enum class Bound { Memory, Compute };

std::string_view to_string(Bound bound);

struct RooflinePoint {
    double arithmetic_intensity = 0.0;  // FLOP/byte
    double attainable_tflops = 0.0;
    Bound bound = Bound::Memory;
    double peak_tflops = 0.0;
    double bandwidth_gbs = 0.0;
    double ridge_point = 0.0;
};

// FP64 tensor peak of the node's GPUs against their aggregate HBM bandwidth.
RooflinePoint roofline(const NodeSpec& node, double intensity);

struct ScalingRow {
    std::uint32_t nodes = 0;
    std::uint32_t gpus = 0;
    double lups_e12 = 0.0;
    double efficiency = 0.0;  // as recorded

    bool operator==(const ScalingRow&) const = default;
};

struct ScalingSeries {
    std::vector<ScalingRow> rows;

    bool operator==(const ScalingSeries&) const = default;
};

// CSV with header `nodes,gpus,lups_e12,efficiency`.
ScalingSeries parse_scaling_csv(std::string_view text);
ScalingSeries load_scaling_csv(const std::filesystem::path& path);
std::string to_scaling_csv(const ScalingSeries& series);

// Per-GPU throughput of each row relative to the row whose node count is
// `baseline_nodes`.
std::vector<double> weak_scaling_efficiency(const ScalingSeries& series, std::uint32_t baseline_nodes);

// Watts per node from time to solution (s) and energy to solution (kWh).
double average_power(double tts_s, double ets_kwh, std::uint32_t nodes);

struct FacilityPower {
    double it_mw = 0.0;
    double facility_mw = 0.0;
    double overhead_fraction = 0.0;
    std::optional<double> dlc_capacity_mw;
    bool dlc_exceeded = false;
    double residual_mw = 0.0;  // IT load above the DLC capacity
};

FacilityPower facility_power(double it_mw, double pue, std::optional<double> dlc_capacity_mw = std::nullopt);

struct BenchmarkRecord {
    std::string name;
    std::optional<std::uint32_t> nodes;
    std::map<std::string, double> metrics;

    double metric(const std::string& key) const;

    bool operator==(const BenchmarkRecord&) const = default;
};

// Measured results for one machine: `{"machine": name, "records": [...]}`.
struct BenchmarkSet {
    std::string machine;
    std::vector<BenchmarkRecord> records;

    const BenchmarkRecord& find(std::string_view name) const;

    bool operator==(const BenchmarkSet&) const = default;
};

BenchmarkSet parse_benchmarks(std::string_view text);
BenchmarkSet load_benchmarks(const std::filesystem::path& path);

}  // namespace fabtwin
