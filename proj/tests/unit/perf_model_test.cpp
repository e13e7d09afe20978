#include <gtest/gtest.h>

#include <cmath>

#include "fabtwin/error.hpp"
#include "fabtwin/perf_model.hpp"
#include "oracles.hpp"

using namespace fabtwin;
using fabtwin::testing::first_cells;
using fabtwin::testing::load_data_spec;

namespace {

const MachineSpec& leonardo() {
    static const MachineSpec spec = load_data_spec("leonardo.json");
    return spec;
}

template <typename F>
Errc error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return Errc::io;
}

struct Cell {
    NumericFormat format;
    bool tensor;
    std::optional<double> value;
};

// GPU comparison table, one column per device.
const std::vector<Cell> kCustomA100 = {
    {NumericFormat::FP64, false, 11.2}, {NumericFormat::FP32, false, 22.4}, {NumericFormat::FP64, true, 22.4},
    {NumericFormat::TF32, true, 179},   {NumericFormat::FP16, true, 358},   {NumericFormat::BF16, true, 358},
    {NumericFormat::INT8, true, 716},   {NumericFormat::INT4, true, 1432},
};
const std::vector<Cell> kA100 = {
    {NumericFormat::FP64, false, 9.7}, {NumericFormat::FP32, false, 19.5}, {NumericFormat::FP64, true, 19.5},
    {NumericFormat::TF32, true, 156},  {NumericFormat::FP16, true, 312},   {NumericFormat::BF16, true, 312},
    {NumericFormat::INT8, true, 624},  {NumericFormat::INT4, true, 1248},
};
const std::vector<Cell> kV100 = {
    {NumericFormat::FP64, false, 7.8},          {NumericFormat::FP32, false, 15.7},
    {NumericFormat::FP64, true, std::nullopt},  {NumericFormat::TF32, true, std::nullopt},
    {NumericFormat::FP16, true, std::nullopt},  {NumericFormat::BF16, true, std::nullopt},
    {NumericFormat::INT8, true, std::nullopt},  {NumericFormat::INT4, true, std::nullopt},
};

}  // namespace

TEST(GpuPeak, TableFidelity) {
    for (const auto& [name, column] : {std::pair{"A100-custom", &kCustomA100}, {"A100", &kA100}, {"V100", &kV100}}) {
        const auto& gpu = leonardo().gpu_catalog.at(name);
        for (const auto& cell : *column) {
            if (cell.value) {
                EXPECT_EQ(gpu_peak(gpu, cell.format, cell.tensor, false), *cell.value)
                    << name << " " << to_string(cell.format) << " tensor=" << cell.tensor;
            } else {
                EXPECT_EQ(error_of([&] { gpu_peak(gpu, cell.format, cell.tensor, false); }), Errc::not_available);
            }
        }
    }
}

TEST(GpuPeak, BoosterGpuIsTheCustomColumn) {
    EXPECT_EQ(leonardo().node_types.at("booster").gpus.front(), leonardo().gpu_catalog.at("A100-custom"));
}

TEST(GpuPeak, SparsityDoublesTensorEntries) {
    for (const auto& [name, gpu] : leonardo().gpu_catalog) {
        for (const auto& e : gpu.peaks.entries) {
            if (!e.tensor || !e.value || !e.sparsity_doubling) continue;
            EXPECT_EQ(gpu_peak(gpu, e.format, true, true), 2 * *e.value) << name;
        }
    }
    const auto& custom = leonardo().gpu_catalog.at("A100-custom");
    EXPECT_EQ(gpu_peak(custom, NumericFormat::FP16, true, true), 716.0);
    EXPECT_EQ(gpu_peak(custom, NumericFormat::INT8, true, true), 1432.0);
}

TEST(GpuPeak, Errors) {
    const auto& v100 = leonardo().gpu_catalog.at("V100");
    EXPECT_EQ(error_of([&] { gpu_peak(v100, NumericFormat::TF32, true, false); }), Errc::not_available);
    const auto& a100 = leonardo().gpu_catalog.at("A100");
    EXPECT_EQ(error_of([&] { gpu_peak(a100, NumericFormat::FP64, false, true); }), Errc::invalid_argument);
}

TEST(NodePeak, Booster) {
    const auto& node = leonardo().node_types.at("booster");
    EXPECT_DOUBLE_EQ(node_peak(node, NumericFormat::FP64, false, false, false), 44.8);
    EXPECT_DOUBLE_EQ(node_peak(node, NumericFormat::FP64, true, false, false), 89.6);
    EXPECT_DOUBLE_EQ(node_peak(node, NumericFormat::FP64, false, false, true), 44.8 + cpu_peak(node.cpu));
}

TEST(NodePeak, NoGpusIsZero) {
    EXPECT_EQ(node_peak(leonardo().node_types.at("dc"), NumericFormat::FP64, true, false, false), 0.0);
    const auto& cpu = leonardo().node_types.at("dc").cpu;
    EXPECT_DOUBLE_EQ(cpu_peak(cpu), cpu.cores * cpu.flops_per_cycle_per_core * cpu.clock_ghz / 1000.0);
}

TEST(MachinePeak, LeonardoFp64Tensor) {
    const double pf = machine_peak(leonardo(), NumericFormat::FP64, true, false) / 1000.0;
    EXPECT_NEAR(pf, 3456 * 89.6 / 1000.0, 1e-9);
    EXPECT_LE(std::abs(pf - 304.5) / 304.5, 0.02);
}

TEST(MachinePeak, LeonardoInt8Sparse) {
    EXPECT_DOUBLE_EQ(machine_peak(leonardo(), NumericFormat::INT8, true, true), 3456.0 * 4 * 1432);
}

TEST(MachinePeak, SingleCellToy) {
    const auto spec = first_cells(load_data_spec("toy.json"), 1);
    EXPECT_DOUBLE_EQ(machine_peak(spec, NumericFormat::FP64, false, false), 4.0);
}

TEST(MachinePeak, Linearity) {
    auto spec = load_data_spec("toy.json");
    const double base = machine_peak(spec, NumericFormat::FP64, true, false);
    double sum = 0.0;
    for (const auto& cell : spec.cells) {
        for (const auto& g : cell.rack_groups) {
            sum += g.nodes() * node_peak(spec.node_type(g.node_type), NumericFormat::FP64, true, false, false);
        }
    }
    EXPECT_DOUBLE_EQ(base, sum);
    for (auto& cell : spec.cells) cell.rack_groups[0].racks *= 2;
    EXPECT_DOUBLE_EQ(machine_peak(spec, NumericFormat::FP64, true, false), 2 * base);
}

TEST(Efficiency, Hpl) {
    EXPECT_NEAR(hpl_efficiency(238.7, 304.5), 0.784, 0.001);
    EXPECT_EQ(hpl_efficiency(5.0, 5.0), 1.0);
    EXPECT_EQ(hpl_efficiency(0.0, 304.5), 0.0);
    EXPECT_EQ(error_of([] { hpl_efficiency(1.0, 0.0); }), Errc::invalid_value);
}

TEST(Efficiency, Energy) {
    EXPECT_NEAR(energy_efficiency(238.7, 7.4), 32.2568, 1e-4);
    EXPECT_LE(std::abs(energy_efficiency(238.7, 7.4) - 32.2), 0.2);
    EXPECT_DOUBLE_EQ(energy_efficiency(1.0, 1.0), 1.0);
    EXPECT_EQ(energy_efficiency(0.0, 7.4), 0.0);
    EXPECT_EQ(error_of([] { energy_efficiency(1.0, 0.0); }), Errc::invalid_value);
}

TEST(Roofline, BoosterNode) {
    const auto& node = leonardo().node_types.at("booster");
    const auto zero = roofline(node, 0.0);
    EXPECT_EQ(zero.attainable_tflops, 0.0);
    EXPECT_EQ(zero.bound, Bound::Memory);
    EXPECT_NEAR(zero.ridge_point, 89600.0 / 6552.0, 1e-12);
    const auto high = roofline(node, 100.0);
    EXPECT_EQ(high.bound, Bound::Compute);
    EXPECT_DOUBLE_EQ(high.attainable_tflops, 89.6);
    EXPECT_EQ(error_of([&] { roofline(node, -1.0); }), Errc::invalid_value);
}

TEST(Roofline, ContinuousAndNonDecreasing) {
    const auto& node = leonardo().node_types.at("booster");
    const double ridge = roofline(node, 0.0).ridge_point;
    double prev = 0.0;
    for (double ai = 0.0; ai <= 40.0; ai += 0.125) {
        const double y = roofline(node, ai).attainable_tflops;
        EXPECT_GE(y, prev);
        EXPECT_LE(y - prev, 0.125 * 6.552 + 1e-9);
        if (ai >= ridge) EXPECT_DOUBLE_EQ(y, 89.6);
        prev = y;
    }
    EXPECT_NEAR(roofline(node, ridge).attainable_tflops, 89.6, 1e-9);
}

TEST(Scaling, LbmTableWithinTolerance) {
    const auto series = load_scaling_csv(fabtwin::testing::data_dir() / "lbm_weak_scaling.csv");
    ASSERT_EQ(series.rows.size(), 9u);
    const auto eff = weak_scaling_efficiency(series, 2);
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        const auto& r = series.rows[i];
        const double oracle = (r.lups_e12 / r.gpus) / (0.0476 / 8);
        EXPECT_NEAR(eff[i], oracle, 1e-12);
        EXPECT_NEAR(eff[i], r.efficiency, 0.02) << r.nodes;
        EXPECT_EQ(r.gpus, 4 * r.nodes);
    }
    EXPECT_EQ(eff[0], 1.0);
    EXPECT_NEAR(eff[1], 1.008, 1e-3);
    EXPECT_NEAR(eff[5], 0.886, 1e-3);
    EXPECT_NEAR(eff[8], 0.869, 1e-3);
}

TEST(Scaling, Errors) {
    ScalingSeries s{{{2, 8, 0.0, 1.0}, {4, 16, 1.0, 1.0}}};
    EXPECT_EQ(error_of([&] { weak_scaling_efficiency(s, 2); }), Errc::invalid_value);
    EXPECT_EQ(error_of([&] { weak_scaling_efficiency(s, 3); }), Errc::invalid_argument);
    EXPECT_EQ(error_of([] { parse_scaling_csv("nodes,gpus\n1,2\n"); }), Errc::syntax);
}

TEST(Scaling, CsvRoundTrip) {
    const auto series = load_scaling_csv(fabtwin::testing::data_dir() / "lbm_weak_scaling.csv");
    EXPECT_EQ(parse_scaling_csv(to_scaling_csv(series)), series);
}

TEST(Power, AverageFromApplicationTable) {
    EXPECT_NEAR(average_power(439, 1.14, 12), 779.0, 1.0);
    EXPECT_NEAR(average_power(178, 0.56, 12), 944.0, 1.0);
    EXPECT_EQ(average_power(100, 0.0, 4), 0.0);
    EXPECT_EQ(error_of([] { average_power(0, 1.0, 4); }), Errc::invalid_value);
    EXPECT_EQ(error_of([] { average_power(10, 1.0, 0); }), Errc::invalid_value);
}

TEST(Power, EnergyIdentity) {
    for (const auto& [tts, ets, nodes] : {std::tuple{439.0, 1.14, 12u}, {178.0, 0.56, 12u}, {2874.0, 11.7, 32u}}) {
        const double w = average_power(tts, ets, nodes);
        EXPECT_NEAR(w * tts * nodes / 3.6e6, ets, ets * 1e-9);
    }
}

TEST(Power, Facility) {
    const auto hpl = facility_power(7.4, 1.1);
    EXPECT_NEAR(hpl.facility_mw, 8.14, 1e-12);
    EXPECT_NEAR(hpl.overhead_fraction, 0.1, 1e-12);
    EXPECT_EQ(facility_power(3.0, 1.0).facility_mw, 3.0);
    const auto full = facility_power(10.0, 1.1, 8.0);
    EXPECT_NEAR(full.facility_mw, 11.0, 1e-12);
    EXPECT_TRUE(full.dlc_exceeded);
    EXPECT_NEAR(full.residual_mw, 2.0, 1e-12);
    EXPECT_EQ(error_of([] { facility_power(1.0, 0.9); }), Errc::invalid_value);
}

TEST(Benchmarks, BundledRecords) {
    const auto set = load_benchmarks(fabtwin::testing::data_dir() / "benchmarks.json");
    EXPECT_EQ(set.machine, "LEONARDO");
    const auto& hpl = set.find("HPL");
    EXPECT_EQ(hpl.metric("rmax_pflops"), 238.7);
    EXPECT_EQ(hpl.metric("power_mw"), 7.4);
    EXPECT_EQ(error_of([&] { set.find("nope"); }), Errc::not_available);
    EXPECT_EQ(error_of([] { parse_benchmarks(R"({"machine":"x","records":[],"extra":1})"); }), Errc::unknown_field);
}
