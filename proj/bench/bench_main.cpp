// Compares the OpenMP kernels against the serial reference implementations
// and checks that both produce bit-identical results.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "fdmlens/dataset.hpp"
#include "fdmlens/gbt.hpp"
#include "fdmlens/pdp.hpp"
#include "fdmlens/shapley.hpp"

using namespace fdmlens;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// The corpus tiled `factor` times; jitter keeps rows distinct but in bounds.
Dataset tiled_corpus(std::size_t factor) {
    const Dataset& base = embedded_fdm_corpus();
    std::vector<FeatureVector> rows;
    std::vector<double> targets;
    for (std::size_t t = 0; t < factor; ++t) {
        for (std::size_t i = 0; i < base.row_count(); ++i) {
            FeatureVector r = base.rows()[i];
            r[2] += (r[2] < 50.0 ? 1.0 : -1.0) * 0.001 * static_cast<double>(t);
            rows.push_back(r);
            targets.push_back(base.targets()[i]);
        }
    }
    return Dataset(base.schema(), std::move(rows), std::move(targets));
}

template <typename F>
double timed(const char* label, F&& fn) {
    const auto start = Clock::now();
    fn();
    const double s = seconds_since(start);
    std::printf("  %-28s %8.3f s\n", label, s);
    return s;
}

} // namespace

int main() {
    const Dataset d = tiled_corpus(8);
    auto [model, report] = fit_gbt(d);
    (void)report;
    const Background bg = Background::subsample(d, 31, 42);

    std::printf("explain_dataset, %zu rows x %zu background rows:\n", d.row_count(),
                bg.rows.size());
    Explanation serial, parallel;
    const double t_serial = timed("serial reference", [&] {
        serial = explain_dataset_serial(model, bg, d, ExplainMethod::exact);
    });
    const double t_parallel = timed("OpenMP kernel", [&] {
        parallel = explain_dataset(model, bg, d, ExplainMethod::exact);
    });
    bool identical = serial.base_value == parallel.base_value;
    for (std::size_t i = 0; identical && i < serial.values.size(); ++i) {
        identical = std::memcmp(serial.values[i].data(), parallel.values[i].data(),
                                sizeof(double) * kFeatureCount) == 0;
    }
    std::printf("  speedup %.2fx, bit-identical: %s\n", t_serial / t_parallel,
                identical ? "yes" : "NO");

    std::printf("partial_dependence, 201-point grid:\n");
    const GridSpec grid = GridSpec::linear(201);
    PdpCurve curve_serial, curve_parallel;
    const double p_serial = timed("serial reference", [&] {
        curve_serial = partial_dependence_serial(model, d, 0, grid, PdpMode::average);
    });
    const double p_parallel = timed("OpenMP kernel", [&] {
        curve_parallel = partial_dependence(model, d, 0, grid, PdpMode::average);
    });
    const bool pdp_identical =
        std::memcmp(curve_serial.values.data(), curve_parallel.values.data(),
                    sizeof(double) * curve_serial.values.size()) == 0 &&
        curve_serial.reference == curve_parallel.reference;
    std::printf("  speedup %.2fx, bit-identical: %s\n", p_serial / p_parallel,
                pdp_identical ? "yes" : "NO");

    return identical && pdp_identical ? 0 : 1;
}
