#ifndef FDMLENS_PDP_HPP
#define FDMLENS_PDP_HPP

#include <optional>
#include <vector>

#include "fdmlens/common.hpp"
#include "fdmlens/dataset.hpp"
#include "fdmlens/model.hpp"
#include "fdmlens/shapley.hpp"

namespace fdmlens {

/// Either an explicit ascending grid or n evenly spaced points over the
/// observed [min, max] of the swept feature.
struct GridSpec {
    std::optional<std::vector<double>> explicit_grid;
    int n_points = 25;

    static GridSpec linear(int n_points = 25);
    static GridSpec points(std::vector<double> grid);
};

enum class PdpMode { average, at_means };

struct PdpCurve {
    std::size_t feature = 0;
    std::vector<double> grid;
    std::vector<double> values;
    double reference = 0.0;  // mean prediction over unmodified rows
    PdpMode mode = PdpMode::average;
};

/// Curve plus one scatter point per sample: (feature value, base + phi).
struct PdpOverlay {
    PdpCurve curve;
    std::vector<std::array<double, 2>> scatter;
};

/// Average mode: values[k] = mean over rows of predict(row with the feature
/// set to grid[k]). At-means mode: values[k] = predict(column-means vector
/// with the feature set to grid[k]). Grid points evaluate independently; the
/// OpenMP kernel parallelizes over them with fixed-order per-point sums.
PdpCurve partial_dependence(const Predictor& p, const Dataset& d, std::size_t feature,
                            const GridSpec& gs, PdpMode mode,
                            Execution exec = Execution::parallel);

/// Plain-loop reference implementation kept for testing the kernel.
PdpCurve partial_dependence_serial(const Predictor& p, const Dataset& d,
                                   std::size_t feature, const GridSpec& gs,
                                   PdpMode mode);

/// Average-mode curve with e.base_value as the plotted reference line and the
/// per-sample attribution scatter.
PdpOverlay pdp_with_shap_overlay(const Predictor& p, const Dataset& d,
                                 const Explanation& e, std::size_t feature,
                                 const GridSpec& gs);

} // namespace fdmlens

#endif
