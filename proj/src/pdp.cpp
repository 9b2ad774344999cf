#include "fdmlens/pdp.hpp"

#include <cmath>

#include "fdmlens/errors.hpp"

namespace fdmlens {

namespace {

std::vector<double> resolve_grid(const Dataset& d, std::size_t feature,
                                 const GridSpec& gs) {
    if (feature >= kFeatureCount) throw ConfigError("feature index out of range");

    std::vector<double> grid;
    if (gs.explicit_grid) {
        grid = *gs.explicit_grid;
    } else {
        if (gs.n_points < 2) throw InvalidGrid("grid needs at least 2 points");
        double lo = d.rows()[0][feature];
        double hi = lo;
        for (const auto& r : d.rows()) {
            lo = std::min(lo, r[feature]);
            hi = std::max(hi, r[feature]);
        }
        if (lo == hi) {
            throw InvalidGrid("feature has a single observed value; supply an explicit grid");
        }
        grid.resize(static_cast<std::size_t>(gs.n_points));
        const double span = hi - lo;
        for (int k = 0; k < gs.n_points; ++k) {
            grid[static_cast<std::size_t>(k)] =
                lo + span * static_cast<double>(k) / static_cast<double>(gs.n_points - 1);
        }
        grid.back() = hi;
    }

    if (grid.empty()) throw InvalidGrid("grid is empty");
    for (double g : grid) {
        if (!std::isfinite(g)) throw InvalidGrid("grid contains a non-finite value");
    }
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        if (!(grid[k] < grid[k + 1])) throw InvalidGrid("grid must be strictly ascending");
    }
    return grid;
}

PdpCurve compute_curve(const Predictor& p, const Dataset& d, std::size_t feature,
                       const GridSpec& gs, PdpMode mode, Execution exec) {
    PdpCurve curve;
    curve.feature = feature;
    curve.mode = mode;
    curve.grid = resolve_grid(d, feature, gs);
    curve.values.resize(curve.grid.size());

    {
        const std::vector<double> pred = p.predict_serial(d.rows());
        double acc = 0.0;
        for (double v : pred) acc += v;
        curve.reference = acc / static_cast<double>(pred.size());
    }

    FeatureVector means{};
    if (mode == PdpMode::at_means) {
        for (const auto& r : d.rows()) {
            for (std::size_t j = 0; j < kFeatureCount; ++j) means[j] += r[j];
        }
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            means[j] /= static_cast<double>(d.row_count());
        }
    }

    auto value_at = [&](std::size_t k) {
        const double g = curve.grid[k];
        if (mode == PdpMode::at_means) {
            FeatureVector x = means;
            x[feature] = g;
            return p.predict_row(x);
        }
        std::vector<FeatureVector> modified(d.rows());
        for (auto& r : modified) r[feature] = g;
        const std::vector<double> pred = p.predict_serial(modified);
        double acc = 0.0;
        for (double v : pred) acc += v;
        return acc / static_cast<double>(pred.size());
    };

    const std::int64_t m = static_cast<std::int64_t>(curve.grid.size());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < m; ++k) {
            curve.values[static_cast<std::size_t>(k)] = value_at(static_cast<std::size_t>(k));
        }
    } else {
        for (std::int64_t k = 0; k < m; ++k) {
            curve.values[static_cast<std::size_t>(k)] = value_at(static_cast<std::size_t>(k));
        }
    }
    return curve;
}

} // namespace

GridSpec GridSpec::linear(int n_points) {
    GridSpec gs;
    gs.n_points = n_points;
    return gs;
}

GridSpec GridSpec::points(std::vector<double> grid) {
    GridSpec gs;
    gs.explicit_grid = std::move(grid);
    return gs;
}

PdpCurve partial_dependence(const Predictor& p, const Dataset& d, std::size_t feature,
                            const GridSpec& gs, PdpMode mode, Execution exec) {
    return compute_curve(p, d, feature, gs, mode, exec);
}

PdpCurve partial_dependence_serial(const Predictor& p, const Dataset& d,
                                   std::size_t feature, const GridSpec& gs,
                                   PdpMode mode) {
    return compute_curve(p, d, feature, gs, mode, Execution::serial);
}

PdpOverlay pdp_with_shap_overlay(const Predictor& p, const Dataset& d,
                                 const Explanation& e, std::size_t feature,
                                 const GridSpec& gs) {
    if (e.data.size() != d.row_count()) {
        throw ExplanationMismatch("explanation covers a different number of rows");
    }
    for (std::size_t i = 0; i < d.row_count(); ++i) {
        if (e.data[i] != d.rows()[i]) {
            throw ExplanationMismatch("explanation data differs from the dataset at row " +
                                      std::to_string(i + 1));
        }
    }

    PdpOverlay overlay;
    overlay.curve = partial_dependence(p, d, feature, gs, PdpMode::average);
    overlay.curve.reference = e.base_value;
    overlay.scatter.resize(d.row_count());
    for (std::size_t i = 0; i < d.row_count(); ++i) {
        overlay.scatter[i] = {d.rows()[i][feature], e.base_value + e.values[i][feature]};
    }
    return overlay;
}

} // namespace fdmlens
