#include "fdmlens/model.hpp"

#include <cmath>
#include <cstdint>

namespace fdmlens {

std::vector<double> Predictor::predict(std::span<const FeatureVector> rows) const {
    std::vector<double> out(rows.size());
    const std::int64_t n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(static) if (n >= 64)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = predict_row(rows[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::vector<double> Predictor::predict_serial(std::span<const FeatureVector> rows) const {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = predict_row(rows[i]);
    return out;
}

FitReport metrics(const Predictor& p, const Dataset& d) {
    return metrics(p.predict(d.rows()), d.targets());
}

FitReport metrics(const std::vector<double>& predictions,
                  const std::vector<double>& targets) {
    const std::size_t n = targets.size();

    double mean_y = 0.0;
    for (double y : targets) mean_y += y;
    mean_y /= static_cast<double>(n);

    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = targets[i] - predictions[i];
        const double c = targets[i] - mean_y;
        sse += e * e;
        sst += c * c;
    }

    FitReport report;
    report.rmse = std::sqrt(sse / static_cast<double>(n));
    if (sst > 0.0) report.r_squared = 1.0 - sse / sst;
    return report;
}

} // namespace fdmlens
