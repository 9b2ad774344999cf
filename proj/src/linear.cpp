#include "fdmlens/linear.hpp"

#include <vector>

#include "fdmlens/errors.hpp"
#include "fdmlens/linalg.hpp"

namespace fdmlens {

std::pair<LinearModel, FitReport> fit_linear(const Dataset& d, double ridge_epsilon) {
    if (ridge_epsilon < 0.0) throw InvalidHyperparam("ridge_epsilon must be >= 0");

    const std::size_t n = d.row_count();
    const std::size_t k = kFeatureCount;

    std::array<double, kFeatureCount> mean_x{};
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) mean_x[j] += d.rows()[i][j];
        mean_y += d.targets()[i];
    }
    for (std::size_t j = 0; j < k; ++j) mean_x[j] /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    // normal matrix Xc^T Xc (+ eps I) and rhs Xc^T yc on centered columns
    std::vector<double> a(k * k, 0.0);
    std::vector<double> b(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, kFeatureCount> c{};
        for (std::size_t j = 0; j < k; ++j) c[j] = d.rows()[i][j] - mean_x[j];
        const double yc = d.targets()[i] - mean_y;
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t s = 0; s < k; ++s) a[r * k + s] += c[r] * c[s];
            b[r] += c[r] * yc;
        }
    }
    for (std::size_t j = 0; j < k; ++j) a[j * k + j] += ridge_epsilon;

    std::vector<double> w;
    if (!linalg::solve(std::move(a), std::move(b), k, w)) {
        throw SingularDesign("normal matrix is rank-deficient; drop constant columns "
                             "or use ridge_epsilon > 0");
    }

    std::array<double, kFeatureCount> weights{};
    double intercept = mean_y;
    for (std::size_t j = 0; j < k; ++j) {
        weights[j] = w[j];
        intercept -= w[j] * mean_x[j];
    }

    LinearModel model(weights, intercept, ridge_epsilon);
    FitReport report = metrics(model, d);
    return {model, report};
}

} // namespace fdmlens
