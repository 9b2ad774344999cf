#ifndef FDMLENS_LINEAR_HPP
#define FDMLENS_LINEAR_HPP

#include <array>
#include <utility>

#include "fdmlens/model.hpp"

namespace fdmlens {

/// Ordinary least squares (optionally ridge-stabilized) baseline:
/// prediction(x) = intercept + sum_j weights[j] * x[j].
class LinearModel final : public Predictor {
public:
    LinearModel(std::array<double, kFeatureCount> weights, double intercept,
                double ridge_epsilon)
        : weights_(weights), intercept_(intercept), ridge_epsilon_(ridge_epsilon) {}

    double predict_row(const FeatureVector& x) const override {
        double acc = intercept_;
        for (std::size_t j = 0; j < kFeatureCount; ++j) acc += weights_[j] * x[j];
        return acc;
    }

    const std::array<double, kFeatureCount>& weights() const { return weights_; }
    double intercept() const { return intercept_; }
    double ridge_epsilon() const { return ridge_epsilon_; }

private:
    std::array<double, kFeatureCount> weights_;
    double intercept_;
    double ridge_epsilon_;
};

/// Normal equations on mean-centered columns; exact OLS when ridge_epsilon
/// is 0 and the design has full rank (SingularDesign otherwise).
std::pair<LinearModel, FitReport> fit_linear(const Dataset& d, double ridge_epsilon = 0.0);

} // namespace fdmlens

#endif
