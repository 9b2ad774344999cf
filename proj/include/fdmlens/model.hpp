#ifndef FDMLENS_MODEL_HPP
#define FDMLENS_MODEL_HPP

#include <optional>
#include <span>
#include <vector>

#include "fdmlens/common.hpp"
#include "fdmlens/dataset.hpp"

namespace fdmlens {

/// Black-box regressor contract. predict_row must be pure and safe for
/// unlimited concurrent callers; batch prediction is provided on top of it
/// and equals row-by-row prediction exactly.
class Predictor {
public:
    virtual ~Predictor() = default;

    virtual double predict_row(const FeatureVector& x) const = 0;

    /// OpenMP batch kernel (parallel over rows).
    std::vector<double> predict(std::span<const FeatureVector> rows) const;

    /// Plain-loop reference implementation, kept for testing the kernel.
    std::vector<double> predict_serial(std::span<const FeatureVector> rows) const;
};

struct FitReport {
    double rmse = 0.0;
    /// nullopt = undefined (zero target variance).
    std::optional<double> r_squared;
    /// Boosting models only: training MSE after init and after each round.
    std::vector<double> mse_trace;
};

/// Training metrics of a predictor on a dataset. R^2 = 1 - SSE/SST with SST
/// from the population variance; undefined marker when all targets are equal.
FitReport metrics(const Predictor& p, const Dataset& d);

/// Same metrics from precomputed predictions against arbitrary targets.
FitReport metrics(const std::vector<double>& predictions,
                  const std::vector<double>& targets);

} // namespace fdmlens

#endif
