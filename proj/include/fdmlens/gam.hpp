#ifndef FDMLENS_GAM_HPP
#define FDMLENS_GAM_HPP

#include <optional>
#include <utility>
#include <vector>

#include "fdmlens/common.hpp"
#include "fdmlens/dataset.hpp"
#include "fdmlens/model.hpp"
#include "fdmlens/shapley.hpp"

namespace fdmlens {

struct GamHyperparams {
    int rounds = 500;
    double learning_rate = 0.2;
    int bins = 8;
};

enum class TargetOrigin { raw_targets, surrogate_of_model };

/// Piecewise-constant univariate component. `edges` are the interior
/// thresholds (ascending); value_at picks contributions[upper_bound(edges, x)],
/// so out-of-range inputs clamp to the first/last bin. A feature with a single
/// distinct training value has no edges and a single zero contribution.
struct ShapeFunction {
    std::size_t feature = 0;
    std::vector<double> edges;
    std::vector<double> contributions;  // edges.size() + 1 entries
    double domain_min = 0.0;
    double domain_max = 0.0;
    bool degenerate = false;

    std::size_t bin_index(double x) const;
    double value_at(double x) const;
};

struct GamTrainingMeta {
    int rounds = 0;
    double learning_rate = 0.0;
    int bins = 0;
    TargetOrigin target_origin = TargetOrigin::raw_targets;
};

class GamModel final : public Predictor {
public:
    GamModel() = default;
    GamModel(double intercept, std::array<ShapeFunction, kFeatureCount> shapes,
             GamTrainingMeta meta);

    double predict_row(const FeatureVector& x) const override;

    double intercept() const { return intercept_; }
    const std::array<ShapeFunction, kFeatureCount>& shapes() const { return shapes_; }
    const GamTrainingMeta& meta() const { return meta_; }

private:
    double intercept_ = 0.0;
    std::array<ShapeFunction, kFeatureCount> shapes_{};
    GamTrainingMeta meta_;
};

struct FidelityReport {
    double rmse = 0.0;
    std::optional<double> r_squared;  // nullopt when the reference has zero variance
};

/// Cyclic gradient boosting of binned shape functions. Bin edges come from
/// training-value quantiles (midpoints between adjacent distinct values when
/// there are at most `bins` distinct values). Shapes are centered after the
/// final cycle with the offsets folded into the intercept. The FitReport's
/// mse_trace has rounds + 1 entries: after the intercept, then after each
/// full cycle.
std::pair<GamModel, FitReport> fit_gam(const Dataset& d,
                                       const std::vector<double>& targets,
                                       const GamHyperparams& hp = {});

/// GAM fit against p's predictions on d's rows; fidelity is measured against
/// those predictions, not the raw targets.
std::pair<GamModel, FidelityReport> fit_surrogate(const Predictor& p, const Dataset& d,
                                                  const GamHyperparams& hp = {});

/// Exact attributions for the additive model: values[i][j] = shape_j(x_ij),
/// base = intercept. Additivity holds bit-exactly (same summation order as
/// predict_row).
Explanation gam_attributions(const GamModel& g, const Dataset& d);

/// CSV export of one shape: header bin_left,bin_right,contribution; the outer
/// bins are closed off with the training domain min/max.
std::string shape_function_csv(const ShapeFunction& s);

} // namespace fdmlens

#endif
