#ifndef FDMLENS_GBT_HPP
#define FDMLENS_GBT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "fdmlens/model.hpp"

namespace fdmlens {

struct GbtHyperparams {
    int n_rounds = 200;
    double learning_rate = 0.1;
    int max_depth = 3;
    int min_samples_leaf = 2;
};

/// Axis-aligned binary split node. feature < 0 marks a leaf carrying `value`.
/// Routing: x[feature] <= threshold goes left.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
};

class RegressionTree {
public:
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    double eval(const FeatureVector& x) const {
        std::size_t i = 0;
        while (nodes_[i].feature >= 0) {
            i = x[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold
                    ? static_cast<std::size_t>(nodes_[i].left)
                    : static_cast<std::size_t>(nodes_[i].right);
        }
        return nodes_[i].value;
    }

    const std::vector<TreeNode>& nodes() const { return nodes_; }

private:
    std::vector<TreeNode> nodes_;
};

/// Least-squares gradient-boosted trees:
/// prediction(x) = init_value + learning_rate * sum_t leaf_t(x).
/// Deterministic by construction (greedy SSE splits, midpoint thresholds,
/// ties broken by lowest feature index then lowest threshold).
class GbtModel final : public Predictor {
public:
    GbtModel(std::vector<RegressionTree> trees, double learning_rate,
             double init_value, GbtHyperparams hyperparams)
        : trees_(std::move(trees)), learning_rate_(learning_rate),
          init_value_(init_value), hyperparams_(hyperparams) {}

    double predict_row(const FeatureVector& x) const override {
        double acc = 0.0;
        for (const RegressionTree& t : trees_) acc += t.eval(x);
        return init_value_ + learning_rate_ * acc;
    }

    const std::vector<RegressionTree>& trees() const { return trees_; }
    double learning_rate() const { return learning_rate_; }
    double init_value() const { return init_value_; }
    const GbtHyperparams& hyperparams() const { return hyperparams_; }

private:
    std::vector<RegressionTree> trees_;
    double learning_rate_;
    double init_value_;
    GbtHyperparams hyperparams_;
};

/// Fit n_rounds trees to current residuals by greedy variance-reduction
/// splitting. The seed is accepted for interface stability; boosting itself
/// uses no randomness.
std::pair<GbtModel, FitReport> fit_gbt(const Dataset& d, const GbtHyperparams& hp = {},
                                       std::uint32_t seed = 42);

} // namespace fdmlens

#endif
