#include "fdmlens/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdmlens/errors.hpp"

namespace fdmlens {

namespace {

struct SplitChoice {
    double score = 0.0;  // SSE_left + SSE_right
    std::size_t feature = 0;
    double threshold = 0.0;
    bool found = false;
};

// Best split over the node's samples. Thresholds are midpoints of adjacent
// distinct observed values; candidates are scanned feature-ascending then
// threshold-ascending and accepted only on strict improvement, which breaks
// exact ties toward the lowest feature index and lowest threshold.
SplitChoice best_split(const std::vector<FeatureVector>& x,
                       const std::vector<double>& residual,
                       const std::vector<std::size_t>& node, int min_leaf,
                       std::vector<std::size_t>& order_buf) {
    SplitChoice best;
    const std::size_t m = node.size();
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        order_buf = node;
        std::stable_sort(order_buf.begin(), order_buf.end(),
                         [&](std::size_t a, std::size_t b) { return x[a][j] < x[b][j]; });

        double left_sum = 0.0, left_sq = 0.0;
        double total_sum = 0.0, total_sq = 0.0;
        for (std::size_t i : order_buf) {
            total_sum += residual[i];
            total_sq += residual[i] * residual[i];
        }
        for (std::size_t k = 0; k + 1 < m; ++k) {
            const double r = residual[order_buf[k]];
            left_sum += r;
            left_sq += r * r;
            const double a = x[order_buf[k]][j];
            const double b = x[order_buf[k + 1]][j];
            if (a == b) continue;
            const std::size_t nl = k + 1;
            const std::size_t nr = m - nl;
            if (nl < static_cast<std::size_t>(min_leaf) ||
                nr < static_cast<std::size_t>(min_leaf))
                continue;
            const double sse_l = left_sq - left_sum * left_sum / static_cast<double>(nl);
            const double right_sum = total_sum - left_sum;
            const double sse_r = (total_sq - left_sq) -
                                 right_sum * right_sum / static_cast<double>(nr);
            const double score = sse_l + sse_r;
            if (!best.found || score < best.score) {
                best = {score, j, (a + b) / 2.0, true};
            }
        }
    }
    return best;
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<FeatureVector>& x, const std::vector<double>& residual,
                const GbtHyperparams& hp)
        : x_(x), residual_(residual), hp_(hp) {}

    std::vector<TreeNode> build() {
        std::vector<std::size_t> root(x_.size());
        std::iota(root.begin(), root.end(), 0);
        grow(std::move(root), 0);
        return std::move(nodes_);
    }

private:
    std::int32_t grow(std::vector<std::size_t> node, int depth) {
        const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();

        double mean = 0.0;
        for (std::size_t i : node) mean += residual_[i];
        mean /= static_cast<double>(node.size());

        bool make_leaf = depth >= hp_.max_depth ||
                         node.size() < 2 * static_cast<std::size_t>(hp_.min_samples_leaf);
        if (!make_leaf) {
            double sse = 0.0;
            for (std::size_t i : node) {
                const double c = residual_[i] - mean;
                sse += c * c;
            }
            make_leaf = sse <= 0.0;  // pure node
        }

        SplitChoice split;
        if (!make_leaf) {
            split = best_split(x_, residual_, node, hp_.min_samples_leaf, order_buf_);
            make_leaf = !split.found;
        }

        if (make_leaf) {
            nodes_[static_cast<std::size_t>(id)].value = mean;
            return id;
        }

        std::vector<std::size_t> left, right;
        left.reserve(node.size());
        right.reserve(node.size());
        for (std::size_t i : node) {
            (x_[i][split.feature] <= split.threshold ? left : right).push_back(i);
        }
        node.clear();
        node.shrink_to_fit();

        nodes_[static_cast<std::size_t>(id)].feature = static_cast<std::int32_t>(split.feature);
        nodes_[static_cast<std::size_t>(id)].threshold = split.threshold;
        const std::int32_t l = grow(std::move(left), depth + 1);
        nodes_[static_cast<std::size_t>(id)].left = l;
        const std::int32_t r = grow(std::move(right), depth + 1);
        nodes_[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    const std::vector<FeatureVector>& x_;
    const std::vector<double>& residual_;
    const GbtHyperparams& hp_;
    std::vector<TreeNode> nodes_;
    std::vector<std::size_t> order_buf_;
};

} // namespace

std::pair<GbtModel, FitReport> fit_gbt(const Dataset& d, const GbtHyperparams& hp,
                                       std::uint32_t /*seed*/) {
    if (hp.n_rounds < 0) throw InvalidHyperparam("n_rounds must be >= 0");
    if (hp.max_depth < 1) throw InvalidHyperparam("max_depth must be >= 1");
    if (hp.min_samples_leaf < 1) throw InvalidHyperparam("min_samples_leaf must be >= 1");
    if (!(hp.learning_rate > 0.0) || hp.learning_rate > 1.0) {
        throw InvalidHyperparam("learning_rate must be in (0, 1]");
    }

    const std::vector<FeatureVector>& x = d.rows();
    const std::size_t n = d.row_count();

    double init = 0.0;
    for (double y : d.targets()) init += y;
    init /= static_cast<double>(n);

    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = d.targets()[i] - init;

    auto mse_of = [&] {
        double acc = 0.0;
        for (double r : residual) acc += r * r;
        return acc / static_cast<double>(n);
    };

    FitReport report;
    report.mse_trace.reserve(static_cast<std::size_t>(hp.n_rounds) + 1);
    report.mse_trace.push_back(mse_of());

    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(hp.n_rounds));
    for (int round = 0; round < hp.n_rounds; ++round) {
        TreeBuilder builder(x, residual, hp);
        RegressionTree tree(builder.build());
        for (std::size_t i = 0; i < n; ++i) {
            residual[i] -= hp.learning_rate * tree.eval(x[i]);
        }
        trees.push_back(std::move(tree));
        report.mse_trace.push_back(mse_of());
    }

    GbtModel model(std::move(trees), hp.learning_rate, init, hp);
    const FitReport final_metrics = metrics(model, d);
    report.rmse = final_metrics.rmse;
    report.r_squared = final_metrics.r_squared;
    return {std::move(model), std::move(report)};
}

} // namespace fdmlens
