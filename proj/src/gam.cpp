#include "fdmlens/gam.hpp"

#include <algorithm>
#include <cmath>

#include "fdmlens/errors.hpp"
#include "fdmlens/text.hpp"

namespace fdmlens {

namespace {

std::vector<double> quantile_edges(std::vector<double> column, int bins) {
    std::sort(column.begin(), column.end());
    std::vector<double> distinct;
    std::unique_copy(column.begin(), column.end(), std::back_inserter(distinct));
    if (distinct.size() <= 1) return {};

    std::vector<double> edges;
    if (distinct.size() <= static_cast<std::size_t>(bins)) {
        for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
            edges.push_back((distinct[i] + distinct[i + 1]) / 2.0);
        }
        return edges;
    }

    const std::size_t n = column.size();
    for (int k = 1; k < bins; ++k) {
        const std::size_t idx = (static_cast<std::size_t>(k) * n) / static_cast<std::size_t>(bins);
        const double t = column[idx];
        const std::size_t j = static_cast<std::size_t>(
            std::lower_bound(distinct.begin(), distinct.end(), t) - distinct.begin());
        if (j == 0) continue;
        edges.push_back((distinct[j - 1] + distinct[j]) / 2.0);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

} // namespace

std::size_t ShapeFunction::bin_index(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

double ShapeFunction::value_at(double x) const {
    return contributions[bin_index(x)];
}

GamModel::GamModel(double intercept, std::array<ShapeFunction, kFeatureCount> shapes,
                   GamTrainingMeta meta)
    : intercept_(intercept), shapes_(std::move(shapes)), meta_(meta) {}

double GamModel::predict_row(const FeatureVector& x) const {
    double acc = intercept_;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        acc += shapes_[j].value_at(x[j]);
    }
    return acc;
}

std::pair<GamModel, FitReport> fit_gam(const Dataset& d,
                                       const std::vector<double>& targets,
                                       const GamHyperparams& hp) {
    if (targets.size() != d.row_count()) {
        throw ConfigError("targets length (" + std::to_string(targets.size()) +
                          ") does not match dataset rows (" + std::to_string(d.row_count()) +
                          ")");
    }
    for (double t : targets) {
        if (!std::isfinite(t)) throw ConfigError("targets must be finite");
    }
    if (hp.rounds < 1) throw InvalidHyperparam("rounds must be >= 1");
    if (!(hp.learning_rate > 0.0) || hp.learning_rate > 1.0) {
        throw InvalidHyperparam("learning_rate must be in (0, 1]");
    }
    if (hp.bins < 2) throw InvalidHyperparam("bins must be >= 2");

    const std::size_t n = d.row_count();
    const auto& rows = d.rows();

    std::array<ShapeFunction, kFeatureCount> shapes{};
    std::array<std::vector<std::size_t>, kFeatureCount> bin_of_row;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = rows[i][j];
        ShapeFunction& s = shapes[j];
        s.feature = j;
        s.edges = quantile_edges(column, hp.bins);
        s.contributions.assign(s.edges.size() + 1, 0.0);
        s.degenerate = s.edges.empty();
        s.domain_min = *std::min_element(column.begin(), column.end());
        s.domain_max = *std::max_element(column.begin(), column.end());
        bin_of_row[j].resize(n);
        for (std::size_t i = 0; i < n; ++i) bin_of_row[j][i] = s.bin_index(column[i]);
    }

    double target_sum = 0.0;
    for (double t : targets) target_sum += t;
    double intercept = target_sum / static_cast<double>(n);

    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = targets[i] - intercept;

    auto residual_mse = [&] {
        double acc = 0.0;
        for (double r : residual) acc += r * r;
        return acc / static_cast<double>(n);
    };

    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(hp.rounds) + 1);
    trace.push_back(residual_mse());

    for (int round = 0; round < hp.rounds; ++round) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            ShapeFunction& s = shapes[j];
            if (s.degenerate) continue;
            const std::size_t nb = s.contributions.size();
            std::vector<double> sums(nb, 0.0);
            std::vector<std::size_t> counts(nb, 0);
            for (std::size_t i = 0; i < n; ++i) {
                sums[bin_of_row[j][i]] += residual[i];
                ++counts[bin_of_row[j][i]];
            }
            std::vector<double> means(nb, 0.0);
            for (std::size_t b = 0; b < nb; ++b) {
                if (counts[b] > 0) means[b] = sums[b] / static_cast<double>(counts[b]);
            }
            for (std::size_t b = 0; b < nb; ++b) {
                s.contributions[b] += hp.learning_rate * means[b];
            }
            for (std::size_t i = 0; i < n; ++i) {
                residual[i] -= hp.learning_rate * means[bin_of_row[j][i]];
            }
        }
        trace.push_back(residual_mse());
    }

    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        ShapeFunction& s = shapes[j];
        if (s.degenerate) continue;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += s.contributions[bin_of_row[j][i]];
        const double offset = acc / static_cast<double>(n);
        for (double& c : s.contributions) c -= offset;
        intercept += offset;
    }

    GamTrainingMeta meta;
    meta.rounds = hp.rounds;
    meta.learning_rate = hp.learning_rate;
    meta.bins = hp.bins;
    meta.target_origin = TargetOrigin::raw_targets;

    GamModel model(intercept, std::move(shapes), meta);

    FitReport report = metrics(model.predict_serial(rows), targets);
    report.mse_trace = std::move(trace);
    return {std::move(model), std::move(report)};
}

std::pair<GamModel, FidelityReport> fit_surrogate(const Predictor& p, const Dataset& d,
                                                  const GamHyperparams& hp) {
    const std::vector<double> targets = p.predict_serial(d.rows());
    auto [model, fit] = fit_gam(d, targets, hp);

    GamTrainingMeta meta = model.meta();
    meta.target_origin = TargetOrigin::surrogate_of_model;
    GamModel surrogate(model.intercept(), model.shapes(), meta);

    FidelityReport fidelity;
    fidelity.rmse = fit.rmse;
    fidelity.r_squared = fit.r_squared;
    return {std::move(surrogate), fidelity};
}

std::string shape_function_csv(const ShapeFunction& s) {
    std::string out = "bin_left,bin_right,contribution\n";
    for (std::size_t b = 0; b < s.contributions.size(); ++b) {
        const double left = b == 0 ? s.domain_min : s.edges[b - 1];
        const double right = b == s.edges.size() ? s.domain_max : s.edges[b];
        out += format_shortest(left);
        out += ',';
        out += format_shortest(right);
        out += ',';
        out += format_shortest(s.contributions[b]);
        out += '\n';
    }
    return out;
}

Explanation gam_attributions(const GamModel& g, const Dataset& d) {
    Explanation e;
    e.base_value = g.intercept();
    e.data = d.rows();
    e.feature_names = d.schema().names;
    e.method = ExplainMethod::exact;
    e.background_origin = {BackgroundOrigin::Kind::full_dataset, 0, 0};
    e.values.resize(d.row_count());
    for (std::size_t i = 0; i < d.row_count(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            e.values[i][j] = g.shapes()[j].value_at(d.rows()[i][j]);
        }
    }
    return e;
}

} // namespace fdmlens
