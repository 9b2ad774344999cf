#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "fdmlens/dataset.hpp"
#include "fdmlens/errors.hpp"
#include "fdmlens/gbt.hpp"
#include "fdmlens/linear.hpp"

using namespace fdmlens;

namespace {

Dataset constant_target_dataset() {
    std::vector<FeatureVector> rows = {
        {20, 0.1, 30, 200}, {40, 0.2, 40, 210}, {60, 0.3, 50, 220}, {80, 0.4, 60, 230}};
    return Dataset(FeatureSchema::canonical(), std::move(rows), {5.0, 5.0, 5.0, 5.0});
}

double sse_of(const LinearModel& m, const Dataset& d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.row_count(); ++i) {
        const double e = d.targets()[i] - m.predict_row(d.rows()[i]);
        acc += e * e;
    }
    return acc;
}

void walk_depths(const std::vector<TreeNode>& nodes, std::size_t i, int depth,
                 int& max_depth) {
    if (nodes[i].feature < 0) {
        max_depth = std::max(max_depth, depth);
        return;
    }
    walk_depths(nodes, static_cast<std::size_t>(nodes[i].left), depth + 1, max_depth);
    walk_depths(nodes, static_cast<std::size_t>(nodes[i].right), depth + 1, max_depth);
}

std::size_t route(const std::vector<TreeNode>& nodes, const FeatureVector& x) {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        i = x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold
                ? static_cast<std::size_t>(nodes[i].left)
                : static_cast<std::size_t>(nodes[i].right);
    }
    return i;
}

} // namespace

TEST_CASE("gbt on constant targets is the constant") {
    const Dataset d = constant_target_dataset();
    const auto [model, report] = fit_gbt(d);
    for (const auto& row : d.rows()) CHECK(model.predict_row(row) == 5.0);
    CHECK(model.init_value() == 5.0);
    for (const RegressionTree& t : model.trees()) {
        REQUIRE(t.nodes().size() == 1);
        CHECK(t.nodes()[0].value == 0.0);
    }
    CHECK(report.rmse == 0.0);
    CHECK_FALSE(report.r_squared.has_value());
}

TEST_CASE("gbt on a single row predicts its target everywhere") {
    const Dataset d(FeatureSchema::canonical(), {{55, 0.24, 50, 210}}, {47.0});
    const auto [model, report] = fit_gbt(d);
    CHECK(model.predict_row({10, 0.08, 20, 190}) == 47.0);
    CHECK(model.predict_row({100, 0.4, 80, 230}) == 47.0);
    CHECK(report.rmse == 0.0);
}

TEST_CASE("gbt corpus fit matches the frozen training metrics") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);

    REQUIRE(report.r_squared.has_value());
    CHECK(std::abs(*report.r_squared - 0.95715198038565852) < 1e-12);
    CHECK(std::abs(report.rmse - 0.68317279166077516) < 1e-12);
    CHECK(*report.r_squared >= 0.8);
    CHECK(report.rmse < summarize(d).target.stddev);

    REQUIRE(report.mse_trace.size() == 201);
    const double var = summarize(d).target.stddev;
    CHECK(std::abs(report.mse_trace[0] - var * var) < 1e-12);
    for (std::size_t t = 1; t < report.mse_trace.size(); ++t) {
        CHECK(report.mse_trace[t] <= report.mse_trace[t - 1] + 1e-12);
    }
}

TEST_CASE("gbt with zero rounds is the target mean") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d, {.n_rounds = 0});
    CHECK(model.trees().empty());
    CHECK(report.mse_trace.size() == 1);
    CHECK(report.rmse == summarize(d).target.stddev);
    REQUIRE(report.r_squared.has_value());
    CHECK(*report.r_squared == 0.0);
}

TEST_CASE("gbt hyperparameter validation") {
    const Dataset& d = embedded_fdm_corpus();
    CHECK_THROWS_AS(fit_gbt(d, {.n_rounds = -1}), InvalidHyperparam);
    CHECK_THROWS_AS(fit_gbt(d, {.learning_rate = 0.0}), InvalidHyperparam);
    CHECK_THROWS_AS(fit_gbt(d, {.learning_rate = 1.5}), InvalidHyperparam);
    CHECK_THROWS_AS(fit_gbt(d, {.max_depth = 0}), InvalidHyperparam);
    CHECK_THROWS_AS(fit_gbt(d, {.min_samples_leaf = 0}), InvalidHyperparam);
}

TEST_CASE("gbt training is deterministic") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [a, ra] = fit_gbt(d);
    const auto [b, rb] = fit_gbt(d);
    CHECK(a.trees().size() == b.trees().size());
    const auto pa = a.predict_serial(d.rows());
    const auto pb = b.predict_serial(d.rows());
    CHECK(pa == pb);
    CHECK(ra.mse_trace == rb.mse_trace);
}

TEST_CASE("gbt tree structure invariants") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);
    REQUIRE(model.trees().size() == 200);

    // sorted distinct values per corpus column, for midpoint bracketing
    std::array<std::vector<double>, kFeatureCount> distinct;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        std::set<double> s;
        for (const auto& r : d.rows()) s.insert(r[j]);
        distinct[j].assign(s.begin(), s.end());
    }

    for (const RegressionTree& t : model.trees()) {
        const auto& nodes = t.nodes();

        int max_depth = 0;
        walk_depths(nodes, 0, 0, max_depth);
        CHECK(max_depth <= 3);

        for (const TreeNode& n : nodes) {
            if (n.feature < 0) continue;
            CHECK(n.feature < static_cast<std::int32_t>(kFeatureCount));
            CHECK(n.left >= 0);
            CHECK(n.right >= 0);
            CHECK(static_cast<std::size_t>(n.left) < nodes.size());
            CHECK(static_cast<std::size_t>(n.right) < nodes.size());
        }

        // a root split over the full corpus must sit at a midpoint of
        // adjacent distinct column values
        if (nodes[0].feature >= 0) {
            const auto& col = distinct[static_cast<std::size_t>(nodes[0].feature)];
            const auto hi = std::upper_bound(col.begin(), col.end(), nodes[0].threshold);
            REQUIRE(hi != col.begin());
            REQUIRE(hi != col.end());
            CHECK(nodes[0].threshold == (*(hi - 1) + *hi) / 2.0);
        }

        // every leaf keeps at least min_samples_leaf training rows
        std::vector<std::size_t> count(nodes.size(), 0);
        for (const auto& row : d.rows()) count[route(nodes, row)]++;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].feature < 0) CHECK(count[i] >= 2);
        }
    }
}

TEST_CASE("batch predict equals the serial reference") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);

    // pad above the parallel threshold
    std::vector<FeatureVector> rows;
    for (int k = 0; k < 4; ++k) {
        rows.insert(rows.end(), d.rows().begin(), d.rows().end());
    }
    CHECK(model.predict(rows) == model.predict_serial(rows));
    CHECK(model.predict(d.rows()) == model.predict_serial(d.rows()));
}

TEST_CASE("linear fit recovers a planted linear target") {
    const Dataset& corpus = embedded_fdm_corpus();
    std::vector<double> targets;
    for (const auto& r : corpus.rows()) targets.push_back(2.0 * r[0] + 1.0);
    const Dataset d(corpus.schema(), corpus.rows(), targets);

    const auto [model, report] = fit_linear(d);
    CHECK(std::abs(model.weights()[0] - 2.0) < 1e-9);
    CHECK(std::abs(model.weights()[1]) < 1e-9);
    CHECK(std::abs(model.weights()[2]) < 1e-9);
    CHECK(std::abs(model.weights()[3]) < 1e-9);
    CHECK(std::abs(model.intercept() - 1.0) < 1e-8);
    CHECK(report.rmse < 1e-9);
}

TEST_CASE("linear corpus fit matches the frozen OLS solution") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_linear(d);

    CHECK(std::abs(model.weights()[0] - 0.10665764631424671) < 1e-8);
    CHECK(std::abs(model.weights()[1] - -16.322916666666671) < 1e-8);
    CHECK(std::abs(model.weights()[2] - -0.035111111111111051) < 1e-8);
    CHECK(std::abs(model.weights()[3] - 0.022749999999999944) < 1e-8);
    CHECK(std::abs(model.intercept() - 42.111002276184465) < 1e-7);
    REQUIRE(report.r_squared.has_value());
    CHECK(std::abs(*report.r_squared - 0.55240818129831326) < 1e-9);
    CHECK(std::abs(report.rmse - 2.2080365313462056) < 1e-9);
    CHECK(model.ridge_epsilon() == 0.0);
    CHECK(report.mse_trace.empty());
}

TEST_CASE("linear corpus fit is a local SSE minimum") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_linear(d);
    const double best = sse_of(model, d);

    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        for (double delta : {-1e-3, 1e-3}) {
            auto w = model.weights();
            w[j] += delta;
            CHECK(sse_of(LinearModel(w, model.intercept(), 0.0), d) >= best);
        }
    }
    for (double delta : {-1e-3, 1e-3}) {
        CHECK(sse_of(LinearModel(model.weights(), model.intercept() + delta, 0.0), d) >=
              best);
    }
}

TEST_CASE("linear fit rejects a rank-deficient design without ridge") {
    const Dataset& corpus = embedded_fdm_corpus();
    auto rows = corpus.rows();
    for (auto& r : rows) r[1] = 0.24;
    const Dataset d(corpus.schema(), rows, corpus.targets());

    CHECK_THROWS_WITH_AS(fit_linear(d), doctest::Contains("rank-deficient"),
                         SingularDesign);

    const auto [model, report] = fit_linear(d, 1e-6);
    CHECK(model.ridge_epsilon() == 1e-6);
    CHECK(report.rmse < summarize(d).target.stddev);

    CHECK_THROWS_AS(fit_linear(corpus, -1.0), InvalidHyperparam);
}

TEST_CASE("metrics edge cases") {
    const std::vector<double> targets = {1.0, 2.0, 3.0};

    const FitReport perfect = metrics(targets, targets);
    CHECK(perfect.rmse == 0.0);
    REQUIRE(perfect.r_squared.has_value());
    CHECK(*perfect.r_squared == 1.0);

    const FitReport mean_only = metrics({2.0, 2.0, 2.0}, targets);
    REQUIRE(mean_only.r_squared.has_value());
    CHECK(*mean_only.r_squared == 0.0);

    const FitReport degenerate = metrics({1.0, 2.0}, {4.0, 4.0});
    CHECK_FALSE(degenerate.r_squared.has_value());
    CHECK(std::abs(degenerate.rmse - std::sqrt((9.0 + 4.0) / 2.0)) < 1e-15);

    // predictor overload == vector overload
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_linear(d);
    const FitReport a = metrics(model, d);
    const FitReport b = metrics(model.predict_serial(d.rows()), d.targets());
    CHECK(a.rmse == b.rmse);
    CHECK(a.r_squared == b.r_squared);
}
