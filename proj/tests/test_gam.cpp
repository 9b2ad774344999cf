#include <doctest.h>

#include <cmath>
#include <vector>

#include "fdmlens/dataset.hpp"
#include "fdmlens/errors.hpp"
#include "fdmlens/gam.hpp"
#include "fdmlens/gbt.hpp"
#include "fdmlens/linear.hpp"
#include "fdmlens/shapley.hpp"

using namespace fdmlens;

namespace {

struct ConstantPredictor final : Predictor {
    double c;
    explicit ConstantPredictor(double value) : c(value) {}
    double predict_row(const FeatureVector&) const override { return c; }
};

// crossed two-factor design with a known additive ground truth
Dataset crossed_design() {
    std::vector<FeatureVector> rows;
    std::vector<double> targets;
    for (double infill : {20.0, 40.0, 60.0, 80.0}) {
        for (double temp : {195.0, 205.0, 215.0, 225.0}) {
            rows.push_back({infill, 0.2, 40, temp});
            const double g = infill >= 55.0 ? 3.0 : -2.0;
            const double h = temp >= 210.0 ? 1.5 : -1.0;
            targets.push_back(10.0 + g + h);
        }
    }
    return Dataset(FeatureSchema::canonical(), std::move(rows), std::move(targets));
}

} // namespace

TEST_CASE("shape function bin lookup") {
    ShapeFunction s;
    s.edges = {1.0, 2.0, 3.0};
    s.contributions = {10.0, 20.0, 30.0, 40.0};
    CHECK(s.bin_index(0.5) == 0);
    CHECK(s.bin_index(2.5) == 2);
    CHECK(s.value_at(0.5) == 10.0);
    CHECK(s.value_at(1.0) == 20.0);  // edges are left-exclusive
    CHECK(s.value_at(3.5) == 40.0);
    CHECK(s.value_at(-100.0) == 10.0);
    CHECK(s.value_at(1e9) == 40.0);
}

TEST_CASE("gam on constant targets is the constant") {
    std::vector<FeatureVector> rows = {
        {20, 0.1, 30, 200}, {40, 0.2, 40, 210}, {60, 0.3, 50, 220}, {80, 0.4, 60, 230}};
    const Dataset d(FeatureSchema::canonical(), rows, {5.0, 5.0, 5.0, 5.0});
    const auto [model, report] = fit_gam(d, d.targets());

    CHECK(model.intercept() == 5.0);
    for (const ShapeFunction& s : model.shapes()) {
        for (double c : s.contributions) CHECK(c == 0.0);
    }
    for (const auto& row : rows) CHECK(model.predict_row(row) == 5.0);
    CHECK(report.rmse == 0.0);
    CHECK_FALSE(report.r_squared.has_value());
}

TEST_CASE("gam hyperparameter and target validation") {
    const Dataset& d = embedded_fdm_corpus();
    CHECK_THROWS_AS(fit_gam(d, d.targets(), {.bins = 1}), InvalidHyperparam);
    CHECK_THROWS_AS(fit_gam(d, d.targets(), {.rounds = 0}), InvalidHyperparam);
    CHECK_THROWS_AS(fit_gam(d, d.targets(), {.learning_rate = 0.0}), InvalidHyperparam);
    CHECK_THROWS_AS(fit_gam(d, d.targets(), {.learning_rate = 1.5}), InvalidHyperparam);

    std::vector<double> short_targets(d.row_count() - 1, 1.0);
    CHECK_THROWS_WITH_AS(fit_gam(d, short_targets), doctest::Contains("targets length"),
                         ConfigError);

    std::vector<double> bad = d.targets();
    bad[3] = NAN;
    CHECK_THROWS_WITH_AS(fit_gam(d, bad), doctest::Contains("finite"), ConfigError);
}

TEST_CASE("gam recovers a planted additive signal") {
    const Dataset d = crossed_design();
    const auto [model, report] = fit_gam(d, d.targets());

    REQUIRE(report.mse_trace.size() == 501);
    CHECK(report.mse_trace.back() < 1e-4);
    for (std::size_t t = 1; t < report.mse_trace.size(); ++t) {
        CHECK(report.mse_trace[t] <= report.mse_trace[t - 1] + 1e-12);
    }

    // shapes equal the centered ground-truth components
    const Explanation e = gam_attributions(model, d);
    for (std::size_t i = 0; i < d.row_count(); ++i) {
        const double g = d.rows()[i][0] >= 55.0 ? 3.0 : -2.0;
        const double h = d.rows()[i][3] >= 210.0 ? 1.5 : -1.0;
        CHECK(std::abs(e.values[i][0] - (g - 0.5)) < 1e-9);
        CHECK(std::abs(e.values[i][3] - (h - 0.25)) < 1e-9);
        CHECK(std::abs(e.values[i][1]) < 1e-9);
        CHECK(std::abs(e.values[i][2]) < 1e-9);
    }
    CHECK(std::abs(model.intercept() - 10.75) < 1e-9);
}

TEST_CASE("gam corpus fit beats the linear baseline") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gam(d, d.targets());

    REQUIRE(report.r_squared.has_value());
    CHECK(std::abs(*report.r_squared - 0.78132662541255937) < 1e-9);
    CHECK(*report.r_squared >= 0.55240818129831326);
    CHECK(model.meta().rounds == 500);
    CHECK(model.meta().bins == 8);
    CHECK(model.meta().target_origin == TargetOrigin::raw_targets);

    // centering: every shape averages to zero over the training rows
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        double acc = 0.0;
        for (const auto& row : d.rows()) acc += model.shapes()[j].value_at(row[j]);
        CHECK(std::abs(acc / static_cast<double>(d.row_count())) < 1e-9);
    }
}

TEST_CASE("gam attributions are bit-exactly additive") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gam(d, d.targets());
    const Explanation e = gam_attributions(model, d);

    CHECK(e.base_value == model.intercept());
    CHECK(e.method == ExplainMethod::exact);
    CHECK(e.background_origin.kind == BackgroundOrigin::Kind::full_dataset);
    CHECK(max_additivity_gap(model, e) == 0.0);

    for (std::size_t i = 0; i < d.row_count(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            CHECK(e.values[i][j] == model.shapes()[j].value_at(d.rows()[i][j]));
        }
    }
}

TEST_CASE("gam attributions agree with interventional shapley") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gam(d, d.targets());
    const Explanation e = gam_attributions(model, d);
    const Background bg = Background::full(d);

    for (std::size_t i = 0; i < d.row_count(); ++i) {
        const ShapleyResult r = exact_shapley(model, bg, d.rows()[i]);
        CHECK(std::abs(r.base_value - e.base_value) < 1e-9);
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            CHECK(std::abs(r.attributions[j] - e.values[i][j]) < 1e-9);
        }
    }
}

TEST_CASE("surrogate of a constant model is trivial") {
    const ConstantPredictor p(7.25);
    const auto [model, fidelity] = fit_surrogate(p, embedded_fdm_corpus());
    CHECK(model.intercept() == 7.25);
    for (const ShapeFunction& s : model.shapes()) {
        for (double c : s.contributions) CHECK(c == 0.0);
    }
    CHECK(fidelity.rmse == 0.0);
    CHECK_FALSE(fidelity.r_squared.has_value());
    CHECK(model.meta().target_origin == TargetOrigin::surrogate_of_model);
}

TEST_CASE("surrogate fidelity against smooth references") {
    const Dataset& d = embedded_fdm_corpus();

    const auto [linear, lr] = fit_linear(d);
    const auto [gam_of_linear, fid_linear] = fit_surrogate(linear, d);
    REQUIRE(fid_linear.r_squared.has_value());
    CHECK(*fid_linear.r_squared >= 0.95);

    const auto [gbt, gr] = fit_gbt(d);
    const auto [gam_of_gbt, fid_gbt] = fit_surrogate(gbt, d);
    REQUIRE(fid_gbt.r_squared.has_value());
    CHECK(std::abs(*fid_gbt.r_squared - 0.8140674502894959) < 1e-9);
    CHECK(*fid_gbt.r_squared >= 0.80);
}

TEST_CASE("a constant column yields a degenerate shape") {
    const Dataset& corpus = embedded_fdm_corpus();
    auto rows = corpus.rows();
    for (auto& r : rows) r[2] = 50.0;
    const Dataset d(corpus.schema(), rows, corpus.targets());

    const auto [model, report] = fit_gam(d, d.targets());
    const ShapeFunction& s = model.shapes()[2];
    CHECK(s.degenerate);
    CHECK(s.edges.empty());
    CHECK(s.contributions == std::vector<double>{0.0});
    CHECK(s.value_at(50.0) == 0.0);
    CHECK(s.value_at(123.0) == 0.0);
    REQUIRE(report.r_squared.has_value());
    CHECK(*report.r_squared > 0.5);
}

TEST_CASE("quantile bin edges sit at midpoints between distinct values") {
    std::vector<FeatureVector> rows;
    std::vector<double> targets;
    for (int i = 1; i <= 20; ++i) {
        rows.push_back({static_cast<double>(i), 0.1 + 0.01 * i, 40, 210});
        targets.push_back(static_cast<double>(i));
    }
    const Dataset d(FeatureSchema::canonical(), std::move(rows), std::move(targets),
                    false);

    const auto [model, report] = fit_gam(d, d.targets(), {.rounds = 50, .bins = 4});
    CHECK(model.shapes()[0].edges == std::vector<double>{5.5, 10.5, 15.5});
    CHECK(model.shapes()[0].contributions.size() == 4);
    CHECK(model.shapes()[0].domain_min == 1.0);
    CHECK(model.shapes()[0].domain_max == 20.0);
}

TEST_CASE("shape function csv layout") {
    ShapeFunction s;
    s.feature = 0;
    s.edges = {1.5};
    s.contributions = {-0.5, 2.0};
    s.domain_min = 1.0;
    s.domain_max = 2.0;
    CHECK(shape_function_csv(s) ==
          "bin_left,bin_right,contribution\n"
          "1,1.5,-0.5\n"
          "1.5,2,2\n");
}
