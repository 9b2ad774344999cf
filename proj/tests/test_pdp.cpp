#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "fdmlens/dataset.hpp"
#include "fdmlens/errors.hpp"
#include "fdmlens/gam.hpp"
#include "fdmlens/gbt.hpp"
#include "fdmlens/linear.hpp"
#include "fdmlens/pdp.hpp"
#include "fdmlens/shapley.hpp"

using namespace fdmlens;

namespace {

struct ConstantPredictor final : Predictor {
    double c;
    explicit ConstantPredictor(double value) : c(value) {}
    double predict_row(const FeatureVector&) const override { return c; }
};

FeatureVector column_means(const Dataset& d) {
    FeatureVector means{};
    for (const auto& r : d.rows()) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) means[j] += r[j];
    }
    for (double& m : means) m /= static_cast<double>(d.row_count());
    return means;
}

} // namespace

TEST_CASE("default grid spans the observed range") {
    const Dataset& d = embedded_fdm_corpus();
    const ConstantPredictor p(1.0);
    const PdpCurve c = partial_dependence(p, d, 0, GridSpec::linear(), PdpMode::average);

    REQUIRE(c.grid.size() == 25);
    CHECK(c.grid.front() == 10.5);
    CHECK(c.grid.back() == 100.0);
    for (std::size_t k = 0; k + 1 < c.grid.size(); ++k) CHECK(c.grid[k] < c.grid[k + 1]);
    CHECK(c.feature == 0);
    CHECK(c.mode == PdpMode::average);
}

TEST_CASE("constant model gives a flat curve") {
    const Dataset& d = embedded_fdm_corpus();
    const ConstantPredictor p(8.25);
    for (PdpMode mode : {PdpMode::average, PdpMode::at_means}) {
        const PdpCurve c = partial_dependence(p, d, 2, GridSpec::linear(), mode);
        CHECK(std::abs(c.reference - 8.25) < 1e-12);
        for (double v : c.values) CHECK(v == c.values[0]);
        CHECK(std::abs(c.values[0] - 8.25) < 1e-12);
    }
}

TEST_CASE("linear model gives a straight average curve") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_linear(d);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const PdpCurve c = partial_dependence(model, d, j, GridSpec::linear(), PdpMode::average);
        for (std::size_t k = 1; k < c.grid.size(); ++k) {
            const double expected = model.weights()[j] * (c.grid[k] - c.grid[0]);
            CHECK(std::abs((c.values[k] - c.values[0]) - expected) < 1e-9);
        }
    }
}

TEST_CASE("average curve matches the brute-force marginalization") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);

    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const PdpCurve c = partial_dependence(model, d, j, GridSpec::linear(), PdpMode::average);
        for (std::size_t k : {std::size_t{0}, std::size_t{12}, std::size_t{24}}) {
            double acc = 0.0;
            for (const auto& row : d.rows()) {
                FeatureVector x = row;
                x[j] = c.grid[k];
                acc += model.predict_row(x);
            }
            acc /= static_cast<double>(d.row_count());
            CHECK(std::abs(c.values[k] - acc) < 1e-12);
        }

        double ref = 0.0;
        for (const auto& row : d.rows()) ref += model.predict_row(row);
        ref /= static_cast<double>(d.row_count());
        CHECK(c.reference == ref);
    }
}

TEST_CASE("at-means curve evaluates the mean row") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);
    const FeatureVector means = column_means(d);

    const PdpCurve c = partial_dependence(model, d, 3, GridSpec::linear(), PdpMode::at_means);
    for (std::size_t k = 0; k < c.grid.size(); ++k) {
        FeatureVector x = means;
        x[3] = c.grid[k];
        CHECK(c.values[k] == model.predict_row(x));
    }
}

TEST_CASE("average curve of a gam reproduces its shape function") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gam(d, d.targets());
    const ShapeFunction& shape = model.shapes()[1];

    const PdpCurve c = partial_dependence(model, d, 1, GridSpec::linear(), PdpMode::average);
    for (std::size_t k = 1; k < c.grid.size(); ++k) {
        const double expected = shape.value_at(c.grid[k]) - shape.value_at(c.grid[0]);
        CHECK(std::abs((c.values[k] - c.values[0]) - expected) < 1e-9);
    }
}

TEST_CASE("average curve is invariant to row order") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);

    std::vector<FeatureVector> rows(d.rows().rbegin(), d.rows().rend());
    std::vector<double> targets(d.targets().rbegin(), d.targets().rend());
    const Dataset reversed(d.schema(), std::move(rows), std::move(targets));

    const PdpCurve a = partial_dependence(model, d, 0, GridSpec::linear(), PdpMode::average);
    const PdpCurve b = partial_dependence(model, reversed, 0, GridSpec::linear(), PdpMode::average);
    REQUIRE(a.grid == b.grid);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        CHECK(std::abs(a.values[k] - b.values[k]) < 1e-12);
    }
    CHECK(std::abs(a.reference - b.reference) < 1e-12);
}

TEST_CASE("explicit single-point grid on a constant column hits the reference") {
    const Dataset& corpus = embedded_fdm_corpus();
    auto rows = corpus.rows();
    for (auto& r : rows) r[2] = 50.0;
    const Dataset d(corpus.schema(), rows, corpus.targets());
    const auto [model, report] = fit_gbt(d);

    const PdpCurve c =
        partial_dependence(model, d, 2, GridSpec::points({50.0}), PdpMode::average);
    REQUIRE(c.values.size() == 1);
    CHECK(c.values[0] == c.reference);
}

TEST_CASE("grid validation") {
    const Dataset& d = embedded_fdm_corpus();
    const ConstantPredictor p(1.0);

    CHECK_THROWS_WITH_AS(partial_dependence(p, d, 0, GridSpec::points({}), PdpMode::average),
                         doctest::Contains("empty"), InvalidGrid);
    CHECK_THROWS_WITH_AS(
        partial_dependence(p, d, 0, GridSpec::points({2.0, 1.0}), PdpMode::average),
        doctest::Contains("ascending"), InvalidGrid);
    CHECK_THROWS_WITH_AS(
        partial_dependence(p, d, 0, GridSpec::points({1.0, 1.0}), PdpMode::average),
        doctest::Contains("ascending"), InvalidGrid);
    CHECK_THROWS_WITH_AS(
        partial_dependence(p, d, 0, GridSpec::points({1.0, NAN}), PdpMode::average),
        doctest::Contains("non-finite"), InvalidGrid);
    CHECK_THROWS_WITH_AS(partial_dependence(p, d, 0, GridSpec::linear(1), PdpMode::average),
                         doctest::Contains("at least 2"), InvalidGrid);
    CHECK_THROWS_AS(partial_dependence(p, d, 4, GridSpec::linear(), PdpMode::average),
                    ConfigError);

    auto rows = d.rows();
    for (auto& r : rows) r[1] = 0.2;
    const Dataset flat(d.schema(), rows, d.targets());
    CHECK_THROWS_WITH_AS(partial_dependence(p, flat, 1, GridSpec::linear(), PdpMode::average),
                         doctest::Contains("single observed value"), InvalidGrid);
}

TEST_CASE("overlay scatter sits on the linear curve") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_linear(d);
    const Explanation e =
        explain_dataset(model, Background::full(d), d, ExplainMethod::exact);
    const FeatureVector means = column_means(d);

    const std::size_t j = 0;
    std::set<double> distinct;
    for (const auto& row : d.rows()) distinct.insert(row[j]);
    const std::vector<double> grid(distinct.begin(), distinct.end());

    const PdpOverlay o = pdp_with_shap_overlay(model, d, e, j, GridSpec::points(grid));
    CHECK(o.curve.reference == e.base_value);
    REQUIRE(o.scatter.size() == d.row_count());

    for (std::size_t i = 0; i < d.row_count(); ++i) {
        const double x = d.rows()[i][j];
        CHECK(o.scatter[i][0] == x);
        const double closed_form =
            e.base_value + model.weights()[j] * (x - means[j]);
        CHECK(std::abs(o.scatter[i][1] - closed_form) < 1e-9);

        const auto it = std::lower_bound(o.curve.grid.begin(), o.curve.grid.end(), x);
        REQUIRE(it != o.curve.grid.end());
        const std::size_t k = static_cast<std::size_t>(it - o.curve.grid.begin());
        CHECK(std::abs(o.scatter[i][1] - o.curve.values[k]) < 1e-9);
    }
}

TEST_CASE("overlay on a constant model collapses to the base value") {
    const Dataset& d = embedded_fdm_corpus();
    const ConstantPredictor p(9.0);
    const Explanation e = explain_dataset(p, Background::full(d), d, ExplainMethod::exact);

    const PdpOverlay o = pdp_with_shap_overlay(p, d, e, 0, GridSpec::linear());
    for (const auto& pt : o.scatter) CHECK(pt[1] == e.base_value);
    CHECK(o.curve.reference == e.base_value);
}

TEST_CASE("overlay rejects a mismatched explanation") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);
    const Explanation e =
        explain_dataset(model, Background::full(d), d, ExplainMethod::exact);

    Explanation shorter = e;
    shorter.data.pop_back();
    shorter.values.pop_back();
    CHECK_THROWS_WITH_AS(pdp_with_shap_overlay(model, d, shorter, 0, GridSpec::linear()),
                         doctest::Contains("different number of rows"),
                         ExplanationMismatch);

    Explanation edited = e;
    edited.data[2][0] += 1.0;
    CHECK_THROWS_WITH_AS(pdp_with_shap_overlay(model, d, edited, 0, GridSpec::linear()),
                         doctest::Contains("at row 3"), ExplanationMismatch);
}

TEST_CASE("parallel curve equals the serial reference") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);

    for (PdpMode mode : {PdpMode::average, PdpMode::at_means}) {
        const PdpCurve par = partial_dependence(model, d, 0, GridSpec::linear(201), mode);
        const PdpCurve ser = partial_dependence_serial(model, d, 0, GridSpec::linear(201), mode);
        CHECK(par.grid == ser.grid);
        CHECK(par.values == ser.values);
        CHECK(par.reference == ser.reference);
    }
}
