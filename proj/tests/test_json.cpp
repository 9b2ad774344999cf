#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fdmlens/dataset.hpp"
#include "fdmlens/errors.hpp"
#include "fdmlens/gam.hpp"
#include "fdmlens/gbt.hpp"
#include "fdmlens/json_io.hpp"
#include "fdmlens/linear.hpp"
#include "fdmlens/pdp.hpp"
#include "fdmlens/plots.hpp"
#include "fdmlens/shapley.hpp"

using namespace fdmlens;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

} // namespace

TEST_CASE("json writer formatting") {
    CHECK(JsonValue::number(0.1).dump() == "0.10000000000000001\n");
    CHECK(JsonValue::integer(-7).dump() == "-7\n");
    CHECK(JsonValue::boolean(true).dump() == "true\n");
    CHECK(JsonValue::null().dump() == "null\n");
    CHECK(JsonValue::string("a\"b\\c\n").dump() == "\"a\\\"b\\\\c\\n\"\n");
    CHECK(JsonValue::string(std::string(1, '\x01')).dump() == "\"\\u0001\"\n");
    CHECK(JsonValue::array().dump() == "[]\n");
    CHECK(JsonValue::object().dump() == "{}\n");

    JsonValue leaf = JsonValue::array();
    leaf.push(JsonValue::integer(1));
    leaf.push(JsonValue::integer(2));
    leaf.push(JsonValue::number(0.5));
    CHECK(leaf.dump() == "[1, 2, 0.5]\n");

    JsonValue inner = JsonValue::object();
    inner.set("d", JsonValue::null());
    JsonValue items = JsonValue::array();
    JsonValue item = JsonValue::object();
    item.set("g", JsonValue::boolean(false));
    items.push(std::move(item));

    JsonValue o = JsonValue::object();
    o.set("a", JsonValue::integer(1));
    JsonValue pair = JsonValue::array();
    pair.push(JsonValue::integer(1));
    pair.push(JsonValue::integer(2));
    o.set("b", std::move(pair));
    o.set("c", std::move(inner));
    o.set("e", JsonValue::array());
    o.set("f", std::move(items));

    CHECK(o.dump() ==
          "{\n"
          "  \"a\": 1,\n"
          "  \"b\": [1, 2],\n"
          "  \"c\": {\n"
          "    \"d\": null\n"
          "  },\n"
          "  \"e\": [],\n"
          "  \"f\": [\n"
          "    {\n"
          "      \"g\": false\n"
          "    }\n"
          "  ]\n"
          "}\n");
}

TEST_CASE("explanation json round-trips through a standard parser") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);
    const Explanation e = explain_dataset(model, Background::subsample(d, 20, 7), d,
                                          ExplainMethod::exact);

    const std::string text = explanation_json(e).dump();
    const nlohmann::json j = nlohmann::json::parse(text);

    CHECK(j["method"] == "exact");
    CHECK(j["base_value"].get<double>() == e.base_value);
    CHECK(j["feature_names"][0] == "infill_pct");
    CHECK(j["background_origin"]["kind"] == "subsample");
    CHECK(j["background_origin"]["k"] == 20);
    CHECK(j["background_origin"]["seed"] == 7);
    REQUIRE(j["values"].size() == d.row_count());
    REQUIRE(j["data"].size() == d.row_count());
    for (std::size_t i = 0; i < d.row_count(); ++i) {
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            CHECK(j["values"][i][k].get<double>() == e.values[i][k]);
            CHECK(j["data"][i][k].get<double>() == d.rows()[i][k]);
        }
    }

    const Explanation full =
        explain_dataset(model, Background::full(d), d, ExplainMethod::exact);
    const nlohmann::json jf = nlohmann::json::parse(explanation_json(full).dump());
    CHECK(jf["background_origin"]["kind"] == "full_dataset");
    CHECK_FALSE(jf["background_origin"].contains("k"));
}

TEST_CASE("gbt model json round-trip is bit-exact") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d, {.n_rounds = 25});
    const std::string text = gbt_json(model).dump();

    const GbtModel back = gbt_from_json(text);
    CHECK(back.init_value() == model.init_value());
    CHECK(back.learning_rate() == model.learning_rate());
    CHECK(back.hyperparams().n_rounds == 25);
    CHECK(back.hyperparams().max_depth == 3);
    CHECK(back.hyperparams().min_samples_leaf == 2);
    CHECK(back.trees().size() == model.trees().size());
    CHECK(back.predict_serial(d.rows()) == model.predict_serial(d.rows()));

    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j["format"] == "fdmlens.gbt");
    CHECK(j["version"] == 1);
    CHECK(j["hyperparams"]["rounds"] == 25);

    // serialization itself is deterministic
    CHECK(gbt_json(back).dump() == text);
}

TEST_CASE("linear model json round-trip is bit-exact") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_linear(d, 1e-9);
    const std::string text = linear_json(model).dump();

    const LinearModel back = linear_from_json(text);
    CHECK(back.weights() == model.weights());
    CHECK(back.intercept() == model.intercept());
    CHECK(back.ridge_epsilon() == 1e-9);

    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j["format"] == "fdmlens.linear");
}

TEST_CASE("gam model json round-trip is bit-exact") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [gbt, gr] = fit_gbt(d);
    const auto [model, fidelity] = fit_surrogate(gbt, d, {.rounds = 60, .bins = 6});
    const std::string text = gam_json(model).dump();

    const GamModel back = gam_from_json(text);
    CHECK(back.intercept() == model.intercept());
    CHECK(back.meta().rounds == 60);
    CHECK(back.meta().bins == 6);
    CHECK(back.meta().target_origin == TargetOrigin::surrogate_of_model);
    CHECK(back.predict_serial(d.rows()) == model.predict_serial(d.rows()));
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        CHECK(back.shapes()[j].edges == model.shapes()[j].edges);
        CHECK(back.shapes()[j].contributions == model.shapes()[j].contributions);
        CHECK(back.shapes()[j].degenerate == model.shapes()[j].degenerate);
    }

    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j["format"] == "fdmlens.gam");
    CHECK(j["meta"]["target_origin"] == "surrogate_of_model");
}

TEST_CASE("model json validation") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [gbt, gr] = fit_gbt(d, {.n_rounds = 2});
    const auto [lin, lr] = fit_linear(d);

    std::string text = gbt_json(gbt).dump();
    const std::string bumped =
        text.replace(text.find("\"version\": 1"), 12, "\"version\": 2");
    CHECK_THROWS_WITH_AS(gbt_from_json(bumped),
                         doctest::Contains("unsupported fdmlens.gbt version"), DataError);

    CHECK_THROWS_WITH_AS(gbt_from_json(linear_json(lin).dump()),
                         doctest::Contains("unexpected model format tag (want fdmlens.gbt)"),
                         DataError);
    CHECK_THROWS_WITH_AS(linear_from_json("{"), doctest::Contains("malformed JSON"),
                         DataError);
    CHECK_THROWS_AS(gam_from_json("[1, 2]"), DataError);
}

TEST_CASE("load_model_file dispatches on the format tag") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [gbt, gr] = fit_gbt(d, {.n_rounds = 5});
    const auto [lin, lr] = fit_linear(d);

    const auto gbt_path = temp_file("fdmlens_test_model_gbt.json");
    const auto lin_path = temp_file("fdmlens_test_model_linear.json");
    write_file(gbt_path, gbt_json(gbt).dump());
    write_file(lin_path, linear_json(lin).dump());

    const auto loaded_gbt = load_model_file(gbt_path);
    CHECK(loaded_gbt->predict_serial(d.rows()) == gbt.predict_serial(d.rows()));
    const auto loaded_lin = load_model_file(lin_path);
    CHECK(loaded_lin->predict_serial(d.rows()) == lin.predict_serial(d.rows()));

    const auto weird_path = temp_file("fdmlens_test_model_weird.json");
    write_file(weird_path, "{\"format\": \"fdmlens.mystery\", \"version\": 1}\n");
    CHECK_THROWS_WITH_AS(load_model_file(weird_path),
                         doctest::Contains("unrecognized model format"), DataError);

    CHECK_THROWS_WITH_AS(load_model_file("/nonexistent/model.json"),
                         doctest::Contains("not found"), DataError);

    std::filesystem::remove(gbt_path);
    std::filesystem::remove(lin_path);
    std::filesystem::remove(weird_path);
}

TEST_CASE("fit and fidelity report json") {
    FitReport r;
    r.rmse = 0.5;
    r.r_squared = 0.9;
    nlohmann::json j = nlohmann::json::parse(fit_report_json(r).dump());
    CHECK(j["rmse"].get<double>() == 0.5);
    CHECK(j["r_squared"].get<double>() == 0.9);
    CHECK_FALSE(j.contains("mse_trace"));

    r.mse_trace = {4.0, 1.0};
    j = nlohmann::json::parse(fit_report_json(r).dump());
    REQUIRE(j.contains("mse_trace"));
    CHECK(j["mse_trace"].size() == 2);

    r.r_squared.reset();
    j = nlohmann::json::parse(fit_report_json(r).dump());
    CHECK(j["r_squared"].is_null());

    FidelityReport f;
    f.rmse = 0.0;
    j = nlohmann::json::parse(fidelity_json(f).dump());
    CHECK(j["r_squared"].is_null());
    f.r_squared = 0.8;
    j = nlohmann::json::parse(fidelity_json(f).dump());
    CHECK(j["r_squared"].get<double>() == 0.8);
}

TEST_CASE("importance json lists the ranking in order") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);
    const Explanation e =
        explain_dataset(model, Background::full(d), d, ExplainMethod::exact);
    const ImportanceRanking r = mean_abs_importance(e);

    const nlohmann::json j = nlohmann::json::parse(importance_json(r).dump());
    REQUIRE(j["ranking"].size() == kFeatureCount);
    CHECK(j["ranking"][0]["feature"] == "infill_pct");
    CHECK(j["ranking"][0]["mean_abs"].get<double>() == r.importance[0]);
    for (std::size_t k = 1; k < kFeatureCount; ++k) {
        CHECK(j["ranking"][k]["mean_abs"].get<double>() <=
              j["ranking"][k - 1]["mean_abs"].get<double>());
    }
    REQUIRE(j["importance_canonical"].size() == kFeatureCount);
    CHECK(j["importance_canonical"][0].get<double>() == r.importance[0]);
}

TEST_CASE("figure json documents carry their tags") {
    const Dataset& d = embedded_fdm_corpus();
    const auto [model, report] = fit_gbt(d);
    const Explanation e =
        explain_dataset(model, Background::full(d), d, ExplainMethod::exact);

    const nlohmann::json wf =
        nlohmann::json::parse(waterfall_json(build_waterfall(e, 0)).dump());
    CHECK(wf["figure"] == "waterfall");

    const nlohmann::json bs = nlohmann::json::parse(beeswarm_json(build_beeswarm(e)).dump());
    CHECK(bs["figure"] == "beeswarm");

    const nlohmann::json hm = nlohmann::json::parse(
        heatmap_json(build_heatmap(e, HeatmapOrdering::by_prediction)).dump());
    CHECK(hm["figure"] == "heatmap");
    CHECK(hm["ordering"] == "by_prediction");

    const PdpCurve curve =
        partial_dependence(model, d, 0, GridSpec::linear(), PdpMode::average);
    const nlohmann::json pj =
        nlohmann::json::parse(pdp_json(curve, d.schema()).dump());
    CHECK(pj["figure"] == "pdp");
    CHECK(pj["feature"] == "infill_pct");
    CHECK(pj["mode"] == "average");
    CHECK(pj["reference"].get<double>() == curve.reference);

    const PdpOverlay overlay =
        pdp_with_shap_overlay(model, d, e, 0, GridSpec::linear());
    const nlohmann::json oj =
        nlohmann::json::parse(pdp_overlay_json(overlay, d.schema()).dump());
    CHECK(oj["figure"] == "pdp_overlay");
    CHECK(oj["scatter"].size() == d.row_count());
    CHECK(oj["reference"].get<double>() == e.base_value);
}

TEST_CASE("method names") {
    CHECK(method_name(ExplainMethod::exact) == "exact");
    CHECK(method_name(ExplainMethod::kernel) == "kernel");
}
