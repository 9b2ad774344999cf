#include "fdmlens/cli.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "fdmlens/dataset.hpp"
#include "fdmlens/errors.hpp"
#include "fdmlens/gam.hpp"
#include "fdmlens/gbt.hpp"
#include "fdmlens/json_io.hpp"
#include "fdmlens/linear.hpp"
#include "fdmlens/pdp.hpp"
#include "fdmlens/plots.hpp"
#include "fdmlens/shapley.hpp"
#include "fdmlens/svg.hpp"
#include "fdmlens/text.hpp"

namespace fs = std::filesystem;

namespace fdmlens {

namespace {

struct RunConfig {
    std::string command;
    std::string config_path;
    std::string data = "embedded";
    std::string model = "gbt";
    int rounds = 200;
    double lr = 0.1;
    int depth = 3;
    std::string method = "exact";
    std::string budget = "complete";
    std::string background = "full";
    std::uint32_t seed = 42;
    std::string feature;
    std::string mode = "average";
    int sample = 0;
    std::string out = "out";
    std::string palette = "paper";
    int gam_rounds = 500;
    double gam_lr = 0.2;
};

/// Collects files for one run directory and writes manifest.json last.
class OutputDir {
public:
    explicit OutputDir(fs::path root) : root_(std::move(root)) {
        std::error_code ec;
        fs::create_directories(root_, ec);
        if (ec) throw DataError("cannot create output directory " + root_.string());
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = root_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + path.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("write failed for " + path.string());
        names_.push_back(name);
    }

    bool exists(const std::string& name) const { return fs::exists(root_ / name); }
    fs::path path_of(const std::string& name) const { return root_ / name; }

    void finish(const std::string& command) {
        JsonValue manifest = JsonValue::object();
        manifest.set("command", JsonValue::string(command));
        names_.push_back("manifest.json");
        std::sort(names_.begin(), names_.end());
        JsonValue files = JsonValue::array();
        for (const auto& n : names_) files.push(JsonValue::string(n));
        manifest.set("files", std::move(files));
        const fs::path path = root_ / "manifest.json";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + path.string());
        const std::string text = manifest.dump();
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
    }

    const fs::path& root() const { return root_; }

private:
    fs::path root_;
    std::vector<std::string> names_;
};

JsonValue config_echo(const RunConfig& cfg) {
    JsonValue o = JsonValue::object();
    o.set("command", JsonValue::string(cfg.command));
    o.set("data", JsonValue::string(cfg.data));
    o.set("model", JsonValue::string(cfg.model));
    o.set("rounds", JsonValue::integer(cfg.rounds));
    o.set("lr", JsonValue::number(cfg.lr));
    o.set("depth", JsonValue::integer(cfg.depth));
    o.set("method", JsonValue::string(cfg.method));
    o.set("budget", JsonValue::string(cfg.budget));
    o.set("background", JsonValue::string(cfg.background));
    o.set("seed", JsonValue::integer(cfg.seed));
    o.set("feature", JsonValue::string(cfg.feature));
    o.set("mode", JsonValue::string(cfg.mode));
    o.set("sample", JsonValue::integer(cfg.sample));
    o.set("out", JsonValue::string(cfg.out));
    o.set("palette", JsonValue::string(cfg.palette));
    if (cfg.command == "gam") {
        o.set("gam_rounds", JsonValue::integer(cfg.gam_rounds));
        o.set("gam_lr", JsonValue::number(cfg.gam_lr));
    }
    return o;
}

Dataset load_data(const RunConfig& cfg) {
    if (cfg.data == "embedded") return embedded_fdm_corpus();
    return load_csv_file(cfg.data, "tensile_strength");
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return std::string(s);
}

int config_int(const std::string& key, const std::string& value) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("config key " + key + " expects an integer, got \"" + value +
                          "\"");
    }
    return v;
}

double config_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key " + key + " expects a number, got \"" + value + "\"");
}

void check_member(const std::string& key, const std::string& value,
                  std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (value == a) return;
    }
    throw ConfigError("config key " + key + " has unsupported value \"" + value + "\"");
}

void apply_config_value(const std::string& key, const std::string& value, RunConfig& cfg,
                        bool gam_defaults) {
    if (key == "data") {
        cfg.data = value;
    } else if (key == "model") {
        check_member(key, value, {"gbt", "linear"});
        cfg.model = value;
    } else if (key == "rounds") {
        (gam_defaults ? cfg.gam_rounds : cfg.rounds) = config_int(key, value);
    } else if (key == "lr") {
        (gam_defaults ? cfg.gam_lr : cfg.lr) = config_double(key, value);
    } else if (key == "depth") {
        cfg.depth = config_int(key, value);
    } else if (key == "method") {
        check_member(key, value, {"exact", "kernel"});
        cfg.method = value;
    } else if (key == "budget") {
        cfg.budget = value;
    } else if (key == "background") {
        cfg.background = value;
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint32_t>(config_int(key, value));
    } else if (key == "feature") {
        cfg.feature = value;
    } else if (key == "mode") {
        check_member(key, value, {"average", "at_means", "both"});
        cfg.mode = value;
    } else if (key == "sample") {
        cfg.sample = config_int(key, value);
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "palette") {
        check_member(key, value, {"paper", "unified"});
        cfg.palette = value;
    } else {
        throw ConfigError("unknown config key \"" + key + "\"");
    }
}

/// key=value lines; explicit command-line flags win over file entries.
void apply_config_file(const CLI::App* sub, RunConfig& cfg, bool gam_defaults) {
    std::ifstream in(cfg.config_path);
    if (!in) throw DataError("config file " + cfg.config_path + " not found");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#' || entry[0] == ';') continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not key=value: \"" + entry + "\"");
        }
        const std::string key = trim(std::string_view(entry).substr(0, eq));
        const std::string value = trim(std::string_view(entry).substr(eq + 1));
        const CLI::Option* flag = sub->get_option_no_throw("--" + key);
        if (flag != nullptr && flag->count() > 0) continue;
        apply_config_value(key, value, cfg, gam_defaults);
    }
}

Palette palette_of(const RunConfig& cfg) {
    return cfg.palette == "unified" ? Palette::unified : Palette::paper;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t prev = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t insert_or_delete = std::min(row[j], row[j - 1]) + 1;
            const std::size_t substitute = prev + (a[i - 1] == b[j - 1] ? 0 : 1);
            prev = row[j];
            row[j] = std::min(insert_or_delete, substitute);
        }
    }
    return row[b.size()];
}

std::size_t feature_index_or_throw(const FeatureSchema& schema, const std::string& name) {
    if (const auto idx = schema.index_of(name)) return *idx;

    std::string suggestion;
    std::size_t best = static_cast<std::size_t>(-1);
    for (const auto& candidate : schema.names) {
        if (candidate.rfind(name, 0) == 0 && !name.empty()) {
            suggestion = candidate;
            best = 0;
            break;
        }
        const std::size_t dist = levenshtein(name, candidate);
        if (dist < best) {
            best = dist;
            suggestion = candidate;
        }
    }
    throw ConfigError("unknown feature \"" + name + "\"; did you mean \"" + suggestion +
                      "\"?");
}

struct ObtainedModel {
    std::unique_ptr<Predictor> predictor;
    std::string kind;
    bool loaded = false;
};

void write_metrics(OutputDir& out, const std::string& name, const FitReport& report) {
    FitReport flat;
    flat.rmse = report.rmse;
    flat.r_squared = report.r_squared;
    out.write(name, fit_report_json(flat).dump());
}

/// Loads <out>/model_<kind>.json when present, otherwise trains with the
/// configured hyperparameters and writes the model plus its metrics.
ObtainedModel obtain_model(const RunConfig& cfg, const Dataset& d, OutputDir& out) {
    ObtainedModel m;
    m.kind = cfg.model;
    const std::string model_file = "model_" + m.kind + ".json";

    if (out.exists(model_file)) {
        m.predictor = load_model_file(out.path_of(model_file));
        m.loaded = true;
        std::cout << "model: " << m.kind << " (loaded from " << model_file << ")\n";
    } else if (cfg.model == "gbt") {
        GbtHyperparams hp;
        hp.n_rounds = cfg.rounds;
        hp.learning_rate = cfg.lr;
        hp.max_depth = cfg.depth;
        auto [model, report] = fit_gbt(d, hp, cfg.seed);
        out.write(model_file, gbt_json(model).dump());
        write_metrics(out, "metrics_gbt.json", report);
        m.predictor = std::make_unique<GbtModel>(std::move(model));
        std::cout << "model: gbt (trained)\n";
    } else {
        auto [model, report] = fit_linear(d);
        out.write(model_file, linear_json(model).dump());
        write_metrics(out, "metrics_linear.json", report);
        m.predictor = std::make_unique<LinearModel>(std::move(model));
        std::cout << "model: linear (trained)\n";
    }
    return m;
}

Background make_background(const RunConfig& cfg, const Dataset& d) {
    if (cfg.background == "full") return Background::full(d);
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(cfg.background.data(),
                                           cfg.background.data() + cfg.background.size(), k);
    if (ec != std::errc() || ptr != cfg.background.data() + cfg.background.size()) {
        throw ConfigError("--background expects \"full\" or a row count, got \"" +
                          cfg.background + "\"");
    }
    return Background::subsample(d, k, cfg.seed);
}

ExplainMethod method_of(const RunConfig& cfg) {
    return cfg.method == "kernel" ? ExplainMethod::kernel : ExplainMethod::exact;
}

KernelOptions kernel_options(const RunConfig& cfg) {
    KernelOptions opts;
    opts.seed = cfg.seed;
    if (cfg.budget == "complete") {
        opts.budget = std::nullopt;
        return opts;
    }
    int b = 0;
    const auto [ptr, ec] =
        std::from_chars(cfg.budget.data(), cfg.budget.data() + cfg.budget.size(), b);
    if (ec != std::errc() || ptr != cfg.budget.data() + cfg.budget.size()) {
        throw ConfigError("--budget expects \"complete\" or an integer, got \"" +
                          cfg.budget + "\"");
    }
    opts.budget = b;
    return opts;
}

double additivity_tolerance(ExplainMethod method) {
    return method == ExplainMethod::exact ? 1e-9 : 1e-6;
}

void check_additivity(const Predictor& p, const Explanation& e) {
    const double gap = max_additivity_gap(p, e);
    std::cout << "additivity max gap: " << format_shortest(gap) << "\n";
    if (gap > additivity_tolerance(e.method)) {
        throw InvariantError("additivity self-check failed: max gap " +
                             format_shortest(gap) + " exceeds " +
                             format_shortest(additivity_tolerance(e.method)));
    }
}

void print_ranking(const ImportanceRanking& ranking, const char* label) {
    std::cout << label << ":\n";
    for (std::size_t rank = 0; rank < kFeatureCount; ++rank) {
        std::cout << "  " << rank + 1 << ". " << ranking.ordered_names[rank] << " "
                  << format_shortest(ranking.importance[ranking.order[rank]]) << "\n";
    }
}

bool top2_matches(const ImportanceRanking& ranking, const std::string& a,
                  const std::string& b) {
    return (ranking.ordered_names[0] == a && ranking.ordered_names[1] == b) ||
           (ranking.ordered_names[0] == b && ranking.ordered_names[1] == a);
}

struct KernelComparison {
    std::array<double, kFeatureCount> per_feature{};
    double max = 0.0;
};

KernelComparison compare_explanations(const Explanation& a, const Explanation& b) {
    KernelComparison cmp;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            const double diff = std::abs(a.values[i][j] - b.values[i][j]);
            cmp.per_feature[j] = std::max(cmp.per_feature[j], diff);
            cmp.max = std::max(cmp.max, diff);
        }
    }
    return cmp;
}

JsonValue kernel_comparison_json(const KernelComparison& cmp,
                                 const std::array<std::string, kFeatureCount>& names) {
    JsonValue o = JsonValue::object();
    JsonValue per = JsonValue::object();
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        per.set(names[j], JsonValue::number(cmp.per_feature[j]));
    }
    o.set("max_abs_diff_per_feature", std::move(per));
    o.set("max_abs_diff", JsonValue::number(cmp.max));
    return o;
}

void emit_explanation_figures(OutputDir& out, const Explanation& e, const Predictor& p,
                              const RunConfig& cfg, const std::string& prefix) {
    const Palette palette = palette_of(cfg);

    const WaterfallSpec waterfall =
        build_waterfall(e, static_cast<std::size_t>(cfg.sample));
    const std::string wf_name = prefix + "waterfall_" + std::to_string(cfg.sample);
    out.write(wf_name + ".svg", render_svg(waterfall, palette).to_xml());
    out.write(wf_name + ".json", waterfall_json(waterfall).dump());

    const BeeswarmSpec beeswarm = build_beeswarm(e);
    out.write(prefix + "beeswarm.svg", render_svg(beeswarm, palette).to_xml());
    out.write(prefix + "beeswarm.json", beeswarm_json(beeswarm).dump());

    const HeatmapSpec heatmap = build_heatmap(e, HeatmapOrdering::by_prediction);
    out.write(prefix + "heatmap.svg", render_svg(heatmap, palette).to_xml());
    out.write(prefix + "heatmap.json", heatmap_json(heatmap).dump());

    const ImportanceRanking ranking = mean_abs_importance(e);
    out.write(prefix + "importance.json", importance_json(ranking).dump());
    (void)p;
}

void emit_pdp_pair(OutputDir& out, const Predictor& p, const Dataset& d,
                   const Explanation& e, std::size_t feature, const RunConfig& cfg,
                   const std::string& prefix) {
    const Palette palette = palette_of(cfg);
    const std::string fname = d.schema().names[feature];
    const GridSpec grid = GridSpec::linear(25);

    const PdpCurve curve = partial_dependence(p, d, feature, grid, PdpMode::average);
    out.write(prefix + "pdp_" + fname + ".svg",
              render_svg(curve, d.schema(), palette).to_xml());
    out.write(prefix + "pdp_" + fname + ".json", pdp_json(curve, d.schema()).dump());

    const PdpOverlay overlay = pdp_with_shap_overlay(p, d, e, feature, grid);
    out.write(prefix + "pdp_overlay_" + fname + ".svg",
              render_svg(overlay, d.schema(), palette).to_xml());
    out.write(prefix + "pdp_overlay_" + fname + ".json",
              pdp_overlay_json(overlay, d.schema()).dump());
}

int cmd_train(const RunConfig& cfg) {
    const Dataset d = load_data(cfg);
    OutputDir out(cfg.out);
    out.write("config.json", config_echo(cfg).dump());

    if (cfg.model == "gbt") {
        GbtHyperparams hp;
        hp.n_rounds = cfg.rounds;
        hp.learning_rate = cfg.lr;
        hp.max_depth = cfg.depth;
        auto [model, report] = fit_gbt(d, hp, cfg.seed);
        out.write("model_gbt.json", gbt_json(model).dump());
        write_metrics(out, "metrics_gbt.json", report);
        std::cout << "model: gbt\nrmse: " << format_shortest(report.rmse) << "\n";
        if (report.r_squared) {
            std::cout << "r_squared: " << format_shortest(*report.r_squared) << "\n";
        }
    } else {
        auto [model, report] = fit_linear(d);
        out.write("model_linear.json", linear_json(model).dump());
        write_metrics(out, "metrics_linear.json", report);
        std::cout << "model: linear\nrmse: " << format_shortest(report.rmse) << "\n";
        if (report.r_squared) {
            std::cout << "r_squared: " << format_shortest(*report.r_squared) << "\n";
        }
    }

    out.finish(cfg.command);
    std::cout << "wrote " << out.root().string() << "\n";
    return 0;
}

int cmd_explain(const RunConfig& cfg) {
    const Dataset d = load_data(cfg);
    OutputDir out(cfg.out);
    out.write("config.json", config_echo(cfg).dump());

    const ObtainedModel model = obtain_model(cfg, d, out);
    const Background bg = make_background(cfg, d);
    const ExplainMethod method = method_of(cfg);
    const KernelOptions opts = kernel_options(cfg);

    const Explanation e = explain_dataset(*model.predictor, bg, d, method, opts);
    check_additivity(*model.predictor, e);
    out.write("explanation.json", explanation_json(e).dump());

    if (method == ExplainMethod::kernel) {
        const Explanation exact = explain_dataset(*model.predictor, bg, d,
                                                  ExplainMethod::exact);
        const KernelComparison cmp = compare_explanations(e, exact);
        out.write("kernel_vs_exact.json",
                  kernel_comparison_json(cmp, e.feature_names).dump());
        std::cout << "kernel vs exact max |diff|: " << format_shortest(cmp.max) << "\n";
    }

    emit_explanation_figures(out, e, *model.predictor, cfg, "");
    print_ranking(mean_abs_importance(e), "importance (mean |SHAP|)");

    out.finish(cfg.command);
    std::cout << "wrote " << out.root().string() << "\n";
    return 0;
}

int cmd_pdp(const RunConfig& cfg) {
    const Dataset d = load_data(cfg);
    const std::size_t feature = feature_index_or_throw(d.schema(), cfg.feature);
    OutputDir out(cfg.out);
    out.write("config.json", config_echo(cfg).dump());

    const ObtainedModel model = obtain_model(cfg, d, out);
    const Palette palette = palette_of(cfg);
    const GridSpec grid = GridSpec::linear(25);
    const std::string fname = d.schema().names[feature];

    if (cfg.mode == "average" || cfg.mode == "both") {
        const PdpCurve curve =
            partial_dependence(*model.predictor, d, feature, grid, PdpMode::average);
        out.write("pdp_" + fname + ".svg", render_svg(curve, d.schema(), palette).to_xml());
        out.write("pdp_" + fname + ".json", pdp_json(curve, d.schema()).dump());

        const Background bg = make_background(cfg, d);
        const Explanation e = explain_dataset(*model.predictor, bg, d, method_of(cfg),
                                              kernel_options(cfg));
        out.write("explanation.json", explanation_json(e).dump());
        const PdpOverlay overlay = pdp_with_shap_overlay(*model.predictor, d, e, feature,
                                                         grid);
        out.write("pdp_overlay_" + fname + ".svg",
                  render_svg(overlay, d.schema(), palette).to_xml());
        out.write("pdp_overlay_" + fname + ".json",
                  pdp_overlay_json(overlay, d.schema()).dump());
    }
    if (cfg.mode == "at_means" || cfg.mode == "both") {
        const PdpCurve curve =
            partial_dependence(*model.predictor, d, feature, grid, PdpMode::at_means);
        out.write("pdp_at_means_" + fname + ".svg",
                  render_svg(curve, d.schema(), palette).to_xml());
        out.write("pdp_at_means_" + fname + ".json", pdp_json(curve, d.schema()).dump());
    }

    out.finish(cfg.command);
    std::cout << "wrote " << out.root().string() << "\n";
    return 0;
}

int cmd_gam(const RunConfig& cfg) {
    const Dataset d = load_data(cfg);
    OutputDir out(cfg.out);
    out.write("config.json", config_echo(cfg).dump());

    const ObtainedModel model = obtain_model(cfg, d, out);
    GamHyperparams hp;
    hp.rounds = cfg.gam_rounds;
    hp.learning_rate = cfg.gam_lr;
    auto [gam, fidelity] = fit_surrogate(*model.predictor, d, hp);

    out.write("model_gam.json", gam_json(gam).dump());
    out.write("fidelity.json", fidelity_json(fidelity).dump());
    for (const auto& shape : gam.shapes()) {
        out.write("shape_" + d.schema().names[shape.feature] + ".csv",
                  shape_function_csv(shape));
    }

    const Explanation e = gam_attributions(gam, d);
    check_additivity(gam, e);
    out.write("gam_explanation.json", explanation_json(e).dump());
    const ImportanceRanking ranking = mean_abs_importance(e);
    out.write("gam_importance.json", importance_json(ranking).dump());

    std::cout << "fidelity rmse: " << format_shortest(fidelity.rmse) << "\n";
    if (fidelity.r_squared) {
        std::cout << "fidelity r_squared: " << format_shortest(*fidelity.r_squared) << "\n";
    }
    print_ranking(ranking, "gam importance (mean |attribution|)");

    out.finish(cfg.command);
    std::cout << "wrote " << out.root().string() << "\n";
    return 0;
}

int cmd_report(const RunConfig& cfg) {
    const Dataset d = load_data(cfg);
    OutputDir out(cfg.out);
    out.write("config.json", config_echo(cfg).dump());
    out.write("data.csv", to_csv(d));

    GbtHyperparams gbt_hp;
    gbt_hp.n_rounds = cfg.rounds;
    gbt_hp.learning_rate = cfg.lr;
    gbt_hp.max_depth = cfg.depth;
    auto [gbt, gbt_report] = fit_gbt(d, gbt_hp, cfg.seed);
    out.write("model_gbt.json", gbt_json(gbt).dump());
    write_metrics(out, "metrics_gbt.json", gbt_report);

    auto [linear, linear_report] = fit_linear(d);
    out.write("model_linear.json", linear_json(linear).dump());
    write_metrics(out, "metrics_linear.json", linear_report);

    const Background bg = make_background(cfg, d);
    const ExplainMethod method = method_of(cfg);
    const Explanation e = explain_dataset(gbt, bg, d, method, kernel_options(cfg));
    check_additivity(gbt, e);
    out.write("explanation.json", explanation_json(e).dump());

    std::optional<KernelComparison> kernel_cmp;
    if (method == ExplainMethod::kernel) {
        const Explanation exact = explain_dataset(gbt, bg, d, ExplainMethod::exact);
        kernel_cmp = compare_explanations(e, exact);
        out.write("kernel_vs_exact.json",
                  kernel_comparison_json(*kernel_cmp, e.feature_names).dump());
    }

    auto [gam, fidelity] = fit_surrogate(gbt, d, GamHyperparams{});
    out.write("model_gam.json", gam_json(gam).dump());
    out.write("fidelity.json", fidelity_json(fidelity).dump());
    for (const auto& shape : gam.shapes()) {
        out.write("shape_" + d.schema().names[shape.feature] + ".csv",
                  shape_function_csv(shape));
    }
    const Explanation ge = gam_attributions(gam, d);
    check_additivity(gam, ge);
    out.write("gam_explanation.json", explanation_json(ge).dump());

    emit_explanation_figures(out, e, gbt, cfg, "");
    emit_explanation_figures(out, ge, gam, cfg, "gam_");
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        emit_pdp_pair(out, gbt, d, e, j, cfg, "");
        emit_pdp_pair(out, gam, d, ge, j, cfg, "gam_");
    }

    const ImportanceRanking ranking = mean_abs_importance(e);
    const ImportanceRanking gam_ranking = mean_abs_importance(ge);
    const bool match = top2_matches(ranking, "infill_pct", "extrusion_temp");
    const bool gam_match = top2_matches(gam_ranking, "infill_pct", "extrusion_temp");

    std::string md;
    md += "# fdmlens report\n\n";
    md += "## Data\n\n";
    md += "- source: " + cfg.data + "\n";
    md += "- rows: " + std::to_string(d.row_count()) + "\n\n";
    md += "## Models\n\n";
    md += "- GBT training RMSE: " + format_shortest(gbt_report.rmse) + "\n";
    if (gbt_report.r_squared) {
        md += "- GBT training R^2: " + format_shortest(*gbt_report.r_squared) + "\n";
    }
    md += "- Linear baseline RMSE: " + format_shortest(linear_report.rmse) + "\n";
    if (linear_report.r_squared) {
        md += "- Linear baseline R^2: " + format_shortest(*linear_report.r_squared) + "\n";
    }
    const bool nonlinear = gbt_report.r_squared && linear_report.r_squared &&
                           *gbt_report.r_squared > *linear_report.r_squared;
    md += std::string("- GBT R^2 exceeds the linear baseline: ") +
          (nonlinear ? "yes" : "no") +
          " (the response is fit substantially better by the nonlinear model)\n\n";
    md += "## Attributions (" + method_name(e.method) + " SHAP on GBT)\n\n";
    md += "- background: " + cfg.background + ", seed " + std::to_string(cfg.seed) + "\n";
    md += "- base value: " + format_shortest(e.base_value) + "\n";
    md += "- mean |SHAP| ranking:\n";
    for (std::size_t rank = 0; rank < kFeatureCount; ++rank) {
        md += "  " + std::to_string(rank + 1) + ". " + ranking.ordered_names[rank] + " (" +
              format_shortest(ranking.importance[ranking.order[rank]]) + ")\n";
    }
    md += "- top-2 features: {" + ranking.ordered_names[0] + ", " +
          ranking.ordered_names[1] + "}\n";
    md += std::string("- top-2 matches {infill_pct, extrusion_temp}: ") +
          (match ? "yes" : "no") + "\n";
    if (kernel_cmp) {
        md += "- kernel vs exact max |diff|: " + format_shortest(kernel_cmp->max) + "\n";
    }
    md += "\n## GAM surrogate\n\n";
    md += "- fidelity RMSE vs GBT predictions: " + format_shortest(fidelity.rmse) + "\n";
    if (fidelity.r_squared) {
        md += "- fidelity R^2 vs GBT predictions: " + format_shortest(*fidelity.r_squared) +
              "\n";
    }
    md += "- mean |attribution| ranking:\n";
    for (std::size_t rank = 0; rank < kFeatureCount; ++rank) {
        md += "  " + std::to_string(rank + 1) + ". " + gam_ranking.ordered_names[rank] +
              " (" + format_shortest(gam_ranking.importance[gam_ranking.order[rank]]) +
              ")\n";
    }
    md += "- top-2 features: {" + gam_ranking.ordered_names[0] + ", " +
          gam_ranking.ordered_names[1] + "}\n";
    md += std::string("- top-2 matches {infill_pct, extrusion_temp}: ") +
          (gam_match ? "yes" : "no") + "\n";
    out.write("summary.md", md);

    print_ranking(ranking, "importance (mean |SHAP|)");
    std::cout << "top-2 matches {infill_pct, extrusion_temp}: " << (match ? "yes" : "no")
              << "\n";

    out.finish(cfg.command);
    std::cout << "wrote " << out.root().string() << "\n";
    return 0;
}

void add_common_options(CLI::App* sub, RunConfig& cfg, bool gam_defaults) {
    sub->add_option("--config", cfg.config_path, "key=value file merged under explicit flags");
    sub->add_option("--data", cfg.data, "embedded | path to CSV")->capture_default_str();
    sub->add_option("--model", cfg.model, "model kind")
        ->check(CLI::IsMember({"gbt", "linear"}))
        ->capture_default_str();
    if (gam_defaults) {
        sub->add_option("--rounds", cfg.gam_rounds, "GAM boosting rounds")
            ->capture_default_str();
        sub->add_option("--lr", cfg.gam_lr, "GAM learning rate")->capture_default_str();
    } else {
        sub->add_option("--rounds", cfg.rounds, "GBT boosting rounds")
            ->capture_default_str();
        sub->add_option("--lr", cfg.lr, "GBT learning rate")->capture_default_str();
    }
    sub->add_option("--depth", cfg.depth, "GBT max tree depth")->capture_default_str();
    sub->add_option("--method", cfg.method, "attribution method")
        ->check(CLI::IsMember({"exact", "kernel"}))
        ->capture_default_str();
    sub->add_option("--budget", cfg.budget, "kernel coalition budget or \"complete\"")
        ->capture_default_str();
    sub->add_option("--background", cfg.background, "\"full\" or subsample row count")
        ->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed for subsampling and kernel sampling")
        ->capture_default_str();
    sub->add_option("--feature", cfg.feature, "feature name for PDP");
    sub->add_option("--mode", cfg.mode, "PDP mode")
        ->check(CLI::IsMember({"average", "at_means", "both"}))
        ->capture_default_str();
    sub->add_option("--sample", cfg.sample, "sample index for the waterfall")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
    sub->add_option("--palette", cfg.palette, "figure color convention")
        ->check(CLI::IsMember({"paper", "unified"}))
        ->capture_default_str();
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"fdmlens: explains how FDM process parameters drive tensile strength"};
    app.require_subcommand(1);
    RunConfig cfg;

    CLI::App* train = app.add_subcommand("train", "fit a model and write it as JSON");
    CLI::App* explain = app.add_subcommand("explain", "per-sample SHAP attributions");
    CLI::App* pdp = app.add_subcommand("pdp", "partial dependence for one feature");
    CLI::App* gam = app.add_subcommand("gam", "fit the GAM surrogate of a model");
    CLI::App* report = app.add_subcommand("report", "full pipeline into one directory");
    add_common_options(train, cfg, false);
    add_common_options(explain, cfg, false);
    add_common_options(pdp, cfg, false);
    add_common_options(gam, cfg, true);
    add_common_options(report, cfg, false);
    pdp->get_option("--feature")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        const CLI::App* active = train->parsed()   ? train
                                 : explain->parsed() ? explain
                                 : pdp->parsed()     ? pdp
                                 : gam->parsed()     ? gam
                                                     : report;
        if (!cfg.config_path.empty()) apply_config_file(active, cfg, active == gam);

        if (train->parsed()) {
            cfg.command = "train";
            return cmd_train(cfg);
        }
        if (explain->parsed()) {
            cfg.command = "explain";
            return cmd_explain(cfg);
        }
        if (pdp->parsed()) {
            cfg.command = "pdp";
            return cmd_pdp(cfg);
        }
        if (gam->parsed()) {
            cfg.command = "gam";
            return cmd_gam(cfg);
        }
        cfg.command = "report";
        return cmd_report(cfg);
    } catch (const DataError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const ConfigError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 3;
    } catch (const InvariantError& ex) {
        std::cerr << "invariant violation: " << ex.what() << "\n";
        return 4;
    } catch (const std::exception& ex) {
        std::cerr << "internal error: " << ex.what() << "\n";
        return 4;
    }
}

} // namespace fdmlens
