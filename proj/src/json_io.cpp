#include "fdmlens/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fdmlens/errors.hpp"
#include "fdmlens/text.hpp"

namespace fdmlens {

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    const char* hex = "0123456789abcdef";
                    out += "\\u00";
                    out += hex[(c >> 4) & 0xF];
                    out += hex[c & 0xF];
                } else {
                    out += c;
                }
        }
    }
    return out;
}

} // namespace

JsonValue JsonValue::object() {
    JsonValue v;
    v.kind_ = Kind::obj_v;
    return v;
}

JsonValue JsonValue::array() {
    JsonValue v;
    v.kind_ = Kind::arr_v;
    return v;
}

JsonValue JsonValue::number(double value) {
    JsonValue v;
    v.kind_ = Kind::num_v;
    v.num_ = value;
    return v;
}

JsonValue JsonValue::integer(long long value) {
    JsonValue v;
    v.kind_ = Kind::int_v;
    v.int_ = value;
    return v;
}

JsonValue JsonValue::string(std::string value) {
    JsonValue v;
    v.kind_ = Kind::str_v;
    v.str_ = std::move(value);
    return v;
}

JsonValue JsonValue::boolean(bool value) {
    JsonValue v;
    v.kind_ = Kind::bool_v;
    v.bool_ = value;
    return v;
}

JsonValue JsonValue::null() { return {}; }

JsonValue& JsonValue::set(std::string key, JsonValue v) {
    obj_.emplace_back(std::move(key), std::move(v));
    return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
    arr_.push_back(std::move(v));
    return *this;
}

bool JsonValue::is_leaf_array() const {
    if (kind_ != Kind::arr_v) return false;
    for (const auto& e : arr_) {
        if (e.kind_ == Kind::arr_v || e.kind_ == Kind::obj_v) return false;
    }
    return true;
}

void JsonValue::write(std::string& out, int depth) const {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    switch (kind_) {
        case Kind::null_v: out += "null"; return;
        case Kind::bool_v: out += bool_ ? "true" : "false"; return;
        case Kind::int_v: out += std::to_string(int_); return;
        case Kind::num_v: out += format_sig17(num_); return;
        case Kind::str_v:
            out += '"';
            out += json_escape(str_);
            out += '"';
            return;
        case Kind::arr_v: {
            if (arr_.empty()) {
                out += "[]";
                return;
            }
            if (is_leaf_array()) {
                out += '[';
                for (std::size_t i = 0; i < arr_.size(); ++i) {
                    if (i > 0) out += ", ";
                    arr_[i].write(out, depth);
                }
                out += ']';
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < arr_.size(); ++i) {
                out += pad;
                out += "  ";
                arr_[i].write(out, depth + 1);
                if (i + 1 < arr_.size()) out += ',';
                out += '\n';
            }
            out += pad;
            out += ']';
            return;
        }
        case Kind::obj_v: {
            if (obj_.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            for (std::size_t i = 0; i < obj_.size(); ++i) {
                out += pad;
                out += "  \"";
                out += json_escape(obj_[i].first);
                out += "\": ";
                obj_[i].second.write(out, depth + 1);
                if (i + 1 < obj_.size()) out += ',';
                out += '\n';
            }
            out += pad;
            out += '}';
            return;
        }
    }
}

std::string JsonValue::dump() const {
    std::string out;
    write(out, 0);
    out += '\n';
    return out;
}

namespace {

JsonValue vector_json(const std::vector<double>& v) {
    JsonValue arr = JsonValue::array();
    for (double x : v) arr.push(JsonValue::number(x));
    return arr;
}

JsonValue feature_vector_json(const FeatureVector& v) {
    JsonValue arr = JsonValue::array();
    for (double x : v) arr.push(JsonValue::number(x));
    return arr;
}

JsonValue names_json(const std::array<std::string, kFeatureCount>& names) {
    JsonValue arr = JsonValue::array();
    for (const auto& n : names) arr.push(JsonValue::string(n));
    return arr;
}

JsonValue background_origin_json(const BackgroundOrigin& origin) {
    JsonValue o = JsonValue::object();
    if (origin.kind == BackgroundOrigin::Kind::full_dataset) {
        o.set("kind", JsonValue::string("full_dataset"));
    } else {
        o.set("kind", JsonValue::string("subsample"));
        o.set("k", JsonValue::integer(static_cast<long long>(origin.k)));
        o.set("seed", JsonValue::integer(origin.seed));
    }
    return o;
}

std::string ordering_name(HeatmapOrdering ordering) {
    return ordering == HeatmapOrdering::by_prediction ? "by_prediction" : "corpus_order";
}

std::string target_origin_name(TargetOrigin origin) {
    return origin == TargetOrigin::surrogate_of_model ? "surrogate_of_model" : "raw_targets";
}

nlohmann::json parse_or_throw(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON");
    return j;
}

void check_format(const nlohmann::json& j, const std::string& format) {
    if (!j.is_object()) throw DataError("model JSON must be an object");
    if (j.value("format", "") != format) {
        throw DataError("unexpected model format tag (want " + format + ")");
    }
    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != 1) {
        throw DataError("unsupported " + format + " version (this build reads version 1)");
    }
}

} // namespace

std::string method_name(ExplainMethod m) {
    return m == ExplainMethod::kernel ? "kernel" : "exact";
}

JsonValue explanation_json(const Explanation& e) {
    JsonValue o = JsonValue::object();
    o.set("method", JsonValue::string(method_name(e.method)));
    o.set("base_value", JsonValue::number(e.base_value));
    o.set("feature_names", names_json(e.feature_names));
    JsonValue values = JsonValue::array();
    for (const auto& row : e.values) values.push(feature_vector_json(row));
    o.set("values", std::move(values));
    JsonValue data = JsonValue::array();
    for (const auto& row : e.data) data.push(feature_vector_json(row));
    o.set("data", std::move(data));
    o.set("background_origin", background_origin_json(e.background_origin));
    return o;
}

JsonValue gbt_json(const GbtModel& m) {
    JsonValue o = JsonValue::object();
    o.set("format", JsonValue::string("fdmlens.gbt"));
    o.set("version", JsonValue::integer(1));
    JsonValue hp = JsonValue::object();
    hp.set("rounds", JsonValue::integer(m.hyperparams().n_rounds));
    hp.set("learning_rate", JsonValue::number(m.hyperparams().learning_rate));
    hp.set("max_depth", JsonValue::integer(m.hyperparams().max_depth));
    hp.set("min_samples_leaf", JsonValue::integer(m.hyperparams().min_samples_leaf));
    o.set("hyperparams", std::move(hp));
    o.set("init_value", JsonValue::number(m.init_value()));
    JsonValue trees = JsonValue::array();
    for (const auto& tree : m.trees()) {
        JsonValue nodes = JsonValue::array();
        for (const auto& node : tree.nodes()) {
            JsonValue n = JsonValue::object();
            n.set("feature", JsonValue::integer(node.feature));
            n.set("threshold", JsonValue::number(node.threshold));
            n.set("left", JsonValue::integer(node.left));
            n.set("right", JsonValue::integer(node.right));
            n.set("value", JsonValue::number(node.value));
            nodes.push(std::move(n));
        }
        trees.push(std::move(nodes));
    }
    o.set("trees", std::move(trees));
    return o;
}

JsonValue linear_json(const LinearModel& m) {
    JsonValue o = JsonValue::object();
    o.set("format", JsonValue::string("fdmlens.linear"));
    o.set("version", JsonValue::integer(1));
    JsonValue weights = JsonValue::array();
    for (double w : m.weights()) weights.push(JsonValue::number(w));
    o.set("weights", std::move(weights));
    o.set("intercept", JsonValue::number(m.intercept()));
    o.set("ridge_epsilon", JsonValue::number(m.ridge_epsilon()));
    return o;
}

JsonValue gam_json(const GamModel& m) {
    JsonValue o = JsonValue::object();
    o.set("format", JsonValue::string("fdmlens.gam"));
    o.set("version", JsonValue::integer(1));
    o.set("intercept", JsonValue::number(m.intercept()));
    JsonValue meta = JsonValue::object();
    meta.set("rounds", JsonValue::integer(m.meta().rounds));
    meta.set("learning_rate", JsonValue::number(m.meta().learning_rate));
    meta.set("bins", JsonValue::integer(m.meta().bins));
    meta.set("target_origin", JsonValue::string(target_origin_name(m.meta().target_origin)));
    o.set("meta", std::move(meta));
    JsonValue shapes = JsonValue::array();
    for (const auto& s : m.shapes()) {
        JsonValue sj = JsonValue::object();
        sj.set("feature", JsonValue::integer(static_cast<long long>(s.feature)));
        sj.set("edges", vector_json(s.edges));
        sj.set("contributions", vector_json(s.contributions));
        sj.set("domain_min", JsonValue::number(s.domain_min));
        sj.set("domain_max", JsonValue::number(s.domain_max));
        sj.set("degenerate", JsonValue::boolean(s.degenerate));
        shapes.push(std::move(sj));
    }
    o.set("shapes", std::move(shapes));
    return o;
}

GbtModel gbt_from_json(const std::string& text) {
    const nlohmann::json j = parse_or_throw(text);
    check_format(j, "fdmlens.gbt");
    try {
        GbtHyperparams hp;
        hp.n_rounds = j.at("hyperparams").at("rounds").get<int>();
        hp.learning_rate = j.at("hyperparams").at("learning_rate").get<double>();
        hp.max_depth = j.at("hyperparams").at("max_depth").get<int>();
        hp.min_samples_leaf = j.at("hyperparams").at("min_samples_leaf").get<int>();
        const double init = j.at("init_value").get<double>();
        std::vector<RegressionTree> trees;
        for (const auto& tj : j.at("trees")) {
            std::vector<TreeNode> nodes;
            for (const auto& nj : tj) {
                TreeNode n;
                n.feature = nj.at("feature").get<std::int32_t>();
                n.threshold = nj.at("threshold").get<double>();
                n.left = nj.at("left").get<std::int32_t>();
                n.right = nj.at("right").get<std::int32_t>();
                n.value = nj.at("value").get<double>();
                nodes.push_back(n);
            }
            if (nodes.empty()) throw DataError("tree with no nodes");
            trees.emplace_back(std::move(nodes));
        }
        return GbtModel(std::move(trees), hp.learning_rate, init, hp);
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("invalid fdmlens.gbt JSON: ") + ex.what());
    }
}

LinearModel linear_from_json(const std::string& text) {
    const nlohmann::json j = parse_or_throw(text);
    check_format(j, "fdmlens.linear");
    try {
        const auto& wj = j.at("weights");
        if (wj.size() != kFeatureCount) throw DataError("weights must have 4 entries");
        std::array<double, kFeatureCount> weights{};
        for (std::size_t i = 0; i < kFeatureCount; ++i) weights[i] = wj.at(i).get<double>();
        return LinearModel(weights, j.at("intercept").get<double>(),
                           j.value("ridge_epsilon", 0.0));
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("invalid fdmlens.linear JSON: ") + ex.what());
    }
}

GamModel gam_from_json(const std::string& text) {
    const nlohmann::json j = parse_or_throw(text);
    check_format(j, "fdmlens.gam");
    try {
        GamTrainingMeta meta;
        meta.rounds = j.at("meta").at("rounds").get<int>();
        meta.learning_rate = j.at("meta").at("learning_rate").get<double>();
        meta.bins = j.at("meta").at("bins").get<int>();
        meta.target_origin = j.at("meta").at("target_origin").get<std::string>() ==
                                     "surrogate_of_model"
                                 ? TargetOrigin::surrogate_of_model
                                 : TargetOrigin::raw_targets;
        const auto& shapes_json = j.at("shapes");
        if (shapes_json.size() != kFeatureCount) {
            throw DataError("shapes must have 4 entries");
        }
        std::array<ShapeFunction, kFeatureCount> shapes{};
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const auto& sj = shapes_json.at(i);
            ShapeFunction s;
            s.feature = sj.at("feature").get<std::size_t>();
            s.edges = sj.at("edges").get<std::vector<double>>();
            s.contributions = sj.at("contributions").get<std::vector<double>>();
            s.domain_min = sj.at("domain_min").get<double>();
            s.domain_max = sj.at("domain_max").get<double>();
            s.degenerate = sj.at("degenerate").get<bool>();
            if (s.contributions.size() != s.edges.size() + 1) {
                throw DataError("shape contributions must have edges + 1 entries");
            }
            shapes[i] = std::move(s);
        }
        return GamModel(j.at("intercept").get<double>(), std::move(shapes), meta);
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("invalid fdmlens.gam JSON: ") + ex.what());
    }
}

std::unique_ptr<Predictor> load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("model file not found or unreadable: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    const nlohmann::json j = parse_or_throw(text);
    const std::string format = j.is_object() ? j.value("format", "") : "";
    if (format == "fdmlens.gbt") {
        return std::make_unique<GbtModel>(gbt_from_json(text));
    }
    if (format == "fdmlens.linear") {
        return std::make_unique<LinearModel>(linear_from_json(text));
    }
    if (format == "fdmlens.gam") {
        return std::make_unique<GamModel>(gam_from_json(text));
    }
    throw DataError("unrecognized model format in " + path.string());
}

JsonValue fit_report_json(const FitReport& r) {
    JsonValue o = JsonValue::object();
    o.set("rmse", JsonValue::number(r.rmse));
    o.set("r_squared",
          r.r_squared ? JsonValue::number(*r.r_squared) : JsonValue::null());
    if (!r.mse_trace.empty()) o.set("mse_trace", vector_json(r.mse_trace));
    return o;
}

JsonValue fidelity_json(const FidelityReport& r) {
    JsonValue o = JsonValue::object();
    o.set("rmse", JsonValue::number(r.rmse));
    o.set("r_squared",
          r.r_squared ? JsonValue::number(*r.r_squared) : JsonValue::null());
    return o;
}

JsonValue importance_json(const ImportanceRanking& r) {
    JsonValue o = JsonValue::object();
    JsonValue ranking = JsonValue::array();
    for (std::size_t rank = 0; rank < kFeatureCount; ++rank) {
        JsonValue entry = JsonValue::object();
        entry.set("feature", JsonValue::string(r.ordered_names[rank]));
        entry.set("mean_abs", JsonValue::number(r.importance[r.order[rank]]));
        ranking.push(std::move(entry));
    }
    o.set("ranking", std::move(ranking));
    JsonValue canonical = JsonValue::array();
    for (double v : r.importance) canonical.push(JsonValue::number(v));
    o.set("importance_canonical", std::move(canonical));
    return o;
}

JsonValue waterfall_json(const WaterfallSpec& spec) {
    JsonValue o = JsonValue::object();
    o.set("figure", JsonValue::string("waterfall"));
    o.set("sample_index", JsonValue::integer(static_cast<long long>(spec.sample_index)));
    o.set("base_value", JsonValue::number(spec.base_value));
    o.set("final_prediction", JsonValue::number(spec.final_prediction));
    JsonValue entries = JsonValue::array();
    for (const auto& entry : spec.entries) {
        JsonValue e = JsonValue::object();
        e.set("name", JsonValue::string(entry.name));
        e.set("contribution", JsonValue::number(entry.contribution));
        e.set("start", JsonValue::number(entry.start));
        e.set("end", JsonValue::number(entry.end));
        entries.push(std::move(e));
    }
    o.set("entries", std::move(entries));
    return o;
}

JsonValue beeswarm_json(const BeeswarmSpec& spec) {
    JsonValue o = JsonValue::object();
    o.set("figure", JsonValue::string("beeswarm"));
    JsonValue rows = JsonValue::array();
    for (const auto& row : spec.rows) {
        JsonValue r = JsonValue::object();
        r.set("feature", JsonValue::integer(static_cast<long long>(row.feature)));
        r.set("name", JsonValue::string(row.name));
        r.set("mean_abs", JsonValue::number(row.mean_abs));
        JsonValue x = JsonValue::array();
        JsonValue offset = JsonValue::array();
        JsonValue color = JsonValue::array();
        for (const auto& pt : row.points) {
            x.push(JsonValue::number(pt.x));
            offset.push(JsonValue::number(pt.offset));
            color.push(JsonValue::number(pt.color));
        }
        r.set("x", std::move(x));
        r.set("offset", std::move(offset));
        r.set("color", std::move(color));
        rows.push(std::move(r));
    }
    o.set("rows", std::move(rows));
    return o;
}

JsonValue heatmap_json(const HeatmapSpec& spec) {
    JsonValue o = JsonValue::object();
    o.set("figure", JsonValue::string("heatmap"));
    o.set("ordering", JsonValue::string(ordering_name(spec.ordering)));
    o.set("base_value", JsonValue::number(spec.base_value));
    o.set("feature_names", names_json(spec.feature_names));
    JsonValue order = JsonValue::array();
    for (std::size_t i : spec.sample_order) {
        order.push(JsonValue::integer(static_cast<long long>(i)));
    }
    o.set("sample_order", std::move(order));
    o.set("predictions", vector_json(spec.predictions));
    JsonValue matrix = JsonValue::array();
    for (const auto& row : spec.matrix) matrix.push(feature_vector_json(row));
    o.set("matrix", std::move(matrix));
    return o;
}

namespace {

JsonValue pdp_common_json(const PdpCurve& curve, const FeatureSchema& schema,
                          const char* figure) {
    JsonValue o = JsonValue::object();
    o.set("figure", JsonValue::string(figure));
    o.set("feature", JsonValue::string(schema.names[curve.feature]));
    o.set("mode", JsonValue::string(curve.mode == PdpMode::average ? "average"
                                                                   : "at_means"));
    o.set("grid", vector_json(curve.grid));
    o.set("values", vector_json(curve.values));
    o.set("reference", JsonValue::number(curve.reference));
    return o;
}

} // namespace

JsonValue pdp_json(const PdpCurve& curve, const FeatureSchema& schema) {
    return pdp_common_json(curve, schema, "pdp");
}

JsonValue pdp_overlay_json(const PdpOverlay& overlay, const FeatureSchema& schema) {
    JsonValue o = pdp_common_json(overlay.curve, schema, "pdp_overlay");
    JsonValue scatter = JsonValue::array();
    for (const auto& pt : overlay.scatter) {
        JsonValue pair = JsonValue::array();
        pair.push(JsonValue::number(pt[0]));
        pair.push(JsonValue::number(pt[1]));
        scatter.push(std::move(pair));
    }
    o.set("scatter", std::move(scatter));
    return o;
}

} // namespace fdmlens
