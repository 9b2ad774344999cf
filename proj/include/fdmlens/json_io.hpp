#ifndef FDMLENS_JSON_IO_HPP
#define FDMLENS_JSON_IO_HPP

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fdmlens/dataset.hpp"
#include "fdmlens/gam.hpp"
#include "fdmlens/gbt.hpp"
#include "fdmlens/linear.hpp"
#include "fdmlens/pdp.hpp"
#include "fdmlens/plots.hpp"
#include "fdmlens/shapley.hpp"

namespace fdmlens {

/// Ordered JSON builder with fixed number formatting (17 significant digits
/// via std::to_chars), so identical inputs serialize to identical bytes.
/// Leaf arrays (scalars only) print inline; everything else one entry per
/// line with 2-space indent.
class JsonValue {
public:
    static JsonValue object();
    static JsonValue array();
    static JsonValue number(double v);
    static JsonValue integer(long long v);
    static JsonValue string(std::string v);
    static JsonValue boolean(bool v);
    static JsonValue null();

    JsonValue& set(std::string key, JsonValue v);  // object members, insertion order
    JsonValue& push(JsonValue v);                  // array elements

    std::string dump() const;

private:
    enum class Kind { null_v, bool_v, int_v, num_v, str_v, arr_v, obj_v };
    Kind kind_ = Kind::null_v;
    bool bool_ = false;
    long long int_ = 0;
    double num_ = 0.0;
    std::string str_;
    std::vector<JsonValue> arr_;
    std::vector<std::pair<std::string, JsonValue>> obj_;

    void write(std::string& out, int depth) const;
    bool is_leaf_array() const;
};

JsonValue explanation_json(const Explanation& e);

JsonValue gbt_json(const GbtModel& m);
JsonValue linear_json(const LinearModel& m);
JsonValue gam_json(const GamModel& m);

/// Parse + validate versioned model JSON. Rejects unknown format tags and
/// versions with DataError.
GbtModel gbt_from_json(const std::string& text);
LinearModel linear_from_json(const std::string& text);
GamModel gam_from_json(const std::string& text);

/// Dispatch on the "format" tag; DataError for anything unrecognized.
std::unique_ptr<Predictor> load_model_file(const std::filesystem::path& path);

JsonValue fit_report_json(const FitReport& r);
JsonValue fidelity_json(const FidelityReport& r);
JsonValue importance_json(const ImportanceRanking& r);

JsonValue waterfall_json(const WaterfallSpec& spec);
JsonValue beeswarm_json(const BeeswarmSpec& spec);
JsonValue heatmap_json(const HeatmapSpec& spec);
JsonValue pdp_json(const PdpCurve& curve, const FeatureSchema& schema);
JsonValue pdp_overlay_json(const PdpOverlay& overlay, const FeatureSchema& schema);

std::string method_name(ExplainMethod m);

} // namespace fdmlens

#endif
