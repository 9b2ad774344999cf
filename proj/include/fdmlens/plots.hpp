#ifndef FDMLENS_PLOTS_HPP
#define FDMLENS_PLOTS_HPP

#include <array>
#include <string>
#include <vector>

#include "fdmlens/common.hpp"
#include "fdmlens/shapley.hpp"

namespace fdmlens {

struct WaterfallEntry {
    std::string name;
    double contribution = 0.0;
    double start = 0.0;  // running cumulative before this bar
    double end = 0.0;    // after
};

/// Entries sorted by |contribution| descending, canonical order on ties.
/// entries.back().end == base_value + sum == final_prediction.
struct WaterfallSpec {
    std::size_t sample_index = 0;
    double base_value = 0.0;
    double final_prediction = 0.0;
    std::vector<WaterfallEntry> entries;
};

WaterfallSpec build_waterfall(const Explanation& e, std::size_t sample_index);

struct BeeswarmPoint {
    double x = 0.0;       // attribution
    double offset = 0.0;  // stacked-jitter level: 0, +1, -1, +2, -2, ...
    double color = 0.0;   // min-max-normalized feature value in [0, 1]
};

struct BeeswarmRow {
    std::size_t feature = 0;
    std::string name;
    double mean_abs = 0.0;
    std::vector<BeeswarmPoint> points;  // sample order
};

/// Rows ordered by mean |attribution| descending (ImportanceRanking order).
/// Jitter is deterministic: points bucketed by x into 64 bins, stacked
/// symmetrically about the center line in arrival order.
struct BeeswarmSpec {
    std::vector<BeeswarmRow> rows;
};

BeeswarmSpec build_beeswarm(const Explanation& e);

enum class HeatmapOrdering { corpus_order, by_prediction };

struct HeatmapSpec {
    std::vector<std::array<double, kFeatureCount>> matrix;  // display order
    std::vector<std::size_t> sample_order;                  // original indices
    std::vector<double> predictions;                        // base + row sum, display order
    HeatmapOrdering ordering = HeatmapOrdering::corpus_order;
    std::array<std::string, kFeatureCount> feature_names;
    double base_value = 0.0;
};

/// by_prediction sorts samples by base + row sum descending, stable.
HeatmapSpec build_heatmap(const Explanation& e, HeatmapOrdering ordering);

} // namespace fdmlens

#endif
