#include "fdmlens/plots.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdmlens/errors.hpp"

namespace fdmlens {

WaterfallSpec build_waterfall(const Explanation& e, std::size_t sample_index) {
    if (sample_index >= e.values.size()) {
        throw IndexOutOfRange("sample index " + std::to_string(sample_index) +
                              " out of range for " + std::to_string(e.values.size()) +
                              " samples");
    }
    const auto& phi = e.values[sample_index];

    std::array<std::size_t, kFeatureCount> order{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(phi[a]) > std::abs(phi[b]);
    });

    WaterfallSpec spec;
    spec.sample_index = sample_index;
    spec.base_value = e.base_value;
    double running = e.base_value;
    for (std::size_t j : order) {
        WaterfallEntry entry;
        entry.name = e.feature_names[j];
        entry.contribution = phi[j];
        entry.start = running;
        running += phi[j];
        entry.end = running;
        spec.entries.push_back(std::move(entry));
    }
    spec.final_prediction = running;
    return spec;
}

BeeswarmSpec build_beeswarm(const Explanation& e) {
    if (e.values.empty()) throw ConfigError("explanation is empty");
    const ImportanceRanking ranking = mean_abs_importance(e);
    const std::size_t n = e.values.size();

    BeeswarmSpec spec;
    for (std::size_t rank = 0; rank < kFeatureCount; ++rank) {
        const std::size_t j = ranking.order[rank];
        BeeswarmRow row;
        row.feature = j;
        row.name = e.feature_names[j];
        row.mean_abs = ranking.importance[j];

        double xmin = e.values[0][j];
        double xmax = xmin;
        double vmin = e.data[0][j];
        double vmax = vmin;
        for (std::size_t i = 0; i < n; ++i) {
            xmin = std::min(xmin, e.values[i][j]);
            xmax = std::max(xmax, e.values[i][j]);
            vmin = std::min(vmin, e.data[i][j]);
            vmax = std::max(vmax, e.data[i][j]);
        }

        constexpr std::size_t kBins = 64;
        std::array<std::size_t, kBins> occupancy{};
        for (std::size_t i = 0; i < n; ++i) {
            const double x = e.values[i][j];
            std::size_t bin = 0;
            if (xmax > xmin) {
                bin = std::min(kBins - 1,
                               static_cast<std::size_t>((x - xmin) / (xmax - xmin) *
                                                        static_cast<double>(kBins)));
            }
            const std::size_t k = occupancy[bin]++;
            BeeswarmPoint pt;
            pt.x = x;
            pt.offset = k == 0 ? 0.0
                               : static_cast<double>((k + 1) / 2) * (k % 2 == 1 ? 1.0 : -1.0);
            pt.color = vmax > vmin ? (e.data[i][j] - vmin) / (vmax - vmin) : 0.5;
            row.points.push_back(pt);
        }
        spec.rows.push_back(std::move(row));
    }
    return spec;
}

HeatmapSpec build_heatmap(const Explanation& e, HeatmapOrdering ordering) {
    if (e.values.empty()) throw ConfigError("explanation is empty");
    const std::size_t n = e.values.size();

    std::vector<double> prediction(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = e.base_value;
        for (std::size_t j = 0; j < kFeatureCount; ++j) acc += e.values[i][j];
        prediction[i] = acc;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (ordering == HeatmapOrdering::by_prediction) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return prediction[a] > prediction[b];
        });
    }

    HeatmapSpec spec;
    spec.ordering = ordering;
    spec.feature_names = e.feature_names;
    spec.base_value = e.base_value;
    spec.sample_order = order;
    spec.matrix.reserve(n);
    spec.predictions.reserve(n);
    for (std::size_t i : order) {
        spec.matrix.push_back(e.values[i]);
        spec.predictions.push_back(prediction[i]);
    }
    return spec;
}

} // namespace fdmlens
