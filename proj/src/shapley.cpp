#include "fdmlens/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "fdmlens/errors.hpp"
#include "fdmlens/linalg.hpp"

namespace fdmlens {

namespace {

constexpr unsigned kFullMask = (1u << kFeatureCount) - 1;
constexpr unsigned kCoalitionCount = 1u << kFeatureCount;

constexpr double kFactorial[] = {1, 1, 2, 6, 24};

// |S|! (d-|S|-1)! / d! for the marginal-contribution sum
double shapley_weight(unsigned subset_size) {
    return kFactorial[subset_size] * kFactorial[kFeatureCount - subset_size - 1] /
           kFactorial[kFeatureCount];
}

// Shapley kernel weight for an interior coalition of size s:
// (d-1) / (C(d,s) * s * (d-s))
double kernel_weight(unsigned s) {
    constexpr double binom[] = {1, 4, 6, 4, 1};
    return (kFeatureCount - 1.0) /
           (binom[s] * static_cast<double>(s) * static_cast<double>(kFeatureCount - s));
}

// All 2^d coalition values, each computed once over |background| composites.
std::array<double, kCoalitionCount> all_coalition_values(const Predictor& p,
                                                         const Background& b,
                                                         const FeatureVector& x) {
    std::array<double, kCoalitionCount> v{};
    std::vector<FeatureVector> composites(b.rows.size());
    for (unsigned mask = 0; mask < kCoalitionCount; ++mask) {
        for (std::size_t r = 0; r < b.rows.size(); ++r) {
            FeatureVector c = b.rows[r];
            for (std::size_t j = 0; j < kFeatureCount; ++j) {
                if (mask & (1u << j)) c[j] = x[j];
            }
            composites[r] = c;
        }
        const std::vector<double> pred = p.predict_serial(composites);
        double acc = 0.0;
        for (double value : pred) acc += value;
        v[mask] = acc / static_cast<double>(pred.size());
    }
    return v;
}

std::array<double, kFeatureCount> attributions_from_values(
    const std::array<double, kCoalitionCount>& v) {
    std::array<double, kFeatureCount> phi{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const unsigned bit = 1u << j;
        double acc = 0.0;
        for (unsigned mask = 0; mask < kCoalitionCount; ++mask) {
            if (mask & bit) continue;
            const unsigned s = static_cast<unsigned>(std::popcount(mask));
            acc += shapley_weight(s) * (v[mask | bit] - v[mask]);
        }
        phi[j] = acc;
    }
    return phi;
}

// The 14 interior coalition masks in ascending order.
std::vector<unsigned> interior_masks() {
    std::vector<unsigned> masks;
    for (unsigned m = 1; m < kFullMask; ++m) masks.push_back(m);
    return masks;
}

std::vector<unsigned> shuffled_interior_masks(std::uint32_t seed) {
    std::vector<unsigned> masks = interior_masks();
    std::mt19937 rng(seed);
    for (std::size_t i = masks.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(masks[i], masks[j]);
    }
    return masks;
}

struct WlsSolution {
    std::array<double, kFeatureCount> phi{};
    double weighted_rss = 0.0;
    bool ok = false;
};

// Weighted least squares with the efficiency constraint eliminated: substitute
// phi[d-1] = delta - sum_{j<d-1} phi[j], solve the (d-1)-unknown system, then
// recover phi[d-1]. Constraint satisfaction is exact by construction.
WlsSolution solve_kernel_system(const std::vector<unsigned>& masks,
                                const std::array<double, kCoalitionCount>& v,
                                double base, double delta) {
    constexpr std::size_t du = kFeatureCount - 1;  // unknowns after elimination
    std::vector<double> a(du * du, 0.0);
    std::vector<double> rhs(du, 0.0);

    for (unsigned mask : masks) {
        const double w = kernel_weight(static_cast<unsigned>(std::popcount(mask)));
        const double z_last = (mask >> (kFeatureCount - 1)) & 1u ? 1.0 : 0.0;
        std::array<double, du> row{};
        for (std::size_t j = 0; j < du; ++j) {
            const double z_j = (mask >> j) & 1u ? 1.0 : 0.0;
            row[j] = z_j - z_last;
        }
        const double y = v[mask] - base - z_last * delta;
        for (std::size_t r = 0; r < du; ++r) {
            for (std::size_t c = 0; c < du; ++c) a[r * du + c] += w * row[r] * row[c];
            rhs[r] += w * row[r] * y;
        }
    }

    std::vector<double> x;
    WlsSolution sol;
    if (!linalg::solve(a, rhs, du, x)) return sol;

    double sum = 0.0;
    for (std::size_t j = 0; j < du; ++j) {
        sol.phi[j] = x[j];
        sum += x[j];
    }
    sol.phi[kFeatureCount - 1] = delta - sum;

    for (unsigned mask : masks) {
        const double w = kernel_weight(static_cast<unsigned>(std::popcount(mask)));
        double fitted = base;
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            if (mask & (1u << j)) fitted += sol.phi[j];
        }
        const double r = v[mask] - fitted;
        sol.weighted_rss += w * r * r;
    }
    sol.ok = true;
    return sol;
}

void check_kernel_budget(const KernelOptions& opts) {
    const int interior = static_cast<int>(kCoalitionCount - 2);
    const int budget = opts.budget.value_or(interior);
    if (budget < static_cast<int>(kFeatureCount) + 2) {
        throw ConfigError("kernel budget must be >= " + std::to_string(kFeatureCount + 2) +
                          " (or complete)");
    }
}

Explanation explain_rows(const Predictor& p, const Background& b, const Dataset& d,
                         ExplainMethod method, const KernelOptions& opts,
                         Execution exec) {
    if (b.rows.empty()) throw ConfigError("background must be nonempty");
    // config errors must surface before the omp region; throws cannot cross it
    if (method == ExplainMethod::kernel) check_kernel_budget(opts);

    Explanation e;
    e.data = d.rows();
    e.feature_names = d.schema().names;
    e.method = method;
    e.background_origin = b.origin;
    e.values.resize(d.row_count());

    auto explain_one = [&](std::size_t i) {
        if (method == ExplainMethod::exact) {
            const ShapleyResult r = exact_shapley(p, b, d.rows()[i]);
            e.values[i] = r.attributions;
            return r.base_value;
        }
        const KernelResult r = kernel_shapley(p, b, d.rows()[i], opts);
        e.values[i] = r.attributions;
        return r.base_value;
    };

    const std::int64_t n = static_cast<std::int64_t>(d.row_count());
    std::vector<double> bases(d.row_count());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            bases[static_cast<std::size_t>(i)] = explain_one(static_cast<std::size_t>(i));
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            bases[static_cast<std::size_t>(i)] = explain_one(static_cast<std::size_t>(i));
        }
    }

    // the base value is a property of (predictor, background) alone
    e.base_value = bases.front();
    for (double bv : bases) {
        if (bv != e.base_value) {
            throw InvariantError("per-row base values diverged within one explanation");
        }
    }
    return e;
}

} // namespace

Background Background::full(const Dataset& d) {
    Background b;
    b.rows = d.rows();
    b.origin = {BackgroundOrigin::Kind::full_dataset, 0, 0};
    return b;
}

Background Background::subsample(const Dataset& d, std::size_t k, std::uint32_t seed) {
    Background b;
    for (std::size_t i : sample_row_indices(d.row_count(), k, seed)) {
        b.rows.push_back(d.rows()[i]);
    }
    b.origin = {BackgroundOrigin::Kind::subsample, k, seed};
    return b;
}

double coalition_value(const Predictor& p, const Background& b, const FeatureVector& x,
                       unsigned mask) {
    if (b.rows.empty()) throw ConfigError("background must be nonempty");
    if (mask > kFullMask) throw ConfigError("coalition mask out of range");
    std::vector<FeatureVector> composites(b.rows.size());
    for (std::size_t r = 0; r < b.rows.size(); ++r) {
        FeatureVector c = b.rows[r];
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            if (mask & (1u << j)) c[j] = x[j];
        }
        composites[r] = c;
    }
    const std::vector<double> pred = p.predict_serial(composites);
    double acc = 0.0;
    for (double v : pred) acc += v;
    return acc / static_cast<double>(pred.size());
}

double coalition_value(const Predictor& p, const Background& b, const FeatureVector& x,
                       std::span<const std::size_t> subset) {
    unsigned mask = 0;
    for (std::size_t j : subset) {
        if (j >= kFeatureCount) throw ConfigError("coalition feature index out of range");
        mask |= 1u << j;
    }
    return coalition_value(p, b, x, mask);
}

ShapleyResult exact_shapley(const Predictor& p, const Background& b,
                            const FeatureVector& x) {
    if (b.rows.empty()) throw ConfigError("background must be nonempty");
    const std::array<double, kCoalitionCount> v = all_coalition_values(p, b, x);
    ShapleyResult result;
    result.base_value = v[0];
    result.attributions = attributions_from_values(v);
    return result;
}

KernelResult kernel_shapley(const Predictor& p, const Background& b,
                            const FeatureVector& x, const KernelOptions& opts) {
    if (b.rows.empty()) throw ConfigError("background must be nonempty");
    check_kernel_budget(opts);
    const int interior = static_cast<int>(kCoalitionCount - 2);
    const int budget = opts.budget.value_or(interior);

    const std::array<double, kCoalitionCount> v = all_coalition_values(p, b, x);
    const double base = v[0];
    const double delta = v[kFullMask] - base;

    const bool complete = budget >= interior;
    std::vector<unsigned> masks;
    if (complete) {
        masks = interior_masks();
    } else {
        masks = shuffled_interior_masks(opts.seed);
        masks.resize(static_cast<std::size_t>(budget));
    }

    WlsSolution sol = solve_kernel_system(masks, v, base, delta);
    if (!sol.ok && !complete) {
        // sampled coalitions did not span: resample once, then full enumeration
        masks = shuffled_interior_masks(opts.seed + 1);
        masks.resize(static_cast<std::size_t>(budget));
        sol = solve_kernel_system(masks, v, base, delta);
        if (!sol.ok) {
            masks = interior_masks();
            sol = solve_kernel_system(masks, v, base, delta);
        }
    }
    if (!sol.ok) {
        throw DegenerateSystem("kernel system rank-deficient after full enumeration");
    }

    KernelResult result;
    result.base_value = base;
    result.attributions = sol.phi;
    result.diagnostics = {static_cast<int>(masks.size()),
                          masks.size() == static_cast<std::size_t>(interior),
                          sol.weighted_rss};
    return result;
}

Explanation explain_dataset(const Predictor& p, const Background& b, const Dataset& d,
                            ExplainMethod method, const KernelOptions& opts,
                            Execution exec) {
    return explain_rows(p, b, d, method, opts, exec);
}

Explanation explain_dataset_serial(const Predictor& p, const Background& b,
                                   const Dataset& d, ExplainMethod method,
                                   const KernelOptions& opts) {
    return explain_rows(p, b, d, method, opts, Execution::serial);
}

ImportanceRanking mean_abs_importance(const Explanation& e) {
    if (e.values.empty()) throw ConfigError("explanation is empty");
    ImportanceRanking ranking;
    for (const auto& row : e.values) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            ranking.importance[j] += std::abs(row[j]);
        }
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        ranking.importance[j] /= static_cast<double>(e.values.size());
        ranking.order[j] = j;
    }
    std::stable_sort(ranking.order.begin(), ranking.order.end(),
                     [&](std::size_t a, std::size_t b2) {
                         return ranking.importance[a] > ranking.importance[b2];
                     });
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        ranking.ordered_names[j] = e.feature_names[ranking.order[j]];
    }
    return ranking;
}

double max_additivity_gap(const Predictor& p, const Explanation& e) {
    double worst = 0.0;
    for (std::size_t i = 0; i < e.data.size(); ++i) {
        double acc = e.base_value;
        for (std::size_t j = 0; j < kFeatureCount; ++j) acc += e.values[i][j];
        worst = std::max(worst, std::abs(acc - p.predict_row(e.data[i])));
    }
    return worst;
}

} // namespace fdmlens
