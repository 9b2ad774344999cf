#ifndef FDMLENS_SHAPLEY_HPP
#define FDMLENS_SHAPLEY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdmlens/common.hpp"
#include "fdmlens/dataset.hpp"
#include "fdmlens/model.hpp"

namespace fdmlens {

enum class ExplainMethod { exact, kernel };

struct BackgroundOrigin {
    enum class Kind { full_dataset, subsample };
    Kind kind = Kind::full_dataset;
    std::size_t k = 0;       // subsample only
    std::uint32_t seed = 0;  // subsample only
};

/// Rows the marginal expectations are taken over.
struct Background {
    std::vector<FeatureVector> rows;
    BackgroundOrigin origin;

    static Background full(const Dataset& d);
    /// Deterministic k-row subsample (seeded Fisher-Yates, ascending order).
    static Background subsample(const Dataset& d, std::size_t k, std::uint32_t seed);
};

/// Per-sample, per-feature attribution matrix plus the scalar base value.
/// Additivity: base_value + sum_j values[i][j] == predict(data[i]) within the
/// method tolerance (1e-9 exact, 1e-6 kernel-complete).
struct Explanation {
    double base_value = 0.0;
    std::vector<std::array<double, kFeatureCount>> values;
    std::vector<FeatureVector> data;
    std::array<std::string, kFeatureCount> feature_names;
    ExplainMethod method = ExplainMethod::exact;
    BackgroundOrigin background_origin;
};

struct ShapleyResult {
    double base_value = 0.0;
    std::array<double, kFeatureCount> attributions{};
};

struct KernelOptions {
    /// Interior coalitions to use; nullopt = complete (all 2^d - 2).
    std::optional<int> budget;
    std::uint32_t seed = 42;
};

struct KernelDiagnostics {
    int coalitions_used = 0;
    bool complete = true;
    double weighted_rss = 0.0;  // of the solved least-squares system
};

struct KernelResult {
    double base_value = 0.0;
    std::array<double, kFeatureCount> attributions{};
    KernelDiagnostics diagnostics;
};

/// Interventional value function v(S): mean prediction over composites that
/// take features in `mask` from x and the rest from each background row.
/// Always evaluates exactly |background| rows.
double coalition_value(const Predictor& p, const Background& b,
                       const FeatureVector& x, unsigned mask);

/// Subset-of-indices convenience overload.
double coalition_value(const Predictor& p, const Background& b,
                       const FeatureVector& x, std::span<const std::size_t> subset);

/// Exact Shapley attributions by full coalition enumeration: all 2^d
/// coalition values computed once each, then the weighted marginal sum.
ShapleyResult exact_shapley(const Predictor& p, const Background& b,
                            const FeatureVector& x);

/// Kernel SHAP: weighted least squares over binary coalition vectors with the
/// Shapley kernel weight, the efficiency constraint eliminated by
/// substitution so attributions sum to predict(x) - base exactly.
KernelResult kernel_shapley(const Predictor& p, const Background& b,
                            const FeatureVector& x, const KernelOptions& opts = {});

/// Per-row explanation of a whole dataset. The OpenMP kernel parallelizes
/// over rows; each row's work has a fixed summation order, so results are
/// bit-identical to the serial reference for any worker count.
Explanation explain_dataset(const Predictor& p, const Background& b, const Dataset& d,
                            ExplainMethod method, const KernelOptions& opts = {},
                            Execution exec = Execution::parallel);

/// Plain-loop reference implementation kept for testing the kernel.
Explanation explain_dataset_serial(const Predictor& p, const Background& b,
                                   const Dataset& d, ExplainMethod method,
                                   const KernelOptions& opts = {});

/// Mean absolute attribution per feature, descending; ties broken by
/// canonical feature order.
struct ImportanceRanking {
    std::array<double, kFeatureCount> importance{};       // canonical order
    std::array<std::size_t, kFeatureCount> order{};       // descending indices
    std::array<std::string, kFeatureCount> ordered_names; // descending names
};

ImportanceRanking mean_abs_importance(const Explanation& e);

/// Max additivity violation over all samples: max_i |base + sum_j phi_ij -
/// predict(data_i)|. The explain CLI aborts with the invariant exit code when
/// this exceeds the method tolerance.
double max_additivity_gap(const Predictor& p, const Explanation& e);

} // namespace fdmlens

#endif
