#ifndef FDMLENS_DATASET_HPP
#define FDMLENS_DATASET_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fdmlens/common.hpp"

namespace fdmlens {

/// The four FDM process parameters in canonical order plus the target column.
/// Canonical order is fixed so attribution indices stay stable everywhere.
struct FeatureSchema {
    std::array<std::string, kFeatureCount> names;
    std::array<std::string, kFeatureCount> units;
    std::array<std::pair<double, double>, kFeatureCount> bounds;  // closed intervals
    std::string target_name;
    std::string target_unit;

    static const FeatureSchema& canonical();

    /// Canonical index of a feature name, nullopt if unknown.
    std::optional<std::size_t> index_of(std::string_view name) const;
};

/// Immutable tabular experiment data: row-aligned feature matrix and target
/// vector. Safe for concurrent read after construction.
class Dataset {
public:
    /// Validates: nonempty, finite values, targets > 0, and (unless
    /// enforce_bounds is false) every feature inside schema bounds.
    Dataset(FeatureSchema schema, std::vector<FeatureVector> rows,
            std::vector<double> targets, bool enforce_bounds = true);

    const FeatureSchema& schema() const { return schema_; }
    const std::vector<FeatureVector>& rows() const { return rows_; }
    const std::vector<double>& targets() const { return targets_; }
    std::size_t row_count() const { return rows_.size(); }

private:
    FeatureSchema schema_;
    std::vector<FeatureVector> rows_;
    std::vector<double> targets_;
};

struct ColumnStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double stddev = 0.0;  // population formula (divide by n)
};

struct ColumnSummary {
    std::array<ColumnStats, kFeatureCount> features;
    ColumnStats target;
};

/// The built-in 31-row experimental corpus, in table order.
const Dataset& embedded_fdm_corpus();

/// Parse CSV text (header row, '.' decimal separator, LF or CRLF). Columns may
/// appear in any order; they are reordered to canonical order. strict_bounds
/// rejects values outside schema bounds.
Dataset load_csv(std::istream& source, std::string_view target_column,
                 bool strict_bounds = true);

/// File wrapper; missing/unreadable file is a DataError.
Dataset load_csv_file(const std::filesystem::path& path,
                      std::string_view target_column, bool strict_bounds = true);

/// Canonical-header CSV serialization; values round-trip bit-exactly.
std::string to_csv(const Dataset& d);

ColumnSummary summarize(const Dataset& d);

/// Deterministic row split for optional model-quality reporting: shuffles row
/// indices with a seeded Fisher-Yates and puts floor(fraction*n) rows (at
/// least 1, at most n-1) into the first dataset, corpus order preserved
/// inside each part.
std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double fraction,
                                          std::uint32_t seed);

/// Seeded Fisher-Yates pick of k distinct row indices (ascending order).
/// Shared by split_dataset and the explainer background subsample.
std::vector<std::size_t> sample_row_indices(std::size_t row_count, std::size_t k,
                                            std::uint32_t seed);

} // namespace fdmlens

#endif
