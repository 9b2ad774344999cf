#include "fdmlens/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>

#include "fdmlens/errors.hpp"
#include "fdmlens/text.hpp"

namespace fdmlens {

const FeatureSchema& FeatureSchema::canonical() {
    static const FeatureSchema schema{
        {"infill_pct", "layer_height", "print_speed", "extrusion_temp"},
        {"%", "mm", "mm/s", "degC"},
        {{{10.0, 100.0}, {0.08, 0.4}, {20.0, 80.0}, {190.0, 230.0}}},
        "tensile_strength",
        "MPa",
    };
    return schema;
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (names[j] == name) return j;
    }
    return std::nullopt;
}

Dataset::Dataset(FeatureSchema schema, std::vector<FeatureVector> rows,
                 std::vector<double> targets, bool enforce_bounds)
    : schema_(std::move(schema)), rows_(std::move(rows)), targets_(std::move(targets)) {
    if (rows_.empty()) throw EmptyData();
    if (rows_.size() != targets_.size()) {
        throw DataError("row/target length mismatch: " + std::to_string(rows_.size()) +
                        " rows vs " + std::to_string(targets_.size()) + " targets");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            const double v = rows_[i][j];
            if (!std::isfinite(v)) {
                throw DataError("non-finite value at data row " + std::to_string(i + 1) +
                                ", column " + schema_.names[j]);
            }
            if (enforce_bounds) {
                const auto [lo, hi] = schema_.bounds[j];
                if (v < lo || v > hi) {
                    throw BoundsViolation(i + 1, schema_.names[j], v, lo, hi);
                }
            }
        }
        const double t = targets_[i];
        if (!std::isfinite(t) || t <= 0.0) {
            throw DataError("target must be finite and > 0 at data row " +
                            std::to_string(i + 1) + " (got " + format_shortest(t) + ")");
        }
    }
}

namespace {

// Table 1, verbatim, table order.
constexpr double kCorpus[][5] = {
    {78, 0.32, 35, 220, 46.17},   {10.5, 0.24, 50, 210, 42.78},
    {33, 0.16, 35, 220, 45.87},   {33, 0.32, 35, 200, 41.18},
    {33, 0.16, 65, 200, 43.59},   {100, 0.24, 50, 210, 54.2},
    {78, 0.16, 35, 200, 51.88},   {33, 0.32, 65, 200, 43.19},
    {78, 0.32, 65, 200, 50.34},   {33, 0.16, 65, 220, 45.72},
    {78, 0.16, 35, 220, 53.35},   {55.5, 0.24, 50, 210, 49.67},
    {33, 0.32, 35, 220, 45.08},   {55.5, 0.24, 50, 190, 47.56},
    {55.5, 0.24, 50, 210, 48.39}, {78, 0.32, 65, 220, 46.49},
    {55.5, 0.24, 50, 210, 47.21}, {55.5, 0.24, 50, 210, 48.3},
    {55.5, 0.24, 50, 230, 50.15}, {33, 0.32, 65, 220, 43.35},
    {55.5, 0.24, 50, 210, 45.33}, {55.5, 0.24, 80, 210, 45.56},
    {78, 0.16, 65, 200, 49.84},   {55.5, 0.24, 20, 210, 48.51},
    {55.5, 0.08, 50, 210, 42.63}, {55.5, 0.4, 50, 210, 42.87},
    {55.5, 0.24, 50, 210, 47.14}, {78, 0.32, 35, 200, 45.17},
    {55.5, 0.24, 50, 210, 47.07}, {78, 0.16, 65, 220, 50.99},
    {33, 0.16, 35, 200, 51.55},
};

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view field = comma == std::string_view::npos
                                     ? line.substr(start)
                                     : line.substr(start, comma - start);
        // trim ASCII whitespace
        while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front())))
            field.remove_prefix(1);
        while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back())))
            field.remove_suffix(1);
        out.emplace_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

ColumnStats column_stats(const std::vector<double>& values) {
    ColumnStats s;
    s.min = values.front();
    s.max = values.front();
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        sq += d * d;
    }
    s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    return s;
}

} // namespace

const Dataset& embedded_fdm_corpus() {
    static const Dataset corpus = [] {
        std::vector<FeatureVector> rows;
        std::vector<double> targets;
        for (const auto& r : kCorpus) {
            rows.push_back({r[0], r[1], r[2], r[3]});
            targets.push_back(r[4]);
        }
        return Dataset(FeatureSchema::canonical(), std::move(rows), std::move(targets));
    }();
    return corpus;
}

Dataset load_csv(std::istream& source, std::string_view target_column,
                 bool strict_bounds) {
    const FeatureSchema& schema = FeatureSchema::canonical();

    std::string line;
    if (!std::getline(source, line)) throw EmptyData();
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split_fields(line);

    // column position -> canonical feature index, or target
    std::vector<std::optional<std::size_t>> feature_of(header.size());
    std::optional<std::size_t> target_pos;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == target_column) {
            if (target_pos) throw DataError("duplicate target column " + header[c]);
            target_pos = c;
            continue;
        }
        const auto idx = schema.index_of(header[c]);
        if (!idx) {
            throw DataError("unexpected column \"" + header[c] +
                            "\": columns must be the canonical feature names plus the target");
        }
        for (std::size_t prev = 0; prev < c; ++prev) {
            if (feature_of[prev] == idx) throw DataError("duplicate column " + header[c]);
        }
        feature_of[c] = idx;
    }
    if (!target_pos) throw MissingColumn(std::string(target_column));
    std::array<bool, kFeatureCount> seen{};
    for (const auto& f : feature_of) {
        if (f) seen[*f] = true;
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (!seen[j]) throw MissingColumn(schema.names[j]);
    }

    std::vector<FeatureVector> rows;
    std::vector<double> targets;
    std::size_t data_row = 0;
    while (std::getline(source, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++data_row;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw DataError("data row " + std::to_string(data_row) + " has " +
                            std::to_string(fields.size()) + " cells, expected " +
                            std::to_string(header.size()));
        }
        FeatureVector x{};
        double y = 0.0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string col_name =
                c == *target_pos ? std::string(target_column) : schema.names[*feature_of[c]];
            const auto value = parse_double(fields[c]);
            if (!value) throw NonNumericCell(data_row, col_name, fields[c]);
            if (c == *target_pos) {
                y = *value;
            } else {
                x[*feature_of[c]] = *value;
            }
        }
        rows.push_back(x);
        targets.push_back(y);
    }
    if (rows.empty()) throw EmptyData();
    return Dataset(schema, std::move(rows), std::move(targets), strict_bounds);
}

Dataset load_csv_file(const std::filesystem::path& path,
                      std::string_view target_column, bool strict_bounds) {
    std::ifstream in(path);
    if (!in) throw DataError("file not found or unreadable: " + path.string());
    return load_csv(in, target_column, strict_bounds);
}

std::string to_csv(const Dataset& d) {
    const FeatureSchema& schema = d.schema();
    std::string out;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        out += schema.names[j];
        out += ',';
    }
    out += schema.target_name;
    out += '\n';
    for (std::size_t i = 0; i < d.row_count(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            out += format_shortest(d.rows()[i][j]);
            out += ',';
        }
        out += format_shortest(d.targets()[i]);
        out += '\n';
    }
    return out;
}

ColumnSummary summarize(const Dataset& d) {
    ColumnSummary summary;
    std::vector<double> column(d.row_count());
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        for (std::size_t i = 0; i < d.row_count(); ++i) column[i] = d.rows()[i][j];
        summary.features[j] = column_stats(column);
    }
    summary.target = column_stats(d.targets());
    return summary;
}

std::vector<std::size_t> sample_row_indices(std::size_t row_count, std::size_t k,
                                            std::uint32_t seed) {
    if (k == 0 || k > row_count) {
        throw ConfigError("sample size " + std::to_string(k) + " out of range [1, " +
                          std::to_string(row_count) + "]");
    }
    std::vector<std::size_t> idx(row_count);
    for (std::size_t i = 0; i < row_count; ++i) idx[i] = i;
    // Hand-rolled Fisher-Yates on raw mt19937 draws: std::shuffle's draw
    // pattern is implementation-defined, this one is reproducible everywhere.
    std::mt19937 rng(seed);
    for (std::size_t i = row_count - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double fraction,
                                          std::uint32_t seed) {
    if (!(fraction > 0.0) || !(fraction < 1.0)) {
        throw ConfigError("split fraction must be in (0, 1)");
    }
    const std::size_t n = d.row_count();
    if (n < 2) throw DataError("cannot split a dataset with fewer than 2 rows");
    std::size_t k = static_cast<std::size_t>(fraction * static_cast<double>(n));
    k = std::clamp<std::size_t>(k, 1, n - 1);

    const std::vector<std::size_t> first = sample_row_indices(n, k, seed);
    std::vector<bool> in_first(n, false);
    for (std::size_t i : first) in_first[i] = true;

    std::vector<FeatureVector> rows_a, rows_b;
    std::vector<double> t_a, t_b;
    for (std::size_t i = 0; i < n; ++i) {
        if (in_first[i]) {
            rows_a.push_back(d.rows()[i]);
            t_a.push_back(d.targets()[i]);
        } else {
            rows_b.push_back(d.rows()[i]);
            t_b.push_back(d.targets()[i]);
        }
    }
    return {Dataset(d.schema(), std::move(rows_a), std::move(t_a), false),
            Dataset(d.schema(), std::move(rows_b), std::move(t_b), false)};
}

} // namespace fdmlens
