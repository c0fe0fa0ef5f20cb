#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "genf/matrix.hpp"
#include "genf/rng.hpp"

namespace genf {

/// One unit's multivariate series (a patient, a site, a country, ...).
struct RawSeries {
    std::string unit_id;
    Mat values;                      // T x K
    std::vector<std::string> feature_names;
    std::vector<std::vector<bool>> missing_mask; // T x K, true where input had no value

    std::size_t length() const { return values.rows(); }
    std::size_t features() const { return values.cols(); }
};

struct CsvSchema {
    std::string unit_column = "unit";
    std::vector<std::string> feature_names; // empty: take from header
};

/// Per-feature min/max fitted on training units only.
struct ScalingParams {
    std::vector<double> min;
    std::vector<double> max;
};

/// Sliding windows with per-horizon scalar targets.
struct WindowedDataset {
    std::vector<Mat> windows;                        // each M x K
    std::map<int, std::vector<double>> targets;      // horizon -> per-window target value
    std::vector<std::string> unit_of_window;
    int target_feature = 0;
    std::vector<std::string> skipped_units;          // too short for M + N_max
};

// ---------------------------------------------------------------------------
// CSV ingestion. Format: header `unit,<f1>,...,<fK>`; one row per time step,
// rows in time order within a unit; empty cell = missing value.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::optional<double> parse_double(const std::string& s) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
    double v = 0.0;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e) return std::nullopt;
    return v;
}

} // namespace detail

inline std::vector<RawSeries> load_csv(const std::string& path, const CsvSchema& schema = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) return {}; // empty file -> empty list

    auto header = detail::split_csv_line(line);
    if (header.empty() || header[0] != schema.unit_column)
        throw std::runtime_error("load_csv: expected first header column '" + schema.unit_column +
                                 "' in " + path);
    std::vector<std::string> features(header.begin() + 1, header.end());
    if (!schema.feature_names.empty() && features != schema.feature_names)
        throw std::runtime_error("load_csv: header feature names do not match schema in " + path);
    if (features.empty())
        throw std::runtime_error("load_csv: no feature columns in " + path);

    // Preserve first-appearance order of units.
    std::vector<std::string> unit_order;
    std::map<std::string, std::vector<std::vector<double>>> rows;   // NaN = missing
    std::map<std::string, std::vector<std::vector<bool>>> masks;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("load_csv: line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
        const std::string& unit = cells[0];
        if (unit.empty())
            throw std::runtime_error("load_csv: line " + std::to_string(line_no) + ": empty unit id");
        if (!rows.count(unit)) unit_order.push_back(unit);
        std::vector<double> vals(features.size());
        std::vector<bool> miss(features.size(), false);
        for (std::size_t k = 0; k < features.size(); ++k) {
            const std::string& cell = cells[k + 1];
            if (cell.empty()) {
                vals[k] = std::numeric_limits<double>::quiet_NaN();
                miss[k] = true;
            } else {
                auto v = detail::parse_double(cell);
                if (!v)
                    throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                             ": non-numeric cell '" + cell + "'");
                vals[k] = *v;
            }
        }
        rows[unit].push_back(std::move(vals));
        masks[unit].push_back(std::move(miss));
    }

    std::vector<RawSeries> out;
    out.reserve(unit_order.size());
    for (const auto& unit : unit_order) {
        const auto& r = rows[unit];
        RawSeries s;
        s.unit_id = unit;
        s.feature_names = features;
        s.values = Mat(r.size(), features.size());
        for (std::size_t t = 0; t < r.size(); ++t)
            for (std::size_t k = 0; k < features.size(); ++k) s.values(t, k) = r[t][k];
        s.missing_mask = masks[unit];
        out.push_back(std::move(s));
    }
    return out;
}

inline void write_csv(const std::string& path, const std::vector<RawSeries>& units) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    if (units.empty()) return;
    out << "unit";
    for (const auto& f : units[0].feature_names) out << ',' << f;
    out << '\n';
    out.precision(17);
    for (const auto& u : units) {
        for (std::size_t t = 0; t < u.length(); ++t) {
            out << u.unit_id;
            for (std::size_t k = 0; k < u.features(); ++k) {
                out << ',';
                if (t < u.missing_mask.size() && u.missing_mask[t][k]) continue; // empty cell
                out << u.values(t, k);
            }
            out << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Imputation: last historical reading per feature. Missing at t=0 is an
// error (no prior reading to carry forward).
// ---------------------------------------------------------------------------

inline RawSeries impute_last(const RawSeries& series) {
    RawSeries out = series;
    for (std::size_t k = 0; k < series.features(); ++k) {
        if (!series.missing_mask.empty() && series.missing_mask[0][k])
            throw std::runtime_error("impute_last: unit '" + series.unit_id + "' feature '" +
                                     series.feature_names[k] + "' missing at t=0");
        double last = series.values(0, k);
        for (std::size_t t = 1; t < series.length(); ++t) {
            if (series.missing_mask[t][k]) {
                out.values(t, k) = last;
                out.missing_mask[t][k] = false;
            } else {
                last = series.values(t, k);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Min-max scaling fitted on training units only; a constant feature maps
// to 0. Values outside the training range are not clipped.
// ---------------------------------------------------------------------------

inline ScalingParams fit_scale(const std::vector<RawSeries>& train_units) {
    if (train_units.empty()) throw std::invalid_argument("fit_scale: no training units");
    const std::size_t K = train_units[0].features();
    ScalingParams p;
    p.min.assign(K, std::numeric_limits<double>::infinity());
    p.max.assign(K, -std::numeric_limits<double>::infinity());
    for (const auto& u : train_units) {
        if (u.features() != K) throw std::invalid_argument("fit_scale: inconsistent feature count");
        for (std::size_t t = 0; t < u.length(); ++t)
            for (std::size_t k = 0; k < K; ++k) {
                const double v = u.values(t, k);
                p.min[k] = std::min(p.min[k], v);
                p.max[k] = std::max(p.max[k], v);
            }
    }
    return p;
}

inline RawSeries apply_scale(const RawSeries& series, const ScalingParams& p) {
    RawSeries out = series;
    for (std::size_t k = 0; k < series.features(); ++k) {
        const double range = p.max[k] - p.min[k];
        for (std::size_t t = 0; t < series.length(); ++t)
            out.values(t, k) = range == 0.0 ? 0.0 : (series.values(t, k) - p.min[k]) / range;
    }
    return out;
}

inline double inverse_scale_value(double scaled, const ScalingParams& p, std::size_t feature) {
    const double range = p.max[feature] - p.min[feature];
    return range == 0.0 ? p.min[feature] : scaled * range + p.min[feature];
}

inline RawSeries inverse_scale(const RawSeries& series, const ScalingParams& p) {
    RawSeries out = series;
    for (std::size_t k = 0; k < series.features(); ++k)
        for (std::size_t t = 0; t < series.length(); ++t)
            out.values(t, k) = inverse_scale_value(series.values(t, k), p, k);
    return out;
}

// ---------------------------------------------------------------------------
// Sliding windows, stride 1. A unit of length T yields T - M - N_max + 1
// windows; shorter units are skipped and reported.
// ---------------------------------------------------------------------------

inline WindowedDataset make_windows(const std::vector<RawSeries>& series, std::size_t M,
                                    const std::set<int>& horizons, int target_feature = 0) {
    if (M < 1) throw std::invalid_argument("make_windows: M must be >= 1");
    if (horizons.empty() || *horizons.begin() < 1)
        throw std::invalid_argument("make_windows: horizons must be >= 1");
    const int n_max = *horizons.rbegin();

    WindowedDataset ds;
    ds.target_feature = target_feature;
    for (int h : horizons) ds.targets[h] = {};

    for (const auto& u : series) {
        if (target_feature < 0 || static_cast<std::size_t>(target_feature) >= u.features())
            throw std::invalid_argument("make_windows: target_feature out of range");
        const std::size_t T = u.length();
        if (T < M + static_cast<std::size_t>(n_max)) {
            ds.skipped_units.push_back(u.unit_id);
            continue;
        }
        const std::size_t count = T - M - static_cast<std::size_t>(n_max) + 1;
        for (std::size_t s = 0; s < count; ++s) {
            Mat w(M, u.features());
            for (std::size_t t = 0; t < M; ++t)
                for (std::size_t k = 0; k < u.features(); ++k) w(t, k) = u.values(s + t, k);
            ds.windows.push_back(std::move(w));
            ds.unit_of_window.push_back(u.unit_id);
            for (int h : horizons)
                ds.targets[h].push_back(u.values(s + M - 1 + static_cast<std::size_t>(h),
                                                 static_cast<std::size_t>(target_feature)));
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Unit-level split. Partition sizes follow the fractions by the largest-
// remainder rule; every partition receives at least one unit.
// ---------------------------------------------------------------------------

struct UnitSplit {
    std::vector<std::string> train;
    std::vector<std::string> test;
    std::vector<std::string> validation;
};

inline UnitSplit split_units(const std::vector<std::string>& unit_ids,
                             std::array<double, 3> fractions, std::uint64_t seed) {
    const std::size_t n = unit_ids.size();
    if (n < 3) throw std::invalid_argument("split_units: need at least 3 units, got " +
                                           std::to_string(n));
    std::vector<std::string> shuffled = unit_ids;
    Rng rng(derive_seed(seed, "unit_split"));
    rng.shuffle(shuffled);

    std::array<std::size_t, 3> counts{};
    std::array<double, 3> rem{};
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = fractions[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(exact);
        rem[i] = exact - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    while (assigned < n) {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (rem[i] > rem[best]) best = i;
        ++counts[best];
        rem[best] = -1.0;
        ++assigned;
    }
    // No partition may be empty when n >= 3.
    for (int i = 0; i < 3; ++i) {
        while (counts[i] == 0) {
            int big = 0;
            for (int j = 1; j < 3; ++j)
                if (counts[j] > counts[big]) big = j;
            --counts[big];
            ++counts[i];
        }
    }

    UnitSplit out;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < counts[0]; ++i) out.train.push_back(shuffled[pos++]);
    for (std::size_t i = 0; i < counts[1]; ++i) out.test.push_back(shuffled[pos++]);
    for (std::size_t i = 0; i < counts[2]; ++i) out.validation.push_back(shuffled[pos++]);
    return out;
}

inline std::vector<RawSeries> select_units(const std::vector<RawSeries>& all,
                                           const std::vector<std::string>& ids) {
    std::vector<RawSeries> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        auto it = std::find_if(all.begin(), all.end(),
                               [&](const RawSeries& s) { return s.unit_id == id; });
        if (it == all.end()) throw std::runtime_error("select_units: unknown unit '" + id + "'");
        out.push_back(*it);
    }
    return out;
}

inline void write_split_manifest(const std::string& path, const std::vector<std::string>& ids) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_split_manifest: cannot open " + path);
    for (const auto& id : ids) out << id << '\n';
}

inline std::vector<std::string> read_split_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_split_manifest: cannot open " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ids.push_back(line);
    }
    return ids;
}

} // namespace genf
