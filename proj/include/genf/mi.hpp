#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "genf/data.hpp"
#include "genf/matrix.hpp"
#include "genf/parallel.hpp"
#include "genf/rng.hpp"

namespace genf {

struct MiEstimate {
    double value = 0.0; // nats; may be slightly negative, reported unclamped
    int k = 0;
    std::size_t n = 0;
};

struct ItcPartition {
    std::vector<std::vector<std::string>> groups; // descending-score contiguous groups
    std::vector<std::string> subset_G;
    std::vector<std::string> subset_P;
    std::map<std::string, double> scores;
};

/// Digamma via upward recurrence into the asymptotic series.
inline double digamma(double x) {
    if (x <= 0.0) throw std::invalid_argument("digamma: x must be positive");
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return acc + std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

namespace detail {

inline double cheb_dist(const Mat& m, std::size_t i, std::size_t j) {
    double d = 0.0;
    const double* ri = m.data() + i * m.cols();
    const double* rj = m.data() + j * m.cols();
    for (std::size_t c = 0; c < m.cols(); ++c) d = std::max(d, std::abs(ri[c] - rj[c]));
    return d;
}

inline bool column_has_ties(const Mat& m, std::size_t col) {
    std::vector<double> v(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, col);
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] == v[i - 1]) return true;
    return false;
}

inline double column_scale(const Mat& m, std::size_t col) {
    double lo = m(0, col), hi = m(0, col);
    for (std::size_t i = 1; i < m.rows(); ++i) {
        lo = std::min(lo, m(i, col));
        hi = std::max(hi, m(i, col));
    }
    const double s = hi - lo;
    return s > 0.0 ? s : 1.0;
}

/// Jitter is applied only when a marginal column has exact duplicates: the
/// KSG estimator assumes continuous data; tie-free inputs stay untouched so
/// the estimate is exactly symmetric in (x, y) there.
inline void jitter_ties(Mat& m, std::uint64_t seed, std::uint64_t col_offset) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (!column_has_ties(m, c)) continue;
        Rng rng(derive_seed(seed, "ksg_jitter", col_offset + c));
        const double amp = 1e-10 * column_scale(m, c);
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, c) += amp * rng.uniform(-1.0, 1.0);
    }
}

} // namespace detail

/// KSG estimator, variant 1 (Kraskov et al.), max-norm in both marginal
/// spaces: I = psi(k) + psi(n) - mean_i[psi(nx_i + 1) + psi(ny_i + 1)].
/// Exact brute-force neighbor search.
inline MiEstimate ksg_mi(const Mat& x, const Mat& y, int k, std::uint64_t jitter_seed = 0x6b7367) {
    const std::size_t n = x.rows();
    if (y.rows() != n) throw std::invalid_argument("ksg_mi: sample counts differ");
    if (k < 1) throw std::invalid_argument("ksg_mi: k must be >= 1");
    if (n <= static_cast<std::size_t>(k))
        throw std::invalid_argument("ksg_mi: need n > k (n=" + std::to_string(n) +
                                    ", k=" + std::to_string(k) + ")");
    if (x.has_nan() || y.has_nan()) throw std::invalid_argument("ksg_mi: NaN in input");

    Mat xj = x, yj = y;
    detail::jitter_ties(xj, jitter_seed, 0);
    detail::jitter_ties(yj, jitter_seed, x.cols());

    std::vector<double> dx(n), dy(n);
    double psi_sum = 0.0;
    std::vector<double> kth(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dx[j] = detail::cheb_dist(xj, i, j);
            dy[j] = detail::cheb_dist(yj, i, j);
        }
        std::vector<double> joint(n);
        for (std::size_t j = 0; j < n; ++j) joint[j] = std::max(dx[j], dy[j]);
        joint[i] = std::numeric_limits<double>::infinity(); // exclude self
        std::vector<double> tmp = joint;
        std::nth_element(tmp.begin(), tmp.begin() + (k - 1), tmp.end());
        const double eps = tmp[k - 1]; // distance to k-th neighbor
        std::size_t nx = 0, ny = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (dx[j] < eps) ++nx;
            if (dy[j] < eps) ++ny;
        }
        psi_sum += digamma(static_cast<double>(nx) + 1.0) + digamma(static_cast<double>(ny) + 1.0);
    }

    MiEstimate est;
    est.k = k;
    est.n = n;
    est.value = digamma(static_cast<double>(k)) + digamma(static_cast<double>(n)) -
                psi_sum / static_cast<double>(n);
    return est;
}

/// ITC scoring: J(P_i) = sum over j != i of I(P_i, P_j), units paired by
/// time index and truncated to the common (global minimum) length.
inline std::map<std::string, double> score_units(const std::vector<RawSeries>& units, int k,
                                                 std::uint64_t jitter_seed = 0x6b7367) {
    if (units.size() < 2) throw std::invalid_argument("score_units: need at least 2 units");
    std::size_t common = units[0].length();
    for (const auto& u : units) common = std::min(common, u.length());

    std::vector<Mat> truncated(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        Mat m(common, units[i].features());
        for (std::size_t t = 0; t < common; ++t)
            for (std::size_t c = 0; c < units[i].features(); ++c) m(t, c) = units[i].values(t, c);
        truncated[i] = std::move(m);
    }

    // Pair MI is symmetric; compute the upper triangle in parallel, then sum
    // in sorted-id order so the result is bitwise deterministic.
    const std::size_t nu = units.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = i + 1; j < nu; ++j) pairs.emplace_back(i, j);
    std::vector<double> pair_mi(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        pair_mi[p] = ksg_mi(truncated[i], truncated[j], k,
                            derive_seed(jitter_seed, "pair", i * nu + j))
                         .value;
    });

    std::vector<std::size_t> order(nu);
    for (std::size_t i = 0; i < nu; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return units[a].unit_id < units[b].unit_id; });

    Mat mi_table(nu, nu);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        mi_table(pairs[p].first, pairs[p].second) = pair_mi[p];
        mi_table(pairs[p].second, pairs[p].first) = pair_mi[p];
    }

    std::map<std::string, double> scores;
    for (std::size_t i = 0; i < nu; ++i) {
        double s = 0.0;
        for (std::size_t jj = 0; jj < nu; ++jj) {
            const std::size_t j = order[jj];
            if (j != i) s += mi_table(i, j);
        }
        scores[units[i].unit_id] = s;
    }
    return scores;
}

/// Partition: sort by descending score, cut into gamma contiguous groups of
/// near-equal size, sample round(fraction * |group|) units per group into G,
/// remainder forms P.
inline ItcPartition itc_partition(const std::map<std::string, double>& scores, std::size_t gamma,
                                  double fraction, std::uint64_t seed) {
    const std::size_t n = scores.size();
    if (gamma < 1) throw std::invalid_argument("itc_partition: gamma must be >= 1");
    if (gamma > n)
        throw std::invalid_argument("itc_partition: gamma (" + std::to_string(gamma) +
                                    ") exceeds unit count (" + std::to_string(n) + ")");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("itc_partition: fraction must be in (0, 1)");

    std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    ItcPartition part;
    part.scores = scores;
    const std::size_t base = n / gamma, extra = n % gamma;
    std::size_t pos = 0;
    Rng rng(derive_seed(seed, "itc_sample"));
    for (std::size_t g = 0; g < gamma; ++g) {
        const std::size_t sz = base + (g < extra ? 1 : 0);
        std::vector<std::string> group;
        for (std::size_t i = 0; i < sz; ++i) group.push_back(ranked[pos++].first);

        const auto take = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(group.size())));
        auto picks = rng.sample_without_replacement(group.size(), std::min(take, group.size()));
        std::vector<bool> in_g(group.size(), false);
        for (auto p : picks) in_g[p] = true;
        for (std::size_t i = 0; i < group.size(); ++i)
            (in_g[i] ? part.subset_G : part.subset_P).push_back(group[i]);
        part.groups.push_back(std::move(group));
    }
    return part;
}

inline void write_partition_manifest(const std::string& path, const ItcPartition& part) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_partition_manifest: cannot open " + path);
    out.precision(17);
    std::set<std::string> g_set(part.subset_G.begin(), part.subset_G.end());
    for (const auto& group : part.groups)
        for (const auto& id : group)
            out << id << '\t' << (g_set.count(id) ? 'G' : 'P') << '\t' << part.scores.at(id)
                << '\n';
}

} // namespace genf
