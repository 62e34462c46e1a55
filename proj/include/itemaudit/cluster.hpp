#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "itemaudit/common.hpp"

namespace itemaudit {

struct ClusterAssignment {
    std::size_t k = 0;
    std::vector<std::size_t> labels; // row -> cluster in [0, k)
    Matrix centroids;                // k x dim
    double sse = 0.0;
    std::size_t n_iterations = 0;
    bool converged = false;
    std::vector<double> sse_trace; // SSE after every Lloyd update

    std::vector<std::size_t> cluster_sizes() const {
        std::vector<std::size_t> sizes(k, 0);
        for (auto l : labels) ++sizes[l];
        return sizes;
    }
};

struct KSelection {
    std::vector<std::pair<std::size_t, double>> sse_curve;
    std::vector<std::pair<std::size_t, double>> silhouette_scores;
    std::size_t chosen_k = 0;
};

namespace detail {

// Non-zero column indices of every row. TF-IDF rows are very sparse, so
// distances are computed over the non-zeros only.
struct RowSupport {
    std::vector<std::vector<std::size_t>> nz;

    explicit RowSupport(const Matrix& x) : nz(x.rows()) {
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const auto row = x.row(r);
            for (std::size_t c = 0; c < row.size(); ++c)
                if (row[c] != 0.0) nz[r].push_back(c);
        }
    }
};

// ||x_r - c||^2 given ||c||^2; exact to rounding, clamped at zero.
inline double point_centroid_sq(const Matrix& x, const RowSupport& s, std::size_t r, std::span<const double> c,
                                double c_sq_norm) {
    const auto row = x.row(r);
    double acc = 0.0;
    for (auto i : s.nz[r]) {
        const double d = row[i] - c[i];
        acc += d * d - c[i] * c[i];
    }
    return std::max(0.0, acc + c_sq_norm);
}

// ||x_a - x_b||^2 summed only over the union of both supports.
inline double pair_sq(const Matrix& x, const RowSupport& s, std::size_t a, std::size_t b) {
    const auto ra = x.row(a);
    const auto rb = x.row(b);
    double acc = 0.0;
    for (auto i : s.nz[a]) {
        const double d = ra[i] - rb[i];
        acc += d * d;
    }
    for (auto i : s.nz[b])
        if (ra[i] == 0.0) acc += rb[i] * rb[i];
    return acc;
}

inline std::size_t count_distinct_rows(const Matrix& x) {
    std::vector<std::vector<double>> rows;
    rows.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) rows.emplace_back(x.row(r).begin(), x.row(r).end());
    std::sort(rows.begin(), rows.end());
    return static_cast<std::size_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

inline std::vector<double> centroid_sq_norms(const Matrix& c) {
    std::vector<double> out(c.rows());
    for (std::size_t j = 0; j < c.rows(); ++j) out[j] = squared_norm(c.row(j));
    return out;
}

} // namespace detail

/// Lloyd's algorithm with greedy k-means++ seeding. Empty clusters are reseeded with
/// the point farthest from its centroid.
inline ClusterAssignment kmeans(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t max_iter = 300,
                                double tol = 1e-9) {
    const std::size_t n = x.rows();
    const std::size_t dim = x.cols();
    if (k < 1) throw AuditError("kmeans: k must be >= 1");
    if (k > n) throw AuditError("kmeans: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
    if (detail::count_distinct_rows(x) < k)
        throw AuditError("kmeans: fewer distinct points than k=" + std::to_string(k));

    const detail::RowSupport support(x);
    Rng rng(seed);

    // Greedy k-means++ seeding: each new centre is the best of a few D^2-sampled
    // candidates (lowest resulting potential).
    Matrix centroids(k, dim);
    const std::size_t n_trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
    std::size_t pick = rng.index(n);
    std::vector<double> best_sq(n);
    for (std::size_t r = 0; r < n; ++r) best_sq[r] = detail::pair_sq(x, support, r, pick);
    std::copy(x.row(pick).begin(), x.row(pick).end(), centroids.row(0).begin());
    std::vector<double> trial(n), chosen(n);
    for (std::size_t j = 1; j < k; ++j) {
        double best_potential = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n_trials; ++t) {
            const std::size_t cand = rng.categorical(best_sq);
            double potential = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                trial[r] = std::min(best_sq[r], detail::pair_sq(x, support, r, cand));
                potential += trial[r];
            }
            if (potential < best_potential) {
                best_potential = potential;
                pick = cand;
                chosen.swap(trial);
            }
        }
        best_sq.swap(chosen);
        std::copy(x.row(pick).begin(), x.row(pick).end(), centroids.row(j).begin());
    }

    ClusterAssignment out;
    out.k = k;
    out.labels.assign(n, 0);
    std::vector<double> dist(n, 0.0);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        const auto norms = detail::centroid_sq_norms(centroids);
        std::vector<std::size_t> labels(n);
        for (std::size_t r = 0; r < n; ++r) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t j = 0; j < k; ++j) {
                const double d = detail::point_centroid_sq(x, support, r, centroids.row(j), norms[j]);
                if (d < best) {
                    best = d;
                    arg = j;
                }
            }
            labels[r] = arg;
            dist[r] = best;
        }

        // Repair empty clusters by stealing the worst-fit point of a multi-member cluster.
        std::vector<std::size_t> sizes(k, 0);
        for (auto l : labels) ++sizes[l];
        for (std::size_t j = 0; j < k; ++j) {
            if (sizes[j] != 0) continue;
            std::optional<std::size_t> far;
            for (std::size_t r = 0; r < n; ++r)
                if (sizes[labels[r]] > 1 && (!far || dist[r] > dist[*far])) far = r;
            if (!far) throw AuditError("kmeans: cannot repair empty cluster");
            --sizes[labels[*far]];
            labels[*far] = j;
            ++sizes[j];
            dist[*far] = 0.0;
        }

        Matrix updated(k, dim);
        for (std::size_t r = 0; r < n; ++r) {
            auto c = updated.row(labels[r]);
            const auto row = x.row(r);
            for (auto i : support.nz[r]) c[i] += row[i];
        }
        for (std::size_t j = 0; j < k; ++j)
            for (auto& v : updated.row(j)) v /= static_cast<double>(sizes[j]);

        double movement = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            movement = std::max(movement, std::sqrt(detail::squared_distance(updated.row(j), centroids.row(j))));

        const auto new_norms = detail::centroid_sq_norms(updated);
        double sse = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            sse += detail::point_centroid_sq(x, support, r, updated.row(labels[r]), new_norms[labels[r]]);

        if (!out.sse_trace.empty() && sse > out.sse_trace.back() * (1.0 + 1e-12) + 1e-12)
            throw std::logic_error("kmeans: SSE increased during a Lloyd iteration");

        const bool same_labels = iter > 0 && labels == out.labels;
        out.labels = std::move(labels);
        centroids = std::move(updated);
        out.sse = sse;
        out.sse_trace.push_back(sse);
        out.n_iterations = iter + 1;
        if (movement <= tol || same_labels) {
            out.converged = true;
            break;
        }
    }
    out.centroids = std::move(centroids);
    return out;
}

/// Best (lowest SSE) of `restarts` seeded runs; ties keep the earliest restart.
inline ClusterAssignment kmeans_best_of(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t restarts,
                                        std::size_t max_iter = 300, double tol = 1e-9) {
    if (restarts < 1) throw AuditError("kmeans: restarts must be >= 1");
    std::optional<ClusterAssignment> best;
    for (std::size_t r = 0; r < restarts; ++r) {
        auto run = kmeans(x, k, derive_seed(seed, {k, r}), max_iter, tol);
        if (!best || run.sse < best->sse) best = std::move(run);
    }
    return std::move(*best);
}

inline std::vector<std::pair<std::size_t, double>> sse_curve(const Matrix& x, const std::vector<std::size_t>& ks,
                                                             std::uint64_t seed, std::size_t restarts = 5,
                                                             std::size_t max_iter = 300, double tol = 1e-9) {
    std::vector<std::pair<std::size_t, double>> out;
    for (auto k : ks) out.emplace_back(k, kmeans_best_of(x, k, seed, restarts, max_iter, tol).sse);
    return out;
}

/// Mean silhouette with Euclidean distance. Singletons score 0 and 0/0 is 0.
inline double silhouette(const Matrix& x, const std::vector<std::size_t>& labels) {
    const std::size_t n = x.rows();
    if (labels.size() != n) throw AuditError("silhouette: label count does not match rows");
    std::size_t k = 0;
    for (auto l : labels) k = std::max(k, l + 1);
    if (k < 2 || k > n - 1)
        throw AuditError("silhouette: k=" + std::to_string(k) + " outside [2, n-1] for n=" + std::to_string(n));
    std::vector<std::size_t> sizes(k, 0);
    for (auto l : labels) ++sizes[l];
    for (std::size_t j = 0; j < k; ++j)
        if (sizes[j] == 0) throw AuditError("silhouette: cluster " + std::to_string(j) + " is empty");

    const detail::RowSupport support(x);
    // sums[r * k + j] = total distance from r to members of cluster j
    std::vector<double> sums(n * k, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double d = std::sqrt(detail::pair_sq(x, support, a, b));
            sums[a * k + labels[b]] += d;
            sums[b * k + labels[a]] += d;
        }
    }
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t own = labels[r];
        if (sizes[own] == 1) continue;
        const double a = sums[r * k + own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j)
            if (j != own) b = std::min(b, sums[r * k + j] / static_cast<double>(sizes[j]));
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

/// Argmax of the silhouette table; ties go to the smaller k.
inline std::size_t choose_k(const std::vector<std::pair<std::size_t, double>>& silhouette_scores) {
    if (silhouette_scores.empty()) throw AuditError("choose_k: no silhouette scores");
    auto sorted = silhouette_scores;
    std::sort(sorted.begin(), sorted.end());
    std::size_t best_k = sorted.front().first;
    double best = sorted.front().second;
    for (const auto& [k, s] : sorted)
        if (s > best) {
            best = s;
            best_k = k;
        }
    return best_k;
}

struct KSelectionResult {
    KSelection selection;
    ClusterAssignment chosen; // best-of-restarts clustering at chosen_k
};

/// Scan k over [k_min, k_max], choose by silhouette, and report the SSE curve
/// over {1} and the scanned range.
inline KSelectionResult select_k(const Matrix& x, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                                 std::size_t restarts = 5, std::size_t max_iter = 300, double tol = 1e-9) {
    const std::size_t n = x.rows();
    if (k_min < 2 || k_max < k_min || k_max + 1 > n)
        throw AuditError("select_k: range [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                         "] not within [2, n-1] for n=" + std::to_string(n));
    KSelectionResult out;
    std::map<std::size_t, ClusterAssignment> runs;
    if (k_min > 1) out.selection.sse_curve.emplace_back(1, kmeans_best_of(x, 1, seed, restarts, max_iter, tol).sse);
    for (std::size_t k = k_min; k <= k_max; ++k) {
        auto run = kmeans_best_of(x, k, seed, restarts, max_iter, tol);
        out.selection.sse_curve.emplace_back(k, run.sse);
        out.selection.silhouette_scores.emplace_back(k, silhouette(x, run.labels));
        runs.emplace(k, std::move(run));
    }
    out.selection.chosen_k = choose_k(out.selection.silhouette_scores);
    out.chosen = std::move(runs.at(out.selection.chosen_k));
    return out;
}

/// Fraction of points whose cluster's majority reference label matches theirs.
inline double cluster_purity(const std::vector<std::size_t>& labels, const std::vector<std::size_t>& reference) {
    if (labels.size() != reference.size() || labels.empty()) throw AuditError("cluster_purity: size mismatch");
    std::map<std::size_t, std::map<std::size_t, std::size_t>> table;
    for (std::size_t i = 0; i < labels.size(); ++i) ++table[labels[i]][reference[i]];
    std::size_t hit = 0;
    for (auto& [c, counts] : table) {
        std::size_t m = 0;
        for (auto& [r, cnt] : counts) m = std::max(m, cnt);
        hit += m;
    }
    return static_cast<double>(hit) / static_cast<double>(labels.size());
}

} // namespace itemaudit
