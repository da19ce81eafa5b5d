#pragma once

// k-means (Lloyd iterations, k-means++ seeding with restarts), bottleneck
// matching of estimated centers to true parameter rows, and a Monte Carlo
// estimate of the clustering error probability g(delta, M0).

#include <clubandit/core.hpp>
#include <clubandit/rng.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace clubandit {

struct ClusterModel {
    Matrix centers;                      // one row per cluster
    std::vector<std::size_t> assignment; // point index -> cluster
    double inertia = 0.0;
    int iterations = 0;
};

struct KMeansOptions {
    int max_iters = 100;
    int restarts = 5;
};

namespace detail {

inline double squared_distance(std::span<const double> p, std::span<const double> q) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - q[i];
        s += d * d;
    }
    return s;
}

/// Nearest center, ties to the lowest index. Writes the squared distance.
inline std::size_t nearest_center(std::span<const double> p, const Matrix& centers, double& dist) noexcept {
    std::size_t best = 0;
    dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        const double d = squared_distance(p, centers.row(c));
        if (d < dist) {
            dist = d;
            best = c;
        }
    }
    return best;
}

inline Matrix kmeanspp_seed(const Matrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows();
    Matrix centers(k, points.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    std::size_t pick = uniform_index(rng, n);
    for (std::size_t c = 0; c < k; ++c) {
        std::ranges::copy(points.row(pick), centers.row(c).begin());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points.row(i), centers.row(c)));
            total += d2[i];
        }
        if (c + 1 == k) break;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All points coincide with a chosen center.
            pick = uniform_index(rng, n);
        }
    }
    return centers;
}

}  // namespace detail

/// Lloyd iterations from the given centers until the assignment is stable or
/// `max_iters` is reached. An emptied cluster keeps its previous center.
inline ClusterModel lloyd(const Matrix& points, Matrix centers, int max_iters) {
    const std::size_t n = points.rows();
    const std::size_t k = centers.rows();
    const std::size_t dim = points.cols();

    ClusterModel model;
    model.assignment.assign(n, std::numeric_limits<std::size_t>::max());
    std::vector<double> sums(k * dim);
    std::vector<std::size_t> sizes(k);
    [[maybe_unused]] double previous = std::numeric_limits<double>::infinity();
    bool converged = false;

    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            const std::size_t c = detail::nearest_center(points.row(i), centers, d);
            inertia += d;
            if (c != model.assignment[i]) {
                model.assignment[i] = c;
                changed = true;
            }
        }
        assert(inertia <= previous + 1e-9 * (1.0 + std::abs(previous)));
        previous = inertia;
        model.inertia = inertia;
        model.iterations = it + 1;
        if (!changed) {
            converged = true;
            break;
        }

        std::ranges::fill(sums, 0.0);
        std::ranges::fill(sizes, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = model.assignment[i];
            ++sizes[c];
            const auto p = points.row(i);
            for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += p[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;
            for (std::size_t j = 0; j < dim; ++j) centers(c, j) = sums[c * dim + j] / static_cast<double>(sizes[c]);
        }
    }

    if (!converged) {
        model.inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            model.assignment[i] = detail::nearest_center(points.row(i), centers, d);
            model.inertia += d;
        }
    }
    model.centers = std::move(centers);
    return model;
}

/// k-means++ seeded Lloyd's algorithm; the restart with the lowest inertia
/// wins. Restart r draws its seeding from stream ("kmeans++", r) of `seed`.
inline ClusterModel kmeans(const Matrix& points, std::size_t n_clusters, std::uint64_t seed,
                           KMeansOptions options = {}) {
    if (n_clusters == 0) throw std::invalid_argument("k-means needs at least one cluster");
    if (points.rows() < n_clusters) {
        throw std::invalid_argument("k-means with " + std::to_string(n_clusters) + " clusters on " +
                                    std::to_string(points.rows()) + " points");
    }
    if (options.max_iters < 1 || options.restarts < 1) throw std::invalid_argument("k-means options must be >= 1");

    ClusterModel best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        Rng rng = make_rng(seed, "kmeans++", static_cast<std::uint64_t>(r));
        ClusterModel m = lloyd(points, detail::kmeanspp_seed(points, n_clusters, rng), options.max_iters);
        if (m.inertia < best.inertia) best = std::move(m);
    }
    return best;
}

inline ClusterModel kmeans(const Matrix& points, std::size_t n_clusters, std::uint64_t seed, int max_iters) {
    return kmeans(points, n_clusters, seed, KMeansOptions{max_iters, 5});
}

struct MatchResult {
    std::vector<TypeId> permutation;  // cluster index -> type index
    double max_deviation = 0.0;
};

inline constexpr std::size_t kMaxMatchTypes = 10;

/// Exhaustive bottleneck matching: the bijection minimising the largest
/// coordinate deviation between a center and the type it is mapped to.
/// Ties keep the lexicographically smallest permutation.
inline MatchResult match_clusters(const Matrix& centers, const ParameterSet& truth) {
    const std::size_t n = truth.num_types();
    if (centers.rows() != n || centers.cols() != truth.num_arms()) {
        throw std::invalid_argument("centers and parameter set have different shapes");
    }
    if (n > kMaxMatchTypes) {
        throw std::invalid_argument("exhaustive matching supports at most " + std::to_string(kMaxMatchTypes) +
                                    " types, got " + std::to_string(n));
    }

    Matrix dev(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        for (TypeId x = 0; x < n; ++x) {
            double m = 0.0;
            for (Arm a = 0; a < truth.num_arms(); ++a) m = std::max(m, std::abs(centers(c, a) - truth(x, a)));
            dev(c, x) = m;
        }
    }

    std::vector<TypeId> perm(n);
    std::iota(perm.begin(), perm.end(), TypeId{0});
    MatchResult best{perm, std::numeric_limits<double>::infinity()};
    do {
        double worst = 0.0;
        for (std::size_t c = 0; c < n && worst < best.max_deviation; ++c) worst = std::max(worst, dev(c, perm[c]));
        if (worst < best.max_deviation) best = {perm, worst};
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// Monte Carlo estimate of P(min_sigma max_{x,a} |center - theta| >= delta)
/// after m0 pilot users with uniformly drawn types each play tau uniformly
/// random arms. Replication r uses stream ("estimate_g", r) of `seed`.
inline double estimate_g(const ParameterSet& truth, double delta, std::size_t m0, std::size_t tau, std::size_t reps,
                         std::uint64_t seed, KMeansOptions options = {}) {
    const std::size_t n = truth.num_types();
    const std::size_t k = truth.num_arms();
    if (reps == 0) throw std::invalid_argument("estimate_g needs at least one replication");
    if (tau < k) throw std::invalid_argument("estimate_g needs tau >= K");
    if (m0 < n) throw std::invalid_argument("estimate_g needs at least N pilot users");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");

    std::size_t failures = 0;
    Matrix points(m0, k);
    std::vector<std::uint64_t> counts(k);
    std::vector<double> sums(k);
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rng = make_rng(seed, "estimate_g", r);
        for (std::size_t u = 0; u < m0; ++u) {
            const auto x = static_cast<TypeId>(uniform_index(rng, n));
            std::ranges::fill(counts, 0);
            std::ranges::fill(sums, 0.0);
            for (std::size_t s = 0; s < tau; ++s) {
                const auto a = static_cast<Arm>(uniform_index(rng, k));
                ++counts[a];
                sums[a] += bernoulli(rng, truth(x, a));
            }
            for (Arm a = 0; a < k; ++a) points(u, a) = counts[a] ? sums[a] / static_cast<double>(counts[a]) : 0.0;
        }
        const ClusterModel model = kmeans(points, n, derive_seed(seed, "estimate_g/kmeans", r), options);
        if (match_clusters(model.centers, truth).max_deviation >= delta) ++failures;
    }
    return static_cast<double>(failures) / static_cast<double>(reps);
}

}  // namespace clubandit
