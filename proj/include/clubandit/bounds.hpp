#pragma once

// Numeric evaluators for the regret bounds: the deviation-count constant
// gamma(eps), the known-types upper bounds (exact and delta-widened confusion
// sets), the explore-cluster-exploit bound, and the asymptotic lower-bound
// constant computed by bisection over a matrix-game feasibility LP.

#include <clubandit/core.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clubandit {

enum class BoundKind { lemma1, thm1, thm2, thm3, eq1 };

inline const char* to_string(BoundKind k) {
    switch (k) {
        case BoundKind::lemma1: return "lemma1";
        case BoundKind::thm1: return "thm1";
        case BoundKind::thm2: return "thm2";
        case BoundKind::thm3: return "thm3";
        case BoundKind::eq1: return "eq1";
    }
    return "?";
}

struct BoundReport {
    BoundKind kind = BoundKind::lemma1;
    double value = 0.0;
    std::vector<std::pair<std::string, double>> inputs;
    std::vector<std::pair<std::string, double>> terms;
    /// thm1/thm2 only: whether the confusion set of the true type was empty.
    std::optional<bool> confusion_set_empty;

    double term(const std::string& name) const {
        for (const auto& [k, v] : terms) {
            if (k == name) return v;
        }
        throw std::out_of_range("bound report has no term '" + name + "'");
    }
};

/// Bound on the expected last time an empirical Bernoulli mean deviates by
/// at least eps: 2 e^{-2 eps^2} / (1 - e^{-2 eps^2})^2.
inline double gamma(double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("gamma needs epsilon > 0");
    const double s = 2.0 * epsilon * epsilon;
    const double denom = -std::expm1(-s);
    return 2.0 * std::exp(-s) / (denom * denom);
}

inline BoundReport lemma1_bound(double epsilon) {
    BoundReport r;
    r.kind = BoundKind::lemma1;
    r.inputs = {{"epsilon", epsilon}};
    r.value = gamma(epsilon);
    r.terms = {{"gamma", r.value}};
    return r;
}

/// Upper bound on the expected regret of the known-types policy at horizon T
/// for true type x. delta = 0 uses B(x); delta > 0 uses B(x, delta).
///
/// The constant is assembled per suboptimal arm as 1 + (K + 2) gamma(eps*)
/// expected pulls, weighted by the gap, plus pi^2/3 per non-optimal elite arm
/// when the confusion set is non-empty. The logarithmic term runs over elite
/// arms other than the optimal one.
inline BoundReport thm1_bound(const ParameterSet& params, TypeId x, double horizon, double delta = 0.0) {
    const std::size_t k = params.num_arms();
    if (x >= params.num_types()) throw std::out_of_range("type index out of range");
    if (!(horizon >= static_cast<double>(k))) throw std::invalid_argument("thm1_bound needs T >= K");
    const DerivedStructure d = derive_structure(params);
    const bool confused = !confusion_set(params, d, x, delta).empty();
    const Arm best = d.best_arm[x];

    double gap_sum = 0.0;
    for (Arm a = 0; a < k; ++a) gap_sum += d.gaps(x, a);
    const double g = gamma(d.epsilon_star);
    const double base = gap_sum * (1.0 + static_cast<double>(k + 2) * g);

    double log_term = 0.0;
    double ucb_const = 0.0;
    if (confused) {
        for (const Arm a : d.elite) {
            if (a == best) continue;
            const double gap = d.gaps(x, a);
            if (!(gap > 0.0)) {
                throw std::domain_error("elite arm " + std::to_string(a) + " has zero gap under type " +
                                        std::to_string(x));
            }
            log_term += 8.0 / gap * std::log(horizon);
            ucb_const += std::numbers::pi * std::numbers::pi / 3.0 * gap;
        }
    }

    BoundReport r;
    r.kind = delta > 0.0 ? BoundKind::thm2 : BoundKind::thm1;
    r.inputs = {{"x", static_cast<double>(x)}, {"T", horizon}, {"delta", delta}, {"epsilon_star", d.epsilon_star}};
    r.terms = {{"log_term", log_term}, {"gamma_A", base + ucb_const}};
    r.confusion_set_empty = !confused;
    r.value = log_term + base + ucb_const;
    return r;
}

/// Explore-cluster-exploit bound with clustering error probability g_value.
/// The per-session regret of the exploit phase is the known-types bound at
/// horizon tau with confusion tolerance 2 delta.
inline BoundReport thm3_bound(const ParameterSet& params, std::size_t m0, std::size_t tau, double delta,
                              double g_value, double horizon) {
    const std::size_t n = params.num_types();
    const std::size_t k = params.num_arms();
    if (!(g_value >= 0.0 && g_value <= 1.0)) throw std::invalid_argument("g must lie in [0,1]");
    if (tau == 0) throw std::invalid_argument("tau must be >= 1");
    const double pilot_slots = static_cast<double>(m0) * static_cast<double>(tau);
    if (!(horizon >= pilot_slots)) throw std::invalid_argument("horizon shorter than the pilot phase");
    const DerivedStructure d = derive_structure(params);

    double mean_gap_sum = 0.0;
    double max_gap = 0.0;
    for (TypeId x = 0; x < n; ++x) {
        for (Arm a = 0; a < k; ++a) {
            mean_gap_sum += d.gaps(x, a) / static_cast<double>(n);
            max_gap = std::max(max_gap, d.gaps(x, a));
        }
    }
    const double pilot = static_cast<double>(m0) * mean_gap_sum * static_cast<double>(tau) / static_cast<double>(k);
    const double miscluster = g_value * (horizon - pilot_slots) * max_gap;

    double per_session = 0.0;
    for (TypeId x = 0; x < n; ++x) {
        per_session += thm1_bound(params, x, static_cast<double>(tau), 2.0 * delta).value / static_cast<double>(n);
    }
    const double sessions = horizon / static_cast<double>(tau) - static_cast<double>(m0);
    const double exploit = (1.0 - g_value) * sessions * per_session;

    BoundReport r;
    r.kind = BoundKind::thm3;
    r.inputs = {{"m0", static_cast<double>(m0)}, {"tau", static_cast<double>(tau)}, {"delta", delta},
                {"g", g_value}, {"T", horizon}};
    r.terms = {{"pilot", pilot}, {"miscluster", miscluster}, {"exploit", exploit}};
    r.value = pilot + miscluster + exploit;
    return r;
}

namespace detail {

/// max sum(p) s.t. A p <= 1, p >= 0 for a strictly positive m x n matrix A
/// (row-major). Dense tableau simplex with Bland's rule.
inline double packing_lp(const std::vector<double>& a, std::size_t m, std::size_t n) {
    const std::size_t cols = n + m + 1;  // variables, slacks, rhs
    std::vector<double> tab((m + 1) * cols, 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return tab[r * cols + c]; };
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) at(i, j) = a[i * n + j];
        at(i, n + i) = 1.0;
        at(i, cols - 1) = 1.0;
        basis[i] = n + i;
    }
    for (std::size_t j = 0; j < n; ++j) at(m, j) = -1.0;

    constexpr double eps = 1e-12;
    for (int iter = 0; iter < 10000; ++iter) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j + 1 < cols; ++j) {
            if (at(m, j) < -eps) {
                enter = j;
                break;
            }
        }
        if (enter == cols) return at(m, cols - 1);

        std::size_t leave = m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (at(i, enter) > eps) {
                const double ratio = at(i, cols - 1) / at(i, enter);
                if (ratio < best_ratio - eps || (ratio <= best_ratio + eps && leave < m && basis[i] < basis[leave])) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave == m) throw std::logic_error("packing LP is unbounded");

        const double piv = at(leave, enter);
        for (std::size_t c = 0; c < cols; ++c) at(leave, c) /= piv;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == leave) continue;
            const double f = at(r, enter);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < cols; ++c) at(r, c) -= f * at(leave, c);
        }
        basis[leave] = enter;
    }
    throw std::runtime_error("packing LP did not converge");
}

/// min over the simplex of max over rows of (W alpha)_z for an m x n payoff
/// matrix W (rows = opponents, columns = arms).
inline double matrix_game_value(const std::vector<double>& w, std::size_t m, std::size_t n) {
    double lo = std::numeric_limits<double>::infinity();
    for (const double v : w) lo = std::min(lo, v);
    const double shift = 1.0 - lo;  // makes every entry >= 1
    std::vector<double> shifted(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) shifted[i] = w[i] + shift;
    return 1.0 / packing_lp(shifted, m, n) - shift;
}

}  // namespace detail

struct LowerBoundOptions {
    double tolerance = 1e-4;
};

/// Asymptotic lower-bound constant for true type x:
///   min_{alpha in simplex(A_-x)} max_{z in B(x)}
///       sum alpha(a) gap_x(a) / sum alpha(a) KL(theta_x(a) || theta_z(a)).
/// Bisection on the value c, with feasibility of c decided by the sign of
/// the matrix game with payoff gap_x(a) - c KL_z(a). Returns +infinity when
/// some z in B(x) cannot be told apart from x on any arm other than a*_x.
inline double eq1_lower_bound(const ParameterSet& params, TypeId x, LowerBoundOptions options = {}) {
    const DerivedStructure d = derive_structure(params);
    if (x >= params.num_types()) throw std::out_of_range("type index out of range");
    const std::vector<TypeId> confusers = confusion_set(params, d, x, 0.0);
    if (confusers.empty()) throw std::domain_error("B(x) is empty: the lower bound is vacuous");

    std::vector<Arm> arms;
    for (Arm a = 0; a < params.num_arms(); ++a) {
        if (a != d.best_arm[x]) arms.push_back(a);
    }
    const std::size_t m = confusers.size();
    const std::size_t n = arms.size();
    if (n == 0) throw std::domain_error("no suboptimal arms");

    std::vector<double> gaps(n);
    std::vector<double> kl(m * n);
    double hi = 0.0;
    for (std::size_t j = 0; j < n; ++j) gaps[j] = d.gaps(x, arms[j]);
    for (std::size_t i = 0; i < m; ++i) {
        bool separable = false;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = bernoulli_kl(params(x, arms[j]), params(confusers[i], arms[j]));
            if (!std::isfinite(v)) {
                throw std::domain_error("infinite KL divergence: means must lie strictly inside (0,1)");
            }
            kl[i * n + j] = v;
            if (v > 0.0) {
                separable = true;
                hi = std::max(hi, gaps[j] / v);
            }
        }
        if (!separable) return std::numeric_limits<double>::infinity();
    }

    std::vector<double> w(m * n);
    const auto feasible = [&](double c) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) w[i * n + j] = gaps[j] - c * kl[i * n + j];
        }
        return detail::matrix_game_value(w, m, n) <= 0.0;
    };

    double lo = 0.0;
    hi *= 10.0;
    for (int expand = 0; !feasible(hi); ++expand) {
        if (expand > 60) return std::numeric_limits<double>::infinity();
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > options.tolerance) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

inline BoundReport eq1_report(const ParameterSet& params, TypeId x, LowerBoundOptions options = {}) {
    BoundReport r;
    r.kind = BoundKind::eq1;
    r.inputs = {{"x", static_cast<double>(x)}};
    r.value = eq1_lower_bound(params, x, options);
    r.terms = {{"log_coefficient", r.value}};
    return r;
}

}  // namespace clubandit
