#pragma once

// Parameter sets and the structural quantities derived from them: optimal
// arms, gaps, the separation radius, elite arms, confusion sets and the
// C1/C2/C3 classification of an empirical reward vector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clubandit {

using Arm = std::size_t;
using TypeId = std::size_t;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        const std::size_t cols = rows.empty() ? 0 : rows.front().size();
        Matrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) {
                throw std::invalid_argument("matrix rows have different lengths (row " +
                                            std::to_string(r) + ")");
            }
            std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * cols));
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_) throw std::invalid_argument("appended row has the wrong length");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    std::vector<std::vector<double>> to_rows() const {
        std::vector<std::vector<double>> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
        return out;
    }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// The N x K matrix of expected Bernoulli rewards, one row per type.
class ParameterSet {
public:
    ParameterSet() = default;

    explicit ParameterSet(Matrix means) : means_(std::move(means)) {
        if (means_.rows() == 0 || means_.cols() == 0) {
            throw std::invalid_argument("parameter set needs at least one type and one arm");
        }
        for (std::size_t x = 0; x < num_types(); ++x) {
            for (std::size_t a = 0; a < num_arms(); ++a) {
                const double v = means_(x, a);
                if (!(v >= 0.0 && v <= 1.0)) {
                    throw std::invalid_argument("mean reward of type " + std::to_string(x) + ", arm " +
                                                std::to_string(a) + " is outside [0,1]");
                }
            }
        }
    }

    static ParameterSet from_rows(const std::vector<std::vector<double>>& rows) {
        return ParameterSet(Matrix::from_rows(rows));
    }

    std::size_t num_types() const noexcept { return means_.rows(); }
    std::size_t num_arms() const noexcept { return means_.cols(); }

    double operator()(TypeId x, Arm a) const noexcept { return means_(x, a); }
    std::span<const double> row(TypeId x) const noexcept { return means_.row(x); }
    const Matrix& means() const noexcept { return means_; }

    /// True when every row attains its maximum at exactly one arm.
    bool unique_optima() const noexcept {
        for (std::size_t x = 0; x < num_types(); ++x) {
            const auto r = row(x);
            const double best = *std::max_element(r.begin(), r.end());
            if (std::count(r.begin(), r.end(), best) != 1) return false;
        }
        return true;
    }

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

private:
    Matrix means_;
};

/// How derive_structure treats a row whose maximum is attained more than once.
enum class TieRule {
    reject,       // the standing assumption: optima are unique
    lowest_index  // estimated parameter sets, where exact ties can occur
};

struct DerivedStructure {
    std::vector<Arm> best_arm;
    std::vector<double> best_value;
    Matrix gaps;
    double epsilon_star = 0.0;
    std::vector<Arm> elite;  // sorted, unique
    bool duplicate_rows = false;

    bool is_elite(Arm a) const { return std::binary_search(elite.begin(), elite.end(), a); }
};

/// Half the smallest distance between distinct values of the matrix. With a
/// single distinct value every radius separates, and 1 covers [0,1].
inline double separation_radius(const Matrix& values) {
    std::vector<double> v = values.data();
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (v.size() < 2) return 1.0;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < v.size(); ++i) gap = std::min(gap, v[i] - v[i - 1]);
    return gap / 2.0;
}

inline DerivedStructure derive_structure(const ParameterSet& params, TieRule ties = TieRule::reject) {
    const std::size_t n = params.num_types();
    const std::size_t k = params.num_arms();
    if (n == 0 || k == 0) throw std::invalid_argument("empty parameter set");

    DerivedStructure d;
    d.best_arm.resize(n);
    d.best_value.resize(n);
    d.gaps = Matrix(n, k);
    std::set<Arm> elite;
    for (TypeId x = 0; x < n; ++x) {
        const auto r = params.row(x);
        const auto it = std::max_element(r.begin(), r.end());
        if (ties == TieRule::reject && std::count(r.begin(), r.end(), *it) != 1) {
            throw std::invalid_argument("type " + std::to_string(x) +
                                        " has more than one optimal arm; optima must be unique");
        }
        d.best_arm[x] = static_cast<Arm>(it - r.begin());
        d.best_value[x] = *it;
        for (Arm a = 0; a < k; ++a) d.gaps(x, a) = *it - r[a];
        elite.insert(d.best_arm[x]);
    }
    d.elite.assign(elite.begin(), elite.end());
    d.epsilon_star = separation_radius(params.means());

    for (TypeId x = 0; x < n && !d.duplicate_rows; ++x) {
        for (TypeId z = x + 1; z < n; ++z) {
            if (std::ranges::equal(params.row(x), params.row(z))) {
                d.duplicate_rows = true;
                break;
            }
        }
    }
    return d;
}

/// B(x) for delta == 0, otherwise the tolerance-widened B(x, delta).
/// Returned indices are sorted and never include x.
inline std::vector<TypeId> confusion_set(const ParameterSet& params, const DerivedStructure& derived,
                                         TypeId x, double delta) {
    const std::size_t n = params.num_types();
    const std::size_t k = params.num_arms();
    if (x >= n) throw std::out_of_range("type index " + std::to_string(x) + " out of range");
    if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");

    std::vector<TypeId> out;
    if (delta == 0.0) {
        const Arm ax = derived.best_arm[x];
        for (TypeId z = 0; z < n; ++z) {
            if (z != x && params(z, ax) == params(x, ax) && derived.best_arm[z] != ax) out.push_back(z);
        }
        return out;
    }

    const double tol = 2.0 * delta;
    const double threshold = derived.best_value[x] - tol;
    for (TypeId z = 0; z < n; ++z) {
        if (z == x) continue;
        bool member = false;
        for (Arm ap = 0; ap < k && !member; ++ap) {
            if (params(x, ap) < threshold) continue;
            if (std::abs(params(z, ap) - params(x, ap)) > tol) continue;
            for (Arm a = 0; a < k; ++a) {
                if (a != ap && params(z, a) > params(z, ap) - tol) {
                    member = true;
                    break;
                }
            }
        }
        if (member) out.push_back(z);
    }
    return out;
}

inline std::vector<TypeId> confusion_set(const ParameterSet& params, TypeId x, double delta) {
    return confusion_set(params, derive_structure(params), x, delta);
}

/// Which types have a non-empty confusion set at a fixed delta.
struct ConfusionTable {
    double delta = 0.0;
    std::vector<std::vector<TypeId>> members;

    ConfusionTable() = default;
    ConfusionTable(const ParameterSet& params, const DerivedStructure& derived, double d) : delta(d) {
        members.reserve(params.num_types());
        for (TypeId x = 0; x < params.num_types(); ++x) members.push_back(confusion_set(params, derived, x, d));
    }

    bool empty(TypeId x) const { return members.at(x).empty(); }
};

enum class Condition { C1, C2, C3 };

struct ConditionVerdict {
    Condition tag = Condition::C3;
    std::optional<TypeId> matched_type;

    friend bool operator==(const ConditionVerdict&, const ConditionVerdict&) = default;
};

inline const char* to_string(Condition c) {
    switch (c) {
        case Condition::C1: return "C1";
        case Condition::C2: return "C2";
        case Condition::C3: return "C3";
    }
    return "?";
}

/// Lowest type whose row lies within the open radius-epsilon neighbourhood of
/// the empirical vector on every arm.
inline std::optional<TypeId> match_type(const ParameterSet& params, std::span<const double> empirical,
                                        double epsilon) {
    if (empirical.size() != params.num_arms()) {
        throw std::invalid_argument("empirical vector has " + std::to_string(empirical.size()) +
                                    " entries, expected " + std::to_string(params.num_arms()));
    }
    for (TypeId x = 0; x < params.num_types(); ++x) {
        const auto r = params.row(x);
        bool inside = true;
        for (std::size_t a = 0; a < r.size(); ++a) {
            if (!(std::abs(empirical[a] - r[a]) < epsilon)) {
                inside = false;
                break;
            }
        }
        if (inside) return x;
    }
    return std::nullopt;
}

/// Classification against an explicit confusion table and radius.
inline ConditionVerdict classify_condition(const ParameterSet& params, const ConfusionTable& table,
                                           double epsilon, std::span<const double> empirical) {
    const auto x = match_type(params, empirical, epsilon);
    if (!x) return {Condition::C3, std::nullopt};
    return {table.empty(*x) ? Condition::C1 : Condition::C2, x};
}

/// Classification with the exact sets B(x) and the derived radius.
inline ConditionVerdict classify_condition(const DerivedStructure& derived, const ParameterSet& params,
                                           std::span<const double> empirical) {
    return classify_condition(params, ConfusionTable(params, derived, 0.0), derived.epsilon_star, empirical);
}

/// KL divergence between Bernoulli(p) and Bernoulli(q), natural log. Returns
/// +infinity when q sits on the boundary and differs from p.
inline double bernoulli_kl(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("bernoulli_kl arguments must lie in [0,1]");
    }
    if (p == q) return 0.0;
    if (q == 0.0 || q == 1.0) return std::numeric_limits<double>::infinity();
    double kl = 0.0;
    if (p > 0.0) kl += p * std::log(p / q);
    if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    return std::max(kl, 0.0);
}

}  // namespace clubandit
