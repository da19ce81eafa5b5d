#pragma once

// Single-learner arm selection: UCB (optionally on an arm subset) and the
// known-types policy family. One KtPolicy covers exact confusion sets
// (delta = 0), widened sets (delta > 0) and estimated parameter sets.

#include <clubandit/core.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clubandit {

/// Pull counts and empirical means of one learner.
struct ArmStats {
    std::uint64_t t = 0;
    std::vector<std::uint64_t> counts;
    std::vector<double> sums;
    std::vector<double> means;

    ArmStats() = default;
    explicit ArmStats(std::size_t num_arms) : counts(num_arms, 0), sums(num_arms, 0.0), means(num_arms, 0.0) {}

    std::size_t num_arms() const noexcept { return counts.size(); }

    void record(Arm arm, int reward) {
        if (arm >= counts.size()) throw std::out_of_range("arm " + std::to_string(arm) + " out of range");
        if (reward != 0 && reward != 1) throw std::invalid_argument("Bernoulli reward must be 0 or 1");
        ++t;
        ++counts[arm];
        sums[arm] += reward;
        means[arm] = sums[arm] / static_cast<double>(counts[arm]);
    }

    /// Component-wise pooling of another learner's record.
    ArmStats& operator+=(const ArmStats& other) {
        if (other.num_arms() != num_arms()) throw std::invalid_argument("pooling stats of different arm counts");
        t += other.t;
        for (std::size_t a = 0; a < counts.size(); ++a) {
            counts[a] += other.counts[a];
            sums[a] += other.sums[a];
            means[a] = counts[a] ? sums[a] / static_cast<double>(counts[a]) : 0.0;
        }
        return *this;
    }

    ArmStats& operator-=(const ArmStats& other) {
        if (other.num_arms() != num_arms()) throw std::invalid_argument("unpooling stats of different arm counts");
        t -= other.t;
        for (std::size_t a = 0; a < counts.size(); ++a) {
            counts[a] -= other.counts[a];
            sums[a] -= other.sums[a];
            means[a] = counts[a] ? sums[a] / static_cast<double>(counts[a]) : 0.0;
        }
        return *this;
    }

    bool all_pulled() const noexcept {
        for (const auto c : counts) {
            if (c == 0) return false;
        }
        return true;
    }
};

inline ArmStats record(ArmStats stats, Arm arm, int reward) {
    stats.record(arm, reward);
    return stats;
}

/// mean + sqrt(2 ln t / count).
inline double ucb_index(double mean, std::uint64_t count, std::uint64_t t) {
    if (count == 0) throw std::domain_error("UCB index of an unpulled arm");
    if (t == 0) throw std::domain_error("UCB index at t = 0");
    return mean + std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(count));
}

/// Argmax of the UCB index over `subset`, ties to the lowest arm. The time
/// index is the learner's own step count.
inline Arm ucb_select(const ArmStats& stats, std::span<const Arm> subset) {
    if (subset.empty()) throw std::invalid_argument("UCB over an empty arm subset");
    Arm best = subset.front();
    double best_index = -std::numeric_limits<double>::infinity();
    bool first = true;
    for (const Arm a : subset) {
        if (a >= stats.num_arms()) throw std::out_of_range("arm " + std::to_string(a) + " out of range");
        const double idx = ucb_index(stats.means[a], stats.counts[a], stats.t);
        if (first || idx > best_index || (idx == best_index && a < best)) {
            best = a;
            best_index = idx;
            first = false;
        }
    }
    return best;
}

/// Plain UCB over all arms with the standard initialisation: the lowest
/// unpulled arm first, then the index rule.
inline Arm ucb_step(const ArmStats& stats) {
    for (Arm a = 0; a < stats.num_arms(); ++a) {
        if (stats.counts[a] == 0) return a;
    }
    Arm best = 0;
    double best_index = -std::numeric_limits<double>::infinity();
    for (Arm a = 0; a < stats.num_arms(); ++a) {
        const double idx = ucb_index(stats.means[a], stats.counts[a], stats.t);
        if (idx > best_index) {
            best = a;
            best_index = idx;
        }
    }
    return best;
}

/// UCB restricted to `subset`, sweeping its unpulled arms first.
inline Arm ucb_step(const ArmStats& stats, std::span<const Arm> subset) {
    for (const Arm a : subset) {
        if (stats.counts.at(a) == 0) return a;
    }
    return ucb_select(stats, subset);
}

struct KtPolicyConfig {
    ParameterSet reference_params;
    double delta = 0.0;
    /// Derived from reference_params when absent.
    std::optional<double> epsilon_star;
};

enum class KtBranch { sweep, exploit, elite_ucb, round_robin };

struct KtDecision {
    Arm arm = 0;
    KtBranch branch = KtBranch::sweep;
    ConditionVerdict verdict;
};

/// Precomputed state of the known-types policy: reference parameters, their
/// derived structure, the confusion table at `delta` and the radius used for
/// the neighbourhood test.
class KtPolicy {
public:
    explicit KtPolicy(KtPolicyConfig config, TieRule ties = TieRule::reject)
        : params_(std::move(config.reference_params)),
          derived_(derive_structure(params_, ties)),
          delta_(config.delta),
          epsilon_(config.epsilon_star.value_or(derived_.epsilon_star)),
          table_(params_, derived_, config.delta) {
        if (!(delta_ >= 0.0)) throw std::invalid_argument("delta must be non-negative");
        if (!(epsilon_ > 0.0)) throw std::invalid_argument("epsilon_star must be positive");
    }

    /// Policy over an estimated parameter set: ties in the estimated rows
    /// resolve to the lowest arm, and the radius is the estimated set's own
    /// separation radius floored at delta.
    static KtPolicy estimated(ParameterSet estimate, double delta) {
        const double eps = std::max(separation_radius(estimate.means()), delta);
        return KtPolicy(KtPolicyConfig{std::move(estimate), delta, eps}, TieRule::lowest_index);
    }

    const ParameterSet& params() const noexcept { return params_; }
    const DerivedStructure& derived() const noexcept { return derived_; }
    const ConfusionTable& confusion() const noexcept { return table_; }
    double delta() const noexcept { return delta_; }
    double epsilon_star() const noexcept { return epsilon_; }

    KtDecision decide(const ArmStats& stats) const {
        const std::size_t k = params_.num_arms();
        if (stats.num_arms() != k) throw std::invalid_argument("stats and reference parameters disagree on K");
        if (stats.t < k) return {static_cast<Arm>(stats.t), KtBranch::sweep, {}};

        const ConditionVerdict v = classify_condition(params_, table_, epsilon_, stats.means);
        switch (v.tag) {
            case Condition::C1:
                return {derived_.best_arm[*v.matched_type], KtBranch::exploit, v};
            case Condition::C2:
                return {ucb_select(stats, derived_.elite), KtBranch::elite_ucb, v};
            case Condition::C3:
                break;
        }
        return {static_cast<Arm>(stats.t % k), KtBranch::round_robin, v};
    }

private:
    ParameterSet params_;
    DerivedStructure derived_;
    double delta_;
    double epsilon_;
    ConfusionTable table_;
};

inline Arm kt_select(const ArmStats& stats, const KtPolicy& policy) { return policy.decide(stats).arm; }

}  // namespace clubandit
