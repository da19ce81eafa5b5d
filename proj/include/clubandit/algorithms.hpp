#pragma once

// Registry of named algorithms runnable by run_experiment.

#include <clubandit/clustered.hpp>
#include <clubandit/core.hpp>
#include <clubandit/env.hpp>
#include <clubandit/policies.hpp>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clubandit {

struct AlgorithmParams {
    std::optional<std::size_t> m0;
    std::optional<double> delta;
    std::optional<std::size_t> m_th;
    std::optional<std::size_t> recluster_every;
    std::optional<bool> elite_only;
    std::optional<Arm> arm;
};

struct AlgorithmSpec {
    std::string name;
    AlgorithmParams params;
    /// Label used in outputs; defaults to name.
    std::string label;

    const std::string& display_name() const noexcept { return label.empty() ? name : label; }
};

namespace names {
inline constexpr std::string_view oracle = "oracle";
inline constexpr std::string_view fixed_arm = "fixed-arm";
inline constexpr std::string_view ucb = "ucb";
inline constexpr std::string_view ucb_kt = "ucb-kt";
inline constexpr std::string_view unif_kmeans_ucb_et = "unif-kmeans-ucb-et";
inline constexpr std::string_view ucb_kmeans_ucb_et = "ucb-kmeans-ucb-et";
inline constexpr std::string_view kmeans_ucb_continuous = "kmeans-ucb-continuous";
inline constexpr std::string_view ucb_on_types = "ucb-on-types";
}  // namespace names

inline const std::vector<std::string_view>& registered_algorithms() {
    static const std::vector<std::string_view> all{names::oracle,
                                                   names::fixed_arm,
                                                   names::ucb,
                                                   names::ucb_kt,
                                                   names::unif_kmeans_ucb_et,
                                                   names::ucb_kmeans_ucb_et,
                                                   names::kmeans_ucb_continuous,
                                                   names::ucb_on_types};
    return all;
}

/// Throws std::invalid_argument naming the offending algorithm or parameter.
inline void validate_algorithm(const AlgorithmSpec& spec, const ParameterSet& truth) {
    const auto& p = spec.params;
    const auto need = [&](bool present, const char* what) {
        if (!present) throw std::invalid_argument("algorithm '" + spec.name + "' requires parameter '" + what + "'");
    };
    if (spec.name == names::oracle || spec.name == names::ucb || spec.name == names::ucb_on_types) return;
    if (spec.name == names::fixed_arm) {
        need(p.arm.has_value(), "arm");
        if (*p.arm >= truth.num_arms()) throw std::invalid_argument("fixed-arm: arm out of range");
        return;
    }
    if (spec.name == names::ucb_kt) {
        if (p.delta && !(*p.delta >= 0.0)) throw std::invalid_argument("ucb-kt: delta must be non-negative");
        return;
    }
    if (spec.name == names::unif_kmeans_ucb_et || spec.name == names::ucb_kmeans_ucb_et) {
        need(p.m0.has_value(), "m0");
        need(p.delta.has_value(), "delta");
        if (*p.m0 < truth.num_types()) throw std::invalid_argument(spec.name + ": m0 must be at least N");
        if (!(*p.delta >= 0.0)) throw std::invalid_argument(spec.name + ": delta must be non-negative");
        return;
    }
    if (spec.name == names::kmeans_ucb_continuous) {
        if (p.recluster_every && *p.recluster_every == 0) {
            throw std::invalid_argument("kmeans-ucb-continuous: recluster_every must be >= 1");
        }
        if (p.m_th && *p.m_th < truth.num_types()) {
            throw std::invalid_argument("kmeans-ucb-continuous: m_th must be at least N");
        }
        return;
    }
    throw std::invalid_argument("unknown algorithm '" + spec.name + "'");
}

namespace detail {

class OraclePolicy final : public Algorithm {
public:
    explicit OraclePolicy(const ParameterSet& truth) : derived_(derive_structure(truth)) {}
    std::string_view name() const override { return names::oracle; }
    Arm select(const Arrival& a) override { return derived_.best_arm.at(a.true_type); }
    void update(const Arrival&, Arm, int) override {}

private:
    DerivedStructure derived_;
};

class FixedArm final : public Algorithm {
public:
    explicit FixedArm(Arm arm) : arm_(arm) {}
    std::string_view name() const override { return names::fixed_arm; }
    Arm select(const Arrival&) override { return arm_; }
    void update(const Arrival&, Arm, int) override {}

private:
    Arm arm_;
};

/// Base for policies that keep one independent record per user.
class PerUserLearner : public Algorithm {
public:
    explicit PerUserLearner(std::size_t num_arms) : num_arms_(num_arms) {}
    void update(const Arrival& a, Arm arm, int reward) override { stats_for(a.user).record(arm, reward); }

protected:
    ArmStats& stats_for(UserId u) { return stats_.try_emplace(u, num_arms_).first->second; }

private:
    std::size_t num_arms_;
    std::unordered_map<UserId, ArmStats> stats_;
};

class PerUserUcb final : public PerUserLearner {
public:
    PerUserUcb(const ParameterSet& truth, bool elite_only) : PerUserLearner(truth.num_arms()) {
        if (elite_only) {
            arms_ = derive_structure(truth).elite;
        } else {
            for (Arm a = 0; a < truth.num_arms(); ++a) arms_.push_back(a);
        }
    }
    std::string_view name() const override { return names::ucb; }
    Arm select(const Arrival& a) override { return ucb_step(stats_for(a.user), arms_); }

private:
    std::vector<Arm> arms_;
};

class PerUserKt final : public PerUserLearner {
public:
    PerUserKt(const ParameterSet& truth, double delta)
        : PerUserLearner(truth.num_arms()), policy_(KtPolicyConfig{truth, delta, std::nullopt}) {}
    std::string_view name() const override { return names::ucb_kt; }
    Arm select(const Arrival& a) override { return kt_select(stats_for(a.user), policy_); }

private:
    KtPolicy policy_;
};

class ClusteredAdapter final : public Algorithm {
public:
    ClusteredAdapter(std::string_view name, ClusteredKind kind, ClusteredConfig config, std::uint64_t seed)
        : name_(name), state_(kind, config, seed) {}
    std::string_view name() const override { return name_; }
    Arm select(const Arrival& a) override {
        switch (state_.kind()) {
            case ClusteredKind::unif_pilots: return alg2_step(state_, a.user);
            case ClusteredKind::ucb_pilots: return alg3_step(state_, a.user);
            case ClusteredKind::continuous: return alg4_step(state_, a.user);
        }
        throw std::logic_error("unreachable");
    }
    void update(const Arrival& a, Arm arm, int reward) override { reward_update(state_, a.user, arm, reward); }
    const ClusteredState& state() const noexcept { return state_; }

private:
    std::string_view name_;
    ClusteredState state_;
};

class UcbOnTypes final : public Algorithm {
public:
    explicit UcbOnTypes(const ParameterSet& truth) : pools_(truth.num_types(), truth.num_arms()) {}
    std::string_view name() const override { return names::ucb_on_types; }
    Arm select(const Arrival& a) override {
        pools_.known_types.try_emplace(a.user, a.true_type);
        return ucb_on_types_step(pools_, a.user);
    }
    void update(const Arrival& a, Arm arm, int reward) override { ucb_on_types_update(pools_, a.user, arm, reward); }

private:
    TypePools pools_;
};

}  // namespace detail

/// Builds a fresh instance. Algorithm randomness (uniform pilots, k-means
/// seeding) derives from `seed`, independently of the reward stream.
inline std::unique_ptr<Algorithm> make_algorithm(const AlgorithmSpec& spec, const ParameterSet& truth,
                                                 std::uint64_t seed) {
    validate_algorithm(spec, truth);
    const auto& p = spec.params;
    if (spec.name == names::oracle) return std::make_unique<detail::OraclePolicy>(truth);
    if (spec.name == names::fixed_arm) return std::make_unique<detail::FixedArm>(*p.arm);
    if (spec.name == names::ucb) return std::make_unique<detail::PerUserUcb>(truth, p.elite_only.value_or(false));
    if (spec.name == names::ucb_kt) return std::make_unique<detail::PerUserKt>(truth, p.delta.value_or(0.0));
    if (spec.name == names::ucb_on_types) return std::make_unique<detail::UcbOnTypes>(truth);

    ClusteredConfig cfg;
    cfg.num_types = truth.num_types();
    cfg.num_arms = truth.num_arms();
    if (spec.name == names::unif_kmeans_ucb_et || spec.name == names::ucb_kmeans_ucb_et) {
        cfg.m0 = *p.m0;
        cfg.delta = *p.delta;
        const auto kind =
            spec.name == names::unif_kmeans_ucb_et ? ClusteredKind::unif_pilots : ClusteredKind::ucb_pilots;
        const auto name = spec.name == names::unif_kmeans_ucb_et ? names::unif_kmeans_ucb_et : names::ucb_kmeans_ucb_et;
        return std::make_unique<detail::ClusteredAdapter>(name, kind, cfg, seed);
    }
    cfg.m_th = p.m_th.value_or(0);
    cfg.recluster_every = p.recluster_every.value_or(1);
    return std::make_unique<detail::ClusteredAdapter>(names::kmeans_ucb_continuous, ClusteredKind::continuous, cfg,
                                                      seed);
}

}  // namespace clubandit
