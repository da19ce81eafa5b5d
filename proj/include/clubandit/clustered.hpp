#pragma once

// Clustered-bandit orchestrators. Explore-cluster-exploit with uniform pilots
// (alg2) or UCB pilots (alg3), continuous clustering with per-cluster UCB
// (alg4), and the per-user UCB and UCB-on-types baselines.

#include <clubandit/clustering.hpp>
#include <clubandit/core.hpp>
#include <clubandit/env.hpp>
#include <clubandit/policies.hpp>
#include <clubandit/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace clubandit {

enum class ClusteredKind { unif_pilots, ucb_pilots, continuous };

struct ClusteredConfig {
    std::size_t num_types = 0;
    std::size_t num_arms = 0;
    std::size_t m0 = 0;         // pilot users (unif_pilots, ucb_pilots)
    double delta = 0.0;         // confusion-set tolerance of UCB-ET
    std::size_t m_th = 0;       // continuous: users needed before clustering; 0 selects num_types
    std::size_t recluster_every = 1;
    KMeansOptions kmeans{};

    void validate(ClusteredKind kind) const {
        if (num_types == 0 || num_arms == 0) throw std::invalid_argument("clustered config needs N >= 1 and K >= 1");
        if (kind != ClusteredKind::continuous) {
            if (m0 < num_types) throw std::invalid_argument("m0 must be at least the number of types");
            if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");
        } else {
            if (recluster_every == 0) throw std::invalid_argument("recluster_every must be >= 1");
            if (m_th != 0 && m_th < num_types) throw std::invalid_argument("m_th must be at least the number of types");
        }
    }

    std::size_t effective_m_th() const noexcept { return m_th == 0 ? num_types : m_th; }
};

struct UserRecord {
    UserId user_id = 0;
    ArmStats stats;
    bool is_pilot = false;
};

inline constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

class ClusteredState;
inline Arm alg2_step(ClusteredState& state, UserId user_id);
inline Arm alg3_step(ClusteredState& state, UserId user_id);
inline Arm alg4_step(ClusteredState& state, UserId user_id);
inline void reward_update(ClusteredState& state, UserId user_id, Arm arm, int reward);

class ClusteredState {
public:
    ClusteredState(ClusteredKind kind, ClusteredConfig config, std::uint64_t seed)
        : kind_(kind), config_(config), policy_rng_(make_rng(seed, "policy")), kmeans_seed_(derive_seed(seed, "kmeans")) {
        config_.validate(kind_);
    }

    ClusteredKind kind() const noexcept { return kind_; }
    const ClusteredConfig& config() const noexcept { return config_; }

    std::size_t num_users() const noexcept { return users_.size(); }
    const std::vector<UserId>& pilot_set() const noexcept { return pilots_; }
    const std::optional<ParameterSet>& estimated_params() const noexcept { return estimated_; }
    const std::optional<KtPolicy>& et_policy() const noexcept { return et_policy_; }
    std::uint64_t clusterings() const noexcept { return clusterings_; }
    bool warned_unclustered() const noexcept { return warned_; }

    const UserRecord& user(UserId id) const { return users_.at(index_of(id)); }
    bool knows(UserId id) const { return index_.contains(id); }

    /// Cluster of a user under the continuous scheme, if it has one.
    std::optional<std::size_t> cluster_of(UserId id) const {
        const std::size_t c = user_cluster_.at(index_of(id));
        return c == kUnassigned ? std::nullopt : std::optional<std::size_t>(c);
    }
    const std::vector<ArmStats>& cluster_stats() const noexcept { return cluster_stats_; }

    /// Global step count: sum of every user's pulls.
    std::uint64_t total_pulls() const noexcept {
        std::uint64_t s = 0;
        for (const auto& u : users_) s += u.stats.t;
        return s;
    }

private:
    friend Arm alg2_step(ClusteredState&, UserId);
    friend Arm alg3_step(ClusteredState&, UserId);
    friend Arm alg4_step(ClusteredState&, UserId);
    friend void reward_update(ClusteredState&, UserId, Arm, int);

    std::size_t index_of(UserId id) const {
        const auto it = index_.find(id);
        if (it == index_.end()) throw std::out_of_range("unknown user " + std::to_string(id));
        return it->second;
    }

    /// Registers a first arrival; pilots are admitted while the set has room.
    UserRecord& touch(UserId id) {
        if (const auto it = index_.find(id); it != index_.end()) return users_[it->second];
        UserRecord rec{id, ArmStats(config_.num_arms), false};
        if (kind_ != ClusteredKind::continuous && pilots_.size() < config_.m0) {
            rec.is_pilot = true;
            pilots_.push_back(id);
        }
        index_.emplace(id, users_.size());
        users_.push_back(std::move(rec));
        user_cluster_.push_back(kUnassigned);
        points_.append_row(users_.back().stats.means);
        return users_.back();
    }

    Arm uniform_arm() { return static_cast<Arm>(uniform_index(policy_rng_, config_.num_arms)); }

    Arm non_pilot_arm(const UserRecord& u) {
        if (et_policy_) return kt_select(u.stats, *et_policy_);
        if (!warned_) {
            std::clog << "warning: non-pilot user " << u.user_id
                      << " arrived before any clustering; playing a uniform arm\n";
            warned_ = true;
        }
        return uniform_arm();
    }

    void cluster_pilots() {
        Matrix pts(0, config_.num_arms);
        for (const UserId id : pilots_) pts.append_row(users_[index_of(id)].stats.means);
        const ClusterModel model =
            kmeans(pts, config_.num_types, derive_seed(kmeans_seed_, "pilots", clusterings_++), config_.kmeans);
        Matrix centers = model.centers;
        for (double& v : centers.data()) v = std::clamp(v, 0.0, 1.0);
        estimated_ = ParameterSet(std::move(centers));
        et_policy_ = KtPolicy::estimated(*estimated_, config_.delta);
    }

    void move_user(std::size_t idx, std::size_t to) {
        const std::size_t from = user_cluster_[idx];
        if (from == to) return;
        if (from != kUnassigned) cluster_stats_[from] -= users_[idx].stats;
        if (to != kUnassigned) cluster_stats_[to] += users_[idx].stats;
        user_cluster_[idx] = to;
    }

    /// Re-clusters every user. Warm-started Lloyd from the previous centers;
    /// whenever the user set has grown since the last seeded run, k-means++
    /// restarts compete with the warm start and the lower inertia wins.
    void recluster_all() {
        std::optional<ClusterModel> best;
        if (have_centers_) best = lloyd(points_, centers_, config_.kmeans.max_iters);
        if (!have_centers_ || users_.size() != users_at_seeding_) {
            ClusterModel fresh =
                kmeans(points_, config_.num_types, derive_seed(kmeans_seed_, "all", clusterings_), config_.kmeans);
            if (!best || fresh.inertia < best->inertia) best = std::move(fresh);
            users_at_seeding_ = users_.size();
        }
        ++clusterings_;
        if (cluster_stats_.empty()) cluster_stats_.assign(config_.num_types, ArmStats(config_.num_arms));
        for (std::size_t i = 0; i < users_.size(); ++i) move_user(i, best->assignment[i]);
        centers_ = std::move(best->centers);
        have_centers_ = true;
    }

    ClusteredKind kind_;
    ClusteredConfig config_;
    Rng policy_rng_;
    std::uint64_t kmeans_seed_;

    std::vector<UserRecord> users_;
    std::unordered_map<UserId, std::size_t> index_;
    std::vector<UserId> pilots_;
    std::optional<ParameterSet> estimated_;
    std::optional<KtPolicy> et_policy_;
    std::uint64_t clusterings_ = 0;
    bool warned_ = false;

    // Continuous clustering.
    Matrix points_;  // one row per user: empirical means, 0 for unpulled arms
    Matrix centers_;
    bool have_centers_ = false;
    std::size_t users_at_seeding_ = 0;
    std::vector<std::size_t> user_cluster_;
    std::vector<ArmStats> cluster_stats_;
    std::size_t steps_since_recluster_ = 0;
};

/// Uniform pilots, then UCB-ET(delta) for everyone else.
inline Arm alg2_step(ClusteredState& state, UserId user_id) {
    if (state.kind_ != ClusteredKind::unif_pilots) throw std::logic_error("alg2_step on a state of another kind");
    UserRecord& u = state.touch(user_id);
    if (u.is_pilot) return state.uniform_arm();
    return state.non_pilot_arm(u);
}

/// UCB pilots, then UCB-ET(delta) for everyone else.
inline Arm alg3_step(ClusteredState& state, UserId user_id) {
    if (state.kind_ != ClusteredKind::ucb_pilots) throw std::logic_error("alg3_step on a state of another kind");
    UserRecord& u = state.touch(user_id);
    if (u.is_pilot) return ucb_step(u.stats);
    return state.non_pilot_arm(u);
}

/// Per-user UCB until m_th users exist; afterwards every user set is
/// re-clustered (every recluster_every steps) and the current user plays one
/// UCB step on the pooled record of its cluster.
inline Arm alg4_step(ClusteredState& state, UserId user_id) {
    if (state.kind_ != ClusteredKind::continuous) throw std::logic_error("alg4_step on a state of another kind");
    UserRecord& u = state.touch(user_id);
    const std::size_t idx = state.index_of(user_id);
    if (state.users_.size() < state.config_.effective_m_th()) return ucb_step(u.stats);

    if (!state.have_centers_ || state.steps_since_recluster_ >= state.config_.recluster_every) {
        state.recluster_all();
        state.steps_since_recluster_ = 0;
    } else if (state.user_cluster_[idx] == kUnassigned) {
        double d = 0.0;
        state.move_user(idx, detail::nearest_center(state.points_.row(idx), state.centers_, d));
    }
    ++state.steps_since_recluster_;
    return ucb_step(state.cluster_stats_[state.user_cluster_[idx]]);
}

/// Records the reward of the arm the matching step returned. Under the pilot
/// schemes, a reward to a pilot once the pilot set is full re-runs the
/// clustering and refreshes the estimated parameters.
inline void reward_update(ClusteredState& state, UserId user_id, Arm arm, int reward) {
    const std::size_t idx = state.index_of(user_id);
    UserRecord& u = state.users_[idx];
    u.stats.record(arm, reward);
    state.points_(idx, arm) = u.stats.means[arm];

    if (state.kind_ == ClusteredKind::continuous) {
        if (const std::size_t c = state.user_cluster_[idx]; c != kUnassigned) state.cluster_stats_[c].record(arm, reward);
        return;
    }
    if (state.pilots_.size() >= state.config_.m0 && u.is_pilot) state.cluster_pilots();
}

/// Per-type pooled UCB for the baseline that is told every user's type.
struct TypePools {
    std::vector<ArmStats> per_type;
    std::unordered_map<UserId, TypeId> known_types;

    TypePools(std::size_t num_types, std::size_t num_arms) : per_type(num_types, ArmStats(num_arms)) {}

    TypeId type_of(UserId id) const {
        const auto it = known_types.find(id);
        if (it == known_types.end()) throw std::out_of_range("type of user " + std::to_string(id) + " is not known");
        return it->second;
    }
};

inline Arm ucb_on_types_step(const TypePools& pools, UserId user_id) {
    return ucb_step(pools.per_type.at(pools.type_of(user_id)));
}

inline void ucb_on_types_update(TypePools& pools, UserId user_id, Arm arm, int reward) {
    pools.per_type.at(pools.type_of(user_id)).record(arm, reward);
}

}  // namespace clubandit
