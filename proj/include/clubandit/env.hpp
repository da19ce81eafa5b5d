#pragma once

// The simulated world: sequential user sessions, Bernoulli rewards and
// pseudo-regret accounting against the type-aware oracle.

#include <clubandit/core.hpp>
#include <clubandit/rng.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clubandit {

using UserId = std::uint64_t;

struct ArrivalConfig {
    std::size_t num_users = 1;
    std::size_t tau = 1;  // session length in slots
    std::vector<double> type_probs;

    void validate() const {
        if (num_users == 0) throw std::invalid_argument("num_users must be >= 1");
        if (tau == 0) throw std::invalid_argument("tau must be >= 1");
        if (type_probs.empty()) throw std::invalid_argument("type_probs must not be empty");
        double total = 0.0;
        for (const double p : type_probs) {
            if (!(p >= 0.0)) throw std::invalid_argument("type probabilities must be non-negative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("type probabilities must sum to 1");
    }

    std::uint64_t horizon() const noexcept { return static_cast<std::uint64_t>(num_users) * tau; }
};

/// One user facing the known parameter set for `horizon` slots.
inline ArrivalConfig single_user(std::vector<double> type_distribution, std::size_t horizon) {
    return ArrivalConfig{1, horizon, std::move(type_distribution)};
}

struct Arrival {
    std::uint64_t slot = 0;  // 1-based
    UserId user = 0;
    TypeId true_type = 0;
    bool first_visit = false;
};

template <std::uniform_random_bit_generator G>
TypeId draw_type(G& rng, const std::vector<double>& probs) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t x = 0; x < probs.size(); ++x) {
        acc += probs[x];
        if (u < acc) return x;
    }
    // Rounding left u above the cumulative total: last type with mass.
    for (std::size_t x = probs.size(); x-- > 0;) {
        if (probs[x] > 0.0) return x;
    }
    return 0;
}

/// User u occupies slots [u*tau + 1, (u+1)*tau]; types are i.i.d. from
/// type_probs using stream "types" of `seed`.
inline std::vector<Arrival> generate_arrivals(const ArrivalConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng = make_rng(seed, "types");
    std::vector<Arrival> out;
    out.reserve(config.horizon());
    std::uint64_t slot = 1;
    for (UserId u = 0; u < config.num_users; ++u) {
        const TypeId x = draw_type(rng, config.type_probs);
        for (std::size_t s = 0; s < config.tau; ++s) out.push_back({slot++, u, x, s == 0});
    }
    return out;
}

template <std::uniform_random_bit_generator G>
int sample_reward(const ParameterSet& params, TypeId x, Arm a, G& rng) {
    return bernoulli(rng, params(x, a));
}

/// A decision maker driven by the run loop. select() sees the arrival
/// (including the true type, which only type-aware baselines may read);
/// update() receives the reward of the arm it just chose.
class Algorithm {
public:
    virtual ~Algorithm() = default;
    virtual std::string_view name() const = 0;
    virtual Arm select(const Arrival& arrival) = 0;
    virtual void update(const Arrival& arrival, Arm arm, int reward) = 0;
};

struct StepRecord {
    std::uint64_t t = 0;
    UserId user = 0;
    TypeId true_type = 0;
    Arm arm = 0;
    int reward = 0;
    double regret_increment = 0.0;
};

struct Checkpoint {
    std::uint64_t t = 0;
    double cumulative_regret = 0.0;
};

struct TraceOptions {
    std::uint64_t checkpoint_every = 100;
    bool full_trace = false;
};

struct RunTrace {
    std::vector<StepRecord> records;      // filled when full_trace is set
    std::vector<Checkpoint> checkpoints;  // every checkpoint_every slots, plus the last slot
    double cumulative_regret = 0.0;
};

/// Drives select/update over the arrival sequence. Rewards come from stream
/// "rewards" of `seed`; regret is the pseudo-regret against true means.
inline RunTrace run_experiment(const ParameterSet& params, const std::vector<Arrival>& arrivals, Algorithm& algorithm,
                               std::uint64_t seed, TraceOptions options = {}) {
    if (options.checkpoint_every == 0) throw std::invalid_argument("checkpoint_every must be >= 1");
    const DerivedStructure derived = derive_structure(params);
    Rng rng = make_rng(seed, "rewards");

    RunTrace trace;
    if (options.full_trace) trace.records.reserve(arrivals.size());
    trace.checkpoints.reserve(arrivals.size() / options.checkpoint_every + 1);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        const Arrival& arr = arrivals[i];
        if (arr.true_type >= params.num_types()) throw std::out_of_range("arrival has an unknown type");
        const Arm arm = algorithm.select(arr);
        if (arm >= params.num_arms()) {
            throw std::logic_error(std::string(algorithm.name()) + " selected arm " + std::to_string(arm) +
                                   " out of range");
        }
        const int reward = sample_reward(params, arr.true_type, arm, rng);
        algorithm.update(arr, arm, reward);

        const double inc = derived.gaps(arr.true_type, arm);
        cumulative += inc;
        const std::uint64_t t = i + 1;
        if (options.full_trace) trace.records.push_back({t, arr.user, arr.true_type, arm, reward, inc});
        if (t % options.checkpoint_every == 0 || t == arrivals.size()) trace.checkpoints.push_back({t, cumulative});
    }
    trace.cumulative_regret = cumulative;
    return trace;
}

}  // namespace clubandit
