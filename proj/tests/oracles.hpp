#pragma once

// Independent reference implementations used only by the tests. They follow
// the textbook definitions literally, 1-indexed where the pseudo-code is.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline int argmax_1(const std::vector<double>& row) {
    int best = 1;
    for (int a = 1; a <= static_cast<int>(row.size()); ++a) {
        if (row[a - 1] > row[best - 1]) best = a;
    }
    return best;
}

inline double eps_star(const Rows& th) {
    std::set<double> vals;
    for (const auto& r : th) vals.insert(r.begin(), r.end());
    if (vals.size() < 2) return 1.0;
    double gap = 1e300;
    double prev = *vals.begin();
    for (auto it = std::next(vals.begin()); it != vals.end(); ++it) {
        gap = std::min(gap, *it - prev);
        prev = *it;
    }
    return gap / 2;
}

/// {z : theta_z(a*_x) = theta_x(a*_x), a*_z != a*_x}, 0-based type indices.
inline std::vector<int> B(const Rows& th, int x) {
    std::vector<int> out;
    const int ax = argmax_1(th[x]);
    for (int z = 0; z < static_cast<int>(th.size()); ++z) {
        if (z == x) continue;
        if (th[z][ax - 1] == th[x][ax - 1] && argmax_1(th[z]) != ax) out.push_back(z);
    }
    return out;
}

/// Scan over (z, a', a) triples.
inline std::vector<int> B_delta(const Rows& th, int x, double delta) {
    std::vector<int> out;
    const int k = static_cast<int>(th[x].size());
    const double sup = *std::max_element(th[x].begin(), th[x].end());
    for (int z = 0; z < static_cast<int>(th.size()); ++z) {
        if (z == x) continue;
        bool in = false;
        for (int ap = 0; ap < k; ++ap) {
            for (int a = 0; a < k; ++a) {
                if (a == ap) continue;
                if (th[x][ap] >= sup - 2 * delta && std::fabs(th[z][ap] - th[x][ap]) <= 2 * delta &&
                    th[z][a] > th[z][ap] - 2 * delta) {
                    in = true;
                }
            }
        }
        if (in) out.push_back(z);
    }
    return out;
}

/// Line-by-line transcription of the known-types pseudo-code. Holds its own
/// 1-indexed counters; choose() returns a 1-based arm for slot t.
class Algorithm1 {
public:
    explicit Algorithm1(Rows theta) : th_(std::move(theta)), n_(static_cast<int>(th_.size())), k_(static_cast<int>(th_[0].size())) {
        eps_ = eps_star(th_);
        std::set<int> e;
        for (int x = 0; x < n_; ++x) e.insert(argmax_1(th_[x]));
        E_.assign(e.begin(), e.end());
        T_.assign(k_ + 1, 0);
        S_.assign(k_ + 1, 0.0);
    }

    int choose(int t) const {
        if (t <= k_) return t;
        for (int x = 0; x < n_; ++x) {
            bool nbd = true;
            for (int a = 1; a <= k_; ++a) {
                const double m = S_[a] / T_[a];
                if (!(th_[x][a - 1] - eps_ < m && m < th_[x][a - 1] + eps_)) nbd = false;
            }
            if (!nbd) continue;
            if (B(th_, x).empty()) return argmax_1(th_[x]);
            int best = E_.front();
            double best_val = -1e300;
            for (const int a : E_) {
                const double v = S_[a] / T_[a] + std::sqrt(2 * std::log(double(t - 1)) / T_[a]);
                if (v > best_val) {
                    best_val = v;
                    best = a;
                }
            }
            return best;
        }
        return ((t - 1) % k_) + 1;
    }

    void observe(int arm, int reward) {
        T_[arm] += 1;
        S_[arm] += reward;
    }

private:
    Rows th_;
    int n_, k_;
    double eps_;
    std::vector<int> E_;
    std::vector<int> T_;
    std::vector<double> S_;
};

inline double kl(double p, double q) {
    double v = 0;
    if (p > 0) v += p * std::log(p / q);
    if (p < 1) v += (1 - p) * std::log((1 - p) / (1 - q));
    return v;
}

/// min over a step-`h` simplex grid of max over B(x) of the cost ratio.
inline double eq1_grid(const Rows& th, int x, double h) {
    const int ax = argmax_1(th[x]) - 1;
    std::vector<int> arms;
    for (int a = 0; a < static_cast<int>(th[x].size()); ++a) {
        if (a != ax) arms.push_back(a);
    }
    const auto confusers = B(th, x);
    const int steps = static_cast<int>(std::lround(1.0 / h));
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> w(arms.size(), 0);
    const auto eval = [&] {
        double worst = 0;
        for (const int z : confusers) {
            double num = 0, den = 0;
            for (std::size_t j = 0; j < arms.size(); ++j) {
                const double al = w[j] * h;
                num += al * (th[x][ax] - th[x][arms[j]]);
                den += al * kl(th[x][arms[j]], th[z][arms[j]]);
            }
            worst = std::max(worst, den > 0 ? num / den : std::numeric_limits<double>::infinity());
        }
        best = std::min(best, worst);
    };
    if (arms.size() == 1) {
        w[0] = steps;
        eval();
    } else if (arms.size() == 2) {
        for (int i = 0; i <= steps; ++i) {
            w = {i, steps - i};
            eval();
        }
    } else {
        for (int i = 0; i <= steps; ++i) {
            for (int j = 0; i + j <= steps; ++j) {
                w = {i, j, steps - i - j};
                eval();
            }
        }
    }
    return best;
}

/// min over permutations p of max |centers[c] - truth[p[c]]|.
inline double match_dev(const Rows& centers, const Rows& truth) {
    std::vector<int> p(truth.size());
    std::iota(p.begin(), p.end(), 0);
    double best = 1e300;
    do {
        double worst = 0;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            for (std::size_t a = 0; a < truth[0].size(); ++a) worst = std::max(worst, std::fabs(centers[c][a] - truth[p[c]][a]));
        }
        best = std::min(best, worst);
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

/// Random N x K matrix on a grid of `step` inside [lo, hi], unique row optima.
inline Rows random_instance(std::mt19937_64& rng, int n, int k, double step, double lo = 0.0, double hi = 1.0) {
    const int cells = static_cast<int>(std::lround((hi - lo) / step));
    std::uniform_int_distribution<int> cell(0, cells);
    while (true) {
        Rows th(n, std::vector<double>(k));
        for (auto& r : th) {
            for (auto& v : r) v = std::round((lo + cell(rng) * step) * 1e6) / 1e6;
        }
        bool ok = true;
        for (const auto& r : th) {
            const double m = *std::max_element(r.begin(), r.end());
            if (std::count(r.begin(), r.end(), m) != 1) ok = false;
        }
        if (ok) return th;
    }
}

}  // namespace oracle
