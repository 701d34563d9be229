#ifndef MMS_CHAINS_HPP
#define MMS_CHAINS_HPP

#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mms/enumerate.hpp"
#include "mms/instance.hpp"
#include "mms/rng.hpp"

namespace mms {

enum class Algorithm { rejection, simple, reduced, hybrid, truncated_simple };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::rejection: return "rejection";
        case Algorithm::simple: return "simple";
        case Algorithm::reduced: return "reduced";
        case Algorithm::hybrid: return "hybrid";
        case Algorithm::truncated_simple: return "truncated_simple";
    }
    return "?";
}

inline Algorithm algorithm_from_name(const std::string& s) {
    if (s == "rejection") return Algorithm::rejection;
    if (s == "simple") return Algorithm::simple;
    if (s == "reduced") return Algorithm::reduced;
    if (s == "hybrid") return Algorithm::hybrid;
    if (s == "truncated_simple") return Algorithm::truncated_simple;
    throw ValidationError("unknown algorithm: " + s);
}

struct ChainConfig {
    Algorithm algorithm = Algorithm::hybrid;
    double gamma = 0.8;       // inverse temperature (simple / truncated)
    int k = 3;                // swap size (reduced / hybrid)
    long long t = 100'000;    // MCMC iterations
    long long top_n = 5000;   // enumeration size for the hybrid start set
    long long omega = 0;      // residual threshold (truncated variant)
    uint64_t seed = 0;
    long long max_restarts = 0;  // 0: algorithm default (1e6 rejection, 1e3 simple)
};

constexpr long long kDefaultRejectionRestarts = 1'000'000;
constexpr long long kDefaultSimpleRestarts = 1'000;

inline void validate_config(const ChainConfig& cfg) {
    if (cfg.k < 2) throw ValidationError("chain config: k must be >= 2");
    if (cfg.t < 0) throw ValidationError("chain config: t must be >= 0");
    if (cfg.top_n < 1) throw ValidationError("chain config: top_n must be >= 1");
    if (cfg.omega < 0) throw ValidationError("chain config: omega must be >= 0");
    if (!std::isfinite(cfg.gamma)) throw ValidationError("chain config: gamma must be finite");
    if (cfg.max_restarts < 0) throw ValidationError("chain config: max_restarts must be >= 0");
}

struct SampleReport {
    Solution solution;
    long long iterations_used = 0;
    long long restarts = 0;
    bool accepted = false;
    bool exact_enumeration = false;  // hybrid only: |X| < N, no MCMC ran
    std::optional<Solution> start_state;
    uint64_t rng_seed = 0;
};

namespace detail {

/// Columns that fit under the target on their own; the only coordinates the
/// single-site chain ever resamples.
inline std::vector<int> eligible_columns(const Instance& inst) {
    std::vector<int> out;
    for (int i = 0; i < inst.num_types; ++i)
        if (leq_elementwise(inst.columns[i], inst.target)) out.push_back(i);
    return out;
}

inline int gumbel_pick(const std::vector<double>& log_weights, SplitMix64& rng) {
    int best = -1;
    double best_key = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < log_weights.size(); ++i) {
        if (log_weights[i] == -std::numeric_limits<double>::infinity()) continue;
        double key = log_weights[i] + rng.next_gumbel();
        if (key > best_key) {
            best_key = key;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) throw Error("gumbel_pick: all weights are zero");
    return best;
}

}  // namespace detail

/// One lazy Gibbs move on the feasible set Y: pick an eligible coordinate i,
/// zero it out, and redraw its multiplicity g proportional to
/// f(x_{i<-g}) * exp(-gamma * ||V x_{i<-g} - c||_1) over the feasible range.
/// With omega >= 0 the proposal set is additionally truncated to residual
/// L1 at most omega. Stays put with probability 1/2.
inline Solution simple_chain_step(const Instance& inst, double gamma, const Solution& x,
                                  SplitMix64& rng, const std::vector<int>& eligible,
                                  long long omega = -1) {
    if (rng.next_double() < 0.5) return x;
    if (eligible.empty()) return x;
    int i = eligible[rng.next_below(eligible.size())];
    const Vec& col = inst.columns[i];

    // Residual with coordinate i zeroed.
    Vec r = residual(inst, x);
    for (int j = 0; j < inst.dim; ++j) r[j] += x[i] * col[j];
    long long r_l1 = l1_norm(r), col_mass = sum(col);
    int g_max = std::numeric_limits<int>::max();
    for (int j = 0; j < inst.dim; ++j)
        if (col[j] > 0) g_max = std::min<long long>(g_max, r[j] / col[j]);

    long long base_total = sum(x) - x[i];
    double log_p = std::log(inst.probs[i]);
    std::vector<double> lw(g_max + 1);
    for (int g = 0; g <= g_max; ++g) {
        long long penalty = r_l1 - g * col_mass;  // ||V x_{i<-g} - c||_1
        if (omega >= 0 && penalty > omega) {
            lw[g] = -std::numeric_limits<double>::infinity();
            continue;
        }
        double w = -gamma * static_cast<double>(penalty);
        if (!inst.uniform_target) {
            // f up to factors constant in g; constants cancel in the softmax.
            w += std::lgamma(static_cast<double>(base_total + g) + 1.0) -
                 std::lgamma(static_cast<double>(g) + 1.0) + g * log_p;
        }
        lw[g] = w;
    }
    Solution next = x;
    next[i] = detail::gumbel_pick(lw, rng);
    return next;
}

inline Solution simple_chain_step(const Instance& inst, double gamma, const Solution& x,
                                  SplitMix64& rng) {
    return simple_chain_step(inst, gamma, x, rng, detail::eligible_columns(inst));
}

/// Simple-chain step restricted to Y_omega = {x in Y : ||Vx - c||_1 <= omega}.
inline Solution truncated_simple_step(const Instance& inst, double gamma, long long omega,
                                      const Solution& x, SplitMix64& rng,
                                      const std::vector<int>& eligible) {
    return simple_chain_step(inst, gamma, x, rng, eligible, omega);
}

inline Solution truncated_simple_step(const Instance& inst, double gamma, long long omega,
                                      const Solution& x, SplitMix64& rng) {
    return truncated_simple_step(inst, gamma, omega, x, rng, detail::eligible_columns(inst));
}

/// One lazy move of the k-swap chain on X: draw an unordered k-sub-multiset
/// z of x by positions (uniform over the C(m, k) draws), keep it with
/// probability 1 / prod_i C(x[i], z[i]) so every distinct z is processed
/// with probability 1 / C(m, k), then jump to x - z + z' with z' drawn from
/// the replacement class Z(z) proportional to f. Output is always exact.
/// When ||x||_1 < k the step is a no-op.
inline Solution reduced_chain_step(const Instance& inst, int k, const Solution& x,
                                   SplitMix64& rng, SwapCache& cache) {
    long long m = sum(x);
    if (m < k) return x;
    if (rng.next_double() < 0.5) return x;

    // Positional draw without replacement, then collapse to type counts.
    std::vector<int> items;
    items.reserve(m);
    for (int i = 0; i < inst.num_types; ++i)
        for (int c = 0; c < x[i]; ++c) items.push_back(i);
    Solution z(inst.num_types, 0);
    for (int pick = 0; pick < k; ++pick) {
        size_t idx = pick + rng.next_below(items.size() - pick);
        std::swap(items[pick], items[idx]);
        ++z[items[pick]];
    }

    // Multiplicity correction: continue with probability 1/prod C(x[i], z[i]).
    double log_ways = 0.0;
    for (int i = 0; i < inst.num_types; ++i)
        if (z[i] > 0)
            log_ways += std::lgamma(x[i] + 1.0) - std::lgamma(z[i] + 1.0) -
                        std::lgamma(x[i] - z[i] + 1.0);
    if (log_ways > 0.0 && rng.next_double() >= std::exp(-log_ways)) return x;

    const std::vector<Solution>& repl = cache.replacements(z);
    if (repl.size() == 1) return x;
    Solution base = x;
    for (int i = 0; i < inst.num_types; ++i) base[i] -= z[i];
    std::vector<double> lw(repl.size());
    std::vector<Solution> candidates(repl.size());
    for (size_t a = 0; a < repl.size(); ++a) {
        Solution cand = base;
        for (int i = 0; i < inst.num_types; ++i) cand[i] += repl[a][i];
        lw[a] = log_f(inst, cand).value;
        candidates[a] = std::move(cand);
    }
    return candidates[detail::gumbel_pick(lw, rng)];
}

/// Draw households i.i.d. from the base distribution, abandoning a round as
/// soon as the running sum overshoots the target and accepting on an exact
/// match. Samples exactly from the generative posterior.
inline SampleReport rejection_sample(const Instance& inst, const ChainConfig& cfg) {
    validate_config(cfg);
    SplitMix64 rng(cfg.seed);
    long long max_rounds =
        cfg.max_restarts > 0 ? cfg.max_restarts : kDefaultRejectionRestarts;
    // Cumulative distribution for inverse-CDF draws.
    std::vector<double> cum(inst.num_types);
    double acc = 0.0;
    for (int i = 0; i < inst.num_types; ++i) {
        acc += inst.probs[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;

    SampleReport report;
    report.rng_seed = cfg.seed;
    for (long long round = 0; round < max_rounds; ++round) {
        Solution x(inst.num_types, 0);
        Vec total(inst.dim, 0);
        bool overshoot = false;
        while (!overshoot) {
            if (total == inst.target) {
                report.solution = x;
                report.accepted = true;
                report.restarts = round;
                return report;
            }
            double u = rng.next_double();
            int i = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
            if (i >= inst.num_types) i = inst.num_types - 1;
            ++x[i];
            ++report.iterations_used;
            const Vec& col = inst.columns[i];
            for (int j = 0; j < inst.dim; ++j) {
                total[j] += col[j];
                if (total[j] > inst.target[j]) overshoot = true;
            }
        }
    }
    throw SamplingError("rejection sampling: no acceptance within " +
                        std::to_string(max_rounds) + " rounds");
}

/// Rejection wrapper around the simple chain: start at the empty solution,
/// run t steps, accept iff the endpoint is exact.
inline SampleReport simple_chain_sample(const Instance& inst, const ChainConfig& cfg) {
    validate_config(cfg);
    if (cfg.t < 1 && inst.household_count() != 0)
        throw ValidationError("simple_chain_sample: t must be >= 1");
    SplitMix64 rng(cfg.seed);
    long long max_rounds = cfg.max_restarts > 0 ? cfg.max_restarts : kDefaultSimpleRestarts;
    std::vector<int> eligible = detail::eligible_columns(inst);
    long long omega = cfg.algorithm == Algorithm::truncated_simple ? cfg.omega : -1;

    SampleReport report;
    report.rng_seed = cfg.seed;
    report.start_state = Solution(inst.num_types, 0);
    for (long long round = 0; round < max_rounds; ++round) {
        Solution x(inst.num_types, 0);
        for (long long step = 0; step < cfg.t; ++step)
            x = simple_chain_step(inst, cfg.gamma, x, rng, eligible, omega);
        report.iterations_used += cfg.t;
        if (is_exact(inst, x)) {
            report.solution = x;
            report.accepted = true;
            report.restarts = round;
            return report;
        }
    }
    throw SamplingError("simple chain: no exact sample within " + std::to_string(max_rounds) +
                        " restarts of " + std::to_string(cfg.t) + " steps");
}

/// Run the reduced chain for t steps from an exact start state. The walk
/// never leaves X, so the result is always accepted.
inline SampleReport reduced_chain_sample(const Instance& inst, const ChainConfig& cfg,
                                         const Solution& x0, SwapCache& cache) {
    validate_config(cfg);
    if (!is_exact(inst, x0))
        throw ValidationError("reduced_chain_sample: start state is not exact");
    if (sum(x0) < cfg.k && cfg.t > 0)
        std::cerr << "mms: reduced chain with k=" << cfg.k << " > m=" << sum(x0)
                  << "; every step is a no-op\n";
    SplitMix64 rng(cfg.seed);
    Solution x = x0;
    for (long long step = 0; step < cfg.t; ++step)
        x = reduced_chain_step(inst, cfg.k, x, rng, cache);
    SampleReport report;
    report.solution = std::move(x);
    report.iterations_used = cfg.t;
    report.accepted = true;
    report.start_state = x0;
    report.rng_seed = cfg.seed;
    return report;
}

inline SampleReport reduced_chain_sample(const Instance& inst, const ChainConfig& cfg,
                                         const Solution& x0) {
    SwapCache cache(inst);
    return reduced_chain_sample(inst, cfg, x0, cache);
}

/// Enumerate the top-N solutions by linear score, draw a start state from
/// the posterior restricted to that set, and either return it directly
/// (when the enumeration provably covered all of X) or refine it with t
/// reduced-chain steps.
inline SampleReport hybrid_sample(const Instance& inst, const ChainConfig& cfg,
                                  SwapCache& cache) {
    validate_config(cfg);
    SolutionSet top = enumerate_top_n(inst, cfg.top_n);
    if (top.solutions.empty())
        throw SamplingError("hybrid_sample: instance has no exact solutions");
    SplitMix64 rng(cfg.seed);
    std::vector<double> lw(top.solutions.size());
    for (size_t i = 0; i < top.solutions.size(); ++i)
        lw[i] = log_f(inst, top.solutions[i]).value;
    Solution x0 = top.solutions[detail::gumbel_pick(lw, rng)];

    if (top.complete) {
        SampleReport report;
        report.solution = x0;
        report.start_state = x0;
        report.accepted = true;
        report.exact_enumeration = true;
        report.rng_seed = cfg.seed;
        return report;
    }
    ChainConfig mcmc = cfg;
    mcmc.seed = SplitMix64(cfg.seed ^ 0x5bd1e995u).next_u64();
    return reduced_chain_sample(inst, mcmc, x0, cache);
}

inline SampleReport hybrid_sample(const Instance& inst, const ChainConfig& cfg) {
    SwapCache cache(inst);
    return hybrid_sample(inst, cfg, cache);
}

/// Dispatch on cfg.algorithm. The reduced chain starts from the top-1
/// solution by linear score.
inline SampleReport draw_sample(const Instance& inst, const ChainConfig& cfg, SwapCache& cache) {
    switch (cfg.algorithm) {
        case Algorithm::rejection: return rejection_sample(inst, cfg);
        case Algorithm::simple:
        case Algorithm::truncated_simple: return simple_chain_sample(inst, cfg);
        case Algorithm::reduced: {
            SolutionSet top = enumerate_top_n(inst, 1);
            if (top.solutions.empty())
                throw SamplingError("reduced chain: instance has no exact solutions");
            return reduced_chain_sample(inst, cfg, top.solutions[0], cache);
        }
        case Algorithm::hybrid: return hybrid_sample(inst, cfg, cache);
    }
    throw Error("draw_sample: unreachable");
}

}  // namespace mms

#endif  // MMS_CHAINS_HPP
