#ifndef MMS_DIAGNOSTICS_HPP
#define MMS_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "mms/chains.hpp"
#include "mms/enumerate.hpp"
#include "mms/instance.hpp"

namespace mms {

constexpr long long kSimpleStateCap = 200'000;
constexpr long long kReducedStateCap = 50'000;
constexpr double kEpsilonConvention = 1.0 / (2.0 * 2.718281828459045235360287);  // 1/(2e)
constexpr double kDetailedBalanceTol = 1e-10;

enum class KernelKind { simple, reduced, truncated };

/// Explicit row-stochastic transition matrix over an enumerated state space:
/// Y (or Y_omega) for the single-site chain, X for the k-swap chain. States
/// are in ascending lexicographic order; log_target holds the unnormalized
/// log stationary weights the kernel was built against.
struct KernelMatrix {
    KernelKind kind = KernelKind::simple;
    double gamma = 0.0;
    int k = 0;
    long long omega = -1;
    std::vector<Solution> states;
    Eigen::MatrixXd rows;
    std::vector<double> log_target;
    std::vector<long long> residual_l1;  // per state; 0 marks members of X

    int index_of(const Solution& x) const {
        auto it = std::lower_bound(states.begin(), states.end(), x);
        if (it == states.end() || *it != x) throw Error("state not in kernel");
        return static_cast<int>(it - states.begin());
    }
};

struct SpectralReport {
    double lambda2 = 0.0;
    double tau_rel = 0.0;
    std::optional<double> p_star;   // stationary mass of X (simple/truncated)
    std::optional<double> n_lower;  // omitted when disconnected
    std::optional<double> n_upper;
    int components = 1;
    double epsilon = kEpsilonConvention;
};

namespace detail {

inline std::vector<double> normalize_log_weights(const std::vector<double>& lw) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : lw) mx = std::max(mx, v);
    std::vector<double> p(lw.size());
    double total = 0.0;
    for (size_t i = 0; i < lw.size(); ++i) {
        p[i] = std::exp(lw[i] - mx);
        total += p[i];
    }
    for (double& v : p) v /= total;
    return p;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

/// Distinct sub-multisets z <= x with ||z||_1 = k.
inline void sub_multisets(const Solution& x, int k, Solution& z, size_t pos,
                          const std::function<void(const Solution&)>& emit) {
    if (k == 0) {
        emit(z);
        return;
    }
    if (pos == x.size()) return;
    int take_max = std::min(x[pos], k);
    for (int t = take_max; t >= 0; --t) {
        z[pos] = t;
        sub_multisets(x, k - t, z, pos + 1, emit);
    }
    z[pos] = 0;
}

inline double binom(long long n, long long r) {
    if (r < 0 || r > n) return 0.0;
    double out = 1.0;
    for (long long i = 0; i < r; ++i) out = out * static_cast<double>(n - i) / (i + 1);
    return out;
}

}  // namespace detail

/// Unnormalized log stationary weights for a kernel's state list:
/// log f(x) - gamma * ||Vx - c||_1 for the single-site kinds, log f(x) on X
/// for the reduced kind.
inline std::vector<double> target_log_weights(const Instance& inst, const KernelMatrix& kernel) {
    std::vector<double> lw(kernel.states.size());
    for (size_t s = 0; s < kernel.states.size(); ++s) {
        double v = log_f(inst, kernel.states[s]).value;
        if (kernel.kind != KernelKind::reduced)
            v -= kernel.gamma * static_cast<double>(kernel.residual_l1[s]);
        lw[s] = v;
    }
    return lw;
}

struct KernelCaps {
    long long simple_states = kSimpleStateCap;
    long long reduced_states = kReducedStateCap;
    long long node_budget = kDefaultNodeBudget;
};

/// Materializes the exact transition matrix for the requested kernel by
/// summing its case analysis per state: single-coordinate resampling over
/// the eligible set for simple/truncated, all (z, z') replacement pairs with
/// the 1/(2 C(m,k)) factor for reduced. Diagonals complete each row.
inline KernelMatrix build_kernel(const Instance& inst, KernelKind kind, double gamma = 0.0,
                                 int k = 2, long long omega = -1,
                                 const KernelCaps& caps = {}) {
    KernelMatrix kernel;
    kernel.kind = kind;
    kernel.gamma = gamma;
    kernel.k = k;
    kernel.omega = kind == KernelKind::truncated ? omega : -1;

    if (kind == KernelKind::reduced) {
        SolutionSet xs = enumerate_exact(inst, caps.reduced_states + 1, caps.node_budget);
        if (!xs.complete)
            throw BudgetError("build_kernel: |X| exceeds cap " +
                              std::to_string(caps.reduced_states));
        kernel.states = std::move(xs.solutions);
    } else {
        long long om = kind == KernelKind::truncated ? omega : -1;
        kernel.states = enumerate_feasible(inst, caps.simple_states, om, caps.node_budget);
    }
    const int S = static_cast<int>(kernel.states.size());
    if (S == 0) throw Error("build_kernel: empty state space");
    kernel.residual_l1.resize(S);
    kernel.log_target.resize(S);
    for (int s = 0; s < S; ++s) {
        kernel.residual_l1[s] = residual_l1(inst, kernel.states[s]);
        double v = log_f(inst, kernel.states[s]).value;
        if (kind != KernelKind::reduced) v -= gamma * static_cast<double>(kernel.residual_l1[s]);
        kernel.log_target[s] = v;
    }
    kernel.rows = Eigen::MatrixXd::Zero(S, S);

    if (kind == KernelKind::reduced) {
        SwapCache cache(inst, caps.node_budget);
        for (int s = 0; s < S; ++s) {
            const Solution& x = kernel.states[s];
            long long m = sum(x);
            if (m < k) continue;  // row is pure self-loop
            double draws = detail::binom(m, k);
            Solution z(inst.num_types, 0);
            detail::sub_multisets(x, k, z, 0, [&](const Solution& frag) {
                const std::vector<Solution>& repl = cache.replacements(frag);
                std::vector<double> lw(repl.size());
                Solution base = x;
                for (int i = 0; i < inst.num_types; ++i) base[i] -= frag[i];
                std::vector<int> target_idx(repl.size());
                for (size_t a = 0; a < repl.size(); ++a) {
                    Solution cand = base;
                    for (int i = 0; i < inst.num_types; ++i) cand[i] += repl[a][i];
                    lw[a] = log_f(inst, cand).value;
                    target_idx[a] = kernel.index_of(cand);
                }
                std::vector<double> p = detail::normalize_log_weights(lw);
                for (size_t a = 0; a < repl.size(); ++a) {
                    if (target_idx[a] == s) continue;  // diagonal completed later
                    kernel.rows(s, target_idx[a]) += 0.5 / draws * p[a];
                }
            });
        }
    } else {
        std::vector<int> eligible = detail::eligible_columns(inst);
        std::unordered_map<Vec, int, VecHash> index;
        index.reserve(S * 2);
        for (int s = 0; s < S; ++s) index.emplace(kernel.states[s], s);
        for (int s = 0; s < S; ++s) {
            const Solution& x = kernel.states[s];
            Vec r0 = residual(inst, x);
            for (int i : eligible) {
                const Vec& col = inst.columns[i];
                Vec r = r0;
                for (int j = 0; j < inst.dim; ++j) r[j] += x[i] * col[j];
                long long r_l1 = l1_norm(r), col_mass = sum(col);
                int g_max = std::numeric_limits<int>::max();
                for (int j = 0; j < inst.dim; ++j)
                    if (col[j] > 0) g_max = std::min<long long>(g_max, r[j] / col[j]);
                long long base_total = sum(x) - x[i];
                double log_p = std::log(inst.probs[i]);
                std::vector<double> lw(g_max + 1);
                for (int g = 0; g <= g_max; ++g) {
                    long long penalty = r_l1 - g * col_mass;
                    if (kind == KernelKind::truncated && penalty > omega) {
                        lw[g] = -std::numeric_limits<double>::infinity();
                        continue;
                    }
                    double w = -gamma * static_cast<double>(penalty);
                    if (!inst.uniform_target)
                        w += std::lgamma(static_cast<double>(base_total + g) + 1.0) -
                             std::lgamma(static_cast<double>(g) + 1.0) + g * log_p;
                    lw[g] = w;
                }
                std::vector<double> p = detail::normalize_log_weights(lw);
                for (int g = 0; g <= g_max; ++g) {
                    if (g == x[i] || p[g] == 0.0) continue;
                    Solution next = x;
                    next[i] = g;
                    auto it = index.find(next);
                    if (it == index.end()) throw Error("build_kernel: proposal left state space");
                    kernel.rows(s, it->second) += p[g] / (2.0 * eligible.size());
                }
            }
        }
    }

    for (int s = 0; s < S; ++s) {
        double off = kernel.rows.row(s).sum();
        kernel.rows(s, s) = 1.0 - off;
    }
    return kernel;
}

/// Max over ordered state pairs of |sigma(x) P(x,x') - sigma(x') P(x',x)|,
/// with sigma the normalization of the given log weights.
inline double verify_detailed_balance(const KernelMatrix& kernel,
                                      const std::vector<double>& log_target) {
    std::vector<double> sigma = detail::normalize_log_weights(log_target);
    const int S = static_cast<int>(kernel.states.size());
    double worst = 0.0;
    for (int a = 0; a < S; ++a)
        for (int b = a + 1; b < S; ++b)
            worst = std::max(worst,
                             std::abs(sigma[a] * kernel.rows(a, b) - sigma[b] * kernel.rows(b, a)));
    return worst;
}

inline std::vector<int> component_labels(const KernelMatrix& kernel) {
    const int S = static_cast<int>(kernel.states.size());
    detail::UnionFind uf(S);
    for (int a = 0; a < S; ++a)
        for (int b = a + 1; b < S; ++b)
            if (kernel.rows(a, b) > 0.0 || kernel.rows(b, a) > 0.0) uf.unite(a, b);
    std::vector<int> labels(S);
    std::map<int, int> remap;
    for (int s = 0; s < S; ++s) {
        int root = uf.find(s);
        auto [it, fresh] = remap.emplace(root, static_cast<int>(remap.size()));
        labels[s] = it->second;
    }
    return labels;
}

/// lambda_2, relaxation time and the iteration bounds for one kernel.
///
/// The reversible kernel is symmetrized as D^{1/2} P D^{-1/2} with
/// D = diag(sigma) before the dense eigensolve, which keeps the spectrum
/// real and is much better conditioned than solving P directly. For
/// single-site kinds the report carries p* = sigma(X) and the
/// acceptance-adjusted iteration bounds; for the reduced kind the bounds
/// are (tau_rel - 1) log(1/(2 eps)) and tau_rel log(1/(eps sigma(x0))).
/// Disconnected kernels report their component count and omit bounds.
inline SpectralReport spectral_report(const KernelMatrix& kernel,
                                      const std::vector<double>& log_target,
                                      std::optional<int> x0 = std::nullopt,
                                      double eps = kEpsilonConvention) {
    double violation = verify_detailed_balance(kernel, log_target);
    if (violation > kDetailedBalanceTol)
        throw Error("spectral_report: kernel is not reversible for the given target (violation " +
                    std::to_string(violation) + ")");
    const int S = static_cast<int>(kernel.states.size());
    std::vector<double> sigma = detail::normalize_log_weights(log_target);

    SpectralReport rep;
    rep.epsilon = eps;
    std::vector<int> labels = component_labels(kernel);
    rep.components = 1 + *std::max_element(labels.begin(), labels.end());

    Eigen::MatrixXd sym(S, S);
    for (int a = 0; a < S; ++a)
        for (int b = 0; b < S; ++b)
            sym(a, b) = std::sqrt(sigma[a] / sigma[b]) * kernel.rows(a, b);
    sym = 0.5 * (sym + sym.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = solver.eigenvalues();  // ascending
    rep.lambda2 = S >= 2 ? ev(S - 2) : 0.0;
    rep.tau_rel = rep.lambda2 < 1.0 ? 1.0 / (1.0 - rep.lambda2)
                                    : std::numeric_limits<double>::infinity();

    if (kernel.kind != KernelKind::reduced) {
        double mass = 0.0;
        for (int s = 0; s < S; ++s)
            if (kernel.residual_l1[s] == 0) mass += sigma[s];
        rep.p_star = mass;
    }
    if (rep.components > 1) return rep;

    int start = -1;
    if (x0) {
        start = *x0;
    } else if (kernel.kind == KernelKind::reduced) {
        start = static_cast<int>(
            std::min_element(sigma.begin(), sigma.end()) - sigma.begin());
    } else {
        // The single-site chain starts from the empty solution when present.
        Solution zero(kernel.states.front().size(), 0);
        auto it = std::lower_bound(kernel.states.begin(), kernel.states.end(), zero);
        start = (it != kernel.states.end() && *it == zero)
                    ? static_cast<int>(it - kernel.states.begin())
                    : static_cast<int>(std::min_element(sigma.begin(), sigma.end()) -
                                       sigma.begin());
    }

    if (kernel.kind == KernelKind::reduced) {
        rep.n_lower = (rep.tau_rel - 1.0) * std::log(1.0 / (2.0 * eps));
        rep.n_upper = rep.tau_rel * std::log(1.0 / (eps * sigma[start]));
    } else {
        double ps = *rep.p_star;
        if (ps > 0.0) {
            rep.n_lower = (rep.tau_rel - 1.0) * std::log(3.0 / (4.0 * eps * ps)) /
                          ((1.0 + 2.0 * eps / 3.0) * ps);
            rep.n_upper = rep.tau_rel * std::log(3.0 / (2.0 * eps * ps * sigma[start])) /
                          ((1.0 - 2.0 * eps / 3.0) * ps);
        }
    }
    return rep;
}

struct ComponentPartition {
    std::vector<Solution> states;
    std::vector<int> component_of;
    int num_components = 0;

    std::vector<std::vector<Solution>> groups() const {
        std::vector<std::vector<Solution>> out(num_components);
        for (size_t s = 0; s < states.size(); ++s) out[component_of[s]].push_back(states[s]);
        return out;
    }
};

/// Connected components of the undirected graph induced by the k-swap
/// kernel's positive off-diagonal entries.
inline ComponentPartition connected_components(const Instance& inst, int k,
                                               const KernelCaps& caps = {}) {
    SolutionSet xs = enumerate_exact(inst, caps.reduced_states + 1, caps.node_budget);
    if (!xs.complete)
        throw BudgetError("connected_components: |X| exceeds cap");
    ComponentPartition part;
    part.states = std::move(xs.solutions);
    const int S = static_cast<int>(part.states.size());
    std::unordered_map<Vec, int, VecHash> index;
    for (int s = 0; s < S; ++s) index.emplace(part.states[s], s);

    detail::UnionFind uf(S);
    SwapCache cache(inst, caps.node_budget);
    Solution z(inst.num_types, 0);
    for (int s = 0; s < S; ++s) {
        const Solution& x = part.states[s];
        if (sum(x) < k) continue;
        detail::sub_multisets(x, k, z, 0, [&](const Solution& frag) {
            for (const Solution& repl : cache.replacements(frag)) {
                Solution next = x;
                for (int i = 0; i < inst.num_types; ++i) next[i] += repl[i] - frag[i];
                auto it = index.find(next);
                if (it == index.end()) throw Error("connected_components: swap left X");
                uf.unite(s, it->second);
            }
        });
    }
    part.component_of.resize(S);
    std::map<int, int> remap;
    for (int s = 0; s < S; ++s) {
        auto [it, fresh] = remap.emplace(uf.find(s), static_cast<int>(remap.size()));
        part.component_of[s] = it->second;
    }
    part.num_components = static_cast<int>(remap.size());
    return part;
}

struct ConductanceResult {
    double phi = 0.0;
    double cheeger_lambda2_lower = 0.0;  // 1 - 2 phi
};

/// Phi(S, S-bar) = Q(S, S-bar) / sigma(S) with Q(x,x') = sigma(x) P(x,x'),
/// for a cut with 0 < sigma(S) <= 1/2.
inline ConductanceResult conductance_of_cut(const KernelMatrix& kernel,
                                            const std::vector<double>& log_target,
                                            const std::vector<int>& cut) {
    std::vector<double> sigma = detail::normalize_log_weights(log_target);
    const int S = static_cast<int>(kernel.states.size());
    std::vector<char> in_cut(S, 0);
    double mass = 0.0;
    for (int s : cut) {
        if (s < 0 || s >= S) throw Error("conductance_of_cut: state index out of range");
        in_cut[s] = 1;
        mass += sigma[s];
    }
    if (!(mass > 0.0) || mass > 0.5 + 1e-12)
        throw Error("conductance_of_cut: target mass of the cut must be in (0, 1/2], got " +
                    std::to_string(mass));
    double flow = 0.0;
    for (int a = 0; a < S; ++a) {
        if (!in_cut[a]) continue;
        for (int b = 0; b < S; ++b)
            if (!in_cut[b]) flow += sigma[a] * kernel.rows(a, b);
    }
    ConductanceResult out;
    out.phi = flow / mass;
    out.cheeger_lambda2_lower = 1.0 - 2.0 * out.phi;
    return out;
}

/// The limit of pi_0 P^t: within each connected component, the target
/// renormalized to the component mass that pi_0 assigns.
inline std::vector<double> stationary_of_components(const KernelMatrix& kernel,
                                                    const std::vector<double>& log_target,
                                                    const std::vector<double>& pi0) {
    const int S = static_cast<int>(kernel.states.size());
    if (static_cast<int>(pi0.size()) != S)
        throw Error("stationary_of_components: pi0 size mismatch");
    std::vector<double> sigma = detail::normalize_log_weights(log_target);
    std::vector<int> labels = component_labels(kernel);
    int num = 1 + *std::max_element(labels.begin(), labels.end());
    std::vector<double> comp_pi0(num, 0.0), comp_sigma(num, 0.0);
    for (int s = 0; s < S; ++s) {
        comp_pi0[labels[s]] += pi0[s];
        comp_sigma[labels[s]] += sigma[s];
    }
    std::vector<double> out(S, 0.0);
    for (int s = 0; s < S; ++s)
        if (comp_sigma[labels[s]] > 0.0)
            out[s] = sigma[s] / comp_sigma[labels[s]] * comp_pi0[labels[s]];
    return out;
}

/// tau_rel * log(1 / (2 eps sqrt(sigma(S)))): the start-set mixing bound for
/// a chain seeded from the target conditioned on S.
inline double mixing_bound_from_set(const KernelMatrix& kernel,
                                    const std::vector<double>& log_target,
                                    const std::vector<int>& start_set,
                                    double eps = kEpsilonConvention) {
    SpectralReport rep = spectral_report(kernel, log_target, std::nullopt, eps);
    if (rep.components > 1)
        throw Error("mixing_bound_from_set: kernel is disconnected");
    if (start_set.empty()) throw Error("mixing_bound_from_set: empty start set");
    std::vector<double> sigma = detail::normalize_log_weights(log_target);
    double mass = 0.0;
    for (int s : start_set) mass += sigma[s];
    return rep.tau_rel * std::log(1.0 / (2.0 * eps * std::sqrt(mass)));
}

/// Total variation distance between two distributions over index-aligned
/// states.
inline double tvd_dense(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

/// Runs the configured sampler num_samples times and measures the TVD
/// between the empirical histogram over X and the reference distribution
/// (index-aligned with `states`). Reduced-chain runs start from the top-1
/// solution by linear score.
inline double empirical_tvd(const Instance& inst, const ChainConfig& cfg,
                            const std::vector<Solution>& states,
                            const std::vector<double>& reference, long long num_samples) {
    if (states.size() != reference.size())
        throw Error("empirical_tvd: reference size mismatch");
    std::unordered_map<Vec, int, VecHash> index;
    for (size_t s = 0; s < states.size(); ++s) index.emplace(states[s], static_cast<int>(s));

    SplitMix64 seeder(cfg.seed);
    SwapCache cache(inst);
    std::optional<Solution> reduced_start;
    if (cfg.algorithm == Algorithm::reduced) {
        SolutionSet top = enumerate_top_n(inst, 1);
        if (top.solutions.empty()) throw SamplingError("empirical_tvd: X is empty");
        reduced_start = top.solutions[0];
    }
    std::vector<double> hist(states.size(), 0.0);
    for (long long i = 0; i < num_samples; ++i) {
        ChainConfig one = cfg;
        one.seed = seeder.next_u64();
        SampleReport rep = reduced_start
                               ? reduced_chain_sample(inst, one, *reduced_start, cache)
                               : draw_sample(inst, one, cache);
        auto it = index.find(rep.solution);
        if (it == index.end()) throw Error("empirical_tvd: sampler produced a state outside X");
        hist[it->second] += 1.0;
    }
    for (double& h : hist) h /= static_cast<double>(num_samples);
    return tvd_dense(hist, reference);
}

/// Exact pi over an enumerated solution list (normalized f).
inline std::vector<double> exact_posterior(const Instance& inst,
                                           const std::vector<Solution>& states) {
    std::vector<double> lw(states.size());
    for (size_t s = 0; s < states.size(); ++s) lw[s] = log_f(inst, states[s]).value;
    return detail::normalize_log_weights(lw);
}

/// p*_gamma = (stationary mass of X under pi-tilde_gamma) for each gamma,
/// computed exactly over the enumerated feasible set.
inline std::vector<std::pair<double, double>> p_star_curve(const Instance& inst,
                                                           const std::vector<double>& gammas,
                                                           const KernelCaps& caps = {}) {
    std::vector<Solution> ys = enumerate_feasible(inst, caps.simple_states, -1, caps.node_budget);
    std::vector<double> logf(ys.size());
    std::vector<long long> res(ys.size());
    for (size_t s = 0; s < ys.size(); ++s) {
        logf[s] = log_f(inst, ys[s]).value;
        res[s] = residual_l1(inst, ys[s]);
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(gammas.size());
    for (double gamma : gammas) {
        double mx = -std::numeric_limits<double>::infinity();
        for (size_t s = 0; s < ys.size(); ++s)
            mx = std::max(mx, logf[s] - gamma * static_cast<double>(res[s]));
        double num = 0.0, den = 0.0;
        for (size_t s = 0; s < ys.size(); ++s) {
            double w = std::exp(logf[s] - gamma * static_cast<double>(res[s]) - mx);
            den += w;
            if (res[s] == 0) num += w;
        }
        out.emplace_back(gamma, num / den);
    }
    return out;
}

}  // namespace mms

#endif  // MMS_DIAGNOSTICS_HPP
