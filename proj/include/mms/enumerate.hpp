#ifndef MMS_ENUMERATE_HPP
#define MMS_ENUMERATE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "mms/instance.hpp"

namespace mms {

/// Default expansion budget per enumeration call. Exceeding it raises
/// BudgetError; enumeration never truncates silently.
constexpr long long kDefaultNodeBudget = 10'000'000;

struct SolutionSet {
    std::vector<Solution> solutions;
    bool complete = false;
    /// Certified upper bound on the linear score of any solution not
    /// returned, minus the smallest score among those returned. Absent when
    /// complete.
    std::optional<double> bound_gap;
};

namespace detail {

/// Shared search context: column order, residual-support masks and
/// suffix household-mass ranges used for pruning.
struct SearchContext {
    const Instance& inst;
    std::vector<int> order;                   // exploration order (column indices)
    std::vector<std::vector<char>> support;   // support[p][j]: some column in order[p..) hits j
    std::vector<long long> max_mass;          // max ||v||_1 over order[p..)
    std::vector<long long> min_mass;          // min ||v||_1 over order[p..)
    std::vector<double> max_logp;             // max log prob over order[p..)
    long long budget;
    long long nodes = 0;

    SearchContext(const Instance& in, long long node_budget, bool prob_order)
        : inst(in), budget(node_budget) {
        int n = inst.num_types;
        order.resize(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        if (prob_order) {
            // Descending probability; ties broken by descending column order
            // so structured columns (unit rows first) are branched on early.
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (inst.probs[a] != inst.probs[b]) return inst.probs[a] > inst.probs[b];
                return inst.columns[a] > inst.columns[b];
            });
        }
        support.assign(n + 1, std::vector<char>(inst.dim, 0));
        max_mass.assign(n + 1, 0);
        min_mass.assign(n + 1, std::numeric_limits<long long>::max());
        max_logp.assign(n + 1, -std::numeric_limits<double>::infinity());
        for (int p = n - 1; p >= 0; --p) {
            const Vec& col = inst.columns[order[p]];
            support[p] = support[p + 1];
            for (int j = 0; j < inst.dim; ++j)
                if (col[j] > 0) support[p][j] = 1;
            long long mass = sum(col);
            max_mass[p] = std::max(max_mass[p + 1], mass);
            min_mass[p] = std::min(min_mass[p + 1], mass);
            max_logp[p] = std::max(max_logp[p + 1], std::log(inst.probs[order[p]]));
        }
    }

    void count_node() {
        if (++nodes > budget) throw BudgetError("enumeration node budget exceeded");
    }

    /// Largest g with g * col <= r.
    int max_multiplicity(const Vec& col, const Vec& r) const {
        long long g = std::numeric_limits<int>::max();
        for (int j = 0; j < inst.dim; ++j)
            if (col[j] > 0) g = std::min(g, static_cast<long long>(r[j] / col[j]));
        return static_cast<int>(g);
    }

    /// True when no exact completion can exist from (position p, residual r).
    bool prune_exact(int p, const Vec& r, long long r_l1) const {
        for (int j = 0; j < inst.dim; ++j)
            if (r[j] > 0 && !support[p][j]) return true;
        if (inst.count_coord) {
            long long b = r[*inst.count_coord];
            // An exact completion picks exactly b more households whose total
            // mass must equal ||r||_1.
            if (r_l1 > b * max_mass[p]) return true;
            if (b > 0 && min_mass[p] != std::numeric_limits<long long>::max() &&
                r_l1 < b * min_mass[p])
                return true;
            if (b == 0 && r_l1 > 0) return true;
        }
        return false;
    }
};

template <typename Emit>
bool dfs_exact(SearchContext& ctx, int p, Vec& r, long long r_l1, Solution& x, Emit&& emit) {
    ctx.count_node();
    if (r_l1 == 0) {
        // Any remaining columns take multiplicity zero.
        return emit(x);
    }
    if (p == ctx.inst.num_types) return true;
    if (ctx.prune_exact(p, r, r_l1)) return true;
    int col_idx = ctx.order[p];
    const Vec& col = ctx.inst.columns[col_idx];
    int gmax = ctx.max_multiplicity(col, r);
    long long col_mass = sum(col);
    for (int j = 0; j < ctx.inst.dim; ++j) r[j] -= gmax * col[j];
    for (int g = gmax; g >= 0; --g) {
        x[col_idx] = g;
        if (!dfs_exact(ctx, p + 1, r, r_l1 - g * col_mass, x, emit)) {
            x[col_idx] = 0;
            for (int j = 0; j < ctx.inst.dim; ++j) r[j] += g * col[j];
            return false;
        }
        for (int j = 0; j < ctx.inst.dim; ++j) r[j] += col[j];
    }
    for (int j = 0; j < ctx.inst.dim; ++j) r[j] -= col[j];  // undo the g=-1 overshoot
    x[col_idx] = 0;
    return true;
}

}  // namespace detail

/// MMS decision: is {x >= 0 : Vx = c} nonempty? Depth-first branch and bound
/// over multiplicities; exceeding the node budget raises BudgetError rather
/// than answering.
inline bool decide_mms(const Instance& inst, long long node_budget = kDefaultNodeBudget) {
    detail::SearchContext ctx(inst, node_budget, /*prob_order=*/true);
    Vec r = inst.target;
    Solution x(inst.num_types, 0);
    bool found = false;
    detail::dfs_exact(ctx, 0, r, l1_norm(r), x, [&](const Solution&) {
        found = true;
        return false;  // stop
    });
    return found;
}

/// All exact solutions, in ascending lexicographic order of the multiplicity
/// vector, up to `limit`. complete is set iff |X| <= limit.
inline SolutionSet enumerate_exact(const Instance& inst, long long limit,
                                   long long node_budget = kDefaultNodeBudget) {
    // Exploring columns in index order with ascending multiplicities emits
    // leaves in lexicographic order directly, so early stopping is exact.
    detail::SearchContext ctx(inst, node_budget, /*prob_order=*/false);
    SolutionSet out;
    Vec r = inst.target;
    Solution x(inst.num_types, 0);

    std::function<bool(int, long long)> rec = [&](int p, long long r_l1) -> bool {
        ctx.count_node();
        if (r_l1 == 0) {
            if (static_cast<long long>(out.solutions.size()) < limit) {
                out.solutions.push_back(x);
                return true;
            }
            return false;  // limit+1'th solution: X is larger than limit
        }
        if (p == inst.num_types) return true;
        if (ctx.prune_exact(p, r, r_l1)) return true;
        int col_idx = ctx.order[p];
        const Vec& col = inst.columns[col_idx];
        int gmax = ctx.max_multiplicity(col, r);
        long long col_mass = sum(col);
        for (int g = 0; g <= gmax; ++g) {
            x[col_idx] = g;
            for (int j = 0; j < inst.dim; ++j) r[j] -= g * col[j];
            bool keep_going = rec(p + 1, r_l1 - g * col_mass);
            for (int j = 0; j < inst.dim; ++j) r[j] += g * col[j];
            x[col_idx] = 0;
            if (!keep_going) return false;
        }
        return true;
    };
    out.complete = rec(0, l1_norm(r));
    return out;
}

/// The N exact solutions with the largest linear score L, via best-first
/// search with the admissible bound L(partial) + budget * max remaining
/// log-probability. Ties in L are broken toward the lexicographically
/// smallest multiplicity vector. bound_gap certifies how close any
/// unreturned solution's score can come to the returned ones.
inline SolutionSet enumerate_top_n(const Instance& inst, long long top_n,
                                   long long node_budget = kDefaultNodeBudget) {
    detail::SearchContext ctx(inst, node_budget, /*prob_order=*/true);
    struct Node {
        double bound;
        int p;
        Vec r;
        long long r_l1;
        Solution x;
        double score;
    };
    auto cmp = [](const Node& a, const Node& b) { return a.bound < b.bound; };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);

    auto upper_bound = [&](const Node& nd) -> double {
        if (nd.r_l1 == 0) return nd.score;
        if (nd.p == inst.num_types) return -std::numeric_limits<double>::infinity();
        long long b;
        if (inst.count_coord) {
            b = nd.r[*inst.count_coord];
        } else {
            b = (nd.r_l1 + ctx.max_mass[nd.p] - 1) / std::max<long long>(1, ctx.max_mass[nd.p]);
        }
        return nd.score + static_cast<double>(b) * ctx.max_logp[nd.p];
    };

    Node root{0.0, 0, inst.target, l1_norm(inst.target), Solution(inst.num_types, 0), 0.0};
    root.bound = upper_bound(root);
    open.push(std::move(root));

    std::vector<std::pair<double, Solution>> found;  // (L, x) in pop order
    auto nth_score = [&]() {
        return found.size() >= static_cast<size_t>(top_n) ? found[top_n - 1].first
                                                          : -std::numeric_limits<double>::infinity();
    };

    bool exhausted = true;
    while (!open.empty()) {
        if (static_cast<long long>(found.size()) >= top_n &&
            open.top().bound < nth_score() - 1e-12) {
            exhausted = false;
            break;
        }
        Node nd = open.top();
        open.pop();
        ctx.count_node();
        if (nd.r_l1 == 0) {
            found.emplace_back(nd.score, std::move(nd.x));
            // Keep pop order sorted by score for the nth_score() lookup.
            for (size_t i = found.size(); i > 1 && found[i - 1].first > found[i - 2].first; --i)
                std::swap(found[i - 1], found[i - 2]);
            continue;
        }
        if (nd.p == inst.num_types) continue;
        if (ctx.prune_exact(nd.p, nd.r, nd.r_l1)) continue;
        int col_idx = ctx.order[nd.p];
        const Vec& col = inst.columns[col_idx];
        int gmax = ctx.max_multiplicity(col, nd.r);
        long long col_mass = sum(col);
        double logp = std::log(inst.probs[col_idx]);
        for (int g = 0; g <= gmax; ++g) {
            Node child;
            child.p = nd.p + 1;
            child.r = nd.r;
            for (int j = 0; j < inst.dim; ++j) child.r[j] -= g * col[j];
            child.r_l1 = nd.r_l1 - g * col_mass;
            child.x = nd.x;
            child.x[col_idx] = g;
            child.score = nd.score + g * logp;
            child.bound = upper_bound(child);
            if (child.bound == -std::numeric_limits<double>::infinity()) continue;
            open.push(std::move(child));
        }
    }

    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    SolutionSet out;
    double worst_kept = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < found.size() && static_cast<long long>(i) < top_n; ++i) {
        out.solutions.push_back(found[i].second);
        worst_kept = found[i].first;
    }
    out.complete = exhausted && found.size() <= static_cast<size_t>(top_n);
    if (!out.complete) {
        double frontier = open.empty() ? -std::numeric_limits<double>::infinity()
                                       : open.top().bound;
        if (found.size() > static_cast<size_t>(top_n))
            frontier = std::max(frontier, found[top_n].first);
        out.bound_gap = frontier - worst_kept;
    }
    return out;
}

struct FeasibleCount {
    long long count = 0;
    bool capped = false;
};

namespace detail {

// Emit returns false to stop the walk.
template <typename Emit>
bool dfs_feasible(SearchContext& ctx, int p, Vec& r, Solution& x, long long omega, Emit&& emit) {
    ctx.count_node();
    if (p == ctx.inst.num_types) {
        if (omega < 0 || l1_norm(r) <= omega) return emit(x);
        return true;
    }
    int col_idx = ctx.order[p];
    const Vec& col = ctx.inst.columns[col_idx];
    int gmax = ctx.max_multiplicity(col, r);
    for (int g = 0; g <= gmax; ++g) {
        x[col_idx] = g;
        for (int j = 0; j < ctx.inst.dim; ++j) r[j] -= g * col[j];
        bool keep_going = dfs_feasible(ctx, p + 1, r, x, omega, emit);
        for (int j = 0; j < ctx.inst.dim; ++j) r[j] += g * col[j];
        if (!keep_going) {
            x[col_idx] = 0;
            return false;
        }
    }
    x[col_idx] = 0;
    return true;
}

}  // namespace detail

/// |{x : Vx <= c}|, counted up to `cap`.
inline FeasibleCount count_feasible(const Instance& inst, long long cap,
                                    long long node_budget = kDefaultNodeBudget) {
    detail::SearchContext ctx(inst, node_budget, /*prob_order=*/true);
    Vec r = inst.target;
    Solution x(inst.num_types, 0);
    FeasibleCount out;
    detail::dfs_feasible(ctx, 0, r, x, /*omega=*/-1, [&](const Solution&) {
        if (++out.count >= cap) {
            out.capped = true;
            out.count = cap;
            return false;
        }
        return true;
    });
    return out;
}

/// Every feasible point of Y (or of Y_omega when omega >= 0), in ascending
/// lexicographic order. Raises BudgetError beyond `cap` states.
inline std::vector<Solution> enumerate_feasible(const Instance& inst, long long cap,
                                                long long omega = -1,
                                                long long node_budget = kDefaultNodeBudget) {
    detail::SearchContext ctx(inst, node_budget, /*prob_order=*/false);
    Vec r = inst.target;
    Solution x(inst.num_types, 0);
    std::vector<Solution> out;
    detail::dfs_feasible(ctx, 0, r, x, omega, [&](const Solution& y) {
        if (static_cast<long long>(out.size()) >= cap)
            throw BudgetError("feasible state space exceeds cap " + std::to_string(cap));
        out.push_back(y);
        return true;
    });
    std::sort(out.begin(), out.end());
    return out;
}

/// Replacement classes Z(z): all multisets z' of the same size with
/// V z' = V z. Results are cached by (V z, |z|); the relation "same column
/// sum and size" is an equivalence, so classes partition the fragments.
/// Not safe for concurrent mutation; give each worker its own cache.
class SwapCache {
  public:
    explicit SwapCache(const Instance& inst, long long node_budget = kDefaultNodeBudget)
        : inst_(inst), budget_(node_budget) {}

    /// All z' with ||z'||_1 = ||z||_1 and V z' = V z, z itself included,
    /// in ascending lexicographic order.
    const std::vector<Solution>& replacements(const Solution& z) {
        Vec s = multiply(inst_, z);
        int k = static_cast<int>(sum(z));
        Key key{s, k};
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;

        // Enumerate as an exact sub-instance with a size row appended, which
        // enforces ||z'||_1 = k whether or not a count coordinate exists.
        Instance sub;
        sub.dim = inst_.dim + 1;
        sub.num_types = inst_.num_types;
        sub.columns.reserve(inst_.num_types);
        for (const Vec& col : inst_.columns) {
            Vec c2 = col;
            c2.push_back(1);
            sub.columns.push_back(std::move(c2));
        }
        sub.probs = inst_.probs;
        sub.target = s;
        sub.target.push_back(k);
        sub.count_coord = inst_.dim;
        SolutionSet res = enumerate_exact(sub, std::numeric_limits<long long>::max(), budget_);
        auto [pos, inserted] = cache_.emplace(std::move(key), std::move(res.solutions));
        return pos->second;
    }

    size_t size() const { return cache_.size(); }

  private:
    struct Key {
        Vec column_sum;
        int k;
        bool operator==(const Key& o) const { return k == o.k && column_sum == o.column_sum; }
    };
    struct KeyHash {
        size_t operator()(const Key& key) const {
            return static_cast<size_t>(
                fnv1a64(key.column_sum.data(), key.column_sum.size() * sizeof(int)) ^
                (static_cast<uint64_t>(key.k) * 0x9e3779b97f4a7c15ull));
        }
    };

    const Instance& inst_;
    long long budget_;
    std::unordered_map<Key, std::vector<Solution>, KeyHash> cache_;
};

/// Convenience wrapper matching the one-shot operation shape.
inline std::vector<Solution> enumerate_swaps(const Instance& inst, const Solution& z,
                                             long long node_budget = kDefaultNodeBudget) {
    SwapCache cache(inst, node_budget);
    return cache.replacements(z);
}

}  // namespace mms

#endif  // MMS_ENUMERATE_HPP
