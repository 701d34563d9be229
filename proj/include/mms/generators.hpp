#ifndef MMS_GENERATORS_HPP
#define MMS_GENERATORS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mms/instance.hpp"
#include "mms/rng.hpp"

namespace mms {

constexpr long long kHyperrectangleCap = 10'000;
constexpr int kHighMixingMaxEll = 5;

namespace detail {

inline std::vector<double> dirichlet_uniform(SplitMix64& rng, int n) {
    // Symmetric Dirichlet(1): normalized exponentials.
    std::vector<double> w(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = -std::log(rng.next_open_double());
        total += w[i];
    }
    for (double& v : w) v /= total;
    // Exact renormalization so validation's 1e-12 sum check holds.
    double s = 0.0;
    for (double v : w) s += v;
    for (double& v : w) v /= s;
    return w;
}

inline Vec sampled_target(const std::vector<Vec>& columns, const std::vector<double>& probs,
                          int dim, int m, SplitMix64& rng) {
    Vec c(dim, 0);
    for (int h = 0; h < m; ++h) {
        double u = rng.next_double();
        double acc = 0.0;
        size_t pick = probs.size() - 1;
        for (size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        for (int j = 0; j < dim; ++j) c[j] += columns[pick][j];
    }
    return c;
}

}  // namespace detail

/// Random instance: n distinct columns with entries in {0..4} (the last
/// coordinate is the count row), Dirichlet(1) probabilities, and a target
/// built by summing m columns drawn i.i.d. from them, so X is never empty.
/// Deterministic given the seed.
inline Instance gen_random(uint64_t seed, int n, int d, int m, double density = 1.0) {
    if (n < 1 || d < 1 || m < 0) throw ValidationError("gen_random: n, d >= 1 and m >= 0 required");
    if (!(density > 0.0 && density <= 1.0))
        throw ValidationError("gen_random: density must be in (0, 1]");
    SplitMix64 rng(seed);
    Instance inst;
    inst.dim = d;
    inst.num_types = n;
    inst.count_coord = d - 1;

    std::set<Vec> seen;
    const int max_attempts = 1000 * n + 1000;
    int attempts = 0;
    while (static_cast<int>(inst.columns.size()) < n) {
        if (++attempts > max_attempts)
            throw ValidationError("gen_random: cannot draw " + std::to_string(n) +
                                  " distinct columns in d=" + std::to_string(d));
        Vec col(d, 0);
        for (int j = 0; j + 1 < d; ++j) {
            if (rng.next_double() < density)
                col[j] = static_cast<int>(rng.next_below(5));
        }
        col[d - 1] = 1;
        if (seen.insert(col).second) inst.columns.push_back(std::move(col));
    }
    inst.probs = detail::dirichlet_uniform(rng, n);
    inst.target = detail::sampled_target(inst.columns, inst.probs, d, m, rng);
    return validate_instance(std::move(inst));
}

/// One interval of allowed values per attribute.
struct Range {
    int lo = 0;
    int hi = 0;
};

/// Columns are every lattice point of the hyperrectangle ranges[0] x ... x
/// ranges[d-1], plus an appended count row; probabilities are uniform and
/// the target is a sampled m-household sum. The k>=2 reduced chain on such
/// instances is always connected.
inline Instance gen_hyperrectangle(const std::vector<Range>& ranges, int m, uint64_t seed,
                                   long long cap = kHyperrectangleCap) {
    if (ranges.empty()) throw ValidationError("gen_hyperrectangle: need at least one range");
    long long total = 1;
    for (const Range& r : ranges) {
        if (r.lo < 0 || r.hi < r.lo) throw ValidationError("gen_hyperrectangle: bad range");
        total *= (r.hi - r.lo + 1);
        if (total > cap)
            throw BudgetError("gen_hyperrectangle: lattice size exceeds cap " +
                              std::to_string(cap));
    }
    int d = static_cast<int>(ranges.size());
    Instance inst;
    inst.dim = d + 1;
    inst.num_types = static_cast<int>(total);
    inst.count_coord = d;

    Vec point(d);
    for (int j = 0; j < d; ++j) point[j] = ranges[j].lo;
    while (true) {
        Vec col = point;
        col.push_back(1);
        inst.columns.push_back(std::move(col));
        int j = d - 1;
        while (j >= 0 && point[j] == ranges[j].hi) {
            point[j] = ranges[j].lo;
            --j;
        }
        if (j < 0) break;
        ++point[j];
    }
    inst.probs.assign(inst.num_types, 1.0 / inst.num_types);
    SplitMix64 rng(seed);
    inst.target = detail::sampled_target(inst.columns, inst.probs, inst.dim, m, rng);
    return validate_instance(std::move(inst));
}

/// The 4-type instance whose two exact solutions differ by a 3-element swap,
/// so the k=2 reduced chain is disconnected.
inline Instance gen_disconnected_example() {
    Instance inst;
    inst.dim = 4;
    inst.num_types = 4;
    inst.columns = {{3, 0, 0, 1}, {0, 3, 0, 1}, {0, 0, 3, 1}, {1, 1, 1, 1}};
    inst.probs.assign(4, 0.25);
    inst.target = {3, 3, 3, 3};
    inst.count_coord = 3;
    return validate_instance(std::move(inst));
}

/// Family with connected k=2 reduced chain but relaxation time exponential
/// in ell. Built from pair-sum columns M_ell, stair columns S_ell, constant
/// columns T_ell, a zero column and an all-ones column, mirrored across the
/// two halves of the 2*ell rows. The target distribution is uniform over
/// solutions; there is no count coordinate.
inline Instance gen_high_mixing_family(int ell, int max_ell = kHighMixingMaxEll) {
    if (ell < 3 || ell > max_ell)
        throw ValidationError("gen_high_mixing_family: ell must be in [3, " +
                              std::to_string(max_ell) + "]");

    // Upper halves of the column groups, as ell-vectors.
    std::vector<Vec> m_block;
    for (int i = 0; i < ell; ++i) {  // (i, i): 2*ell at position i
        Vec v(ell, 0);
        v[i] = 2 * ell;
        m_block.push_back(std::move(v));
    }
    for (int i = 0; i < ell; ++i)  // (i, j), i < j: ell at both
        for (int j = i + 1; j < ell; ++j) {
            Vec v(ell, 0);
            v[i] = ell;
            v[j] = ell;
            m_block.push_back(std::move(v));
        }
    Vec zero_block(ell, 0);
    std::vector<Vec> s_block;
    for (int i = 1; i <= ell - 2; ++i) {  // first i+1 entries 2*ell
        Vec v(ell, 0);
        for (int j = 0; j <= i; ++j) v[j] = 2 * ell;
        s_block.push_back(std::move(v));
    }
    std::vector<Vec> t_block;
    for (int i = 1; i <= 2 * ell - 1; ++i)  // constant i+1
        t_block.push_back(Vec(ell, i + 1));

    std::vector<Vec> group;  // M, 0, S, T in order
    group.insert(group.end(), m_block.begin(), m_block.end());
    group.push_back(zero_block);
    group.insert(group.end(), s_block.begin(), s_block.end());
    group.insert(group.end(), t_block.begin(), t_block.end());

    Instance inst;
    inst.dim = 2 * ell;
    auto add_column = [&](const Vec& top, const Vec& bottom) {
        Vec col = top;
        col.insert(col.end(), bottom.begin(), bottom.end());
        inst.columns.push_back(std::move(col));
    };
    const Vec ones(ell, 1);
    for (const Vec& g : group) add_column(g, ones);   // left group
    add_column(ones, ones);                           // middle all-ones column
    for (const Vec& g : group) add_column(ones, g);   // right group

    inst.num_types = static_cast<int>(inst.columns.size());
    inst.probs.assign(inst.num_types, 1.0 / inst.num_types);
    inst.target = Vec(2 * ell, 2 * ell);
    inst.uniform_target = true;
    return validate_instance(std::move(inst));
}

/// Indices (0-based) of the left-anchored columns V_L: the left M block, the
/// zero column and the left S block. Solutions supported on these form the
/// slow-mixing side of the conductance cut.
inline std::vector<int> high_mixing_left_columns(int ell) {
    int count = 2 * ell + ell * (ell - 1) / 2 - 1;  // ell + C(ell,2) pair columns + 1 + (ell-2)
    std::vector<int> idx(count);
    for (int i = 0; i < count; ++i) idx[i] = i;
    return idx;
}

/// A 3-CNF formula: clauses of exactly three nonzero literals. Positive
/// literal v means variable v, negative -v its negation (1-based).
struct CnfFormula {
    int num_vars = 0;
    std::vector<std::array<int, 3>> clauses;
};

inline void validate_formula(const CnfFormula& f) {
    if (f.num_vars < 1) throw ValidationError("formula needs at least one variable");
    for (const auto& cl : f.clauses)
        for (int lit : cl) {
            if (lit == 0) throw ValidationError("zero literal in clause");
            int v = lit > 0 ? lit : -lit;
            if (v > f.num_vars) throw ValidationError("literal references missing variable");
        }
}

/// 3SAT -> MMS: one column per literal (1 on its variable row, 1 on the rows
/// of clauses it satisfies) and three slack columns per clause with values
/// 4, 5, 6 on that clause's row. Targets: 1 on variable rows, 7 on clause
/// rows. A clause row reaches 7 only as (satisfied literals z) + (7 - z)
/// from exactly one slack, so the instance is feasible iff the formula is
/// satisfiable. An all-ones count row with target n + m is appended: every
/// exact solution picks exactly one literal column per variable and one
/// slack per clause, so the extra row never changes feasibility.
inline Instance encode_3sat(const CnfFormula& f) {
    validate_formula(f);
    const int n = f.num_vars;
    const int m = static_cast<int>(f.clauses.size());
    const int d = n + m + 1;

    Instance inst;
    inst.dim = d;
    inst.count_coord = n + m;
    auto literal_column = [&](int var, bool positive) {
        Vec col(d, 0);
        col[var - 1] = 1;
        for (int c = 0; c < m; ++c)
            for (int lit : f.clauses[c])
                if ((positive && lit == var) || (!positive && lit == -var)) col[n + c] = 1;
        col[d - 1] = 1;
        return col;
    };
    const double unit = 1.0 / (2 * n + 3 * m);
    for (int v = 1; v <= n; ++v) {
        Vec pos = literal_column(v, true);
        Vec neg = literal_column(v, false);
        if (neg == pos) {
            // A variable whose two literals satisfy the same clause set
            // yields identical columns; keep one with both literals' mass.
            // Any solution picks it exactly once (variable row), so
            // feasibility is unchanged.
            inst.columns.push_back(std::move(pos));
            inst.probs.push_back(2.0 * unit);
        } else {
            inst.columns.push_back(std::move(pos));
            inst.probs.push_back(unit);
            inst.columns.push_back(std::move(neg));
            inst.probs.push_back(unit);
        }
    }
    for (int c = 0; c < m; ++c)
        for (int val : {4, 5, 6}) {
            Vec col(d, 0);
            col[n + c] = val;
            col[d - 1] = 1;
            inst.columns.push_back(col);
            inst.probs.push_back(unit);
        }
    inst.num_types = static_cast<int>(inst.columns.size());
    inst.target.assign(d, 0);
    for (int j = 0; j < n; ++j) inst.target[j] = 1;
    for (int j = n; j < n + m; ++j) inst.target[j] = 7;
    inst.target[d - 1] = n + m;
    return validate_instance(std::move(inst));
}

/// DIMACS CNF reader. Clauses must have exactly three literals.
inline CnfFormula read_dimacs(std::istream& in) {
    CnfFormula f;
    std::string line;
    std::vector<int> current;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            std::string p, fmt;
            int nv = 0, nc = 0;
            ls >> p >> fmt >> nv >> nc;
            if (fmt != "cnf") throw ValidationError("DIMACS: expected 'p cnf'");
            f.num_vars = nv;
            continue;
        }
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                if (current.size() != 3)
                    throw ValidationError("DIMACS: clause with " +
                                          std::to_string(current.size()) + " literals; need 3");
                f.clauses.push_back({current[0], current[1], current[2]});
                current.clear();
            } else {
                current.push_back(lit);
            }
        }
    }
    if (!current.empty()) throw ValidationError("DIMACS: unterminated clause");
    validate_formula(f);
    return f;
}

/// The three-block worked example over household types
/// (2 Black), (1 white + 1 Black), (2 white) with base probabilities
/// (1/4, 1/2, 1/4). Coordinates: white persons, Black persons, households.
struct ExampleOneFamily {
    Instance block_a;  // target: two Black persons, one household
    Instance block_b;  // two mixed households' worth of persons, two households
    Instance block_c;  // two white persons, one household
};

inline ExampleOneFamily gen_example1() {
    Instance base;
    base.dim = 3;
    base.num_types = 3;
    base.columns = {{0, 2, 1}, {1, 1, 1}, {2, 0, 1}};
    base.probs = {0.25, 0.5, 0.25};
    base.count_coord = 2;

    ExampleOneFamily fam;
    fam.block_a = base;
    fam.block_a.target = {0, 2, 1};
    fam.block_b = base;
    fam.block_b.target = {2, 2, 2};
    fam.block_c = base;
    fam.block_c.target = {2, 0, 1};
    fam.block_a = validate_instance(std::move(fam.block_a));
    fam.block_b = validate_instance(std::move(fam.block_b));
    fam.block_c = validate_instance(std::move(fam.block_c));
    return fam;
}

}  // namespace mms

#endif  // MMS_GENERATORS_HPP
