#ifndef MMS_INSTANCE_HPP
#define MMS_INSTANCE_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mms/common.hpp"

namespace mms {

constexpr double kProbSumTolerance = 1e-12;

/// A block instance: columns V (one vector per household type), a base
/// distribution over columns, and the target count vector c.
///
/// `count_coord`, when present, is a coordinate where every column is 1, so
/// c[count_coord] is the number of households m in any exact solution.
/// Instances with `uniform_target` set weight all exact solutions equally
/// (f == 1) instead of using the multinomial posterior; only those instances
/// may omit the count coordinate.
struct Instance {
    int dim = 0;                      // d
    int num_types = 0;                // n
    std::vector<Vec> columns;         // n columns of length d
    std::vector<double> probs;        // base probability of each column
    Vec target;                       // c
    std::optional<int> count_coord;   // j with columns[i][j] == 1 for all i
    bool uniform_target = false;

    /// m: the household count, defined when count_coord is present.
    int household_count() const {
        return count_coord ? target[*count_coord] : -1;
    }
};

/// A multiset of household types, stored as a multiplicity vector over
/// column indices.
using Solution = Vec;

/// Log-space weight; -inf encodes weight zero.
struct LogWeight {
    double value = 0.0;
    bool is_zero() const { return value == -std::numeric_limits<double>::infinity(); }
};

inline Vec multiply(const Instance& inst, const Solution& x) {
    Vec out(inst.dim, 0);
    for (int i = 0; i < inst.num_types; ++i) {
        if (x[i] == 0) continue;
        const Vec& col = inst.columns[i];
        for (int j = 0; j < inst.dim; ++j) out[j] += x[i] * col[j];
    }
    return out;
}

/// c - Vx. Nonnegative iff x is feasible; zero iff x is exact.
inline Vec residual(const Instance& inst, const Solution& x) {
    Vec r = multiply(inst, x);
    for (int j = 0; j < inst.dim; ++j) r[j] = inst.target[j] - r[j];
    return r;
}

inline long long residual_l1(const Instance& inst, const Solution& x) {
    return l1_norm(residual(inst, x));
}

inline bool is_feasible(const Instance& inst, const Solution& x) {
    Vec r = residual(inst, x);
    for (int e : r)
        if (e < 0) return false;
    return true;
}

inline bool is_exact(const Instance& inst, const Solution& x) {
    return is_zero(residual(inst, x));
}

/// Validates every structural invariant, returning the instance unchanged.
/// Reports the first violation found. Instances flagged uniform_target may
/// omit the count coordinate; everything else must carry one.
inline Instance validate_instance(Instance inst) {
    if (inst.dim <= 0) throw ValidationError("dimension d must be positive");
    if (inst.num_types <= 0) throw ValidationError("number of types n must be positive");
    if (static_cast<int>(inst.columns.size()) != inst.num_types)
        throw ValidationError("expected " + std::to_string(inst.num_types) + " columns, got " +
                              std::to_string(inst.columns.size()));
    if (static_cast<int>(inst.probs.size()) != inst.num_types)
        throw ValidationError("probs length does not match n");
    if (static_cast<int>(inst.target.size()) != inst.dim)
        throw ValidationError("target length does not match d");

    for (int i = 0; i < inst.num_types; ++i) {
        if (static_cast<int>(inst.columns[i].size()) != inst.dim)
            throw ValidationError("column " + std::to_string(i) + " has wrong dimension");
        for (int e : inst.columns[i])
            if (e < 0)
                throw ValidationError("column " + std::to_string(i) + " has a negative entry");
    }
    for (int j = 0; j < inst.dim; ++j)
        if (inst.target[j] < 0) throw ValidationError("target has a negative entry");

    std::set<Vec> seen;
    for (int i = 0; i < inst.num_types; ++i)
        if (!seen.insert(inst.columns[i]).second)
            throw ValidationError("duplicate column at index " + std::to_string(i));

    KahanSum total;
    for (int i = 0; i < inst.num_types; ++i) {
        if (!(inst.probs[i] > 0.0))
            throw ValidationError("probability " + std::to_string(i) + " is not strictly positive");
        total.add(inst.probs[i]);
    }
    if (std::abs(total.value() - 1.0) > kProbSumTolerance)
        throw ValidationError("probabilities sum to " + std::to_string(total.value()));

    if (inst.count_coord) {
        int cc = *inst.count_coord;
        if (cc < 0 || cc >= inst.dim) throw ValidationError("count coordinate out of range");
        for (int i = 0; i < inst.num_types; ++i)
            if (inst.columns[i][cc] != 1)
                throw ValidationError("column " + std::to_string(i) +
                                      " is not 1 at the count coordinate");
    } else {
        // Look for one before giving up; the caller may simply not have set it.
        for (int j = 0; j < inst.dim; ++j) {
            bool all_ones = true;
            for (int i = 0; i < inst.num_types; ++i)
                if (inst.columns[i][j] != 1) {
                    all_ones = false;
                    break;
                }
            if (all_ones) {
                inst.count_coord = j;
                break;
            }
        }
        if (!inst.count_coord && !inst.uniform_target)
            throw ValidationError("no count coordinate: no row is 1 in every column");
        if (!inst.count_coord) {
            // Uniform-target instance without a count row: reject all-zero
            // columns, which would make coordinate resampling unbounded.
            for (int i = 0; i < inst.num_types; ++i)
                if (is_zero(inst.columns[i]))
                    throw ValidationError("all-zero column in instance without count coordinate");
        }
    }
    return inst;
}

/// log multinomial(||x||_1; x), via log-gamma so counts in the hundreds
/// cannot overflow.
inline double log_multinomial(const Solution& x) {
    long long total = sum(x);
    double lg = std::lgamma(static_cast<double>(total) + 1.0);
    for (int e : x) lg -= std::lgamma(static_cast<double>(e) + 1.0);
    return lg;
}

/// Unnormalized posterior weight of a feasible multiset:
/// log [ multinomial(||x||_1; x) * prod_i probs[i]^x[i] ].
/// Under a uniform target this is identically 0.
inline LogWeight log_f(const Instance& inst, const Solution& x) {
    if (!is_feasible(inst, x)) throw Error("log_f: x is not feasible for the instance");
    if (inst.uniform_target) return {0.0};
    double lw = log_multinomial(x);
    for (int i = 0; i < inst.num_types; ++i) {
        if (x[i] == 0) continue;
        if (!(inst.probs[i] > 0.0))
            return {-std::numeric_limits<double>::infinity()};
        lw += x[i] * std::log(inst.probs[i]);
    }
    return {lw};
}

/// Linear surrogate for log f: sum_i x[i] * log probs[i]. Drops the
/// multinomial coefficient, which makes it optimizable by best-first search.
inline double linear_score(const Instance& inst, const Solution& x) {
    double s = 0.0;
    for (int i = 0; i < inst.num_types; ++i)
        if (x[i] != 0) s += x[i] * std::log(inst.probs[i]);
    return s;
}

}  // namespace mms

#endif  // MMS_INSTANCE_HPP
