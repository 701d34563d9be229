#ifndef MMS_TESTS_ORACLE_HELPERS_HPP
#define MMS_TESTS_ORACLE_HELPERS_HPP

// Independent brute-force oracles. These deliberately share no code with the
// library search paths: plain nested loops, no pruning, no ordering tricks.

#include <algorithm>
#include <functional>
#include <vector>

#include "mms/generators.hpp"
#include "mms/instance.hpp"

namespace oracle {

using mms::Instance;
using mms::Solution;
using mms::Vec;

// Every multiset over the columns with at most max_households elements whose
// sum equals the target exactly. Exponential; keep instances tiny.
inline std::vector<Solution> all_exact_solutions(const Instance& inst, int max_households) {
    std::vector<Solution> out;
    Solution x(inst.num_types, 0);
    std::function<void(int, int)> rec = [&](int col, int budget) {
        if (col == inst.num_types) {
            Vec total(inst.dim, 0);
            for (int i = 0; i < inst.num_types; ++i)
                for (int j = 0; j < inst.dim; ++j) total[j] += x[i] * inst.columns[i][j];
            if (total == inst.target) out.push_back(x);
            return;
        }
        for (int g = 0; g <= budget; ++g) {
            x[col] = g;
            rec(col + 1, budget - g);
        }
        x[col] = 0;
    };
    rec(0, max_households);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Every feasible multiset (Vx <= c), bounded by per-column caps implied by
// the target.
inline std::vector<Solution> all_feasible_solutions(const Instance& inst, int max_per_column) {
    std::vector<Solution> out;
    Solution x(inst.num_types, 0);
    std::function<void(int)> rec = [&](int col) {
        if (col == inst.num_types) {
            Vec total(inst.dim, 0);
            for (int i = 0; i < inst.num_types; ++i)
                for (int j = 0; j < inst.dim; ++j) total[j] += x[i] * inst.columns[i][j];
            for (int j = 0; j < inst.dim; ++j)
                if (total[j] > inst.target[j]) return;
            out.push_back(x);
            return;
        }
        for (int g = 0; g <= max_per_column; ++g) {
            x[col] = g;
            rec(col + 1);
        }
        x[col] = 0;
    };
    rec(0);
    std::sort(out.begin(), out.end());
    return out;
}

// Brute-force satisfiability over all 2^n assignments.
inline bool brute_force_satisfiable(const mms::CnfFormula& f) {
    for (unsigned long long mask = 0; mask < (1ull << f.num_vars); ++mask) {
        bool all_ok = true;
        for (const auto& clause : f.clauses) {
            bool clause_ok = false;
            for (int lit : clause) {
                int var = lit > 0 ? lit : -lit;
                bool value = (mask >> (var - 1)) & 1ull;
                if ((lit > 0) == value) {
                    clause_ok = true;
                    break;
                }
            }
            if (!clause_ok) {
                all_ok = false;
                break;
            }
        }
        if (all_ok) return true;
    }
    return false;
}

}  // namespace oracle

#endif  // MMS_TESTS_ORACLE_HELPERS_HPP
