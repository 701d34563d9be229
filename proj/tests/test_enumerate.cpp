#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "mms/enumerate.hpp"
#include "mms/generators.hpp"
#include "mms/rng.hpp"
#include "oracle_helpers.hpp"

using namespace mms;
using Catch::Approx;

TEST_CASE("decide_mms on the disconnected example") {
    Instance ex2 = gen_disconnected_example();
    CHECK(decide_mms(ex2));

    // c = (1,1,1,1) is exactly the fourth column, so it stays feasible.
    Instance small = ex2;
    small.target = {1, 1, 1, 1};
    CHECK(decide_mms(small));
    CHECK(oracle::all_exact_solutions(small, 1) ==
          std::vector<Solution>{{0, 0, 0, 1}});

    // c = (2,2,2,2) is two copies of the all-ones column.
    Instance two = ex2;
    two.target = {2, 2, 2, 2};
    CHECK(oracle::all_exact_solutions(two, 2) ==
          std::vector<Solution>{{0, 0, 0, 2}});
    CHECK(decide_mms(two));

    // One household with no attribute mass matches no column.
    Instance none = ex2;
    none.target = {0, 0, 0, 1};
    CHECK(oracle::all_exact_solutions(none, 1).empty());
    CHECK_FALSE(decide_mms(none));
}

TEST_CASE("decide_mms raises on exhausted node budget") {
    Instance inst = gen_random(11, 8, 4, 12);
    CHECK_THROWS_AS(decide_mms(inst, /*node_budget=*/3), BudgetError);
}

TEST_CASE("enumerate_exact lists the two solutions of the disconnected example") {
    Instance ex2 = gen_disconnected_example();
    SolutionSet xs = enumerate_exact(ex2, 10);
    REQUIRE(xs.complete);
    REQUIRE(xs.solutions.size() == 2);
    CHECK(xs.solutions[0] == Solution{0, 0, 0, 3});
    CHECK(xs.solutions[1] == Solution{1, 1, 1, 0});
    CHECK_FALSE(xs.bound_gap.has_value());
}

TEST_CASE("enumerate_exact on block B") {
    Instance b = gen_example1().block_b;
    SolutionSet xs = enumerate_exact(b, 10);
    REQUIRE(xs.complete);
    REQUIRE(xs.solutions.size() == 2);
    CHECK(xs.solutions[0] == Solution{0, 2, 0});
    CHECK(xs.solutions[1] == Solution{1, 0, 1});
}

TEST_CASE("enumerate_exact limit semantics") {
    Instance b = gen_example1().block_b;
    SolutionSet one = enumerate_exact(b, 1);
    CHECK_FALSE(one.complete);
    REQUIRE(one.solutions.size() == 1);
    CHECK(one.solutions[0] == Solution{0, 2, 0});  // lexicographically first
}

TEST_CASE("enumerate_exact agrees with the naive oracle on random instances") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(5));  // up to 6 types
        int m = 1 + static_cast<int>(rng.next_below(5));  // up to 5 households
        Instance inst = gen_random(rng.next_u64(), n, 3, m);
        SolutionSet xs = enumerate_exact(inst, 100000);
        REQUIRE(xs.complete);
        CHECK(xs.solutions == oracle::all_exact_solutions(inst, m));
        CHECK(!xs.solutions.empty());  // target was built from a sampled multiset
        CHECK(decide_mms(inst));
    }
}

TEST_CASE("enumerate_top_n orders by linear score with lexicographic ties") {
    Instance b = gen_example1().block_b;
    SolutionSet top1 = enumerate_top_n(b, 1);
    REQUIRE(top1.solutions.size() == 1);
    // L({mixed x2}) = 2 log(1/2) beats L({t1,t3}) = 2 log(1/4).
    CHECK(top1.solutions[0] == Solution{0, 2, 0});
    CHECK_FALSE(top1.complete);
    REQUIRE(top1.bound_gap.has_value());
    // The only unreturned solution scores 2 log(1/4); gap certifies it.
    CHECK(*top1.bound_gap >= 2 * std::log(0.25) - 2 * std::log(0.5) - 1e-9);

    SolutionSet top5 = enumerate_top_n(b, 5);
    CHECK(top5.complete);
    CHECK(top5.solutions.size() == 2);
    CHECK_FALSE(top5.bound_gap.has_value());

    // Uniform probabilities on the disconnected example: both solutions tie
    // at 3 log(1/4); the lexicographically smaller vector wins.
    Instance ex2 = gen_disconnected_example();
    SolutionSet tied = enumerate_top_n(ex2, 1);
    REQUIRE(tied.solutions.size() == 1);
    CHECK(tied.solutions[0] == Solution{0, 0, 0, 3});
}

TEST_CASE("enumerate_top_n minimum kept score dominates everything left out") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 15; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(5));
        int m = 1 + static_cast<int>(rng.next_below(5));
        Instance inst = gen_random(rng.next_u64(), n, 3, m);
        std::vector<Solution> all = oracle::all_exact_solutions(inst, m);
        long long keep = 1 + static_cast<long long>(rng.next_below(3));
        SolutionSet top = enumerate_top_n(inst, keep);
        REQUIRE(top.solutions.size() ==
                std::min<size_t>(all.size(), static_cast<size_t>(keep)));
        std::set<Solution> kept(top.solutions.begin(), top.solutions.end());
        double min_kept = std::numeric_limits<double>::infinity();
        for (const Solution& x : top.solutions)
            min_kept = std::min(min_kept, linear_score(inst, x));
        for (const Solution& x : all)
            if (!kept.count(x)) CHECK(linear_score(inst, x) <= min_kept + 1e-9);
    }
}

TEST_CASE("enumerate_swaps finds replacement classes") {
    Instance ex2 = gen_disconnected_example();
    // The full 3-multiset of the one-of-each solution swaps with col4 x3.
    std::vector<Solution> z3 = enumerate_swaps(ex2, {0, 0, 0, 3});
    REQUIRE(z3.size() == 2);
    CHECK(z3[0] == Solution{0, 0, 0, 3});
    CHECK(z3[1] == Solution{1, 1, 1, 0});

    // Size-1 fragments have no partners when columns are distinct.
    for (int i = 0; i < 4; ++i) {
        Solution z(4, 0);
        z[i] = 1;
        CHECK(enumerate_swaps(ex2, z) == std::vector<Solution>{z});
    }

    // Block B: the two-mixed-households fragment swaps with one-of-each.
    Instance b = gen_example1().block_b;
    std::vector<Solution> zb = enumerate_swaps(b, {0, 2, 0});
    REQUIRE(zb.size() == 2);
    CHECK(zb[0] == Solution{0, 2, 0});
    CHECK(zb[1] == Solution{1, 0, 1});
}

TEST_CASE("swap classes partition fragments and always contain the query") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        Instance inst = gen_random(rng.next_u64(), 5, 3, 4);
        SolutionSet xs = enumerate_exact(inst, 1000);
        REQUIRE(xs.complete);
        SwapCache cache(inst);
        for (const Solution& x : xs.solutions) {
            // Fragments: every 2-sub-multiset of x.
            for (int a = 0; a < inst.num_types; ++a)
                for (int b = a; b < inst.num_types; ++b) {
                    Solution z(inst.num_types, 0);
                    ++z[a];
                    ++z[b];
                    bool fits = true;
                    for (int i = 0; i < inst.num_types; ++i) fits &= z[i] <= x[i];
                    if (!fits) continue;
                    const auto cls = cache.replacements(z);
                    CHECK(std::find(cls.begin(), cls.end(), z) != cls.end());
                    // Same class from any member (equivalence relation).
                    for (const Solution& other : cls)
                        CHECK(cache.replacements(other) == cls);
                }
        }
    }
}

TEST_CASE("count_feasible") {
    Instance ex2 = gen_disconnected_example();
    FeasibleCount y = count_feasible(ex2, 1'000'000);
    CHECK_FALSE(y.capped);
    CHECK(y.count >= 2);
    CHECK(y.count == static_cast<long long>(oracle::all_feasible_solutions(ex2, 3).size()));

    FeasibleCount capped = count_feasible(ex2, 3);
    CHECK(capped.capped);
    CHECK(capped.count == 3);

    // m = 0: only the empty multiset fits.
    Instance zero = gen_random(5, 4, 3, 0);
    FeasibleCount one = count_feasible(zero, 100);
    CHECK(one.count == 1);
}

TEST_CASE("feasible-set size honours the m(1+log(n+1)) bound") {
    SplitMix64 rng(31337);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(6));
        int m = 1 + static_cast<int>(rng.next_below(6));
        Instance inst = gen_random(rng.next_u64(), n, 3, m);
        FeasibleCount y = count_feasible(inst, 2'000'000);
        REQUIRE_FALSE(y.capped);
        CHECK(std::log(static_cast<double>(y.count)) <= m * (1.0 + std::log(n + 1.0)) + 1e-12);
    }
}

TEST_CASE("enumerate_feasible matches the oracle and respects omega") {
    Instance b = gen_example1().block_b;
    std::vector<Solution> ys = enumerate_feasible(b, 100000);
    CHECK(ys == oracle::all_feasible_solutions(b, 2));

    // Y_omega keeps only states within residual omega.
    std::vector<Solution> tight = enumerate_feasible(b, 100000, /*omega=*/0);
    CHECK(tight.size() == 2);
    for (const Solution& x : tight) CHECK(is_exact(b, x));

    long long full_l1 = l1_norm(b.target);
    CHECK(enumerate_feasible(b, 100000, full_l1) == ys);
}

TEST_CASE("decide_mms agrees with enumerate_exact emptiness") {
    SplitMix64 rng(555);
    for (int trial = 0; trial < 20; ++trial) {
        Instance inst = gen_random(rng.next_u64(), 5, 4, 3);
        // Perturb the target to sometimes break feasibility.
        if (trial % 2 == 1) {
            inst.target[0] += 1 + static_cast<int>(rng.next_below(3));
        }
        bool feasible = decide_mms(inst);
        SolutionSet xs = enumerate_exact(inst, 100000);
        REQUIRE(xs.complete);
        CHECK(feasible == !xs.solutions.empty());
    }
}
