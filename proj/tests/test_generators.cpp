#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "mms/enumerate.hpp"
#include "mms/generators.hpp"
#include "mms/io.hpp"
#include "oracle_helpers.hpp"

using namespace mms;

namespace {

// Sub-instance on a column prefix and row prefix, used to count the
// cycle-collection solutions of the pair-sum block on its own.
Instance restrict_to(const Instance& inst, int cols, int rows) {
    Instance sub;
    sub.dim = rows;
    sub.num_types = cols;
    for (int i = 0; i < cols; ++i)
        sub.columns.emplace_back(inst.columns[i].begin(), inst.columns[i].begin() + rows);
    sub.probs.assign(cols, 1.0 / cols);
    sub.target.assign(inst.target.begin(), inst.target.begin() + rows);
    sub.uniform_target = true;
    return sub;
}

}  // namespace

TEST_CASE("gen_random is deterministic and always solvable") {
    Instance a = gen_random(1, 5, 3, 4);
    Instance b = gen_random(1, 5, 3, 4);
    CHECK(a.columns == b.columns);
    CHECK(a.probs == b.probs);
    CHECK(a.target == b.target);
    CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());

    Instance c = gen_random(2, 5, 3, 4);
    CHECK(instance_to_json(a).dump() != instance_to_json(c).dump());

    CHECK(decide_mms(a));
    CHECK(a.household_count() == 4);

    // m = 0: the only exact solution is the empty multiset.
    Instance zero = gen_random(3, 4, 3, 0);
    SolutionSet xs = enumerate_exact(zero, 10);
    REQUIRE(xs.complete);
    CHECK(xs.solutions == std::vector<Solution>{Solution(4, 0)});
}

TEST_CASE("gen_random rejects impossible column counts") {
    // d=2 leaves one free coordinate with 5 values; 6 distinct columns cannot exist.
    CHECK_THROWS_AS(gen_random(1, 6, 2, 1), ValidationError);
}

TEST_CASE("gen_hyperrectangle enumerates the lattice") {
    Instance sq = gen_hyperrectangle({{0, 1}, {0, 1}}, 3, /*seed=*/7);
    CHECK(sq.num_types == 4);
    CHECK(sq.dim == 3);
    CHECK(sq.household_count() == 3);
    CHECK(decide_mms(sq));

    Instance line = gen_hyperrectangle({{0, 2}}, 2, /*seed=*/7);
    CHECK(line.num_types == 3);

    CHECK_THROWS_AS(gen_hyperrectangle({{0, 199}, {0, 199}}, 2, 7), BudgetError);
}

TEST_CASE("disconnected example matches its printed data") {
    Instance ex2 = gen_disconnected_example();
    CHECK(ex2.columns ==
          std::vector<Vec>{{3, 0, 0, 1}, {0, 3, 0, 1}, {0, 0, 3, 1}, {1, 1, 1, 1}});
    CHECK(ex2.target == Vec{3, 3, 3, 3});
    CHECK(*ex2.count_coord == 3);
    SolutionSet xs = enumerate_exact(ex2, 10);
    REQUIRE(xs.complete);
    CHECK(xs.solutions == std::vector<Solution>{{0, 0, 0, 3}, {1, 1, 1, 0}});
}

TEST_CASE("high-mixing family ell=3 reproduces the 6x27 matrix entrywise") {
    Instance v3 = gen_high_mixing_family(3);
    CHECK(v3.num_types == 27);
    CHECK(v3.dim == 6);
    CHECK(v3.uniform_target);
    CHECK_FALSE(v3.count_coord.has_value());
    CHECK(v3.target == Vec(6, 6));

    const int expected_rows[6][27] = {
        {6, 0, 0, 3, 3, 0, 0, 6, 2, 3, 4, 5, 6, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
        {0, 6, 0, 3, 0, 3, 0, 6, 2, 3, 4, 5, 6, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
        {0, 0, 6, 0, 3, 3, 0, 0, 2, 3, 4, 5, 6, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
        {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 6, 0, 0, 3, 3, 0, 0, 6, 2, 3, 4, 5, 6},
        {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 6, 0, 3, 0, 3, 0, 6, 2, 3, 4, 5, 6},
        {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 6, 0, 3, 3, 0, 0, 2, 3, 4, 5, 6}};
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 27; ++i) {
            INFO("row " << j << " col " << i);
            CHECK(v3.columns[i][j] == expected_rows[j][i]);
        }

    CHECK_THROWS_AS(gen_high_mixing_family(2), ValidationError);
    CHECK_THROWS_AS(gen_high_mixing_family(6), ValidationError);
}

TEST_CASE("pair-block restriction counts collections of cycles") {
    // Restricted to the pair-sum columns, solutions are exactly the
    // multisets of pairs covering each index twice: 5 for ell=3 and 17 for
    // ell=4 (the cycle-collection counts).
    Instance v3 = gen_high_mixing_family(3);
    SolutionSet s3 = enumerate_exact(restrict_to(v3, 6, 3), 1000);
    REQUIRE(s3.complete);
    CHECK(s3.solutions.size() == 5);

    Instance v4 = gen_high_mixing_family(4);
    CHECK(v4.dim == 8);
    CHECK(v4.num_types == 41);
    SolutionSet s4 = enumerate_exact(restrict_to(v4, 10, 4), 1000);
    REQUIRE(s4.complete);
    CHECK(s4.solutions.size() == 17);
}

TEST_CASE("3SAT encoding shape") {
    CnfFormula f;
    f.num_vars = 3;
    f.clauses.push_back({1, 2, 3});
    Instance inst = encode_3sat(f);
    CHECK(inst.num_types == 2 * 3 + 3 * 1);
    CHECK(inst.dim == 3 + 1 + 1);
    CHECK(*inst.count_coord == 4);
    CHECK(inst.target == Vec{1, 1, 1, 7, 4});
    CHECK(decide_mms(inst));  // satisfiable: any true variable works
}

TEST_CASE("3SAT encoding: all eight sign patterns over three variables is unsatisfiable") {
    CnfFormula f;
    f.num_vars = 3;
    for (int s1 : {1, -1})
        for (int s2 : {1, -1})
            for (int s3 : {1, -1}) f.clauses.push_back({s1 * 1, s2 * 2, s3 * 3});
    REQUIRE_FALSE(oracle::brute_force_satisfiable(f));
    Instance inst = encode_3sat(f);
    CHECK_FALSE(decide_mms(inst));
}

TEST_CASE("3SAT encoding: empty clause list selects one literal per variable") {
    CnfFormula f;
    f.num_vars = 4;
    Instance inst = encode_3sat(f);
    // With no clauses the two literals of each variable coincide and merge.
    CHECK(inst.num_types == 4);
    CHECK(inst.probs == std::vector<double>(4, 0.25));
    CHECK(decide_mms(inst));
    SolutionSet xs = enumerate_exact(inst, 100);
    REQUIRE(xs.complete);
    CHECK(xs.solutions == std::vector<Solution>{{1, 1, 1, 1}});
}

TEST_CASE("3SAT feasibility equals brute-force satisfiability on random formulas") {
    SplitMix64 rng(7777);
    for (int trial = 0; trial < 40; ++trial) {
        CnfFormula f;
        f.num_vars = 3 + static_cast<int>(rng.next_below(6));  // 3..8 variables
        int clauses = 1 + static_cast<int>(rng.next_below(3 * f.num_vars));
        for (int c = 0; c < clauses; ++c) {
            std::array<int, 3> clause;
            for (int s = 0; s < 3; ++s) {
                int var = 1 + static_cast<int>(rng.next_below(f.num_vars));
                clause[s] = rng.next_bool() ? var : -var;
            }
            f.clauses.push_back(clause);
        }
        CAPTURE(trial, f.num_vars, clauses);
        CHECK(decide_mms(encode_3sat(f)) == oracle::brute_force_satisfiable(f));
    }
}

TEST_CASE("DIMACS parsing") {
    std::istringstream in(
        "c a comment\n"
        "p cnf 3 2\n"
        "1 -2 3 0\n"
        "-1 2 -3 0\n");
    CnfFormula f = read_dimacs(in);
    CHECK(f.num_vars == 3);
    REQUIRE(f.clauses.size() == 2);
    CHECK(f.clauses[0] == std::array<int, 3>{1, -2, 3});
    CHECK(f.clauses[1] == std::array<int, 3>{-1, 2, -3});

    std::istringstream bad("p cnf 2 1\n1 2 0\n");
    CHECK_THROWS_AS(read_dimacs(bad), ValidationError);
}

TEST_CASE("example-1 family blocks") {
    ExampleOneFamily fam = gen_example1();
    CHECK(fam.block_a.probs == std::vector<double>{0.25, 0.5, 0.25});

    SolutionSet a = enumerate_exact(fam.block_a, 10);
    REQUIRE(a.complete);
    CHECK(a.solutions == std::vector<Solution>{{1, 0, 0}});

    SolutionSet b = enumerate_exact(fam.block_b, 10);
    REQUIRE(b.complete);
    CHECK(b.solutions.size() == 2);

    SolutionSet c = enumerate_exact(fam.block_c, 10);
    REQUIRE(c.complete);
    CHECK(c.solutions == std::vector<Solution>{{0, 0, 1}});
}
