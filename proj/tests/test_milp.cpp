#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "scos/errors.hpp"
#include "random_ip.hpp"
#include "scos/milp.hpp"

using namespace scos;

TEST(LpRelaxation, Bounds) {
    IPModel m;
    int x = m.add_variable("x", VarKind::continuous, -kInf, kInf, 1.0);
    m.add_constraint({{x, 1}}, Sense::ge, 3);
    m.add_constraint({{x, 1}}, Sense::le, 10);
    Solution s = solve_lp_relaxation(m);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_NEAR(s.x[x], 3, 1e-9);
    EXPECT_NEAR(s.objective, 3, 1e-9);
}

TEST(LpRelaxation, SimplexCorner) {
    IPModel m;
    int x = m.add_variable("x", VarKind::continuous, 0, 1, -1);
    int y = m.add_variable("y", VarKind::continuous, 0, 1, -1);
    m.add_constraint({{x, 1}, {y, 1}}, Sense::le, 1);
    Solution s = solve_lp_relaxation(m);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_NEAR(s.objective, -1, 1e-9);
}

TEST(LpRelaxation, InfeasibleAndUnbounded) {
    IPModel m;
    int x = m.add_variable("x", VarKind::continuous, -kInf, kInf, 0);
    m.add_constraint({{x, 1}}, Sense::ge, 2);
    m.add_constraint({{x, 1}}, Sense::le, 1);
    EXPECT_EQ(solve_lp_relaxation(m).status, SolveStatus::infeasible);

    IPModel u;
    int y = u.add_variable("y", VarKind::continuous, 0, kInf, -1);
    u.add_constraint({{y, 1}}, Sense::ge, 1);
    EXPECT_EQ(solve_lp_relaxation(u).status, SolveStatus::unbounded);
}

TEST(LpRelaxation, EqualityAndFreeVariables) {
    // min x + 2y  s.t. x + y = 4, x - y <= 1, y free
    IPModel m;
    int x = m.add_variable("x", VarKind::continuous, 0, kInf, 1);
    int y = m.add_variable("y", VarKind::continuous, -kInf, kInf, 2);
    m.add_constraint({{x, 1}, {y, 1}}, Sense::eq, 4);
    m.add_constraint({{x, 1}, {y, -1}}, Sense::le, 1);
    Solution s = solve_lp_relaxation(m);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_NEAR(s.x[x], 2.5, 1e-9);
    EXPECT_NEAR(s.x[y], 1.5, 1e-9);
}

TEST(Exact, Knapsack) {
    IPModel m;
    int a = m.add_variable("x1", VarKind::binary, 0, 1, -3);
    int b = m.add_variable("x2", VarKind::binary, 0, 1, -2);
    m.add_constraint({{a, 2}, {b, 2}}, Sense::le, 3);
    Solution s = solve_exact(m);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_EQ(s.x[a], 1);
    EXPECT_EQ(s.x[b], 0);
    EXPECT_EQ(s.objective, -3);
    Solution e = solve_enumerate(m);
    EXPECT_EQ(e.x, s.x);
    EXPECT_EQ(e.objective, -3);
}

TEST(Exact, NoConstraints) {
    IPModel m;
    m.add_variable("x", VarKind::binary, 0, 1, 1);
    Solution s = solve_exact(m);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_EQ(s.x[0], 0);
    EXPECT_EQ(s.objective, 0);
    IPModel n;
    n.add_variable("x", VarKind::binary, 0, 1, -1);
    EXPECT_EQ(solve_enumerate(n).x[0], 1);
}

TEST(Exact, InfeasibleToy) {
    IPModel m;
    int x = m.add_variable("x", VarKind::integer, 0, 3, 1);
    int y = m.add_variable("y", VarKind::integer, 0, 3, 1);
    m.add_constraint({{x, 2}, {y, 2}}, Sense::eq, 3);
    EXPECT_EQ(solve_exact(m).status, SolveStatus::infeasible);
    EXPECT_EQ(solve_enumerate(m).status, SolveStatus::infeasible);
}

TEST(Exact, ObjectiveConstant) {
    IPModel m;
    m.add_variable("x", VarKind::integer, 1, 5, 2);
    m.set_objective_constant(10);
    EXPECT_EQ(solve_exact(m).objective, 12);
    EXPECT_EQ(solve_enumerate(m).objective, 12);
}

TEST(Exact, NodeLimit) {
    // two knapsack rows; root cuts alone do not close this one
    IPModel m;
    std::vector<Term> r1, r2;
    for (int i = 0; i < 14; ++i) {
        int v = m.add_variable("x" + std::to_string(i), VarKind::binary, 0, 1, -(10 + (i * 7) % 11));
        r1.emplace_back(v, 3 + (i * 5) % 13);
        r2.emplace_back(v, 2 + (i * 3) % 7);
    }
    m.add_constraint(r1, Sense::le, 56);
    m.add_constraint(r2, Sense::le, 35);
    SolveOptions o;
    o.node_limit = 1;
    Solution s = solve_exact(m, o);
    EXPECT_EQ(s.status, SolveStatus::node_limit);
    o.node_limit = 1'000'000;
    Solution full = solve_exact(m, o);
    EXPECT_EQ(full.status, SolveStatus::optimal);
    EXPECT_NEAR(full.objective, solve_enumerate(m).objective, 1e-9);
    EXPECT_THROW(solve_enumerate(m, 100), InputError);
}

TEST(Exact, RejectsUnboundedInteger) {
    IPModel m;
    m.add_variable("x", VarKind::integer, 0, kInf, 1);
    EXPECT_THROW(solve_exact(m), InputError);
}

TEST(Model, CanonicalAndErrors) {
    IPModel m;
    int x = m.add_variable("x", VarKind::integer, 0, 4);
    int y = m.add_variable("y", VarKind::integer, 0, 4);
    m.add_constraint({{y, 1}, {x, 2}, {y, 3}, {x, -2}}, Sense::le, 5);
    ASSERT_EQ(m.constraints()[0].terms.size(), 1u);
    EXPECT_EQ(m.constraints()[0].terms[0].first, y);
    EXPECT_EQ(m.constraints()[0].terms[0].second, 4);
    EXPECT_THROW(m.add_variable("x", VarKind::integer, 0, 1), InternalError);
    EXPECT_THROW(m.add_constraint({{7, 1}}, Sense::le, 1), InternalError);
    EXPECT_THROW(m.add_variable("b", VarKind::binary, 0, 2), InternalError);
    EXPECT_EQ(m.find("y"), y);
    EXPECT_EQ(m.find("nope"), -1);
    std::ostringstream os;
    m.write_lp(os);
    EXPECT_NE(os.str().find("Subject To"), std::string::npos);
    EXPECT_NE(os.str().find("Generals\n x\n y\n"), std::string::npos);
}

namespace {

IPModel random_model(std::mt19937_64& gen, int nvars) {
    IPModel m;
    std::uniform_int_distribution<int> coin(0, 2), coef(-6, 9), cost(-9, 9), rng3(1, 3);
    for (int j = 0; j < nvars; ++j) {
        if (coin(gen) == 0)
            m.add_variable("x" + std::to_string(j), VarKind::integer, 0, rng3(gen), cost(gen));
        else
            m.add_variable("x" + std::to_string(j), VarKind::binary, 0, 1, cost(gen));
    }
    std::uniform_int_distribution<int> ncons(1, 6), sense(0, 5);
    const int mcount = ncons(gen);
    for (int i = 0; i < mcount; ++i) {
        std::vector<Term> row;
        double sum_pos = 0;
        for (int j = 0; j < nvars; ++j) {
            if (coin(gen) == 0)
                continue;
            const int a = coef(gen);
            row.emplace_back(j, a);
            if (a > 0)
                sum_pos += a;
        }
        const int s = sense(gen);
        const double rhs = std::floor(sum_pos * 0.4);
        m.add_constraint(row, s == 0 ? Sense::ge : (s == 1 ? Sense::eq : Sense::le), s == 0 ? -rhs : rhs);
    }
    return m;
}

} // namespace

TEST(Exact, AgreesWithEnumeration) {
    std::mt19937_64 gen(12345);
    int feasible = 0;
    for (int trial = 0; trial < 60; ++trial) {
        IPModel m = random_model(gen, 5 + trial % 10);
        Solution e = solve_enumerate(m);
        Solution s = solve_exact(m);
        ASSERT_EQ(e.status, s.status) << "trial " << trial;
        if (e.status == SolveStatus::optimal) {
            ++feasible;
            EXPECT_NEAR(e.objective, s.objective, 1e-9) << "trial " << trial;
            EXPECT_LE(m.max_violation(s.x), 1e-6);
        }
    }
    EXPECT_GT(feasible, 20);
}

TEST(Exact, Deterministic) {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 10; ++trial) {
        IPModel m = random_model(gen, 14);
        Solution a = solve_exact(m), b = solve_exact(m);
        EXPECT_EQ(a.status, b.status);
        EXPECT_EQ(a.x, b.x);
        EXPECT_EQ(a.objective, b.objective);
        EXPECT_EQ(a.nodes_explored, b.nodes_explored);
    }
}

TEST(Exact, AgreesWithEnumerationOnEveryShape) {
    std::mt19937_64 gen(4242);
    int feasible = 0;
    for (int trial = 0; trial < 90; ++trial) {
        const IPModel m = scos::testing::random_ip(gen, trial);
        const Solution e = solve_enumerate(m);
        const Solution s = solve_exact(m);
        ASSERT_EQ(e.status, s.status) << "trial " << trial;
        if (e.status != SolveStatus::optimal)
            continue;
        ++feasible;
        EXPECT_NEAR(e.objective, s.objective, 1e-9) << "trial " << trial;
        EXPECT_LE(m.max_violation(s.x), 1e-6) << "trial " << trial;
    }
    EXPECT_GT(feasible, 60);
}
