// Markov-chain analysis: structure, stationary vectors, absorption, exact
// error decomposition, optimal decisions, and structural diagnostics.

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using fsht::Hypothesis;
using fsht::HypothesisPair;
using fsht::Machine;
using fsht::Matrix;
using testsupport::parity_machine;
using testsupport::self_loop_machine;

TEST_CASE("dense solver handles small systems and reports singularity") {
    // x + 2y = 5, 3x + 4y = 11  ->  x = 1, y = 2 (well-conditioned).
    Matrix a(2, 2);
    a.at(0, 0) = 1;
    a.at(0, 1) = 2;
    a.at(1, 0) = 3;
    a.at(1, 1) = 4;
    std::vector<double> rhs = {5, 11};
    std::vector<double> x = fsht::solve(a, rhs);
    CHECK(x[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(x[1] == Catch::Approx(2.0).margin(1e-12));

    Matrix s(2, 2);
    s.at(0, 0) = 1;
    s.at(0, 1) = 2;
    s.at(1, 0) = 2;
    s.at(1, 1) = 4;  // rank 1
    std::vector<double> b = {1, 2};
    CHECK_THROWS_AS(fsht::solve(s, b), fsht::numerical_error);
}

TEST_CASE("transition matrix places theta on the 1-edge") {
    Machine lb = fsht::last_bit_machine();
    Matrix P = fsht::transition_matrix(lb, 0.9);
    CHECK(P.at(0, 0) == Catch::Approx(0.1).margin(1e-15));
    CHECK(P.at(0, 1) == Catch::Approx(0.9).margin(1e-15));
    CHECK(P.at(1, 0) == Catch::Approx(0.1).margin(1e-15));
    CHECK(P.at(1, 1) == Catch::Approx(0.9).margin(1e-15));

    // Self-loop machine induces the identity matrix.
    Matrix I = fsht::transition_matrix(self_loop_machine(3), 0.4);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(I.at(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-15));

    // Run machine S=3, s=2: the single interior state splits 0.1 / 0.9.
    Matrix R = fsht::transition_matrix(fsht::run_machine(3, 2), 0.9);
    CHECK(R.at(1, 0) == Catch::Approx(0.1).margin(1e-15));
    CHECK(R.at(1, 2) == Catch::Approx(0.9).margin(1e-15));

    CHECK_THROWS_AS(fsht::transition_matrix(lb, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(fsht::transition_matrix(lb, 1.0), std::invalid_argument);

    SECTION("rows are stochastic for random machines") {
        fsht::SplitMix64 rng(7);
        for (int round = 0; round < 25; ++round) {
            Machine m = testsupport::random_machine(2 + round % 7, rng);
            Matrix Q = fsht::transition_matrix(m, 0.37);
            for (int i = 0; i < m.num_states; ++i) {
                double row = 0;
                for (int j = 0; j < m.num_states; ++j) row += Q.at(i, j);
                REQUIRE(row == Catch::Approx(1.0).margin(1e-12));
            }
        }
    }
}

TEST_CASE("classify splits recurrent classes from transient states") {
    fsht::ChainStructure run = fsht::classify(fsht::run_machine(5, 3));
    REQUIRE(run.class_count() == 2);
    CHECK(run.recurrent_classes[0] == std::vector<int>{0});
    CHECK(run.recurrent_classes[1] == std::vector<int>{4});
    CHECK(run.transient == std::vector<int>{1, 2, 3});

    fsht::ChainStructure lb = fsht::classify(fsht::last_bit_machine());
    REQUIRE(lb.class_count() == 1);
    CHECK(lb.recurrent_classes[0] == std::vector<int>{0, 1});
    CHECK(lb.transient.empty());

    fsht::ChainStructure loops = fsht::classify(self_loop_machine(4));
    REQUIRE(loops.class_count() == 4);
    for (int i = 0; i < 4; ++i)
        CHECK(loops.recurrent_classes[static_cast<std::size_t>(i)] == std::vector<int>{i});
}

TEST_CASE("stationary distributions of the reference chains") {
    Machine lb = fsht::last_bit_machine();
    Matrix P = fsht::transition_matrix(lb, 0.9);
    std::vector<double> mu = fsht::stationary(P, {0, 1});
    CHECK(mu[0] == Catch::Approx(0.1).margin(1e-12));
    CHECK(mu[1] == Catch::Approx(0.9).margin(1e-12));

    Machine par = parity_machine();
    Matrix Pp = fsht::transition_matrix(par, 0.9);
    std::vector<double> mup = fsht::stationary(Pp, {0, 1});
    CHECK(mup[0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(mup[1] == Catch::Approx(0.5).margin(1e-12));

    // 3-cycle on input 1, self-loop on input 0: uniform by symmetry.
    Machine cyc;
    cyc.num_states = 3;
    cyc.transitions = {{0, 1}, {1, 2}, {2, 0}};
    cyc.decision = {Hypothesis::H0, Hypothesis::H0, Hypothesis::H1};
    cyc.initial = 0;
    Matrix Pc = fsht::transition_matrix(cyc, 0.42);
    std::vector<double> muc = fsht::stationary(Pc, {0, 1, 2});
    for (double v : muc) CHECK(v == Catch::Approx(1.0 / 3.0).margin(1e-12));

    SECTION("random irreducible machines: residual and positivity") {
        fsht::SplitMix64 rng(99);
        for (int round = 0; round < 30; ++round) {
            int S = 2 + round % 7;
            Machine m = testsupport::random_irreducible_machine(S, rng);
            for (double theta : {0.9, 0.1, 0.42}) {
                Matrix Q = fsht::transition_matrix(m, theta);
                std::vector<int> all(static_cast<std::size_t>(S));
                for (int i = 0; i < S; ++i) all[static_cast<std::size_t>(i)] = i;
                std::vector<double> v = fsht::stationary(Q, all);
                double total = 0;
                for (int j = 0; j < S; ++j) {
                    double in = 0;
                    for (int i = 0; i < S; ++i)
                        in += v[static_cast<std::size_t>(i)] * Q.at(i, j);
                    REQUIRE(in == Catch::Approx(v[static_cast<std::size_t>(j)]).margin(1e-10));
                    REQUIRE(v[static_cast<std::size_t>(j)] >= 0.0);
                    total += v[static_cast<std::size_t>(j)];
                }
                REQUIRE(total == Catch::Approx(1.0).margin(1e-10));
            }
        }
    }
}

TEST_CASE("absorption probabilities from the initial state") {
    // Run machine S=4, s=2 under theta=0.9: absorb high iff the first two
    // bits are ones.
    std::vector<double> ab = fsht::absorption(fsht::run_machine(4, 2), 0.9);
    REQUIRE(ab.size() == 2);
    CHECK(ab[0] == Catch::Approx(0.19).margin(1e-12));  // class {0}, low
    CHECK(ab[1] == Catch::Approx(0.81).margin(1e-12));  // class {3}, high

    // Initial state inside a class: unit vector.
    Machine m = fsht::run_machine(4, 2);
    m.initial = 3;
    std::vector<double> unit = fsht::absorption(m, 0.5);
    CHECK(unit[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(unit[1] == Catch::Approx(1.0).margin(1e-15));

    // Run machine S=6, s=3 under theta=0.9: low-class probability matches
    // the race closed form.
    std::vector<double> deep = fsht::absorption(fsht::run_machine(6, 3), 0.9);
    CHECK(deep[0] == Catch::Approx(0.032690).margin(1e-6));
    fsht::RunErrorClosedForm cf = fsht::run_machine_closed_form(6, 3, HypothesisPair(0.9, 0.1));
    CHECK(deep[0] == Catch::Approx(cf.p10).margin(1e-12));

    SECTION("absorption vectors sum to one for random machines") {
        fsht::SplitMix64 rng(1234);
        for (int round = 0; round < 40; ++round) {
            Machine r = testsupport::random_machine(2 + round % 8, rng);
            std::vector<double> v = fsht::absorption(r, 0.73);
            double total = 0;
            for (double x : v) {
                REQUIRE(x >= -1e-12);
                total += x;
            }
            REQUIRE(total == Catch::Approx(1.0).margin(1e-10));
        }
    }
}

TEST_CASE("exact error decomposition") {
    HypothesisPair pair(0.9, 0.1);

    fsht::ErrorReport lb = fsht::error_probability(fsht::last_bit_machine(), pair);
    CHECK(lb.pe == Catch::Approx(0.1).margin(1e-12));
    CHECK(lb.pe_given_h0 == Catch::Approx(0.1).margin(1e-12));
    CHECK(lb.pe_given_h1 == Catch::Approx(0.1).margin(1e-12));
    REQUIRE(lb.per_state_min.size() == 2);
    CHECK(lb.per_state_min[0] == Catch::Approx(0.1).margin(1e-12));
    CHECK(lb.per_state_min[1] == Catch::Approx(0.1).margin(1e-12));

    // Parity machine: identical stationary vectors under both hypotheses, so
    // even the optimal decision table cannot beat a coin flip.
    Machine par = parity_machine();
    par.decision = fsht::optimal_decision(par, pair);
    CHECK(fsht::error_probability(par, pair).pe == Catch::Approx(0.5).margin(1e-12));

    // Run machine S=6, s=3: matches the closed form to solver precision.
    fsht::ErrorReport run = fsht::error_probability(fsht::run_machine(6, 3), pair);
    fsht::RunErrorClosedForm cf = fsht::run_machine_closed_form(6, 3, pair);
    CHECK(run.pe == Catch::Approx(0.017399).margin(1e-6));
    CHECK(run.pe == Catch::Approx(cf.pe).margin(1e-12));
    CHECK(run.pe == Catch::Approx(0.5 * (run.pe_given_h0 + run.pe_given_h1)).margin(1e-12));

    SECTION("per-class reports aggregate to the conditional errors") {
        fsht::ErrorReport rep = fsht::error_probability(fsht::run_machine(5, 2), pair);
        REQUIRE(rep.per_class.size() == 2);
        double h0 = 0, h1 = 0;
        for (const fsht::ClassReport& c : rep.per_class) {
            h0 += c.absorb_h0 * c.err_h0;
            h1 += c.absorb_h1 * c.err_h1;
        }
        CHECK(h0 == Catch::Approx(rep.pe_given_h0).margin(1e-12));
        CHECK(h1 == Catch::Approx(rep.pe_given_h1).margin(1e-12));
    }
}

TEST_CASE("optimal decisions compare long-run weights with ties to H1") {
    HypothesisPair pair(0.9, 0.1);

    std::vector<Hypothesis> lb = fsht::optimal_decision(fsht::last_bit_machine(), pair);
    CHECK(lb == std::vector<Hypothesis>{Hypothesis::H1, Hypothesis::H0});

    // Equal weights everywhere: the tie rule labels recurrent states H1.
    std::vector<Hypothesis> par = fsht::optimal_decision(parity_machine(), pair);
    CHECK(par == std::vector<Hypothesis>{Hypothesis::H1, Hypothesis::H1});

    std::vector<Hypothesis> run = fsht::optimal_decision(fsht::run_machine(6, 3), pair);
    CHECK(run[0] == Hypothesis::H1);
    CHECK(run[5] == Hypothesis::H0);
    // Transient states default to H0.
    for (int s = 1; s <= 4; ++s) CHECK(run[static_cast<std::size_t>(s)] == Hypothesis::H0);
}

TEST_CASE("pe equals half the summed per-state minima") {
    // Small, fully deterministic sample here; the acceptance suite runs 500.
    fsht::SplitMix64 rng(5150);
    HypothesisPair pair(0.8, 0.3);
    for (int round = 0; round < 25; ++round) {
        Machine m = testsupport::random_irreducible_machine(2 + round % 7, rng);
        m.decision = fsht::optimal_decision(m, pair);
        fsht::ErrorReport rep = fsht::error_probability(m, pair);

        Matrix Pp = fsht::transition_matrix(m, pair.p());
        Matrix Pq = fsht::transition_matrix(m, pair.q());
        std::vector<int> all(static_cast<std::size_t>(m.num_states));
        for (int i = 0; i < m.num_states; ++i) all[static_cast<std::size_t>(i)] = i;
        std::vector<double> mup = fsht::stationary(Pp, all);
        std::vector<double> muq = fsht::stationary(Pq, all);
        double half_sum = 0;
        for (int i = 0; i < m.num_states; ++i)
            half_sum += std::min(mup[static_cast<std::size_t>(i)],
                                 muq[static_cast<std::size_t>(i)]);
        half_sum *= 0.5;
        REQUIRE(rep.pe == Catch::Approx(half_sum).margin(1e-12));
    }
}

TEST_CASE("structural diagnostics on run machines") {
    HypothesisPair pair(0.9, 0.1);
    Machine run = fsht::run_machine(5, 3);
    fsht::Diagnostics diag = fsht::structural_diagnostics(run, pair);

    // The initial state is one step short of each absorber chain: total
    // distance (S-s) + (s-1) = S-1, and it is visited with certainty.
    CHECK(diag.td[2] == 4);
    CHECK(diag.occ[2] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(diag.witness.has_value());
    int u = *diag.witness;
    CHECK(diag.td[static_cast<std::size_t>(u)] <= run.num_states);
    CHECK(diag.occ[static_cast<std::size_t>(u)] >=
          (1.0 - std::max(diag.p0, diag.p1)) / run.num_states);

    // Conditional errors match the race closed forms.
    fsht::RunErrorClosedForm cf = fsht::run_machine_closed_form(5, 3, pair);
    CHECK(diag.p0 == Catch::Approx(cf.p10).margin(1e-12));
    CHECK(diag.p1 == Catch::Approx(cf.p01).margin(1e-12));

    // Machines without two pure absorbing targets are rejected.
    CHECK_THROWS_AS(fsht::structural_diagnostics(fsht::last_bit_machine(), pair),
                    fsht::unsupported_structure_error);

    SECTION("random two-absorber machines satisfy both witness inequalities") {
        fsht::SplitMix64 rng(31337);
        int found = 0;
        for (int round = 0; round < 30; ++round) {
            Machine m = testsupport::random_two_absorber_machine(3 + round % 8, rng);
            fsht::Diagnostics d = fsht::structural_diagnostics(m, pair);
            if (std::max(d.p0, d.p1) >= 0.5) continue;  // witness not guaranteed
            REQUIRE(d.witness.has_value());
            int w = *d.witness;
            REQUIRE(d.td[static_cast<std::size_t>(w)] >= 0);
            REQUIRE(d.td[static_cast<std::size_t>(w)] <= m.num_states);
            REQUIRE(d.occ[static_cast<std::size_t>(w)] >=
                    (1.0 - std::max(d.p0, d.p1)) / m.num_states);
            ++found;
        }
        CHECK(found > 0);
    }
}
