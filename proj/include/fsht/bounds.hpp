#pragma once
// Closed-form bounds and exponents for the optimal asymptotic error of an
// S-state machine.  All logarithms and exponents are base 2, and every
// quantity that can shrink exponentially in S is evaluated in the log
// domain first, so the formulas stay usable far past the point where the
// probabilities themselves underflow.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "builders.hpp"
#include "model.hpp"

namespace fsht {

namespace detail {

constexpr double kLn2 = 0.6931471805599453094;

// log2(2^a + 2^b) without leaving the log domain.
inline double log2_add(double a, double b) {
    double hi = std::max(a, b), lo = std::min(a, b);
    if (!std::isfinite(hi)) return hi;
    return hi + std::log1p(std::exp2(lo - hi)) / kLn2;
}

}  // namespace detail

// Exponent of the best machine whose decision may depend only on the
// current state's side of a two-run race; the harmonic-style combination
// of the two per-hypothesis tail exponents.  Larger is better.
inline double d_exponent(const HypothesisPair& pair) {
    const double lp = std::log2(std::min(pair.p(), 1.0 - pair.p()));
    const double lq = std::log2(std::min(pair.q(), 1.0 - pair.q()));
    return -(lp * lq) / (lp + lq);
}

// Decay rate (bits per additional state) achieved by the tuned run
// machine; the converse analysis shows no deterministic machine of the
// same size does better by more than a constant factor.
inline double r_exponent(const HypothesisPair& pair) {
    const double lp = std::log2(pair.p());
    const double lq = std::log2(pair.q());
    const double lpc = std::log2(1.0 - pair.p());
    const double lqc = std::log2(1.0 - pair.q());
    return (lp * lqc - lq * lpc) / ((lp + lpc) + (lq + lqc));
}

// Error floor for *any* S-state decision rule, randomized included:
// 1 / (1 + gamma^((S-1)/2)) with gamma the one-step likelihood-ratio span.
inline double randomized_lower_bound(int num_states, const HypothesisPair& pair) {
    if (num_states < 1)
        throw std::invalid_argument("randomized_lower_bound: need at least one state");
    const double exponent = 0.5 * static_cast<double>(num_states - 1) * std::log2(pair.gamma());
    if (exponent > 40.0) return std::exp2(-exponent);  // 1 is negligible against gamma^k
    return 1.0 / (1.0 + std::exp2(exponent));
}

// Error floor for deterministic machines whose chain is irreducible under
// both hypotheses: (1/S) * max_i min(min(p,1-p)^(i-1), min(q,1-q)^(S-i)).
inline double ergodic_converse_bound(int num_states, const HypothesisPair& pair) {
    if (num_states < 1)
        throw std::invalid_argument("ergodic_converse_bound: need at least one state");
    const double lp = std::log2(std::min(pair.p(), 1.0 - pair.p()));
    const double lq = std::log2(std::min(pair.q(), 1.0 - pair.q()));
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= num_states; ++i) {
        double term = std::min(static_cast<double>(i - 1) * lp,
                               static_cast<double>(num_states - i) * lq);
        best = std::max(best, term);
    }
    return std::exp2(best) / static_cast<double>(num_states);
}

// Exact absorption probabilities of the run machine, straight from the
// two-run race closed form.  pXY = Pr(absorb at the X end | hypothesis Y):
// end 0 is the ones-run (decide-H0) absorber, end 1 the zeros-run one.
struct RunErrorClosedForm {
    double p00 = 0.0, p10 = 0.0;  // under H0 (theta = p)
    double p01 = 0.0, p11 = 0.0;  // under H1 (theta = q)
    double pe = 0.0;              // (p01 + p10) / 2
    double log2_p10 = 0.0, log2_p01 = 0.0, log2_pe = 0.0;
};

namespace detail {

// log2 Pr(a ones in a row occur before b zeros in a row | ones have
// probability theta), starting with no run in progress:
//
//   N / D  with  N = 1 - (1-theta)^b,
//                D = (1 - (1-theta)^(b-1)) + (1-theta)^(b-1) / theta^(a-1).
inline double log2_run_race(double theta, int a, int b) {
    const double l1 = std::log2(theta);
    const double l0 = std::log2(1.0 - theta);
    const double log2_x = static_cast<double>(b - 1) * l0;       // x = (1-theta)^(b-1)
    const double log2_r = log2_x - static_cast<double>(a - 1) * l1;  // r = x / theta^(a-1)

    const double pb = std::exp2(static_cast<double>(b) * l0);  // (1-theta)^b, may underflow to 0
    const double log2_n = std::log1p(-pb) / kLn2;

    const double one_minus_x = -std::expm1(static_cast<double>(b - 1) * l0 * kLn2);
    double log2_d;
    if (log2_r > 40.0)  // r dwarfs 1-x: stay in the log domain
        log2_d = log2_r + std::log1p(one_minus_x * std::exp2(-log2_r)) / kLn2;
    else
        log2_d = std::log2(one_minus_x + std::exp2(log2_r));
    return log2_n - log2_d;
}

}  // namespace detail

inline RunErrorClosedForm run_machine_closed_form(int num_states, int start, const HypothesisPair& pair) {
    if (num_states < 3)
        throw std::invalid_argument("run_machine_closed_form: need at least 3 states");
    if (start < 2 || start > num_states - 1)
        throw std::invalid_argument("run_machine_closed_form: start must lie in [2, num_states-1]");
    const int a = num_states - start;  // ones needed to absorb high
    const int b = start - 1;           // zeros needed to absorb low

    RunErrorClosedForm cf;
    const double log2_p00 = detail::log2_run_race(pair.p(), a, b);
    const double log2_p11 = detail::log2_run_race(1.0 - pair.q(), b, a);  // zeros win under H1
    cf.log2_p10 = detail::log2_run_race(1.0 - pair.p(), b, a);            // zeros win under H0: error
    cf.log2_p01 = detail::log2_run_race(pair.q(), a, b);                  // ones win under H1: error
    cf.p00 = std::exp2(log2_p00);
    cf.p11 = std::exp2(log2_p11);
    cf.p10 = std::exp2(cf.log2_p10);
    cf.p01 = std::exp2(cf.log2_p01);
    cf.log2_pe = detail::log2_add(cf.log2_p10, cf.log2_p01) - 1.0;
    cf.pe = std::exp2(cf.log2_pe);
    return cf;
}

// Clamp constant of the tuned-run-machine bound.
inline double c_constant(const HypothesisPair& pair) {
    const double p = pair.p(), q = pair.q();
    const double num = (1.0 - p) * (1.0 - p) * (1.0 - q) * (1.0 - q) * std::log2(q * (1.0 - q));
    const double den = p * q * std::log2(p * (1.0 - p));
    return std::log2(num / den);
}

// Unclamped log2 of the closed-form upper bound achieved by the run
// machine started at s_star: prefactor minus r * (S - 1) bits.
inline double exponential_upper_bound_log2(int num_states, const HypothesisPair& pair) {
    if (num_states < 3)
        throw std::invalid_argument("exponential_upper_bound: need at least 3 states");
    const double p = pair.p(), q = pair.q();
    const double c = c_constant(pair);
    const double pref = std::max((1.0 + c) * std::log2(p) - (2.0 - c) * std::log2(1.0 - p),
                                 (1.0 + c) * std::log2(1.0 - q) - (2.0 - c) * std::log2(q));
    return pref - r_exponent(pair) * static_cast<double>(num_states - 1);
}

// The same bound as a probability, clamped to 1.
inline double exponential_upper_bound(int num_states, const HypothesisPair& pair) {
    const double l = exponential_upper_bound_log2(num_states, pair);
    return l >= 0.0 ? 1.0 : std::exp2(l);
}

// Best achievable exponent with unbounded memory: the Chernoff
// information of the two bit distributions,
//   max_l -log2( p^l q^(1-l) + (1-p)^l (1-q)^(1-l) ),
// located by ternary search (the objective is concave in l).
inline double chernoff_information(double p, double q) {
    if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0))
        throw std::invalid_argument("chernoff_information: p and q must lie strictly inside (0,1)");
    auto objective = [&](double l) {
        return -std::log2(std::pow(p, l) * std::pow(q, 1.0 - l) +
                          std::pow(1.0 - p, l) * std::pow(1.0 - q, 1.0 - l));
    };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-12) {
        double m1 = lo + (hi - lo) / 3.0;
        double m2 = hi - (hi - lo) / 3.0;
        if (objective(m1) < objective(m2))
            lo = m1;
        else
            hi = m2;
    }
    return objective(0.5 * (lo + hi));
}

inline double chernoff_information(const HypothesisPair& pair) {
    return chernoff_information(pair.p(), pair.q());
}

// Both finite-S exponents against their common extreme-hypothesis limit
// -log2(min(q, 1-q)), tabulated along a sequence of p values: shows the
// two pinching together as p -> 1.
struct ExponentGapRow {
    double p = 0.0;
    double d_exp = 0.0;
    double r_exp = 0.0;
    double target = 0.0;
};

inline std::vector<ExponentGapRow> exponent_convergence_table(double q_fixed,
                                                              const std::vector<double>& p_sequence) {
    if (!(q_fixed > 0.0 && q_fixed < 0.5))
        throw std::invalid_argument("exponent_convergence_table: q must lie in (0, 1/2)");
    const double target = -std::log2(std::min(q_fixed, 1.0 - q_fixed));
    std::vector<ExponentGapRow> rows;
    rows.reserve(p_sequence.size());
    for (double p : p_sequence) {
        HypothesisPair pair(p, q_fixed);
        rows.push_back({p, d_exponent(pair), r_exponent(pair), target});
    }
    return rows;
}

// One-stop summary of every bound at a given size.  Entries that need the
// run-machine construction (S >= 3) are NaN below that size, with s_star = -1.
struct BoundReport {
    int num_states = 0;
    double d_exp = 0.0;
    double r_exp = 0.0;
    double randomized_lb = 0.0;
    double ergodic_lb = 0.0;
    double run_pe_exact = 0.0;  // exact error of the run machine started at s_star
    double tuned_run_ub = 0.0;  // closed-form bound on the same quantity
    int s_star = -1;
    double c_const = 0.0;
    double chernoff = 0.0;
};

inline BoundReport bounds_report(int num_states, const HypothesisPair& pair) {
    if (num_states < 1)
        throw std::invalid_argument("bounds_report: need at least one state");
    BoundReport rep;
    rep.num_states = num_states;
    rep.d_exp = d_exponent(pair);
    rep.r_exp = r_exponent(pair);
    rep.randomized_lb = randomized_lower_bound(num_states, pair);
    rep.ergodic_lb = ergodic_converse_bound(num_states, pair);
    rep.c_const = c_constant(pair);
    rep.chernoff = chernoff_information(pair);
    if (num_states >= 3) {
        rep.s_star = s_star(num_states, pair);
        rep.run_pe_exact = run_machine_closed_form(num_states, rep.s_star, pair).pe;
        rep.tuned_run_ub = exponential_upper_bound(num_states, pair);
    } else {
        rep.run_pe_exact = std::numeric_limits<double>::quiet_NaN();
        rep.tuned_run_ub = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

}  // namespace fsht
