#pragma once
// Constructors for the reference machine families.
//
//  * run_machine        — race between a run of consecutive ones and a run
//                         of consecutive zeros, with two absorbing ends
//  * count_ones_machine — finite-horizon threshold counter ("at least
//                         t*k - 1 ones within k samples")
//  * store_bits_machine — complete depth-k prefix tree storing the first k
//                         bits, leaves labeled by likelihood ratio
//  * last_bit_machine   — two states remembering only the previous bit
//
// States follow the library's 0-indexed convention; run_machine and s_star
// speak the 1-indexed labels [1..S] customary for birth-death layouts
// (start state s in [2, S-1]) and translate internally.

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"

namespace fsht {

// Two absorbing ends: 0-indexed state 0 decides H1 (a run of s-1 zeros was
// seen first), state S-1 decides H0 (a run of S-s ones was seen first).
// From any middle state a one advances the ones-run, a zero advances the
// zeros-run; starting a run of the other kind resets progress to one step.
// `start` uses the 1-indexed label s in [2, S-1].
inline Machine run_machine(int num_states, int start) {
    if (num_states < 3)
        throw std::invalid_argument("run_machine: need at least 3 states");
    if (start < 2 || start > num_states - 1)
        throw std::invalid_argument("run_machine: start must lie in [2, num_states-1]");

    const int S = num_states;
    const int s = start;  // 1-indexed
    Machine m;
    m.num_states = S;
    m.transitions.resize(static_cast<std::size_t>(S));
    m.decision.resize(static_cast<std::size_t>(S));
    m.initial = s - 1;

    m.transitions[0] = {0, 0};  // zeros-run complete, absorbing
    m.decision[0] = Hypothesis::H1;
    m.transitions[static_cast<std::size_t>(S - 1)] = {S - 1, S - 1};  // ones-run complete, absorbing
    m.decision[static_cast<std::size_t>(S - 1)] = Hypothesis::H0;

    for (int label = 2; label <= s; ++label) {  // zeros side, counting down on 0
        int i = label - 1;
        m.transitions[static_cast<std::size_t>(i)] = {i - 1, s};  // a one opens a fresh ones-run
        m.decision[static_cast<std::size_t>(i)] = Hypothesis::H1;
    }
    for (int label = s + 1; label <= S - 1; ++label) {  // ones side, counting up on 1
        int i = label - 1;
        m.transitions[static_cast<std::size_t>(i)] = {s - 2, i + 1};  // a zero opens a fresh zeros-run
        m.decision[static_cast<std::size_t>(i)] = Hypothesis::H0;
    }
    return m;
}

// Start state (1-indexed) that balances the two error exponents of the run
// machine: round(A*S + B) with
//   A = log2(pq) / (log2(p(1-p)) + log2(q(1-q)))
//   B = log2( ((1-q)^2/q) * log2(q(1-q)) / ((p/(1-p)^2) * log2(p(1-p))) ),
// rounded half away from zero and clamped into the valid range [2, S-1].
inline int s_star(int num_states, const HypothesisPair& pair) {
    if (num_states < 3)
        throw std::invalid_argument("s_star: need at least 3 states");
    const double p = pair.p(), q = pair.q();
    const double lpp = std::log2(p * (1.0 - p));
    const double lqq = std::log2(q * (1.0 - q));
    const double slope = std::log2(p * q) / (lpp + lqq);
    const double intercept =
        std::log2(((1.0 - q) * (1.0 - q) / q) * lqq / ((p / ((1.0 - p) * (1.0 - p))) * lpp));
    double raw = std::round(slope * num_states + intercept);
    double clamped = std::min(std::max(raw, 2.0), static_cast<double>(num_states - 1));
    return static_cast<int>(clamped);
}

// Decides whether at least t*k - 1 ones occur within the first k samples.
// Layered construction over (samples seen, ones seen): reaching the
// threshold jumps to an absorbing accept (H0) state immediately; finishing
// k samples below it falls into an absorbing reject (H1) state.  The ones
// count is capped below the threshold, so layer n holds min(n, threshold-1)+1
// live states.  Not minimal, but its size meets the quadratic bracket
// [min(t, 1-t)^2 k^2 / 2, t k^2] checked by the tests.
inline Machine count_ones_machine(int k, double t) {
    if (k < 2)
        throw std::invalid_argument("count_ones_machine: need k >= 2");
    if (!(t > 0.0 && t < 1.0))
        throw std::invalid_argument("count_ones_machine: t must lie strictly inside (0,1)");
    const double tk = t * static_cast<double>(k);
    if (std::fabs(tk - std::round(tk)) > 1e-9)
        throw std::invalid_argument("count_ones_machine: t*k must be an integer");
    const int threshold = static_cast<int>(std::round(tk)) - 1;  // ones needed

    if (threshold <= 0) {
        // Zero ones suffice: accept immediately.
        Machine m;
        m.num_states = 1;
        m.transitions = {{0, 0}};
        m.decision = {Hypothesis::H0};
        m.initial = 0;
        return m;
    }

    // State ids: layers first, then the two absorbers.
    std::vector<int> layer_base(static_cast<std::size_t>(k), 0);
    int next_id = 0;
    auto layer_width = [&](int n) { return std::min(n, threshold - 1) + 1; };
    for (int n = 0; n < k; ++n) {
        layer_base[static_cast<std::size_t>(n)] = next_id;
        next_id += layer_width(n);
    }
    const int accept = next_id;      // H0: threshold reached
    const int reject = next_id + 1;  // H1: horizon exhausted below threshold

    Machine m;
    m.num_states = next_id + 2;
    m.transitions.resize(static_cast<std::size_t>(m.num_states));
    m.decision.assign(static_cast<std::size_t>(m.num_states), Hypothesis::H1);
    m.initial = 0;
    m.transitions[static_cast<std::size_t>(accept)] = {accept, accept};
    m.decision[static_cast<std::size_t>(accept)] = Hypothesis::H0;
    m.transitions[static_cast<std::size_t>(reject)] = {reject, reject};

    auto id = [&](int n, int ones) { return layer_base[static_cast<std::size_t>(n)] + ones; };
    for (int n = 0; n < k; ++n) {
        for (int ones = 0; ones < layer_width(n); ++ones) {
            int on_one, on_zero;
            if (ones + 1 >= threshold)
                on_one = accept;
            else if (n + 1 >= k)
                on_one = reject;
            else
                on_one = id(n + 1, ones + 1);
            on_zero = (n + 1 >= k) ? reject : id(n + 1, ones);
            m.transitions[static_cast<std::size_t>(id(n, ones))] = {on_zero, on_one};
        }
    }
    return m;
}

namespace detail {

// Log-likelihood margin of H0 over H1 for a prefix with `ones` ones out of
// `len` bits; used to label prefix-tree states.  Margins within 1e-12 are
// treated as ties and go to H1, matching the optimal-decision convention.
inline Hypothesis likelihood_label(int ones, int len, const HypothesisPair& pair) {
    const double margin = static_cast<double>(ones) * (std::log(pair.p()) - std::log(pair.q())) +
                          static_cast<double>(len - ones) *
                              (std::log(1.0 - pair.p()) - std::log(1.0 - pair.q()));
    return margin > 1e-12 ? Hypothesis::H0 : Hypothesis::H1;
}

}  // namespace detail

// Complete binary prefix tree of depth k: state 0 is the empty prefix,
// children of state i are 2i+1 (next bit 0) and 2i+2 (next bit 1), and the
// 2^k depth-k leaves are absorbing.  Every state is labeled by the
// likelihood-ratio test on its prefix; only the leaf labels matter
// asymptotically.  2^(k+1) - 1 states in total.
inline Machine store_bits_machine(int k, const HypothesisPair& pair) {
    if (k < 1)
        throw std::invalid_argument("store_bits_machine: need k >= 1");
    if (k > 20)
        throw resource_limit_error("store_bits_machine: k > 20 exceeds the size budget");

    const int internal = (1 << k) - 1;
    const int total = (1 << (k + 1)) - 1;
    Machine m;
    m.num_states = total;
    m.transitions.resize(static_cast<std::size_t>(total));
    m.decision.resize(static_cast<std::size_t>(total));
    m.initial = 0;

    // Depth and ones-count follow from the heap index: state i corresponds
    // to heap node i+1, whose binary digits below the leading 1 spell the prefix.
    for (int i = 0; i < total; ++i) {
        unsigned node = static_cast<unsigned>(i) + 1;
        int depth = 0;
        while ((node >> (depth + 1)) != 0) ++depth;
        int ones = static_cast<int>(std::popcount(node & ((1u << depth) - 1u)));
        if (i < internal)
            m.transitions[static_cast<std::size_t>(i)] = {2 * i + 1, 2 * i + 2};
        else
            m.transitions[static_cast<std::size_t>(i)] = {i, i};
        m.decision[static_cast<std::size_t>(i)] = detail::likelihood_label(ones, depth, pair);
    }
    return m;
}

// Remembers only the most recent bit: state 1 after a one (decide H0),
// state 0 after a zero (decide H1).  Starts in state 0.
inline Machine last_bit_machine() {
    Machine m;
    m.num_states = 2;
    m.transitions = {{0, 1}, {0, 1}};
    m.decision = {Hypothesis::H1, Hypothesis::H0};
    m.initial = 0;
    return m;
}

}  // namespace fsht
