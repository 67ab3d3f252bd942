#pragma once
// Shared helpers for the test suite: deterministic random machine
// generators and a behavioral-equivalence check.

#include <utility>
#include <vector>

#include <fsht/fsht.hpp>

namespace testsupport {

using fsht::Hypothesis;
using fsht::HypothesisPair;
using fsht::Machine;
using fsht::SplitMix64;

inline int uniform_below(SplitMix64& rng, int n) {
    return static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
}

inline Machine random_machine(int num_states, SplitMix64& rng) {
    Machine m;
    m.num_states = num_states;
    m.transitions.resize(static_cast<std::size_t>(num_states));
    m.decision.resize(static_cast<std::size_t>(num_states));
    for (int s = 0; s < num_states; ++s) {
        m.transitions[static_cast<std::size_t>(s)] = {uniform_below(rng, num_states),
                                                      uniform_below(rng, num_states)};
        m.decision[static_cast<std::size_t>(s)] =
            rng.next() & 1u ? Hypothesis::H1 : Hypothesis::H0;
    }
    m.initial = uniform_below(rng, num_states);
    return m;
}

inline bool is_irreducible(const Machine& m) {
    fsht::ChainStructure st = fsht::classify(m);
    return st.class_count() == 1 && st.transient.empty() &&
           static_cast<int>(st.recurrent_classes[0].size()) == m.num_states;
}

// Rejection-samples a uniformly random transition table until the whole
// state space is one recurrent class.
inline Machine random_irreducible_machine(int num_states, SplitMix64& rng) {
    for (;;) {
        Machine m = random_machine(num_states, rng);
        if (is_irreducible(m)) return m;
    }
}

// Random machine with exactly two absorbing target states of opposite
// decision: state 0 decides H1, state 1 decides H0, both self-looping;
// the rest transition uniformly at random.  Rejection-samples until no
// further recurrent class exists among the middle states.
inline Machine random_two_absorber_machine(int num_states, SplitMix64& rng) {
    for (;;) {
        Machine m;
        m.num_states = num_states;
        m.transitions.resize(static_cast<std::size_t>(num_states));
        m.decision.resize(static_cast<std::size_t>(num_states));
        m.transitions[0] = {0, 0};
        m.decision[0] = Hypothesis::H1;
        m.transitions[1] = {1, 1};
        m.decision[1] = Hypothesis::H0;
        for (int s = 2; s < num_states; ++s) {
            m.transitions[static_cast<std::size_t>(s)] = {uniform_below(rng, num_states),
                                                          uniform_below(rng, num_states)};
            m.decision[static_cast<std::size_t>(s)] =
                rng.next() & 1u ? Hypothesis::H1 : Hypothesis::H0;
        }
        m.initial = num_states > 2 ? 2 + uniform_below(rng, num_states - 2) : 0;
        if (fsht::classify(m).class_count() == 2) return m;
    }
}

// True when the two machines produce identical decision sequences on every
// input string: BFS over the product automaton from the two start states.
inline bool behaviorally_equivalent(const Machine& a, const Machine& b) {
    std::vector<std::vector<bool>> seen(
        static_cast<std::size_t>(a.num_states),
        std::vector<bool>(static_cast<std::size_t>(b.num_states), false));
    std::vector<std::pair<int, int>> queue{{a.initial, b.initial}};
    seen[static_cast<std::size_t>(a.initial)][static_cast<std::size_t>(b.initial)] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [sa, sb] = queue[head];
        if (a.decision[static_cast<std::size_t>(sa)] != b.decision[static_cast<std::size_t>(sb)])
            return false;
        for (int bit = 0; bit < 2; ++bit) {
            int na = a.transitions[static_cast<std::size_t>(sa)][static_cast<std::size_t>(bit)];
            int nb = b.transitions[static_cast<std::size_t>(sb)][static_cast<std::size_t>(bit)];
            if (!seen[static_cast<std::size_t>(na)][static_cast<std::size_t>(nb)]) {
                seen[static_cast<std::size_t>(na)][static_cast<std::size_t>(nb)] = true;
                queue.emplace_back(na, nb);
            }
        }
    }
    return true;
}

// Frequently used fixtures.
inline Machine parity_machine() {
    // Toggles on 1, stays on 0; decisions distinct so the optimal table is
    // forced to tie-break.
    Machine m;
    m.num_states = 2;
    m.transitions = {{0, 1}, {1, 0}};
    m.decision = {Hypothesis::H0, Hypothesis::H1};
    m.initial = 0;
    return m;
}

inline Machine self_loop_machine(int num_states) {
    Machine m;
    m.num_states = num_states;
    m.transitions.resize(static_cast<std::size_t>(num_states));
    m.decision.resize(static_cast<std::size_t>(num_states));
    for (int s = 0; s < num_states; ++s) {
        m.transitions[static_cast<std::size_t>(s)] = {s, s};
        m.decision[static_cast<std::size_t>(s)] = s % 2 ? Hypothesis::H1 : Hypothesis::H0;
    }
    m.initial = 0;
    return m;
}

}  // namespace testsupport
