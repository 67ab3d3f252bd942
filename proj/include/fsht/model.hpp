#pragma once
// Core value types for finite-memory binary hypothesis testing.
//
// A machine is a deterministic finite-state automaton over the input
// alphabet {0,1} with a per-state binary decision.  Driven by an i.i.d.
// Bernoulli source it induces a Markov chain on its states; everything
// downstream (exact error analysis, bounds, search) is built on top of
// the two types defined here: Machine and HypothesisPair.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fsht {

// A linear solve hit a system that is singular beyond tolerance.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// An operation would exceed a configured size budget (state count, search width).
class resource_limit_error : public std::runtime_error {
public:
    explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

// A machine does not have the shape an operation requires (e.g. a
// diagnostic that needs exactly two decision-pure absorbing targets).
class unsupported_structure_error : public std::runtime_error {
public:
    explicit unsupported_structure_error(const std::string& what) : std::runtime_error(what) {}
};

// The two hypotheses.  H0: bits are Bernoulli(p); H1: bits are Bernoulli(q).
enum class Hypothesis : std::uint8_t { H0 = 0, H1 = 1 };

inline Hypothesis other(Hypothesis h) {
    return h == Hypothesis::H0 ? Hypothesis::H1 : Hypothesis::H0;
}

// A valid pair of source parameters, 0 < q < p < 1.  The likelihood-ratio
// constant gamma = p(1-q) / (q(1-p)) is recomputed on demand so it can
// never go stale relative to p and q.
class HypothesisPair {
public:
    HypothesisPair(double p, double q) : p_(p), q_(q) {
        if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0))
            throw std::invalid_argument("HypothesisPair: p and q must lie strictly inside (0,1)");
        if (!(q < p))
            throw std::invalid_argument("HypothesisPair: require q < p");
    }

    double p() const { return p_; }
    double q() const { return q_; }
    double gamma() const { return p_ * (1.0 - q_) / (q_ * (1.0 - p_)); }

    // Bit-probability of a one under the given hypothesis.
    double theta(Hypothesis h) const { return h == Hypothesis::H0 ? p_ : q_; }

private:
    double p_, q_;
};

// Deterministic finite-memory decision rule: `transitions[s][b]` is the next
// state on input bit b, `decision[s]` the output while sitting in state s,
// `initial` the start state.  States are 0-indexed.
struct Machine {
    int num_states = 0;
    std::vector<std::array<int, 2>> transitions;
    std::vector<Hypothesis> decision;
    int initial = 0;

    bool operator==(const Machine&) const = default;

    // Throws std::invalid_argument unless the table is well-formed.
    void validate() const {
        if (num_states <= 0)
            throw std::invalid_argument("Machine: num_states must be positive");
        if (static_cast<int>(transitions.size()) != num_states)
            throw std::invalid_argument("Machine: transition table size mismatch");
        if (static_cast<int>(decision.size()) != num_states)
            throw std::invalid_argument("Machine: decision table size mismatch");
        if (initial < 0 || initial >= num_states)
            throw std::invalid_argument("Machine: initial state out of range");
        for (const auto& row : transitions)
            for (int bit = 0; bit < 2; ++bit)
                if (row[bit] < 0 || row[bit] >= num_states)
                    throw std::invalid_argument("Machine: transition target out of range");
    }
};

// One transition.  Validates its arguments so callers can feed untrusted input.
inline int step(const Machine& m, int state, int bit) {
    if (state < 0 || state >= m.num_states)
        throw std::invalid_argument("step: state out of range");
    if (bit != 0 && bit != 1)
        throw std::invalid_argument("step: bit must be 0 or 1");
    return m.transitions[static_cast<std::size_t>(state)][static_cast<std::size_t>(bit)];
}

struct PrefixResult {
    int state;
    Hypothesis decision;
};

// Runs the machine from its initial state over a bit string written as
// '0'/'1' characters and reports the final state and its decision.
inline PrefixResult run_prefix(const Machine& m, std::string_view bits) {
    m.validate();
    int s = m.initial;
    for (char c : bits) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("run_prefix: input must consist of '0' and '1'");
        s = m.transitions[static_cast<std::size_t>(s)][c == '1' ? 1 : 0];
    }
    return {s, m.decision[static_cast<std::size_t>(s)]};
}

struct CanonicalForm {
    Machine machine;      // relabeled, unreachable states dropped, initial = 0
    int reachable_count;  // == machine.num_states
};

// Breadth-first canonical form: states are renumbered in BFS discovery
// order from the initial state, expanding input 0 before input 1, and
// unreachable states are removed.  Any two relabelings of the same
// machine map to the identical canonical form, so this is the
// deduplication key used by the exhaustive search.
inline CanonicalForm canonicalize(const Machine& m) {
    m.validate();
    std::vector<int> new_label(static_cast<std::size_t>(m.num_states), -1);
    std::vector<int> order;  // old labels in discovery order; doubles as BFS queue
    order.reserve(static_cast<std::size_t>(m.num_states));
    new_label[static_cast<std::size_t>(m.initial)] = 0;
    order.push_back(m.initial);
    for (std::size_t head = 0; head < order.size(); ++head) {
        int u = order[head];
        for (int bit = 0; bit < 2; ++bit) {
            int v = m.transitions[static_cast<std::size_t>(u)][static_cast<std::size_t>(bit)];
            if (new_label[static_cast<std::size_t>(v)] < 0) {
                new_label[static_cast<std::size_t>(v)] = static_cast<int>(order.size());
                order.push_back(v);
            }
        }
    }

    int n = static_cast<int>(order.size());
    Machine out;
    out.num_states = n;
    out.transitions.resize(static_cast<std::size_t>(n));
    out.decision.resize(static_cast<std::size_t>(n));
    out.initial = 0;
    for (int new_u = 0; new_u < n; ++new_u) {
        int old_u = order[static_cast<std::size_t>(new_u)];
        for (int bit = 0; bit < 2; ++bit) {
            int old_v = m.transitions[static_cast<std::size_t>(old_u)][static_cast<std::size_t>(bit)];
            out.transitions[static_cast<std::size_t>(new_u)][static_cast<std::size_t>(bit)] =
                new_label[static_cast<std::size_t>(old_v)];
        }
        out.decision[static_cast<std::size_t>(new_u)] = m.decision[static_cast<std::size_t>(old_u)];
    }
    return {std::move(out), n};
}

}  // namespace fsht
