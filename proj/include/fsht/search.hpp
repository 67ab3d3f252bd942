#pragma once
// Exhaustive search for the best S-state machine.
//
// Machines are enumerated directly in breadth-first canonical form (state
// labels equal BFS discovery order from state 0, input 0 explored before
// input 1, every state reachable), so each reachable transition structure
// appears exactly once.  Decision tables are never enumerated: for a fixed
// structure the error-minimizing table is computed analytically from the
// two long-run weight vectors.  Machines with fewer than S reachable
// states never show up at size S; they are covered at their true size and
// padding arguments make the minimum non-increasing in S anyway.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "chain.hpp"
#include "model.hpp"

namespace fsht {

inline constexpr int kDefaultSearchLimit = 5;

// Calls `visit(table)` for every canonical transition table with exactly
// `num_states` reachable states, in lexicographic order of the flattened
// table.  `table` is laid out row-major: table[2*s + bit].
template <typename Visitor>
void for_each_canonical(int num_states, Visitor&& visit) {
    if (num_states < 1)
        throw std::invalid_argument("for_each_canonical: need at least one state");
    const int cells = 2 * num_states;
    std::vector<int> table(static_cast<std::size_t>(cells), 0);

    // Depth-first over cells; `discovered` counts states assigned labels so
    // far.  A value equal to `discovered` introduces the next fresh label,
    // which is exactly the BFS-canonical constraint.
    auto rec = [&](auto&& self, int cell, int discovered) -> void {
        if (cell == cells) {
            if (discovered == num_states) visit(const_cast<const std::vector<int>&>(table));
            return;
        }
        if (cell / 2 >= discovered) return;  // row belongs to an undiscovered state
        const int hi = std::min(discovered, num_states - 1);
        for (int v = 0; v <= hi; ++v) {
            table[static_cast<std::size_t>(cell)] = v;
            self(self, cell + 1, v == discovered ? discovered + 1 : discovered);
        }
    };
    rec(rec, 0, 1);
}

// Materializes the canonical enumeration as machines (decision tables are
// placeholders, all H0; pick them per hypothesis pair downstream).
// Guarded by `limit` because the count explodes combinatorially.
inline std::vector<Machine> enumerate_canonical(int num_states, int limit = kDefaultSearchLimit) {
    if (num_states > limit)
        throw resource_limit_error("enumerate_canonical: num_states exceeds the configured limit");
    std::vector<Machine> out;
    for_each_canonical(num_states, [&](const std::vector<int>& table) {
        Machine m;
        m.num_states = num_states;
        m.initial = 0;
        m.transitions.resize(static_cast<std::size_t>(num_states));
        for (int s = 0; s < num_states; ++s)
            m.transitions[static_cast<std::size_t>(s)] = {table[static_cast<std::size_t>(2 * s)],
                                                          table[static_cast<std::size_t>(2 * s + 1)]};
        m.decision.assign(static_cast<std::size_t>(num_states), Hypothesis::H0);
        out.push_back(std::move(m));
    });
    return out;
}

namespace detail {

// Error of the machine under its best decision table: half the summed
// per-state minimum of the two long-run weight vectors.
inline double optimal_error_of(const Machine& m, const HypothesisPair& pair) {
    ChainStructure st = classify(m);
    std::vector<double> wp = limiting_occupancy(m, pair.p(), st);
    std::vector<double> wq = limiting_occupancy(m, pair.q(), st);
    double acc = 0.0;
    for (int i = 0; i < m.num_states; ++i)
        acc += std::min(wp[static_cast<std::size_t>(i)], wq[static_cast<std::size_t>(i)]);
    return 0.5 * acc;
}

}  // namespace detail

struct SearchResult {
    Machine best_machine;       // optimal decisions applied
    double pstar = 0.0;         // its exact asymptotic error
    std::uint64_t enumerated = 0;  // canonical machines evaluated
    int num_states = 0;
};

// Minimum asymptotic error over all machines with at most `num_states`
// states, by exhaustive canonical enumeration.  Deterministic for any
// worker count: the stream is split into contiguous index chunks and the
// winner is the lowest (error, stream index) pair, the index order being
// the lexicographic table order.
inline SearchResult optimal_error(int num_states, const HypothesisPair& pair, int workers = 1,
                                  int limit = kDefaultSearchLimit) {
    if (workers < 1)
        throw std::invalid_argument("optimal_error: need at least one worker");
    std::vector<Machine> machines = enumerate_canonical(num_states, limit);
    const std::size_t n = machines.size();
    const std::size_t nworkers = std::min<std::size_t>(static_cast<std::size_t>(workers), n);

    std::vector<std::pair<double, std::size_t>> best(nworkers,
                                                     {std::numeric_limits<double>::infinity(), 0});
    auto scan = [&](std::size_t w) {
        const std::size_t lo = n * w / nworkers;
        const std::size_t hi = n * (w + 1) / nworkers;
        double best_pe = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            double pe = detail::optimal_error_of(machines[i], pair);
            if (pe < best_pe) {
                best_pe = pe;
                best_idx = i;
            }
        }
        best[w] = {best_pe, best_idx};
    };

    if (nworkers <= 1) {
        scan(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nworkers);
        for (std::size_t w = 0; w < nworkers; ++w) pool.emplace_back(scan, w);
        for (auto& t : pool) t.join();
    }

    std::pair<double, std::size_t> winner = best[0];
    for (std::size_t w = 1; w < nworkers; ++w)
        if (best[w].first < winner.first ||
            (best[w].first == winner.first && best[w].second < winner.second))
            winner = best[w];

    SearchResult result;
    result.best_machine = machines[winner.second];
    result.best_machine.decision = optimal_decision(result.best_machine, pair);
    result.pstar = winner.first;
    result.enumerated = n;
    result.num_states = num_states;
    return result;
}

// Brute-force oracle for tiny sizes: every transition table over
// `num_states` states crossed with every initial state, no canonical
// enumeration.  Each candidate is reduced to canonical form before
// evaluation so the arithmetic matches optimal_error() bit for bit.
inline double naive_optimal_error(int num_states, const HypothesisPair& pair) {
    if (num_states < 1 || num_states > 3)
        throw std::invalid_argument("naive_optimal_error: supported for 1 to 3 states only");
    const int S = num_states;
    const int cells = 2 * S;
    std::uint64_t total = 1;
    for (int c = 0; c < cells; ++c) total *= static_cast<std::uint64_t>(S);

    double best = std::numeric_limits<double>::infinity();
    Machine m;
    m.num_states = S;
    m.transitions.resize(static_cast<std::size_t>(S));
    m.decision.assign(static_cast<std::size_t>(S), Hypothesis::H0);
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t rest = code;
        for (int s = 0; s < S; ++s)
            for (int bit = 0; bit < 2; ++bit) {
                m.transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(bit)] =
                    static_cast<int>(rest % static_cast<std::uint64_t>(S));
                rest /= static_cast<std::uint64_t>(S);
            }
        for (int init = 0; init < S; ++init) {
            m.initial = init;
            double pe = detail::optimal_error_of(canonicalize(m).machine, pair);
            best = std::min(best, pe);
        }
    }
    return best;
}

}  // namespace fsht
