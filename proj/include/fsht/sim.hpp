#pragma once
// Monte Carlo validation of the exact error computations.
//
// Reproducibility contract: results are a pure function of (machine,
// parameters, steps, trials, seed) and are bit-identical for every worker
// count.  Each trial draws from its own counter-derived SplitMix64 stream,
// trials are assigned to workers as contiguous index chunks, and the final
// reduction walks the trial-indexed buffer in fixed order with pairwise
// summation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "model.hpp"

namespace fsht {

// SplitMix64: tiny, fast, and fully portable (64-bit integer ops only).
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits; exact in IEEE754.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Independent sub-seed for stream `index` under a master seed.  One
// SplitMix64 step is a strong 64-bit mix, so distinct indices give
// decorrelated streams regardless of the master seed's quality.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    return g.next();
}

struct SimulationReport {
    double empirical_pe = 0.0;
    double std_error = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

namespace detail {

// Deterministic sum independent of accumulation hardware quirks: classic
// pairwise (tree) reduction over a fixed-order buffer.
inline double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += x[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

}  // namespace detail

// Fraction of the first `steps` decisions that disagree with `truth`, run
// on i.i.d. bits with one-probability `theta`, averaged over `trials`
// independent trials.  `std_error` is the standard error of that mean
// (0 when trials == 1).
inline SimulationReport simulate_time_average(const Machine& m, double theta, Hypothesis truth,
                                              std::uint64_t steps, std::uint64_t trials,
                                              std::uint64_t seed, int workers = 1) {
    m.validate();
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("simulate_time_average: theta must lie strictly in (0,1)");
    if (steps < 1) throw std::invalid_argument("simulate_time_average: steps must be positive");
    if (trials < 1) throw std::invalid_argument("simulate_time_average: trials must be positive");
    if (workers < 1) throw std::invalid_argument("simulate_time_average: need at least one worker");

    // Flat copies keep the hot loop free of double indirection.
    const int S = m.num_states;
    std::vector<int> flat(static_cast<std::size_t>(2 * S));
    std::vector<std::uint8_t> wrong(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) {
        flat[static_cast<std::size_t>(2 * s)] = m.transitions[static_cast<std::size_t>(s)][0];
        flat[static_cast<std::size_t>(2 * s + 1)] = m.transitions[static_cast<std::size_t>(s)][1];
        wrong[static_cast<std::size_t>(s)] = m.decision[static_cast<std::size_t>(s)] != truth;
    }

    std::vector<double> per_trial(trials);
    auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
        const int* t = flat.data();
        const std::uint8_t* w = wrong.data();
        for (std::uint64_t trial = lo; trial < hi; ++trial) {
            SplitMix64 g(derive_stream(seed, trial));
            int s = m.initial;
            std::uint64_t errors = 0;
            for (std::uint64_t i = 0; i < steps; ++i) {
                const int bit = g.next_unit() < theta;
                s = t[2 * s + bit];
                errors += w[s];
            }
            per_trial[trial] = static_cast<double>(errors) / static_cast<double>(steps);
        }
    };

    const std::uint64_t nworkers = std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), trials);
    if (nworkers <= 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nworkers));
        for (std::uint64_t w = 0; w < nworkers; ++w)
            pool.emplace_back(run_range, trials * w / nworkers, trials * (w + 1) / nworkers);
        for (auto& t : pool) t.join();
    }

    const double mean = detail::pairwise_sum(per_trial) / static_cast<double>(trials);
    double se = 0.0;
    if (trials >= 2) {
        std::vector<double> sq(per_trial.size());
        for (std::size_t i = 0; i < sq.size(); ++i) {
            const double d = per_trial[i] - mean;
            sq[i] = d * d;
        }
        const double var = detail::pairwise_sum(sq) / static_cast<double>(trials - 1);
        se = std::sqrt(var / static_cast<double>(trials));
    }

    SimulationReport rep;
    rep.empirical_pe = mean;
    rep.std_error = se;
    rep.steps = steps;
    rep.trials = trials;
    rep.seed = seed;
    return rep;
}

// Equal-prior Bayes error estimate: one conditional run per hypothesis on
// independent derived seeds, combined as the average.  The combined
// standard error treats the two runs as independent.
inline SimulationReport simulate_bayes(const Machine& m, const HypothesisPair& pair,
                                       std::uint64_t steps, std::uint64_t trials,
                                       std::uint64_t seed, int workers = 1) {
    const SimulationReport under_p = simulate_time_average(
        m, pair.p(), Hypothesis::H0, steps, trials, derive_stream(seed, 0), workers);
    const SimulationReport under_q = simulate_time_average(
        m, pair.q(), Hypothesis::H1, steps, trials, derive_stream(seed, 1), workers);

    SimulationReport rep;
    rep.empirical_pe = 0.5 * (under_p.empirical_pe + under_q.empirical_pe);
    rep.std_error = 0.5 * std::sqrt(under_p.std_error * under_p.std_error +
                                    under_q.std_error * under_q.std_error);
    rep.steps = steps;
    rep.trials = trials;
    rep.seed = seed;
    return rep;
}

}  // namespace fsht
