#pragma once
// Exact Markov-chain analysis of a machine driven by Bernoulli(theta) bits.
//
// The induced chain is decomposed into recurrent classes (closed strongly
// connected components) and transient states.  The long-run fraction of
// time spent in a recurrent state i equals
//
//     w_i(theta) = Pr(absorb into i's class) * mu_i(theta),
//
// where mu is the stationary distribution of the class, and is zero for
// transient states.  The asymptotic (time-averaged) error probability of
// a machine under equal priors is then
//
//     pe = 1/2 * sum_i w_i(p) * [decision(i) = H1]
//        + 1/2 * sum_i w_i(q) * [decision(i) = H0],
//
// and the decision table minimizing it picks, per state, the hypothesis
// with the larger weight (ties to H1), giving pe = 1/2 * sum_i min(w_i(p), w_i(q)).

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"

namespace fsht {

// Row-stochastic transition matrix of the induced chain:
// from state i, mass theta goes to transitions[i][1] and 1-theta to transitions[i][0].
inline Matrix transition_matrix(const Machine& m, double theta) {
    m.validate();
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("transition_matrix: theta must lie strictly inside (0,1)");
    Matrix P(m.num_states, m.num_states);
    for (int i = 0; i < m.num_states; ++i) {
        P.at(i, m.transitions[static_cast<std::size_t>(i)][0]) += 1.0 - theta;
        P.at(i, m.transitions[static_cast<std::size_t>(i)][1]) += theta;
    }
    return P;
}

// Chain skeleton: recurrent classes are the closed SCCs of the transition
// digraph (which does not depend on theta as long as 0 < theta < 1).
// Classes are sorted by their smallest state, states within a class ascending.
struct ChainStructure {
    std::vector<std::vector<int>> recurrent_classes;
    std::vector<int> transient;

    int class_count() const { return static_cast<int>(recurrent_classes.size()); }
};

inline ChainStructure classify(const Machine& m) {
    m.validate();
    const int n = m.num_states;

    // Tarjan's SCC algorithm, iterative to keep deep chains off the call stack.
    std::vector<int> index(static_cast<std::size_t>(n), -1);
    std::vector<int> low(static_cast<std::size_t>(n), 0);
    std::vector<int> comp_of(static_cast<std::size_t>(n), -1);
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    std::vector<std::pair<int, int>> frames;  // (state, next out-edge)
    std::vector<std::vector<int>> comps;
    int next_index = 0;

    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] >= 0) continue;
        index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = next_index++;
        stack.push_back(root);
        on_stack[static_cast<std::size_t>(root)] = 1;
        frames.emplace_back(root, 0);
        while (!frames.empty()) {
            int u = frames.back().first;
            if (frames.back().second < 2) {
                int v = m.transitions[static_cast<std::size_t>(u)][static_cast<std::size_t>(frames.back().second++)];
                if (index[static_cast<std::size_t>(v)] < 0) {
                    index[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = next_index++;
                    stack.push_back(v);
                    on_stack[static_cast<std::size_t>(v)] = 1;
                    frames.emplace_back(v, 0);
                } else if (on_stack[static_cast<std::size_t>(v)]) {
                    low[static_cast<std::size_t>(u)] =
                        std::min(low[static_cast<std::size_t>(u)], index[static_cast<std::size_t>(v)]);
                }
            } else {
                frames.pop_back();
                if (!frames.empty()) {
                    int parent = frames.back().first;
                    low[static_cast<std::size_t>(parent)] =
                        std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(u)]);
                }
                if (low[static_cast<std::size_t>(u)] == index[static_cast<std::size_t>(u)]) {
                    std::vector<int> scc;
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[static_cast<std::size_t>(w)] = 0;
                        comp_of[static_cast<std::size_t>(w)] = static_cast<int>(comps.size());
                        scc.push_back(w);
                        if (w == u) break;
                    }
                    comps.push_back(std::move(scc));
                }
            }
        }
    }

    ChainStructure st;
    for (auto& scc : comps) {
        bool closed = true;
        for (int u : scc)
            for (int bit = 0; bit < 2 && closed; ++bit)
                closed = comp_of[static_cast<std::size_t>(
                             m.transitions[static_cast<std::size_t>(u)][static_cast<std::size_t>(bit)])] ==
                         comp_of[static_cast<std::size_t>(u)];
        std::sort(scc.begin(), scc.end());
        if (closed)
            st.recurrent_classes.push_back(std::move(scc));
        else
            st.transient.insert(st.transient.end(), scc.begin(), scc.end());
    }
    std::sort(st.recurrent_classes.begin(), st.recurrent_classes.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) { return a.front() < b.front(); });
    std::sort(st.transient.begin(), st.transient.end());
    return st;
}

// Stationary distribution of P restricted to one closed class: solves
// mu P = mu with the balance equation of the first class state replaced
// by the normalization sum(mu) = 1.  Result is indexed like `cls`.
inline std::vector<double> stationary(const Matrix& P, const std::vector<int>& cls) {
    const int k = static_cast<int>(cls.size());
    if (k == 0) throw std::invalid_argument("stationary: empty class");
    if (k == 1) return {1.0};
    std::vector<int> pos(static_cast<std::size_t>(P.rows), -1);
    for (int i = 0; i < k; ++i) pos[static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])] = i;

    Matrix A(k, k);
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i)
            A.at(i, j) = P.at(cls[static_cast<std::size_t>(j)], cls[static_cast<std::size_t>(i)]);  // transpose
        A.at(j, j) -= 1.0;
    }
    for (int j = 0; j < k; ++j) A.at(0, j) = 1.0;
    Matrix b(k, 1);
    b.at(0, 0) = 1.0;
    solve_in_place(A, b);
    return b.data;
}

namespace detail {

// Absorption probabilities into each recurrent class from every state:
// returns a (num_states x class_count) matrix.  Rows of recurrent states
// are unit vectors; transient rows come from the first-step equations
// (I - Q) H = B with Q the transient-to-transient block.
inline Matrix absorption_matrix(const Machine& m, const Matrix& P, const ChainStructure& st) {
    const int n = m.num_states;
    const int kc = st.class_count();
    Matrix H(n, kc);
    std::vector<int> class_of(static_cast<std::size_t>(n), -1);
    for (int j = 0; j < kc; ++j)
        for (int u : st.recurrent_classes[static_cast<std::size_t>(j)])
            class_of[static_cast<std::size_t>(u)] = j;
    for (int u = 0; u < n; ++u)
        if (class_of[static_cast<std::size_t>(u)] >= 0) H.at(u, class_of[static_cast<std::size_t>(u)]) = 1.0;

    const int t = static_cast<int>(st.transient.size());
    if (t == 0) return H;

    std::vector<int> tpos(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < t; ++i) tpos[static_cast<std::size_t>(st.transient[static_cast<std::size_t>(i)])] = i;

    Matrix A(t, t);  // I - Q
    Matrix B(t, kc);
    for (int i = 0; i < t; ++i) {
        int u = st.transient[static_cast<std::size_t>(i)];
        A.at(i, i) = 1.0;
        for (int v = 0; v < n; ++v) {
            double pr = P.at(u, v);
            if (pr == 0.0) continue;
            if (tpos[static_cast<std::size_t>(v)] >= 0)
                A.at(i, tpos[static_cast<std::size_t>(v)]) -= pr;
            else
                B.at(i, class_of[static_cast<std::size_t>(v)]) += pr;
        }
    }
    solve_in_place(A, B);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < kc; ++j) H.at(st.transient[static_cast<std::size_t>(i)], j) = B.at(i, j);
    return H;
}

// Everything error analysis needs about the chain under one theta.
struct ChainAnalysis {
    std::vector<double> absorb;           // absorption into each class from the initial state
    std::vector<std::vector<double>> mu;  // stationary distribution per class
    std::vector<double> w;                // long-run occupancy per state
};

inline ChainAnalysis analyze(const Machine& m, double theta, const ChainStructure& st) {
    Matrix P = transition_matrix(m, theta);
    Matrix H = absorption_matrix(m, P, st);
    ChainAnalysis out;
    out.absorb.resize(static_cast<std::size_t>(st.class_count()));
    for (int j = 0; j < st.class_count(); ++j) out.absorb[static_cast<std::size_t>(j)] = H.at(m.initial, j);
    out.mu.reserve(static_cast<std::size_t>(st.class_count()));
    out.w.assign(static_cast<std::size_t>(m.num_states), 0.0);
    for (int j = 0; j < st.class_count(); ++j) {
        const auto& cls = st.recurrent_classes[static_cast<std::size_t>(j)];
        std::vector<double> mu = stationary(P, cls);
        for (std::size_t i = 0; i < cls.size(); ++i)
            out.w[static_cast<std::size_t>(cls[i])] = out.absorb[static_cast<std::size_t>(j)] * mu[i];
        out.mu.push_back(std::move(mu));
    }
    return out;
}

}  // namespace detail

// Absorption probabilities into each recurrent class (classify() order)
// starting from the machine's initial state.
inline std::vector<double> absorption(const Machine& m, double theta) {
    ChainStructure st = classify(m);
    Matrix P = transition_matrix(m, theta);
    Matrix H = detail::absorption_matrix(m, P, st);
    std::vector<double> out(static_cast<std::size_t>(st.class_count()));
    for (int j = 0; j < st.class_count(); ++j) out[static_cast<std::size_t>(j)] = H.at(m.initial, j);
    return out;
}

// Long-run fraction of time spent in each state under Bernoulli(theta) input.
inline std::vector<double> limiting_occupancy(const Machine& m, double theta, const ChainStructure& st) {
    return detail::analyze(m, theta, st).w;
}

inline std::vector<double> limiting_occupancy(const Machine& m, double theta) {
    return limiting_occupancy(m, theta, classify(m));
}

// Absorption under both hypotheses, plus the two conditional error
// components when the machine has exactly two absorbing targets of pure,
// opposite decisions: p0 = Pr(absorb in the H1 target | H0) and
// p1 = Pr(absorb in the H0 target | H1).
struct AbsorptionProfile {
    ChainStructure structure;
    std::vector<double> into_class_h0;  // absorption probabilities under H0 (theta = p)
    std::vector<double> into_class_h1;  // absorption probabilities under H1 (theta = q)
    std::optional<int> h0_class, h1_class;
    std::optional<double> p0, p1;
};

inline AbsorptionProfile absorption_profile(const Machine& m, const HypothesisPair& pair) {
    AbsorptionProfile out;
    out.structure = classify(m);
    {
        Matrix P = transition_matrix(m, pair.p());
        Matrix H = detail::absorption_matrix(m, P, out.structure);
        for (int j = 0; j < out.structure.class_count(); ++j) out.into_class_h0.push_back(H.at(m.initial, j));
    }
    {
        Matrix P = transition_matrix(m, pair.q());
        Matrix H = detail::absorption_matrix(m, P, out.structure);
        for (int j = 0; j < out.structure.class_count(); ++j) out.into_class_h1.push_back(H.at(m.initial, j));
    }
    if (out.structure.class_count() == 2) {
        std::array<std::optional<Hypothesis>, 2> labels;
        for (int j = 0; j < 2; ++j) {
            const auto& cls = out.structure.recurrent_classes[static_cast<std::size_t>(j)];
            Hypothesis h = m.decision[static_cast<std::size_t>(cls.front())];
            bool pure = std::all_of(cls.begin(), cls.end(), [&](int u) {
                return m.decision[static_cast<std::size_t>(u)] == h;
            });
            if (pure) labels[static_cast<std::size_t>(j)] = h;
        }
        if (labels[0] && labels[1] && *labels[0] != *labels[1]) {
            int h0_cls = (*labels[0] == Hypothesis::H0) ? 0 : 1;
            out.h0_class = h0_cls;
            out.h1_class = 1 - h0_cls;
            out.p0 = out.into_class_h0[static_cast<std::size_t>(1 - h0_cls)];
            out.p1 = out.into_class_h1[static_cast<std::size_t>(h0_cls)];
        }
    }
    return out;
}

// Exact asymptotic error report for a machine *as labeled* (its own
// decision table), under equal priors.
struct ClassReport {
    std::vector<int> states;
    double absorb_h0 = 0.0;  // Pr(settle in this class | H0)
    double absorb_h1 = 0.0;  // Pr(settle in this class | H1)
    double err_h0 = 0.0;     // Pr(decide H1 | H0, settled here)
    double err_h1 = 0.0;     // Pr(decide H0 | H1, settled here)
};

struct ErrorReport {
    double pe = 0.0;
    double pe_given_h0 = 0.0;
    double pe_given_h1 = 0.0;
    std::vector<double> per_state_min;  // min(w_i(p), w_i(q)): error floor per state
    std::vector<ClassReport> per_class;
};

inline ErrorReport error_probability(const Machine& m, const HypothesisPair& pair) {
    ChainStructure st = classify(m);
    detail::ChainAnalysis ap = detail::analyze(m, pair.p(), st);
    detail::ChainAnalysis aq = detail::analyze(m, pair.q(), st);

    ErrorReport rep;
    rep.per_state_min.resize(static_cast<std::size_t>(m.num_states));
    for (int i = 0; i < m.num_states; ++i) {
        if (m.decision[static_cast<std::size_t>(i)] == Hypothesis::H1)
            rep.pe_given_h0 += ap.w[static_cast<std::size_t>(i)];
        else
            rep.pe_given_h1 += aq.w[static_cast<std::size_t>(i)];
        rep.per_state_min[static_cast<std::size_t>(i)] =
            std::min(ap.w[static_cast<std::size_t>(i)], aq.w[static_cast<std::size_t>(i)]);
    }
    rep.pe = 0.5 * (rep.pe_given_h0 + rep.pe_given_h1);

    for (int j = 0; j < st.class_count(); ++j) {
        ClassReport cr;
        cr.states = st.recurrent_classes[static_cast<std::size_t>(j)];
        cr.absorb_h0 = ap.absorb[static_cast<std::size_t>(j)];
        cr.absorb_h1 = aq.absorb[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < cr.states.size(); ++i) {
            if (m.decision[static_cast<std::size_t>(cr.states[i])] == Hypothesis::H1)
                cr.err_h0 += ap.mu[static_cast<std::size_t>(j)][i];
            else
                cr.err_h1 += aq.mu[static_cast<std::size_t>(j)][i];
        }
        rep.per_class.push_back(std::move(cr));
    }
    return rep;
}

// Error-minimizing decision table: per state, pick the hypothesis with the
// larger long-run weight; ties go to H1.  Transient states never matter
// asymptotically and are labeled H0 by convention.
inline std::vector<Hypothesis> optimal_decision(const Machine& m, const HypothesisPair& pair) {
    ChainStructure st = classify(m);
    std::vector<double> wp = limiting_occupancy(m, pair.p(), st);
    std::vector<double> wq = limiting_occupancy(m, pair.q(), st);
    std::vector<Hypothesis> d(static_cast<std::size_t>(m.num_states), Hypothesis::H0);
    for (const auto& cls : st.recurrent_classes)
        for (int u : cls)
            d[static_cast<std::size_t>(u)] =
                (wq[static_cast<std::size_t>(u)] >= wp[static_cast<std::size_t>(u)]) ? Hypothesis::H1
                                                                                     : Hypothesis::H0;
    return d;
}

// Structural diagnostics for machines with exactly two decision-pure
// absorbing targets of opposite label: per-state total absorber distance
// td(u) (graph distance to the H0 target plus distance to the H1 target,
// -1 when one is unreachable), per-state occupancy occ(u) (the smaller of
// the two hypotheses' probabilities of ever visiting u from the start
// state), and the first state witnessing td(u) <= S together with
// occ(u) >= (1 - max(p0, p1)) / S.  Such a state is guaranteed to exist
// whenever max(p0, p1) < 1/2; outside that regime `witness` may be empty.
struct Diagnostics {
    std::vector<int> td;
    std::vector<double> occ;
    std::optional<int> witness;
    double p0 = 0.0;
    double p1 = 0.0;
};

namespace detail {

// BFS distance from every state to the nearest member of `target`
// (directed, unit edge cost); -1 where unreachable.  Runs on the reversed
// graph so one sweep covers all sources.
inline std::vector<int> distance_to(const Machine& m, const std::vector<int>& target) {
    const int n = m.num_states;
    std::vector<std::vector<int>> rev(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u)
        for (int bit = 0; bit < 2; ++bit)
            rev[static_cast<std::size_t>(m.transitions[static_cast<std::size_t>(u)][static_cast<std::size_t>(bit)])]
                .push_back(u);
    std::vector<int> dist(static_cast<std::size_t>(n), -1);
    std::vector<int> queue;
    for (int t : target) {
        dist[static_cast<std::size_t>(t)] = 0;
        queue.push_back(t);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int v = queue[static_cast<std::size_t>(head)];
        for (int u : rev[static_cast<std::size_t>(v)])
            if (dist[static_cast<std::size_t>(u)] < 0) {
                dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
                queue.push_back(u);
            }
    }
    return dist;
}

// Probability of ever visiting `target` from the initial state under
// Bernoulli(theta): first-passage system restricted to the states that
// can reach `target` at all.
inline double visit_probability(const Machine& m, double theta, int target) {
    if (target == m.initial) return 1.0;
    std::vector<int> dist = distance_to(m, {target});
    if (dist[static_cast<std::size_t>(m.initial)] < 0) return 0.0;

    std::vector<int> sys;  // states with unknown visit probability
    std::vector<int> pos(static_cast<std::size_t>(m.num_states), -1);
    for (int u = 0; u < m.num_states; ++u)
        if (u != target && dist[static_cast<std::size_t>(u)] >= 0) {
            pos[static_cast<std::size_t>(u)] = static_cast<int>(sys.size());
            sys.push_back(u);
        }
    const int k = static_cast<int>(sys.size());
    Matrix A(k, k);
    Matrix b(k, 1);
    for (int i = 0; i < k; ++i) {
        int u = sys[static_cast<std::size_t>(i)];
        A.at(i, i) += 1.0;
        for (int bit = 0; bit < 2; ++bit) {
            double pr = bit ? theta : 1.0 - theta;
            int v = m.transitions[static_cast<std::size_t>(u)][static_cast<std::size_t>(bit)];
            if (v == target)
                b.at(i, 0) += pr;
            else if (pos[static_cast<std::size_t>(v)] >= 0)
                A.at(i, pos[static_cast<std::size_t>(v)]) -= pr;
            // otherwise v cannot reach the target: contributes 0
        }
    }
    solve_in_place(A, b);
    return b.at(pos[static_cast<std::size_t>(m.initial)], 0);
}

}  // namespace detail

inline Diagnostics structural_diagnostics(const Machine& m, const HypothesisPair& pair) {
    AbsorptionProfile prof = absorption_profile(m, pair);
    if (prof.structure.class_count() != 2 || !prof.p0)
        throw unsupported_structure_error(
            "structural_diagnostics: machine must have exactly two decision-pure absorbing targets "
            "with opposite labels");

    const int n = m.num_states;
    Diagnostics diag;
    diag.p0 = *prof.p0;
    diag.p1 = *prof.p1;

    std::vector<int> d_to_h0 = detail::distance_to(m, prof.structure.recurrent_classes[static_cast<std::size_t>(*prof.h0_class)]);
    std::vector<int> d_to_h1 = detail::distance_to(m, prof.structure.recurrent_classes[static_cast<std::size_t>(*prof.h1_class)]);
    diag.td.resize(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u)
        diag.td[static_cast<std::size_t>(u)] =
            (d_to_h0[static_cast<std::size_t>(u)] < 0 || d_to_h1[static_cast<std::size_t>(u)] < 0)
                ? -1
                : d_to_h0[static_cast<std::size_t>(u)] + d_to_h1[static_cast<std::size_t>(u)];

    diag.occ.resize(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u)
        diag.occ[static_cast<std::size_t>(u)] = std::min(detail::visit_probability(m, pair.p(), u),
                                                         detail::visit_probability(m, pair.q(), u));

    const double need = (1.0 - std::max(diag.p0, diag.p1)) / n;
    for (int u = 0; u < n; ++u)
        if (diag.td[static_cast<std::size_t>(u)] >= 0 && diag.td[static_cast<std::size_t>(u)] <= n &&
            diag.occ[static_cast<std::size_t>(u)] >= need) {
            diag.witness = u;
            break;
        }

    return diag;
}

}  // namespace fsht
