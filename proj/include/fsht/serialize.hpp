#pragma once
// JSON and CSV interchange.  Key names and the CSV column set are part of
// the tool's external contract; do not rename them casually.

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "bounds.hpp"
#include "chain.hpp"
#include "model.hpp"
#include "search.hpp"
#include "sim.hpp"

namespace fsht {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Machine <-> JSON
// ---------------------------------------------------------------------------

inline json machine_to_json(const Machine& m) {
    json transitions = json::array();
    for (const auto& row : m.transitions) transitions.push_back({row[0], row[1]});
    json decision = json::array();
    for (Hypothesis h : m.decision) decision.push_back(static_cast<int>(h));
    return json{{"states", m.num_states},
                {"initial", m.initial},
                {"transitions", std::move(transitions)},
                {"decision", std::move(decision)}};
}

inline Machine machine_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("machine json: expected an object");
    for (const char* key : {"states", "initial", "transitions", "decision"})
        if (!j.contains(key))
            throw std::invalid_argument(std::string("machine json: missing field '") + key + "'");
    if (!j["states"].is_number_integer() || !j["initial"].is_number_integer())
        throw std::invalid_argument("machine json: 'states' and 'initial' must be integers");

    Machine m;
    m.num_states = j["states"].get<int>();
    m.initial = j["initial"].get<int>();

    if (!j["transitions"].is_array())
        throw std::invalid_argument("machine json: 'transitions' must be an array");
    for (const json& row : j["transitions"]) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer() ||
            !row[1].is_number_integer())
            throw std::invalid_argument(
                "machine json: each transitions row must be a pair of integers");
        m.transitions.push_back({row[0].get<int>(), row[1].get<int>()});
    }

    if (!j["decision"].is_array())
        throw std::invalid_argument("machine json: 'decision' must be an array");
    for (const json& d : j["decision"]) {
        if (!d.is_number_integer() || (d.get<int>() != 0 && d.get<int>() != 1))
            throw std::invalid_argument("machine json: decision entries must be 0 or 1");
        m.decision.push_back(static_cast<Hypothesis>(d.get<int>()));
    }

    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Report serializers
// ---------------------------------------------------------------------------

inline json error_report_to_json(const ErrorReport& r) {
    json classes = json::array();
    for (const ClassReport& c : r.per_class)
        classes.push_back(json{{"states", c.states},
                               {"absorb_h0", c.absorb_h0},
                               {"absorb_h1", c.absorb_h1},
                               {"err_h0", c.err_h0},
                               {"err_h1", c.err_h1}});
    return json{{"pe", r.pe},
                {"pe_h0", r.pe_given_h0},
                {"pe_h1", r.pe_given_h1},
                {"per_state_min", r.per_state_min},
                {"classes", std::move(classes)}};
}

inline json simulation_report_to_json(const SimulationReport& r) {
    return json{{"empirical_pe", r.empirical_pe},
                {"std_error", r.std_error},
                {"steps", r.steps},
                {"trials", r.trials},
                {"seed", r.seed}};
}

inline json search_result_to_json(const SearchResult& r) {
    return json{{"S", r.num_states},
                {"pstar", r.pstar},
                {"enumerated", r.enumerated},
                {"best_machine", machine_to_json(r.best_machine)}};
}

inline json diagnostics_to_json(const Diagnostics& d) {
    json j{{"td", d.td}, {"occ", d.occ}, {"p0", d.p0}, {"p1", d.p1}};
    if (d.witness.has_value())
        j["witness"] = *d.witness;
    else
        j["witness"] = nullptr;
    return j;
}

// ---------------------------------------------------------------------------
// Bound reports: CSV (pinned columns) and a JSON mirror
// ---------------------------------------------------------------------------

// Shortest-exact is wrong for CSV consumers expecting fixed significance;
// twelve significant digits round-trips comfortably within double noise.
inline std::string format_g12(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string bounds_csv_header() {
    return "S,p,q,randomized_lb,ergodic_lb,run_pe_exact,theorem2_ub,d_exp,r_exp,s_star";
}

inline std::string bounds_csv_row(const BoundReport& r, const HypothesisPair& pair) {
    std::string row;
    row += std::to_string(r.num_states);
    row += ',';
    row += format_g12(pair.p());
    row += ',';
    row += format_g12(pair.q());
    row += ',';
    row += format_g12(r.randomized_lb);
    row += ',';
    row += format_g12(r.ergodic_lb);
    row += ',';
    row += format_g12(r.run_pe_exact);
    row += ',';
    row += format_g12(r.tuned_run_ub);
    row += ',';
    row += format_g12(r.d_exp);
    row += ',';
    row += format_g12(r.r_exp);
    row += ',';
    row += std::to_string(r.s_star);
    return row;
}

inline json bounds_row_to_json(const BoundReport& r, const HypothesisPair& pair) {
    auto num_or_null = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    return json{{"S", r.num_states},
                {"p", pair.p()},
                {"q", pair.q()},
                {"randomized_lb", r.randomized_lb},
                {"ergodic_lb", r.ergodic_lb},
                {"run_pe_exact", num_or_null(r.run_pe_exact)},
                {"theorem2_ub", num_or_null(r.tuned_run_ub)},
                {"d_exp", r.d_exp},
                {"r_exp", r.r_exp},
                {"s_star", r.s_star}};
}

}  // namespace fsht
