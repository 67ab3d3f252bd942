// fsht — command-line front end.
//
// Subcommands:
//   bounds    evaluate every analytic bound/exponent over a range of sizes
//   build     construct a reference machine family and print Machine JSON
//   analyze   exact asymptotic error of a machine from its JSON description
//   diagnose  structural diagnostics for two-absorber machines
//   search    exhaustive canonical search for the best S-state machine
//   simulate  Monte Carlo estimate of a machine's error
//   sweep     bound tables over a (p, q, S) grid for plotting
//
// Exit codes: 0 success, 1 domain error (bad parameters/data), 2 usage.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fsht/fsht.hpp>

namespace {

using fsht::HypothesisPair;
using fsht::Machine;
using json = fsht::json;

// Flag combinations CLI11's declarative requirements cannot express.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Machine load_machine(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open machine file: " + path);
    return fsht::machine_from_json(json::parse(in));
}

void print_machine(const Machine& m) { std::cout << fsht::machine_to_json(m).dump(2) << '\n'; }

void emit_bound_rows(const std::vector<std::pair<HypothesisPair, int>>& grid,
                     const std::string& format) {
    if (format == "csv") {
        std::cout << fsht::bounds_csv_header() << '\n';
        for (const auto& [pair, S] : grid)
            std::cout << fsht::bounds_csv_row(fsht::bounds_report(S, pair), pair) << '\n';
    } else {
        json rows = json::array();
        for (const auto& [pair, S] : grid)
            rows.push_back(fsht::bounds_row_to_json(fsht::bounds_report(S, pair), pair));
        std::cout << rows.dump(2) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact analysis of deterministic finite-memory binary hypothesis testers"};
    app.require_subcommand(1);

    const std::string format_help = "Output format (default json)";
    const auto format_check = CLI::IsMember({"csv", "json"});

    // ---- bounds ----------------------------------------------------------
    double b_p = 0, b_q = 0;
    int b_smin = 1, b_smax = 0;
    std::string b_format = "json";
    CLI::App* bounds = app.add_subcommand(
        "bounds", "Evaluate the analytic bounds and exponents for sizes s-min..s-max");
    bounds->add_option("--p", b_p, "One-probability under the null hypothesis")->required();
    bounds->add_option("--q", b_q, "One-probability under the alternative")->required();
    bounds->add_option("--s-max", b_smax, "Largest number of states")->required();
    bounds->add_option("--s-min", b_smin, "Smallest number of states (default 1)");
    bounds->add_option("--format", b_format, format_help)->check(format_check);

    // ---- build -----------------------------------------------------------
    CLI::App* build = app.add_subcommand("build", "Construct a reference machine family");
    build->require_subcommand(1);

    int rm_states = 0;
    std::string rm_init = "auto";
    double rm_p = -1, rm_q = -1;
    CLI::App* build_run = build->add_subcommand(
        "run-machine", "Race between a run of ones and a run of zeros, absorbing ends");
    build_run->add_option("--states", rm_states, "Total number of states")->required();
    build_run->add_option("--init", rm_init,
                          "Start label s in [2, states-1], or 'auto' for the tuned value "
                          "(requires --p/--q)");
    build_run->add_option("--p", rm_p, "One-probability under the null (for --init auto)");
    build_run->add_option("--q", rm_q, "One-probability under the alternative (for --init auto)");

    int co_k = 0;
    double co_t = 0;
    CLI::App* build_count = build->add_subcommand(
        "count-ones", "Finite-horizon threshold counter over k samples");
    build_count->add_option("--k", co_k, "Number of samples")->required();
    build_count->add_option("--t", co_t, "Threshold fraction in (0,1) with t*k integer")->required();

    int sb_k = 0;
    double sb_p = 0, sb_q = 0;
    CLI::App* build_store = build->add_subcommand(
        "store-bits", "Depth-k prefix tree with likelihood-ratio leaf labels");
    build_store->add_option("--k", sb_k, "Number of stored bits")->required();
    build_store->add_option("--p", sb_p, "One-probability under the null hypothesis")->required();
    build_store->add_option("--q", sb_q, "One-probability under the alternative")->required();

    CLI::App* build_last =
        build->add_subcommand("last-bit", "Two states remembering only the previous bit");

    // ---- analyze ---------------------------------------------------------
    std::string an_machine;
    double an_p = 0, an_q = 0;
    CLI::App* analyze =
        app.add_subcommand("analyze", "Exact asymptotic error decomposition of a machine");
    analyze->add_option("--machine", an_machine, "Machine JSON file")->required();
    analyze->add_option("--p", an_p, "One-probability under the null hypothesis")->required();
    analyze->add_option("--q", an_q, "One-probability under the alternative")->required();

    // ---- diagnose --------------------------------------------------------
    std::string dg_machine;
    double dg_p = 0, dg_q = 0;
    CLI::App* diagnose = app.add_subcommand(
        "diagnose", "Distances, visit probabilities, and witness state for two-absorber machines");
    diagnose->add_option("--machine", dg_machine, "Machine JSON file")->required();
    diagnose->add_option("--p", dg_p, "One-probability under the null hypothesis")->required();
    diagnose->add_option("--q", dg_q, "One-probability under the alternative")->required();

    // ---- search ----------------------------------------------------------
    int se_states = 0, se_workers = 1, se_limit = fsht::kDefaultSearchLimit;
    double se_p = 0, se_q = 0;
    CLI::App* search =
        app.add_subcommand("search", "Exhaustively find the best machine of a given size");
    search->add_option("--states", se_states, "Number of states")->required();
    search->add_option("--p", se_p, "One-probability under the null hypothesis")->required();
    search->add_option("--q", se_q, "One-probability under the alternative")->required();
    search->add_option("--workers", se_workers, "Worker threads (default 1)");
    search->add_option("--limit", se_limit, "Largest size the search will accept (default 5)");

    // ---- simulate --------------------------------------------------------
    std::string si_machine;
    double si_p = 0, si_q = 0;
    std::uint64_t si_steps = 0, si_trials = 0, si_seed = 1;
    int si_workers = 1;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Monte Carlo estimate of a machine's Bayes error");
    simulate->add_option("--machine", si_machine, "Machine JSON file")->required();
    simulate->add_option("--p", si_p, "One-probability under the null hypothesis")->required();
    simulate->add_option("--q", si_q, "One-probability under the alternative")->required();
    simulate->add_option("--steps", si_steps, "Steps per trial")->required();
    simulate->add_option("--trials", si_trials, "Independent trials per hypothesis")->required();
    simulate->add_option("--seed", si_seed, "Master seed (default 1)");
    simulate->add_option("--workers", si_workers, "Worker threads (default 1)");

    // ---- sweep -----------------------------------------------------------
    std::vector<double> sw_ps, sw_qs;
    int sw_smin = 3, sw_smax = 0;
    std::string sw_format = "json";
    CLI::App* sweep =
        app.add_subcommand("sweep", "Bound tables over a (p, q, S) grid; q >= p combinations are skipped");
    sweep->add_option("--p-list", sw_ps, "Comma-separated null-hypothesis one-probabilities")
        ->required()
        ->delimiter(',');
    sweep->add_option("--q-list", sw_qs, "Comma-separated alternative one-probabilities")
        ->required()
        ->delimiter(',');
    sweep->add_option("--s-max", sw_smax, "Largest number of states")->required();
    sweep->add_option("--s-min", sw_smin, "Smallest number of states (default 3)");
    sweep->add_option("--format", sw_format, format_help)->check(format_check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (bounds->parsed()) {
            if (b_smin < 1 || b_smax < b_smin)
                throw std::invalid_argument("bounds: need 1 <= s-min <= s-max");
            HypothesisPair pair(b_p, b_q);
            std::vector<std::pair<HypothesisPair, int>> grid;
            for (int S = b_smin; S <= b_smax; ++S) grid.emplace_back(pair, S);
            emit_bound_rows(grid, b_format);
        } else if (build_run->parsed()) {
            int start;
            if (rm_init == "auto") {
                if (rm_p < 0 || rm_q < 0)
                    throw usage_error("build run-machine: --init auto requires --p and --q");
                start = fsht::s_star(rm_states, HypothesisPair(rm_p, rm_q));
            } else {
                try {
                    std::size_t pos = 0;
                    start = std::stoi(rm_init, &pos);
                    if (pos != rm_init.size()) throw std::invalid_argument("");
                } catch (const std::exception&) {
                    throw usage_error("build run-machine: --init must be an integer or 'auto'");
                }
            }
            print_machine(fsht::run_machine(rm_states, start));
        } else if (build_count->parsed()) {
            print_machine(fsht::count_ones_machine(co_k, co_t));
        } else if (build_store->parsed()) {
            print_machine(fsht::store_bits_machine(sb_k, HypothesisPair(sb_p, sb_q)));
        } else if (build_last->parsed()) {
            print_machine(fsht::last_bit_machine());
        } else if (analyze->parsed()) {
            Machine m = load_machine(an_machine);
            fsht::ErrorReport report = fsht::error_probability(m, HypothesisPair(an_p, an_q));
            std::cout << fsht::error_report_to_json(report).dump(2) << '\n';
        } else if (diagnose->parsed()) {
            Machine m = load_machine(dg_machine);
            fsht::Diagnostics diag = fsht::structural_diagnostics(m, HypothesisPair(dg_p, dg_q));
            std::cout << fsht::diagnostics_to_json(diag).dump(2) << '\n';
        } else if (search->parsed()) {
            fsht::SearchResult result =
                fsht::optimal_error(se_states, HypothesisPair(se_p, se_q), se_workers, se_limit);
            std::cout << fsht::search_result_to_json(result).dump(2) << '\n';
        } else if (simulate->parsed()) {
            Machine m = load_machine(si_machine);
            fsht::SimulationReport report = fsht::simulate_bayes(
                m, HypothesisPair(si_p, si_q), si_steps, si_trials, si_seed, si_workers);
            std::cout << fsht::simulation_report_to_json(report).dump(2) << '\n';
        } else if (sweep->parsed()) {
            if (sw_smin < 1 || sw_smax < sw_smin)
                throw std::invalid_argument("sweep: need 1 <= s-min <= s-max");
            std::vector<std::pair<HypothesisPair, int>> grid;
            for (double p : sw_ps)
                for (double q : sw_qs) {
                    if (q >= p) continue;  // not a valid pair; sweep skips it
                    HypothesisPair pair(p, q);
                    for (int S = sw_smin; S <= sw_smax; ++S) grid.emplace_back(pair, S);
                }
            emit_bound_rows(grid, sw_format);
        }
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
