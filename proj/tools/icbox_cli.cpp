// icbox: bipartite no-signaling box toolkit.
//
// Subcommands: sweep-chsh, ic-run, box-info, theory. A JSON config file can
// set everything; command-line flags override config values.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icbox/cli_core.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    using namespace icbox;

    CLI::App app{"Bipartite no-signaling box simulator: CHSH sweeps and the nested "
                 "1-bit information-causality protocol"};
    app.require_subcommand(0, 1);
    app.fallthrough(); // global flags may follow the subcommand name

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    bool strict = false;
    auto* opt_config = app.add_option("--config", config_path, "JSON config file");
    auto* opt_seed = app.add_option("--seed", seed, "master RNG seed");
    auto* opt_out = app.add_option("--out", out_dir, "output directory");
    auto* opt_threads = app.add_option("--threads", threads, "worker thread count");
    app.add_flag("--strict", strict, "fail on no-signaling violations (box-info)");

    // sweep-chsh
    auto* sweep = app.add_subcommand("sweep-chsh", "CHSH value S versus kappa");
    int sw_points = 0;
    double sw_min = 0.0, sw_max = 1.0;
    std::vector<std::string> sw_states;
    bool sw_sep = false;
    int sw_reps = 0;
    auto* o_sw_points = sweep->add_option("--points", sw_points, "uniform grid size");
    auto* o_sw_min = sweep->add_option("--kappa-min", sw_min, "grid start");
    auto* o_sw_max = sweep->add_option("--kappa-max", sw_max, "grid end");
    auto* o_sw_states =
        sweep->add_option("--states", sw_states, "states to sweep (psi-plus rho-sep hv vh)");
    sweep->add_flag("--separable", sw_sep, "add the product-state search series");
    auto* o_sw_reps = sweep->add_option("--replicates", sw_reps, "independent runs per point");

    // ic-run
    auto* icrun = app.add_subcommand("ic-run", "nested 1-bit protocol over a box family");
    std::string ic_family;
    std::vector<double> ic_kappas, ic_svals;
    std::vector<std::string> ic_files;
    int ic_points = 0;
    double ic_min = 0.0, ic_max = 0.95;
    std::vector<int> ic_ns;
    std::string ic_dataset_mode, ic_twirl;
    std::vector<int> ic_fixed;
    long ic_trials = -1;
    int ic_reps = 0;
    auto* o_ic_family = icrun->add_option(
        "--family", ic_family, "box family: psi-plus rho-sep hv vh isotropic pr file");
    auto* o_ic_kappa = icrun->add_option("--kappa", ic_kappas, "explicit kappa values");
    auto* o_ic_s = icrun->add_option("--s", ic_svals, "isotropic S values");
    auto* o_ic_files = icrun->add_option("--box", ic_files, "serialized box files");
    auto* o_ic_points = icrun->add_option("--points", ic_points, "uniform kappa grid size");
    auto* o_ic_min = icrun->add_option("--kappa-min", ic_min, "grid start");
    auto* o_ic_max = icrun->add_option("--kappa-max", ic_max, "grid end");
    auto* o_ic_n = icrun->add_option("--n", ic_ns, "nesting depths");
    auto* o_ic_mode = icrun->add_option("--dataset-mode", ic_dataset_mode,
                                        "fixed | random-per-run | random-per-trial");
    auto* o_ic_fixed =
        icrun->add_option("--fixed-dataset", ic_fixed, "data bits for --dataset-mode fixed");
    auto* o_ic_trials = icrun->add_option("--trials", ic_trials,
                                          "trials per index (0 -> 10^5 / 2^n)");
    auto* o_ic_reps = icrun->add_option("--replicates", ic_reps, "independent runs");
    auto* o_ic_twirl =
        icrun->add_option("--twirl", ic_twirl, "none | symmetrize | depolarize");

    // box-info
    auto* binfo = app.add_subcommand("box-info", "inspect a box");
    BoxInfoRequest req;
    std::vector<double> bi_phases;
    binfo->add_option("--file", req.path, "box file to load");
    binfo->add_option("--family", req.family, "pr | uniform | isotropic | quantum state");
    binfo->add_option("--S", req.S, "CHSH value for the isotropic family");
    binfo->add_option("--kappa", req.kappa, "loss parameter for quantum families");
    auto* o_bi_phases = binfo->add_option("--phases", bi_phases,
                                          "measurement phases a0 a1 b0 b1 (default: optimize)")
                            ->expected(4);
    binfo->add_option("--save", req.save_path, "write the box to this file");

    // theory
    auto* theory = app.add_subcommand("theory", "tabulate the closed-form S(kappa)");
    int th_points = 0;
    double th_min = 0.0, th_max = 1.0;
    std::vector<double> th_kappas;
    auto* o_th_points = theory->add_option("--points", th_points, "uniform grid size");
    auto* o_th_min = theory->add_option("--kappa-min", th_min, "grid start");
    auto* o_th_max = theory->add_option("--kappa-max", th_max, "grid end");
    auto* o_th_kappa = theory->add_option("--kappa", th_kappas, "explicit kappa values");

    CLI11_PARSE(app, argc, argv);

    try {
        CliConfig cfg;
        if (*opt_config) cfg = parse_config(read_file(config_path));
        if (*opt_out) cfg.output_dir = out_dir;
        if (*opt_threads) cfg.threads = threads;
        if (*opt_seed) {
            cfg.sweep.seed = seed;
            cfg.ic.seed = seed;
        }
        if (strict) cfg.strict = true;

        std::string command = cfg.command;
        if (sweep->parsed()) command = "sweep-chsh";
        if (icrun->parsed()) command = "ic-run";
        if (binfo->parsed()) command = "box-info";
        if (theory->parsed()) command = "theory";
        if (command.empty()) {
            std::cerr << app.help();
            return 1;
        }

        if (command == "sweep-chsh") {
            SweepSpec spec = cfg.sweep;
            if (*o_sw_points || *o_sw_min || *o_sw_max)
                spec.kappa_grid = uniform_grid(*o_sw_points ? sw_points : 21, sw_min, sw_max);
            if (*o_sw_states) spec.states = sw_states;
            if (sw_sep) spec.optimize_separable = true;
            if (*o_sw_reps) spec.replicates = sw_reps;
            ResultTable table = cmd_sweep_chsh(spec, cfg.output_dir, cfg.threads, &std::cerr);
            std::size_t expected =
                spec.kappa_grid.size() * (spec.states.size() + (spec.optimize_separable ? 1 : 0));
            std::cout << "sweep-chsh: wrote " << table.rows.size() << " rows to "
                      << cfg.output_dir << "/sweep_chsh.csv\n";
            return table.rows.size() == expected ? 0 : 1;
        }

        if (command == "ic-run") {
            IcRunSpec spec = cfg.ic;
            if (*o_ic_family) spec.source.family = ic_family;
            if (*o_ic_kappa) spec.source.kappa_grid = ic_kappas;
            if (*o_ic_points || *o_ic_min || *o_ic_max)
                spec.source.kappa_grid =
                    uniform_grid(*o_ic_points ? ic_points : 20, ic_min, ic_max);
            if (*o_ic_s) spec.source.s_grid = ic_svals;
            if (*o_ic_files) spec.source.files = ic_files;
            if (*o_ic_n) spec.n_list = ic_ns;
            if (*o_ic_mode) spec.dataset_mode = dataset_mode_from_string(ic_dataset_mode);
            if (*o_ic_fixed) {
                spec.fixed_dataset = ic_fixed;
                if (!*o_ic_mode) spec.dataset_mode = DatasetMode::fixed;
            }
            if (*o_ic_trials) spec.trials_per_index = ic_trials;
            if (*o_ic_reps) spec.replicates = ic_reps;
            if (*o_ic_twirl) spec.twirl = twirl_mode_from_string(ic_twirl);
            if (spec.source.family.empty())
                throw std::invalid_argument("ic-run: --family (or a config box_source) required");
            ResultTable table = cmd_ic_run(spec, cfg.output_dir, cfg.threads, &std::cerr);
            std::cout << "ic-run: wrote " << table.rows.size() << " rows to " << cfg.output_dir
                      << "/ic_run.csv\n";
            return 0;
        }

        if (command == "box-info") {
            if (*o_bi_phases) {
                MeasurementSettings s;
                s.phases_alice = {bi_phases[0], bi_phases[1]};
                s.phases_bob = {bi_phases[2], bi_phases[3]};
                req.settings = s;
            }
            req.strict = cfg.strict;
            if (req.path.empty() && req.family.empty()) {
                std::cerr << "box-info: give --file or --family\n";
                return 2;
            }
            return cmd_box_info(req, std::cout, std::cerr);
        }

        if (command == "theory") {
            std::vector<double> grid = cfg.theory_grid;
            if (*o_th_kappa) grid = th_kappas;
            if (*o_th_points || *o_th_min || *o_th_max)
                grid = uniform_grid(*o_th_points ? th_points : 21, th_min, th_max);
            if (grid.empty()) grid = uniform_grid(21);
            cmd_theory(grid, cfg.output_dir);
            std::cout << "theory: wrote " << grid.size() << " rows to " << cfg.output_dir
                      << "/theory.csv\n";
            return 0;
        }

        std::cerr << "unknown command: " << command << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "icbox: " << e.what() << "\n";
        return 1;
    }
}
