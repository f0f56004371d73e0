#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "icbox/box.hpp"
#include "icbox/icproto.hpp"
#include "icbox/quantum.hpp"

namespace icbox {

constexpr std::uint64_t kDefaultSeed = 20260815;

// Uniform grid with `points` values from lo to hi inclusive.
std::vector<double> uniform_grid(int points, double lo = 0.0, double hi = 1.0);

struct SweepSpec {
    std::vector<double> kappa_grid;                       // strictly increasing in [0,1]
    std::vector<std::string> states = {"psi-plus", "rho-sep"};
    bool optimize_separable = false; // adds an experimental "sep-optimal" series
    int replicates = 5;
    std::uint64_t seed = kDefaultSeed;
};
SweepSpec default_sweep_spec(); // the 21-point grid, psi-plus + rho-sep

struct ResultRow {
    double kappa;
    std::string state;
    double S_simulated;
    double S_theory;
    int n = 0;
    double i_bound_mean, i_bound_std;
    double efficiency_mean, efficiency_std;
    double anisotropy;
    bool depolarized = false;
    ResultRow();
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::string to_csv() const; // pinned schema, header row, LF endings
};

// %.16e (17 significant digits); NaN prints as "nan".
std::string format_real(double v);
extern const char* const kCsvHeader;

// Fig.-4-style sweep: per kappa, optimize the psi-plus settings and reuse
// them for every requested state; emit one row per (kappa, state) plus the
// theory curve column. kappa = 1 rows carry the theory limit only (the gate
// construction excludes kappa = 1); that is noted on `err`, not an error.
// Writes sweep_chsh.csv and sweep_chsh.svg into out_dir (if non-empty).
ResultTable cmd_sweep_chsh(const SweepSpec& spec, const std::string& out_dir,
                           int threads = 1, std::ostream* err = nullptr);

// Where ic-run gets its boxes from: a quantum family over a kappa grid, the
// isotropic family over an S grid, the PR box, or serialized box files.
struct BoxSource {
    std::string family;             // "psi-plus" | "rho-sep" | "hv" | "vh" | "pr" | "isotropic" | "file"
    std::vector<double> kappa_grid; // quantum families
    std::vector<double> s_grid;     // isotropic family
    std::vector<std::string> files; // file source
};

struct IcRunSpec {
    BoxSource source;
    std::vector<int> n_list = {1, 2, 3, 4};
    DatasetMode dataset_mode = DatasetMode::random_per_trial;
    std::vector<int> fixed_dataset;
    long trials_per_index = 0; // 0 -> 10^5 / 2^n
    int replicates = 5;
    std::uint64_t seed = kDefaultSeed;
    TwirlMode twirl = TwirlMode::none; // analytic twirl applied to each box first
};

// Runs the nested protocol for every (box, n) pair. Writes ic_run.csv (pinned
// schema), ic_run_pk.csv (per-index detail), efficiency_vs_S.svg and
// ibound_vs_S.svg into out_dir (if non-empty).
ResultTable cmd_ic_run(const IcRunSpec& spec, const std::string& out_dir, int threads = 1,
                       std::ostream* err = nullptr);

struct BoxInfoRequest {
    std::string path;   // box file; or
    std::string family; // "pr" | "uniform" | "isotropic" | quantum state name
    double S = 3.0;     // isotropic family
    double kappa = 0.0; // quantum families
    std::optional<MeasurementSettings> settings; // default: optimize for psi-plus
    bool strict = false;
    std::string save_path; // optionally serialize the box here
};

// Prints normalization, CHSH, no-signaling report, anisotropy and per-setting
// success probabilities. Returns 0, or 1 when --strict and no-signaling
// fails, or 2 on parse errors.
int cmd_box_info(const BoxInfoRequest& req, std::ostream& out, std::ostream& err);

// Tabulates theory_S over the grid into theory.csv (columns kappa, S_theory).
void cmd_theory(const std::vector<double>& kappa_grid, const std::string& out_dir);

// JSON config file: top-level keys {command, sweep, protocol, twirl,
// output_dir, seed, threads}; command-line flags override these values.
struct CliConfig {
    std::string command;
    SweepSpec sweep = default_sweep_spec();
    IcRunSpec ic;
    std::vector<double> theory_grid;
    std::string output_dir = "out";
    int threads = 1;
    bool strict = false;
};
CliConfig parse_config(const std::string& json_text);

} // namespace icbox
