#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "icbox/cli_core.hpp"

using namespace icbox;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* tag) : path(fs::temp_directory_path() / tag) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("format_real pins the CSV number format") {
    CHECK(format_real(0.5) == "5.0000000000000000e-01");
    CHECK(format_real(2.0 + std::sqrt(2.0)) == "3.4142135623730949e+00");
    CHECK(format_real(std::nan("")) == "nan");
    CHECK(format_real(0.0) == "0.0000000000000000e+00");
}

TEST_CASE("uniform_grid covers both endpoints") {
    auto g = uniform_grid(21);
    REQUIRE(g.size() == 21);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[6] == doctest::Approx(0.3).epsilon(1e-15));
    auto h = uniform_grid(3, 0.2, 0.4);
    CHECK(h[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(uniform_grid(1), std::invalid_argument);
}

TEST_CASE("default sweep spec matches the published layout") {
    SweepSpec spec = default_sweep_spec();
    CHECK(spec.kappa_grid.size() == 21);
    CHECK(spec.kappa_grid.front() == 0.0);
    CHECK(spec.kappa_grid.back() == 1.0);
    REQUIRE(spec.states.size() == 2);
    CHECK(spec.states[0] == "psi-plus");
    CHECK(spec.states[1] == "rho-sep");
    CHECK(spec.replicates == 5);
    CHECK(spec.seed == kDefaultSeed);
}

TEST_CASE("result table serialization") {
    ResultTable t;
    ResultRow r;
    r.kappa = 0.25;
    r.state = "psi-plus";
    r.S_simulated = 3.5;
    r.n = 2;
    r.depolarized = true;
    t.rows.push_back(r);
    std::string csv = t.to_csv();
    std::istringstream in(csv);
    std::string header, line;
    std::getline(in, header);
    CHECK(header == kCsvHeader);
    CHECK(header ==
          "kappa,state,S_simulated,S_theory,n,i_bound_mean,i_bound_std,"
          "efficiency_mean,efficiency_std,anisotropy,depolarized");
    std::getline(in, line);
    CHECK(line ==
          "2.5000000000000000e-01,psi-plus,3.5000000000000000e+00,nan,2,nan,nan,nan,nan,nan,1");
    CHECK(csv.find('\r') == std::string::npos); // LF only
}

TEST_CASE("config files parse with flag-compatible defaults") {
    CliConfig cfg = parse_config(R"({
        "command": "sweep-chsh",
        "seed": 99,
        "output_dir": "results",
        "threads": 4,
        "sweep": {"kappa_grid": [0.0, 0.1, 0.2], "states": ["psi-plus"], "replicates": 3},
        "protocol": {"n_list": [1, 2], "dataset_mode": "fixed",
                     "fixed_dataset": [0, 1], "trials_per_index": 500, "replicates": 2},
        "twirl": "depolarize",
        "box_source": {"family": "isotropic", "s_grid": [2.5, 3.2]},
        "theory_grid": {"points": 5, "min": 0.0, "max": 0.5}
    })");
    CHECK(cfg.command == "sweep-chsh");
    CHECK(cfg.output_dir == "results");
    CHECK(cfg.threads == 4);
    CHECK(cfg.sweep.seed == 99);
    CHECK(cfg.ic.seed == 99);
    REQUIRE(cfg.sweep.kappa_grid.size() == 3);
    CHECK(cfg.sweep.kappa_grid[2] == 0.2);
    CHECK(cfg.sweep.states == std::vector<std::string>{"psi-plus"});
    CHECK(cfg.sweep.replicates == 3);
    CHECK(cfg.ic.n_list == std::vector<int>{1, 2});
    CHECK(cfg.ic.dataset_mode == DatasetMode::fixed);
    CHECK(cfg.ic.fixed_dataset == std::vector<int>{0, 1});
    CHECK(cfg.ic.trials_per_index == 500);
    CHECK(cfg.ic.replicates == 2);
    CHECK(cfg.ic.twirl == TwirlMode::depolarize);
    CHECK(cfg.ic.source.family == "isotropic");
    CHECK(cfg.ic.source.s_grid == std::vector<double>{2.5, 3.2});
    REQUIRE(cfg.theory_grid.size() == 5);
    CHECK(cfg.theory_grid[4] == doctest::Approx(0.5).epsilon(1e-15));

    CliConfig defaults = parse_config("{}");
    CHECK(defaults.command.empty());
    CHECK(defaults.output_dir == "out");
    CHECK(defaults.threads == 1);
    CHECK(defaults.sweep.seed == kDefaultSeed);
    CHECK(defaults.sweep.kappa_grid.size() == 21);

    CHECK_THROWS(parse_config("not json"));
}

TEST_CASE("cmd_theory tabulates the closed form") {
    TempDir dir("icbox_theory_test");
    cmd_theory({0.0, 0.3, 1.0}, dir.path.string());
    std::string csv = slurp(dir.path / "theory.csv");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "kappa,S_theory");
    std::getline(in, line);
    CHECK(line == format_real(0.0) + "," + format_real(theory_S(0.0)));
    std::getline(in, line);
    CHECK(line == format_real(0.3) + "," + format_real(theory_S(0.3)));
    std::getline(in, line);
    CHECK(line == format_real(1.0) + "," + format_real(theory_S(1.0)));
}

TEST_CASE("cmd_sweep_chsh writes rows, plots and stays deterministic") {
    TempDir dir("icbox_sweep_test");
    SweepSpec spec;
    spec.kappa_grid = {0.0, 0.3, 1.0};
    std::ostringstream err;
    ResultTable t1 = cmd_sweep_chsh(spec, dir.path.string(), 1, &err);
    REQUIRE(t1.rows.size() == 6); // 3 kappas x 2 states, kappa=1 theory-only
    CHECK(t1.rows[0].state == "psi-plus");
    CHECK(t1.rows[0].S_simulated == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-9));
    CHECK(t1.rows[0].S_theory == doctest::Approx(theory_S(0.0)).epsilon(1e-12));
    CHECK(std::isnan(t1.rows[1].S_theory)); // rho-sep has no closed form
    CHECK(std::isnan(t1.rows[4].S_simulated)); // kappa=1 psi-plus
    CHECK(t1.rows[4].S_theory == doctest::Approx(theory_S(1.0)).epsilon(1e-12));
    CHECK(err.str().find("kappa=1") != std::string::npos);

    std::string csv = slurp(dir.path / "sweep_chsh.csv");
    CHECK(csv == t1.to_csv());
    std::string svg = slurp(dir.path / "sweep_chsh.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<path") != std::string::npos);
    CHECK(svg.find("classical bound") != std::string::npos);
    CHECK(svg.find("Tsirelson") != std::string::npos);

    // thread-count invariance, byte for byte
    ResultTable t8 = cmd_sweep_chsh(spec, "", 8, nullptr);
    CHECK(t8.to_csv() == t1.to_csv());

    SweepSpec bad;
    bad.kappa_grid = {0.3, 0.2};
    CHECK_THROWS_AS(cmd_sweep_chsh(bad, "", 1, nullptr), std::invalid_argument);
    bad.kappa_grid = {-0.1, 0.5};
    CHECK_THROWS_AS(cmd_sweep_chsh(bad, "", 1, nullptr), std::invalid_argument);
    bad.kappa_grid = {0.0, 0.5};
    bad.states = {"bell"};
    CHECK_THROWS_AS(cmd_sweep_chsh(bad, "", 1, nullptr), std::invalid_argument);
}

TEST_CASE("cmd_ic_run produces the pinned schema and per-index detail") {
    TempDir dir("icbox_icrun_test");
    IcRunSpec spec;
    spec.source.family = "isotropic";
    spec.source.s_grid = {2.5, 3.4142135623730951};
    spec.n_list = {1, 2};
    spec.trials_per_index = 400;
    spec.replicates = 2;
    spec.seed = 4242;
    ResultTable t = cmd_ic_run(spec, dir.path.string(), 1, nullptr);
    REQUIRE(t.rows.size() == 4); // 2 boxes x 2 depths
    for (const auto& r : t.rows) {
        CHECK(r.state == "isotropic");
        CHECK(std::isnan(r.kappa));
        CHECK_FALSE(r.depolarized);
        CHECK_FALSE(std::isnan(r.i_bound_mean));
        CHECK_FALSE(std::isnan(r.efficiency_std));
    }
    CHECK(t.rows[0].S_simulated == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(t.rows[0].n == 1);
    CHECK(t.rows[1].n == 2);

    std::string csv = slurp(dir.path / "ic_run.csv");
    CHECK(csv == t.to_csv());
    std::string pk = slurp(dir.path / "ic_run_pk.csv");
    std::istringstream in(pk);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,S_of_box,k,P_k,i_bound_mean,i_bound_std,eff_mean,eff_std,trials,seed");
    int lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 2 * (2 + 4)); // per box: 2 indices at n=1, 4 at n=2
    CHECK(fs::exists(dir.path / "efficiency_vs_S.svg"));
    CHECK(fs::exists(dir.path / "ibound_vs_S.svg"));
    std::string svg = slurp(dir.path / "efficiency_vs_S.svg");
    CHECK(svg.find("Tsirelson") != std::string::npos);

    // same spec, 8 worker threads: byte-identical output
    ResultTable t8 = cmd_ic_run(spec, "", 8, nullptr);
    CHECK(t8.to_csv() == t.to_csv());

    IcRunSpec bad;
    bad.source.family = "nowhere";
    CHECK_THROWS_AS(cmd_ic_run(bad, "", 1, nullptr), std::invalid_argument);
    bad.source.family = "psi-plus";
    CHECK_THROWS_AS(cmd_ic_run(bad, "", 1, nullptr), std::invalid_argument); // no grid
    bad.source.kappa_grid = {1.0};
    CHECK_THROWS_AS(cmd_ic_run(bad, "", 1, nullptr), std::invalid_argument); // kappa=1
}

TEST_CASE("cmd_ic_run twirl flag depolarizes before the run") {
    IcRunSpec spec;
    spec.source.family = "file";
    TempDir dir("icbox_icrun_twirl");
    // an anisotropic box: classical deterministic, wins 3 of 4 settings
    save_box(local_deterministic_box(0, 0, 0, 0), (dir.path / "det.box").string());
    spec.source.files = {(dir.path / "det.box").string()};
    spec.n_list = {1};
    spec.trials_per_index = 300;
    spec.replicates = 1;
    spec.twirl = TwirlMode::depolarize;
    ResultTable t = cmd_ic_run(spec, "", 1, nullptr);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].depolarized);
    CHECK(t.rows[0].state == "file:det.box");
    CHECK(t.rows[0].S_simulated == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(t.rows[0].anisotropy <= 1e-12); // measured after the twirl
}

TEST_CASE("cmd_box_info reports and enforces --strict") {
    BoxInfoRequest req;
    req.family = "pr";
    std::ostringstream out, err;
    CHECK(cmd_box_info(req, out, err) == 0);
    CHECK(out.str().find("CHSH S = 4.0000000000000000e+00") != std::string::npos);
    CHECK(out.str().find("PASS") != std::string::npos);

    TempDir dir("icbox_boxinfo_test");
    fs::path sig = dir.path / "signaling.box";
    {
        std::ofstream f(sig);
        // Bob's output equals Alice's input: maximal signaling
        f << "0 0 : 1 0 0 0\n0 1 : 1 0 0 0\n1 0 : 0 1 0 0\n1 1 : 0 1 0 0\n";
    }
    BoxInfoRequest sreq;
    sreq.path = sig.string();
    out.str("");
    CHECK(cmd_box_info(sreq, out, err) == 0); // informative without --strict
    CHECK(out.str().find("FAIL") != std::string::npos);
    sreq.strict = true;
    CHECK(cmd_box_info(sreq, out, err) == 1);

    fs::path garbage = dir.path / "garbage.box";
    {
        std::ofstream f(garbage);
        f << "0 0 : 0.5 0 0 0.5\nnot a line\n";
    }
    BoxInfoRequest greq;
    greq.path = garbage.string();
    err.str("");
    CHECK(cmd_box_info(greq, out, err) == 2);
    CHECK(err.str().find("line 2") != std::string::npos);

    // quantum family prints phases and matches the sweep value bit for bit
    BoxInfoRequest qreq;
    qreq.family = "psi-plus";
    qreq.kappa = 0.3;
    out.str("");
    CHECK(cmd_box_info(qreq, out, err) == 0);
    SweepSpec spec;
    spec.kappa_grid = {0.3};
    ResultTable t = cmd_sweep_chsh(spec, "", 1, nullptr);
    CHECK(out.str().find("CHSH S = " + format_real(t.rows[0].S_simulated)) != std::string::npos);
    CHECK(out.str().find("phases alice") != std::string::npos);
    CHECK(out.str().find("post-selection success") != std::string::npos);

    // --save round trip
    BoxInfoRequest savereq;
    savereq.family = "isotropic";
    savereq.S = 3.1;
    savereq.save_path = (dir.path / "saved.box").string();
    CHECK(cmd_box_info(savereq, out, err) == 0);
    CHECK(chsh_value(load_box(savereq.save_path)) == doctest::Approx(3.1).epsilon(1e-12));

    BoxInfoRequest badfam;
    badfam.family = "weird";
    CHECK(cmd_box_info(badfam, out, err) == 2);
}
