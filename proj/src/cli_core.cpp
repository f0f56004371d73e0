#include "icbox/cli_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "icbox/metrics.hpp"
#include "icbox/parallel.hpp"
#include "icbox/twirl.hpp"
#include "svg.hpp"

namespace icbox {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kTsirelson = 2.0 + std::numbers::sqrt2;

void write_text_file(const std::string& dir, const std::string& name,
                     const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + name + " in " + dir);
    out << content;
}

// One entry of the resolved ic-run box list.
struct RunItem {
    std::string label;
    double kappa = kNaN;
    double s_theory = kNaN;
    Box box;
};

std::string basename_of(const std::string& path) {
    return std::filesystem::path(path).filename().string();
}

// Coarse product-state search (the experimental "sep-optimal" series): pure
// product states parameterized by two Bloch vectors, evaluated at the given
// measurement settings. The CHSH value is linear in the state, so the
// separable optimum is attained on pure products.
double best_product_state_S(double kappa, const MeasurementSettings& settings) {
    constexpr int kAngles = 12;
    auto qubit = [](double theta, double phi) {
        Eigen::Vector2cd v;
        v << std::cos(theta / 2.0),
            std::exp(std::complex<double>(0.0, phi)) * std::sin(theta / 2.0);
        return v;
    };
    double best = 0.0;
    for (int ia = 0; ia < kAngles; ++ia)
        for (int ja = 0; ja < 2 * kAngles; ++ja)
            for (int ib = 0; ib < kAngles; ++ib)
                for (int jb = 0; jb < 2 * kAngles; ++jb) {
                    double ta = std::numbers::pi * ia / (kAngles - 1);
                    double pa = std::numbers::pi * ja / kAngles;
                    double tb = std::numbers::pi * ib / (kAngles - 1);
                    double pb = std::numbers::pi * jb / kAngles;
                    Eigen::Vector4cd v;
                    Eigen::Vector2cd qa = qubit(ta, pa), qb = qubit(tb, pb);
                    v << qa(0) * qb(0), qa(0) * qb(1), qa(1) * qb(0), qa(1) * qb(1);
                    TwoQubitState st;
                    st.rho = v * v.adjoint();
                    try {
                        best = std::max(best, chsh_value(quantum_box(st, kappa, settings)));
                    } catch (const DegeneratePostselectionError&) {
                        // product state fully extinguished at some setting; skip
                    }
                }
    return best;
}

} // namespace

ResultRow::ResultRow()
    : kappa(kNaN), S_simulated(kNaN), S_theory(kNaN), i_bound_mean(kNaN), i_bound_std(kNaN),
      efficiency_mean(kNaN), efficiency_std(kNaN), anisotropy(kNaN) {}

const char* const kCsvHeader =
    "kappa,state,S_simulated,S_theory,n,i_bound_mean,i_bound_std,"
    "efficiency_mean,efficiency_std,anisotropy,depolarized";

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string ResultTable::to_csv() const {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += format_real(r.kappa);
        out += ',';
        out += r.state;
        out += ',';
        out += format_real(r.S_simulated);
        out += ',';
        out += format_real(r.S_theory);
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += format_real(r.i_bound_mean);
        out += ',';
        out += format_real(r.i_bound_std);
        out += ',';
        out += format_real(r.efficiency_mean);
        out += ',';
        out += format_real(r.efficiency_std);
        out += ',';
        out += format_real(r.anisotropy);
        out += ',';
        out += r.depolarized ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::vector<double> uniform_grid(int points, double lo, double hi) {
    if (points < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    return g;
}

SweepSpec default_sweep_spec() {
    SweepSpec spec;
    spec.kappa_grid = uniform_grid(21);
    return spec;
}

ResultTable cmd_sweep_chsh(const SweepSpec& spec, const std::string& out_dir, int threads,
                           std::ostream* err) {
    if (spec.kappa_grid.empty()) throw std::invalid_argument("sweep: empty kappa grid");
    for (std::size_t i = 0; i < spec.kappa_grid.size(); ++i) {
        double k = spec.kappa_grid[i];
        if (!(k >= 0.0 && k <= 1.0))
            throw std::invalid_argument("sweep: kappa " + std::to_string(k) +
                                        " outside [0, 1]");
        if (i > 0 && !(k > spec.kappa_grid[i - 1]))
            throw std::invalid_argument("sweep: kappa grid must be strictly increasing");
    }
    for (const auto& s : spec.states)
        if (!is_valid_state_name(s))
            throw std::invalid_argument("sweep: unknown state '" + s + "'");

    struct Point {
        std::vector<ResultRow> rows;
        std::vector<std::string> notes;
    };
    std::vector<Point> points(spec.kappa_grid.size());

    parallel_for(spec.kappa_grid.size(), threads, [&](std::size_t i) {
        double kappa = spec.kappa_grid[i];
        Point& pt = points[i];
        auto state_rows = spec.states;
        if (kappa >= 1.0) {
            // The gate basis degenerates at kappa = 1: emit the theory limit
            // only. This is designed behaviour, not a failed row.
            for (const auto& name : state_rows) {
                ResultRow row;
                row.kappa = kappa;
                row.state = name;
                row.S_theory = (name == "psi-plus") ? theory_S(1.0) : kNaN;
                pt.rows.push_back(row);
            }
            if (spec.optimize_separable) {
                ResultRow row;
                row.kappa = kappa;
                row.state = "sep-optimal";
                pt.rows.push_back(row);
            }
            pt.notes.push_back("kappa=1: theory limit only (the gate construction excludes kappa=1)");
            return;
        }
        OptimizeResult opt = optimize_settings(psi_plus(), kappa);
        for (const auto& name : state_rows) {
            ResultRow row;
            row.kappa = kappa;
            row.state = name;
            try {
                Box box = quantum_box(state_by_name(name), kappa, opt.settings);
                row.S_simulated = chsh_value(box);
                row.anisotropy = anisotropy(box);
            } catch (const DegeneratePostselectionError& e) {
                pt.notes.push_back("kappa=" + std::to_string(kappa) + " state=" + name +
                                   ": skipped (" + e.what() + ")");
                continue; // row skipped entirely
            }
            row.S_theory = (name == "psi-plus") ? theory_S(kappa) : kNaN;
            pt.rows.push_back(row);
        }
        if (spec.optimize_separable) {
            ResultRow row;
            row.kappa = kappa;
            row.state = "sep-optimal";
            row.S_simulated = best_product_state_S(kappa, opt.settings);
            pt.rows.push_back(row);
        }
    });

    ResultTable table;
    bool any_skipped = false;
    for (auto& pt : points) {
        for (auto& r : pt.rows) table.rows.push_back(std::move(r));
        for (auto& note : pt.notes) {
            if (err) *err << "sweep-chsh: " << note << "\n";
            if (note.find("skipped (") != std::string::npos) any_skipped = true;
        }
    }
    if (any_skipped && err) *err << "sweep-chsh: some rows were skipped\n";

    if (!out_dir.empty()) {
        write_text_file(out_dir, "sweep_chsh.csv", table.to_csv());
        SvgChart chart;
        chart.title = "CHSH value vs polarization-dependent loss";
        chart.xlabel = "kappa";
        chart.ylabel = "S";
        const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
        int ci = 0;
        auto states_plus = spec.states;
        if (spec.optimize_separable) states_plus.push_back("sep-optimal");
        for (const auto& name : states_plus) {
            SvgSeries s;
            s.name = name + " (simulated)";
            s.color = colors[ci++ % 5];
            s.markers = true;
            for (const auto& r : table.rows)
                if (r.state == name) s.points.emplace_back(r.kappa, r.S_simulated);
            chart.series.push_back(std::move(s));
        }
        SvgSeries th;
        th.name = "theory";
        th.color = "#555555";
        th.dashed = true;
        for (const auto& r : table.rows)
            if (r.state == "psi-plus") th.points.emplace_back(r.kappa, r.S_theory);
        chart.series.push_back(std::move(th));
        chart.hrules = {{3.0, "classical bound"}, {kTsirelson, "Tsirelson"}};
        chart.fit_axes();
        write_text_file(out_dir, "sweep_chsh.svg", chart.render());
    }
    return table;
}

ResultTable cmd_ic_run(const IcRunSpec& spec, const std::string& out_dir, int threads,
                       std::ostream* err) {
    // Resolve the box list.
    std::vector<RunItem> items;
    const std::string& fam = spec.source.family;
    if (fam == "psi-plus" || fam == "rho-sep" || fam == "hv" || fam == "vh") {
        if (spec.source.kappa_grid.empty())
            throw std::invalid_argument("ic-run: quantum family needs a kappa grid");
        for (double kappa : spec.source.kappa_grid) {
            if (!(kappa >= 0.0 && kappa < 1.0))
                throw std::invalid_argument(
                    "ic-run: kappa must lie in [0, 1) for simulation, got " +
                    std::to_string(kappa));
            OptimizeResult opt = optimize_settings(psi_plus(), kappa);
            RunItem item;
            item.label = fam;
            item.kappa = kappa;
            item.box = quantum_box(state_by_name(fam), kappa, opt.settings);
            item.s_theory = (fam == "psi-plus") ? theory_S(kappa) : kNaN;
            items.push_back(std::move(item));
        }
    } else if (fam == "isotropic") {
        if (spec.source.s_grid.empty())
            throw std::invalid_argument("ic-run: isotropic family needs an S grid");
        for (double S : spec.source.s_grid) {
            RunItem item;
            item.label = "isotropic";
            item.box = isotropic_box(S);
            items.push_back(std::move(item));
        }
    } else if (fam == "pr") {
        RunItem item;
        item.label = "pr";
        item.box = pr_box();
        items.push_back(std::move(item));
    } else if (fam == "file") {
        if (spec.source.files.empty()) throw std::invalid_argument("ic-run: no box files given");
        for (const auto& path : spec.source.files) {
            RunItem item;
            item.label = "file:" + basename_of(path);
            item.box = load_box(path);
            items.push_back(std::move(item));
        }
    } else {
        throw std::invalid_argument("ic-run: unknown box source '" + fam + "'");
    }

    // Optional analytic twirl, applied to the box before any sampling.
    for (auto& item : items) {
        switch (spec.twirl) {
        case TwirlMode::none: break;
        case TwirlMode::symmetrize: item.box = symmetrize_outputs(item.box); break;
        case TwirlMode::depolarize: item.box = depolarize(item.box); break;
        }
    }

    ResultTable table;
    std::string pk_csv = "n,S_of_box,k,P_k,i_bound_mean,i_bound_std,eff_mean,eff_std,trials,seed\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        const RunItem& item = items[i];
        double S_box = chsh_value(item.box);
        double aniso = anisotropy(item.box);
        // Per-box seed so different boxes draw independent streams.
        std::uint64_t box_seed =
            substream(spec.seed, {label_tag("box"), static_cast<std::uint64_t>(i)}).next_u64();
        for (int n : spec.n_list) {
            ProtocolConfig cfg;
            cfg.n = n;
            cfg.dataset_mode = spec.dataset_mode;
            cfg.fixed_dataset = spec.fixed_dataset;
            cfg.trials_per_index = spec.trials_per_index;
            cfg.replicates = spec.replicates;
            cfg.seed = box_seed;
            RunSummary sum = run_protocol(item.box, cfg, threads);
            ResultRow row;
            row.kappa = item.kappa;
            row.state = item.label;
            row.S_simulated = S_box;
            row.S_theory = item.s_theory;
            row.n = n;
            row.i_bound_mean = sum.i_bound_mean;
            row.i_bound_std = sum.i_bound_std;
            row.efficiency_mean = sum.efficiency_mean;
            row.efficiency_std = sum.efficiency_std;
            row.anisotropy = aniso;
            row.depolarized = (spec.twirl == TwirlMode::depolarize);
            table.rows.push_back(row);
            for (std::size_t k = 0; k < sum.P_k.size(); ++k) {
                pk_csv += std::to_string(n) + ',' + format_real(S_box) + ',' +
                          std::to_string(k) + ',' + format_real(sum.P_k[k]) + ',' +
                          format_real(sum.i_bound_mean) + ',' + format_real(sum.i_bound_std) +
                          ',' + format_real(sum.efficiency_mean) + ',' +
                          format_real(sum.efficiency_std) + ',' +
                          std::to_string(sum.trials[k]) + ',' + std::to_string(cfg.seed) + '\n';
            }
        }
    }
    (void)err;

    if (!out_dir.empty()) {
        write_text_file(out_dir, "ic_run.csv", table.to_csv());
        write_text_file(out_dir, "ic_run_pk.csv", pk_csv);

        // eta vs S and I vs S charts, one series per n, with the isotropic
        // theory overlays evaluated at the S values present in the CSV.
        auto make_chart = [&](bool efficiency) {
            SvgChart chart;
            chart.title = efficiency ? "RAC efficiency vs CHSH value"
                                     : "Information bound vs CHSH value";
            chart.xlabel = "S";
            chart.ylabel = efficiency ? "efficiency" : "I bound (bits)";
            const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
            for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
                int n = spec.n_list[ni];
                SvgSeries s, th;
                s.name = "n=" + std::to_string(n);
                s.color = colors[ni % 8];
                s.markers = true;
                th.name = "";
                th.color = s.color;
                th.dashed = true;
                std::vector<const ResultRow*> rows;
                for (const auto& r : table.rows)
                    if (r.n == n) rows.push_back(&r);
                std::sort(rows.begin(), rows.end(), [](const ResultRow* a, const ResultRow* b) {
                    return a->S_simulated < b->S_simulated;
                });
                for (const ResultRow* r : rows) {
                    double S = r->S_simulated;
                    s.points.emplace_back(S, efficiency ? r->efficiency_mean : r->i_bound_mean);
                    double E = S / 2.0 - 1.0;
                    double Pn = (1.0 + std::pow(E, n)) / 2.0;
                    double theory = efficiency
                                        ? std::pow(2.0 * E * E, n)
                                        : std::ldexp(1.0 - binary_entropy(std::clamp(Pn, 0.0, 1.0)), n);
                    th.points.emplace_back(S, theory);
                }
                chart.series.push_back(std::move(s));
                chart.series.push_back(std::move(th));
            }
            chart.hrules = {{1.0, efficiency ? "classical/quantum bound" : "m = 1 bit"}};
            chart.vrules = {{kTsirelson, "Tsirelson"}};
            chart.fit_axes();
            return chart.render();
        };
        write_text_file(out_dir, "efficiency_vs_S.svg", make_chart(true));
        write_text_file(out_dir, "ibound_vs_S.svg", make_chart(false));
    }
    return table;
}

int cmd_box_info(const BoxInfoRequest& req, std::ostream& out, std::ostream& err) {
    Box box;
    std::string desc;
    bool quantum = false;
    MeasurementSettings settings;
    std::array<double, 4> postsel{};
    double s_theory = kNaN;
    try {
        if (!req.path.empty()) {
            box = load_box(req.path);
            desc = "file " + req.path;
        } else if (req.family == "pr") {
            box = pr_box();
            desc = "pr box";
        } else if (req.family == "uniform") {
            box = uniform_box();
            desc = "uniform box";
        } else if (req.family == "isotropic") {
            box = isotropic_box(req.S);
            desc = "isotropic box, S = " + format_real(req.S);
        } else if (is_valid_state_name(req.family)) {
            quantum = true;
            settings = req.settings ? *req.settings
                                    : optimize_settings(psi_plus(), req.kappa).settings;
            auto full = quantum_box_full(state_by_name(req.family), req.kappa, settings);
            box = full.box;
            postsel = full.success_probability;
            if (req.family == "psi-plus") s_theory = theory_S(req.kappa);
            desc = req.family + " state, kappa = " + format_real(req.kappa);
        } else {
            err << "box-info: unknown family '" << req.family << "'\n";
            return 2;
        }
    } catch (const BoxParseError& e) {
        err << "box-info: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "box-info: " << e.what() << "\n";
        return 2;
    }

    out << "source: " << desc << "\n";
    out << serialize_box(box);
    double norm_dev = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double sum = 0.0;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B) sum += box.p[a][b][A][B];
            norm_dev = std::max(norm_dev, std::abs(sum - 1.0));
        }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", norm_dev);
    out << "normalization max |sum - 1| = " << buf << "\n";
    auto sp = success_probs(box);
    out << "per-setting success P(A xor B = ab): " << format_real(sp[0]) << " "
        << format_real(sp[1]) << " " << format_real(sp[2]) << " " << format_real(sp[3])
        << "\n";
    out << "CHSH S = " << format_real(chsh_value(box)) << "\n";
    if (!std::isnan(s_theory)) out << "theory S = " << format_real(s_theory) << "\n";
    out << "anisotropy = " << format_real(anisotropy(box)) << "\n";
    NoSignalingReport ns = no_signaling(box);
    std::snprintf(buf, sizeof buf, "%.3e", ns.max_violation);
    out << "no-signaling max violation = " << buf << " -> " << (ns.passes ? "PASS" : "FAIL")
        << "\n";
    if (quantum) {
        out << "phases alice = (" << format_real(settings.phases_alice[0]) << ", "
            << format_real(settings.phases_alice[1]) << ")\n";
        out << "phases bob   = (" << format_real(settings.phases_bob[0]) << ", "
            << format_real(settings.phases_bob[1]) << ")\n";
        out << "post-selection success = " << format_real(postsel[0]) << " "
            << format_real(postsel[1]) << " " << format_real(postsel[2]) << " "
            << format_real(postsel[3]) << "\n";
    }
    if (!req.save_path.empty()) save_box(box, req.save_path);
    if (req.strict && !ns.passes) {
        err << "box-info: no-signaling check failed under --strict\n";
        return 1;
    }
    return 0;
}

void cmd_theory(const std::vector<double>& kappa_grid, const std::string& out_dir) {
    std::string csv = "kappa,S_theory\n";
    for (double k : kappa_grid)
        csv += format_real(k) + "," + format_real(theory_S(k)) + "\n";
    write_text_file(out_dir, "theory.csv", csv);
}

namespace {

std::vector<double> parse_grid(const nlohmann::json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    int points = j.value("points", 21);
    double lo = j.value("min", 0.0);
    double hi = j.value("max", 1.0);
    return uniform_grid(points, lo, hi);
}

} // namespace

CliConfig parse_config(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    CliConfig cfg;
    cfg.command = j.value("command", "");
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.threads = j.value("threads", cfg.threads);
    std::uint64_t seed = j.value("seed", kDefaultSeed);
    cfg.sweep.seed = seed;
    cfg.ic.seed = seed;
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        if (s.contains("kappa_grid")) cfg.sweep.kappa_grid = parse_grid(s["kappa_grid"]);
        if (s.contains("states")) cfg.sweep.states = s["states"].get<std::vector<std::string>>();
        cfg.sweep.replicates = s.value("replicates", cfg.sweep.replicates);
        cfg.sweep.optimize_separable =
            s.value("optimize_separable", cfg.sweep.optimize_separable);
    }
    if (j.contains("protocol")) {
        const auto& p = j["protocol"];
        if (p.contains("n_list")) cfg.ic.n_list = p["n_list"].get<std::vector<int>>();
        if (p.contains("dataset_mode"))
            cfg.ic.dataset_mode = dataset_mode_from_string(p["dataset_mode"].get<std::string>());
        if (p.contains("fixed_dataset"))
            cfg.ic.fixed_dataset = p["fixed_dataset"].get<std::vector<int>>();
        cfg.ic.trials_per_index = p.value("trials_per_index", cfg.ic.trials_per_index);
        cfg.ic.replicates = p.value("replicates", cfg.ic.replicates);
    }
    if (j.contains("twirl")) cfg.ic.twirl = twirl_mode_from_string(j["twirl"].get<std::string>());
    if (j.contains("box_source")) {
        const auto& b = j["box_source"];
        cfg.ic.source.family = b.value("family", "");
        if (b.contains("kappa_grid")) cfg.ic.source.kappa_grid = parse_grid(b["kappa_grid"]);
        if (b.contains("s_grid")) cfg.ic.source.s_grid = parse_grid(b["s_grid"]);
        if (b.contains("files"))
            cfg.ic.source.files = b["files"].get<std::vector<std::string>>();
    }
    if (j.contains("theory_grid")) cfg.theory_grid = parse_grid(j["theory_grid"]);
    return cfg;
}

} // namespace icbox
