#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "icbox/box.hpp"
#include "icbox/cli_core.hpp"
#include "icbox/icproto.hpp"
#include "icbox/metrics.hpp"
#include "icbox/quantum.hpp"
#include "icbox/twirl.hpp"

namespace py = pybind11;
using namespace icbox;

namespace {

Box box_from_entries(const std::vector<double>& flat) {
    if (flat.size() != 16)
        throw std::invalid_argument("Box expects 16 entries ordered (a, b, A, B)");
    double p[2][2][2][2];
    std::size_t i = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B) p[a][b][A][B] = flat[i++];
    return make_box(p);
}

std::vector<double> box_entries(const Box& box) {
    std::vector<double> flat;
    flat.reserve(16);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B) flat.push_back(box.p[a][b][A][B]);
    return flat;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bipartite no-signaling boxes, post-selected lossy quantum correlations, "
              "and the nested 1-bit information-causality protocol";

    py::register_exception<BoxError>(m, "BoxError");
    py::register_exception<DegeneratePostselectionError>(m, "DegeneratePostselectionError");

    py::class_<Box>(m, "Box")
        .def(py::init(&box_from_entries), py::arg("entries"))
        .def("__getitem__",
             [](const Box& box, std::tuple<int, int, int, int> idx) {
                 auto [a, b, A, B] = idx;
                 if ((a | b | A | B) & ~1) throw py::index_error("indices must be 0 or 1");
                 return box.p[a][b][A][B];
             })
        .def_property_readonly("entries", &box_entries)
        .def("success", &Box::success, py::arg("a"), py::arg("b"))
        .def("__repr__", [](const Box& box) { return serialize_box(box); });

    m.def("pr_box", &pr_box);
    m.def("uniform_box", &uniform_box);
    m.def("isotropic_box", &isotropic_box, py::arg("S"));
    m.def("local_deterministic_box", &local_deterministic_box, py::arg("A0"), py::arg("A1"),
          py::arg("B0"), py::arg("B1"));
    m.def("chsh_value", &chsh_value);
    m.def("anisotropy", &anisotropy);
    m.def("success_probs", [](const Box& box) { return success_probs(box); });
    m.def(
        "no_signaling",
        [](const Box& box) {
            auto r = no_signaling(box);
            return py::make_tuple(r.passes, r.max_violation);
        },
        "Returns (passes, max_violation)");
    m.def("mix", &mix, py::arg("boxes"), py::arg("weights"));
    m.def("serialize_box", &serialize_box);
    m.def("parse_box", &parse_box, py::arg("text"));
    m.def("load_box", &load_box, py::arg("path"));
    m.def("save_box", &save_box, py::arg("box"), py::arg("path"));
    m.def(
        "sample",
        [](const Box& box, int a, int b, std::uint64_t seed, std::uint64_t index) {
            RngStream rng = substream(seed, {label_tag("py-sample"), index});
            return sample(box, a, b, rng);
        },
        py::arg("box"), py::arg("a"), py::arg("b"), py::arg("seed"), py::arg("index") = 0,
        "One (A, B) draw from the stream labelled by (seed, index)");

    py::class_<MeasurementSettings>(m, "MeasurementSettings")
        .def(py::init([](double a0, double a1, double b0, double b1) {
                 MeasurementSettings s;
                 s.phases_alice = {a0, a1};
                 s.phases_bob = {b0, b1};
                 return normalized(s);
             }),
             py::arg("a0"), py::arg("a1"), py::arg("b0"), py::arg("b1"))
        .def_property_readonly(
            "phases_alice",
            [](const MeasurementSettings& s) {
                return py::make_tuple(s.phases_alice[0], s.phases_alice[1]);
            })
        .def_property_readonly("phases_bob", [](const MeasurementSettings& s) {
            return py::make_tuple(s.phases_bob[0], s.phases_bob[1]);
        });

    m.def("theory_S", &theory_S, py::arg("kappa"));
    m.def(
        "quantum_box",
        [](const std::string& state, double kappa, const MeasurementSettings& settings) {
            return quantum_box(state_by_name(state), kappa, settings);
        },
        py::arg("state"), py::arg("kappa"), py::arg("settings"),
        "state is one of 'psi-plus', 'rho-sep', 'hv', 'vh'");
    m.def(
        "optimize_settings",
        [](const std::string& state, double kappa) {
            auto r = optimize_settings(state_by_name(state), kappa);
            return py::make_tuple(r.settings, r.S);
        },
        py::arg("state"), py::arg("kappa"), "Returns (settings, S)");
    m.def(
        "pdl_gate_matrix",
        [](double kappa, double phi) {
            auto g = pdl_gate(kappa, phi);
            std::vector<std::complex<double>> flat = {g.matrix(0, 0), g.matrix(0, 1),
                                                      g.matrix(1, 0), g.matrix(1, 1)};
            return flat;
        },
        py::arg("kappa"), py::arg("phi"), "Row-major 2x2 filter matrix");

    m.def("depolarize", &depolarize);
    m.def("symmetrize_outputs", &symmetrize_outputs);
    m.def(
        "relabel",
        [](const Box& box, int alpha, int beta, int gamma) {
            return relabel(box, Relabeling{alpha != 0, beta != 0, gamma != 0});
        },
        py::arg("box"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"));

    m.def("binary_entropy", &binary_entropy, py::arg("p"));
    m.def(
        "merit",
        [](const std::vector<double>& P_k) {
            auto r = merit(P_k);
            py::dict d;
            d["i_bound"] = r.i_bound;
            d["efficiency"] = r.efficiency;
            d["ic_violated"] = r.ic_violated;
            d["rac_violated"] = r.rac_violated;
            return d;
        },
        py::arg("P_k"));

    py::class_<RunSummary>(m, "RunSummary")
        .def_readonly("n", &RunSummary::n)
        .def_readonly("trials_per_index", &RunSummary::trials_per_index)
        .def_readonly("replicates", &RunSummary::replicates)
        .def_readonly("P_k", &RunSummary::P_k)
        .def_readonly("successes", &RunSummary::successes)
        .def_readonly("trials", &RunSummary::trials)
        .def_readonly("i_bound", &RunSummary::i_bound)
        .def_readonly("efficiency", &RunSummary::efficiency)
        .def_readonly("i_bound_mean", &RunSummary::i_bound_mean)
        .def_readonly("i_bound_std", &RunSummary::i_bound_std)
        .def_readonly("efficiency_mean", &RunSummary::efficiency_mean)
        .def_readonly("efficiency_std", &RunSummary::efficiency_std);

    m.def(
        "run_protocol",
        [](const Box& box, int n, const std::string& dataset_mode,
           const std::vector<int>& fixed_dataset, long trials_per_index, int replicates,
           std::uint64_t seed, const std::string& twirl, int threads) {
            ProtocolConfig cfg;
            cfg.n = n;
            cfg.dataset_mode = dataset_mode_from_string(dataset_mode);
            cfg.fixed_dataset = fixed_dataset;
            cfg.trials_per_index = trials_per_index;
            cfg.replicates = replicates;
            cfg.seed = seed;
            cfg.twirl = twirl_mode_from_string(twirl);
            return run_protocol(box, cfg, threads);
        },
        py::arg("box"), py::arg("n"), py::arg("dataset_mode") = "random-per-trial",
        py::arg("fixed_dataset") = std::vector<int>{}, py::arg("trials_per_index") = 0,
        py::arg("replicates") = 1, py::arg("seed") = kDefaultSeed,
        py::arg("twirl") = "none", py::arg("threads") = 1);

    m.def(
        "exact_protocol_stats",
        [](const Box& box, int n, const std::string& dataset_mode,
           const std::vector<int>& fixed_dataset) {
            return exact_protocol_stats(box, n, dataset_mode_from_string(dataset_mode),
                                        fixed_dataset.empty() ? nullptr : &fixed_dataset);
        },
        py::arg("box"), py::arg("n"), py::arg("dataset_mode") = "random-per-trial",
        py::arg("fixed_dataset") = std::vector<int>{},
        "Exact per-index success probabilities P_k");
}
