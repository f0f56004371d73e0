#include "icbox/quantum.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

namespace icbox {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegenerateTol = 1e-12;

double wrap_phase(double x) {
    x = std::fmod(x, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    if (x == kTwoPi) x = 0.0;
    return x;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
}

struct PairStats {
    double eq = 0.0;   // P(A xor B = 0 | this gate pair), post-selected
    double neq = 0.0;  // P(A xor B = 1 | this gate pair)
    double denom = 0.0;
};

// Statistics of one (Alice gate, Bob gate) pair on the state: outcomes with
// A = B live on the diagonal entries HH and VV, A != B on HV and VH.
PairStats pair_stats(const Eigen::Matrix4cd& rho, const Eigen::Matrix2cd& ga,
                     const Eigen::Matrix2cd& gb) {
    Eigen::Matrix4cd k = kron2(ga, gb);
    Eigen::Matrix4cd post = k * rho * k.adjoint();
    double d0 = post(0, 0).real();
    double d1 = post(1, 1).real();
    double d2 = post(2, 2).real();
    double d3 = post(3, 3).real();
    PairStats s;
    s.denom = d0 + d1 + d2 + d3;
    if (s.denom < kDegenerateTol) return s;
    s.eq = (d0 + d3) / s.denom;
    s.neq = (d1 + d2) / s.denom;
    return s;
}

double chsh_of_phases(const Eigen::Matrix4cd& rho, double kappa, const double (&x)[4]) {
    Eigen::Matrix2cd ga[2] = {pdl_gate(kappa, x[0]).matrix, pdl_gate(kappa, x[1]).matrix};
    Eigen::Matrix2cd gb[2] = {pdl_gate(kappa, x[2]).matrix, pdl_gate(kappa, x[3]).matrix};
    double S = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            PairStats s = pair_stats(rho, ga[a], gb[b]);
            if (s.denom < kDegenerateTol)
                throw DegeneratePostselectionError(
                    "post-selection probability vanished during optimization");
            S += (a & b) ? s.neq : s.eq;
        }
    }
    return S;
}

} // namespace

MeasurementSettings normalized(const MeasurementSettings& s) {
    MeasurementSettings out;
    for (int i = 0; i < 2; ++i) {
        out.phases_alice[i] = wrap_phase(s.phases_alice[i]);
        out.phases_bob[i] = wrap_phase(s.phases_bob[i]);
    }
    return out;
}

TwoQubitState psi_plus() {
    Eigen::Vector4cd v;
    v << 0.0, 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2, 0.0;
    TwoQubitState s;
    s.rho = v * v.adjoint();
    return s;
}

TwoQubitState rho_sep() {
    TwoQubitState s;
    s.rho = Eigen::Matrix4cd::Zero();
    s.rho(1, 1) = 0.5;
    s.rho(2, 2) = 0.5;
    return s;
}

TwoQubitState state_hv() {
    TwoQubitState s;
    s.rho = Eigen::Matrix4cd::Zero();
    s.rho(1, 1) = 1.0;
    return s;
}

TwoQubitState state_vh() {
    TwoQubitState s;
    s.rho = Eigen::Matrix4cd::Zero();
    s.rho(2, 2) = 1.0;
    return s;
}

bool is_valid_state_name(std::string_view name) {
    return name == "psi-plus" || name == "rho-sep" || name == "hv" || name == "vh";
}

TwoQubitState state_by_name(std::string_view name) {
    if (name == "psi-plus") return psi_plus();
    if (name == "rho-sep") return rho_sep();
    if (name == "hv") return state_hv();
    if (name == "vh") return state_vh();
    throw std::invalid_argument("unknown state name: " + std::string(name));
}

void validate_state(const TwoQubitState& state) {
    const auto& r = state.rho;
    if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("state is not Hermitian");
    if (std::abs(r.trace().real() - 1.0) > 1e-12 || std::abs(r.trace().imag()) > 1e-12)
        throw std::invalid_argument("state trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("state is not positive semidefinite");
}

PdlGate pdl_gate(double kappa, double phi) {
    if (!(kappa >= 0.0 && kappa < 1.0))
        throw std::invalid_argument("pdl_gate: kappa must lie in [0, 1)");
    double cu = std::sqrt((1.0 + kappa) / 2.0);
    double cv = std::sqrt((1.0 - kappa) / 2.0);
    Eigen::Vector2cd u(cu, cv);
    Eigen::Vector2cd w(cu, -cv);
    // Dual (biorthogonal) basis: rows of the inverse of B = [u w].
    Eigen::Matrix2cd B;
    B.col(0) = u;
    B.col(1) = w;
    Eigen::Matrix2cd D = B.inverse();
    Eigen::Matrix2cd m0 =
        u * D.row(0) + std::exp(cd(0.0, phi)) * (w * D.row(1));
    // Largest singular value of a 2x2: sqrt of the larger eigenvalue of
    // m0^dagger m0 (closed form; unit tests cross-check against a full SVD).
    Eigen::Matrix2cd g = m0.adjoint() * m0;
    double tr = g.trace().real();
    double det = g.determinant().real();
    double disc = std::max(tr * tr - 4.0 * det, 0.0);
    double smax = std::sqrt((tr + std::sqrt(disc)) / 2.0);
    PdlGate gate;
    gate.kappa = kappa;
    gate.phi = wrap_phase(phi);
    gate.matrix = m0 / smax;
    return gate;
}

QuantumBoxResult quantum_box_full(const TwoQubitState& state, double kappa,
                                  const MeasurementSettings& settings) {
    if (!(kappa >= 0.0 && kappa < 1.0))
        throw std::invalid_argument("quantum_box: kappa must lie in [0, 1)");
    MeasurementSettings s = normalized(settings);
    Eigen::Matrix2cd ga[2] = {pdl_gate(kappa, s.phases_alice[0]).matrix,
                              pdl_gate(kappa, s.phases_alice[1]).matrix};
    Eigen::Matrix2cd gb[2] = {pdl_gate(kappa, s.phases_bob[0]).matrix,
                              pdl_gate(kappa, s.phases_bob[1]).matrix};
    double p[2][2][2][2];
    QuantumBoxResult out;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            Eigen::Matrix4cd k = kron2(ga[a], gb[b]);
            Eigen::Matrix4cd post = k * state.rho * k.adjoint();
            double denom = post.trace().real();
            if (denom < kDegenerateTol)
                throw DegeneratePostselectionError(
                    "complete extinction at setting (" + std::to_string(a) + "," +
                    std::to_string(b) + ")");
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B)
                    p[a][b][A][B] = post(2 * A + B, 2 * A + B).real() / denom;
            out.success_probability[2 * a + b] = denom;
        }
    }
    out.box = make_box(p);
    return out;
}

Box quantum_box(const TwoQubitState& state, double kappa, const MeasurementSettings& settings) {
    return quantum_box_full(state, kappa, settings).box;
}

double theory_S(double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0))
        throw std::invalid_argument("theory_S: kappa must lie in [0, 1]");
    // The second term is 0/0 at kappa = 1; take the limit numerically.
    double k = (kappa == 1.0) ? 1.0 - 1e-6 : kappa;
    double theta = std::numbers::pi * (17.0 + std::cos(std::numbers::pi * k)) / 12.0;
    double k2 = k * k;
    double c1 = std::cos(theta / 2.0);
    double c2 = std::cos(3.0 * theta / 2.0);
    return 3.0 * (k2 - c1) / (2.0 * (1.0 - k2 * c1)) -
           (k2 - c2) / (2.0 * (1.0 - k2 * c2)) + 2.0;
}

OptimizeResult optimize_settings(const TwoQubitState& state, double kappa) {
    if (!(kappa >= 0.0 && kappa < 1.0))
        throw std::invalid_argument("optimize_settings: kappa must lie in [0, 1)");
    constexpr int G = 32;
    const double step0 = kTwoPi / G;

    // Stage 1: per-pair success tables. Alice and Bob share the gate family,
    // so one gate list serves both sides.
    std::vector<Eigen::Matrix2cd> gates(G);
    for (int i = 0; i < G; ++i) gates[i] = pdl_gate(kappa, step0 * i).matrix;
    std::vector<double> req(G * G), rneq(G * G);
    bool any_valid = false;
    for (int i = 0; i < G; ++i) {
        for (int j = 0; j < G; ++j) {
            PairStats s = pair_stats(state.rho, gates[i], gates[j]);
            if (s.denom < kDegenerateTol) {
                // Unusable pair: make every tuple through it lose the scan.
                req[i * G + j] = rneq[i * G + j] = -1e9;
            } else {
                req[i * G + j] = s.eq;
                rneq[i * G + j] = s.neq;
                any_valid = true;
            }
        }
    }
    if (!any_valid)
        throw DegeneratePostselectionError("all gate pairs extinguish the state");

    // Stage 2: full scan of the 32^4 grid for the maximum...
    double smax = -1e18;
    for (int a0 = 0; a0 < G; ++a0)
        for (int a1 = 0; a1 < G; ++a1)
            for (int b0 = 0; b0 < G; ++b0) {
                const double base = req[a0 * G + b0] + req[a1 * G + b0];
                const double* ra0 = &req[a0 * G];
                const double* na1 = &rneq[a1 * G];
                for (int b1 = 0; b1 < G; ++b1) {
                    double S = base + ra0[b1] + na1[b1];
                    if (S > smax) smax = S;
                }
            }
    // ...then deterministic tie-break over all near-optimal tuples. The box
    // is invariant under shifting all Alice phases by delta and all Bob
    // phases by -delta (for symmetric states), so the optimum comes in whole
    // gauge orbits; keying on (phi_A1, phi_A0, phi_B1, phi_B0) picks the
    // orbit member with phi_A1 = 0, the convention under which the kappa = 0
    // optimum is (pi/2, 0, 3pi/4, pi/4) and the separable state's
    // correlations sit on Alice input 1.
    int best[4] = {G, G, G, G}; // (a1, a0, b1, b0) key order
    for (int a0 = 0; a0 < G; ++a0)
        for (int a1 = 0; a1 < G; ++a1)
            for (int b0 = 0; b0 < G; ++b0)
                for (int b1 = 0; b1 < G; ++b1) {
                    double S = req[a0 * G + b0] + req[a0 * G + b1] + req[a1 * G + b0] +
                               rneq[a1 * G + b1];
                    if (S < smax - 1e-9) continue;
                    int key[4] = {a1, a0, b1, b0};
                    bool smaller = false;
                    for (int t = 0; t < 4; ++t) {
                        if (key[t] != best[t]) {
                            smaller = key[t] < best[t];
                            break;
                        }
                    }
                    if (smaller) {
                        best[0] = a1;
                        best[1] = a0;
                        best[2] = b1;
                        best[3] = b0;
                    }
                }

    // Stage 3: coordinate descent down to phase resolution 1e-6.
    double x[4] = {step0 * best[1], step0 * best[0], step0 * best[3], step0 * best[2]};
    double cur = chsh_of_phases(state.rho, kappa, x);
    bool improved = true;
    while (improved) {
        improved = false;
        for (int ci = 0; ci < 4; ++ci) {
            double step = step0;
            while (step > 1e-6) {
                bool moved = false;
                for (double sgn : {1.0, -1.0}) {
                    double y[4] = {x[0], x[1], x[2], x[3]};
                    y[ci] = x[ci] + sgn * step;
                    double v = chsh_of_phases(state.rho, kappa, y);
                    if (v > cur + 1e-15) {
                        x[ci] = y[ci];
                        cur = v;
                        improved = true;
                        moved = true;
                        break;
                    }
                }
                if (!moved) step /= 2.0;
            }
        }
    }

    // Stage 4: canonicalize the gauge (phi_A1 -> 0) when the shifted settings
    // reproduce the same box; for states without the symmetry this is a no-op.
    MeasurementSettings raw;
    raw.phases_alice = {wrap_phase(x[0]), wrap_phase(x[1])};
    raw.phases_bob = {wrap_phase(x[2]), wrap_phase(x[3])};
    double delta = -x[1];
    MeasurementSettings shifted;
    shifted.phases_alice = {wrap_phase(x[0] + delta), 0.0};
    shifted.phases_bob = {wrap_phase(x[2] - delta), wrap_phase(x[3] - delta)};
    OptimizeResult result;
    result.settings = raw;
    try {
        Box braw = quantum_box(state, kappa, raw);
        Box bshift = quantum_box(state, kappa, shifted);
        double diff = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int A = 0; A < 2; ++A)
                    for (int B = 0; B < 2; ++B)
                        diff = std::max(diff,
                                        std::abs(braw.p[a][b][A][B] - bshift.p[a][b][A][B]));
        if (diff <= 1e-12) result.settings = shifted;
    } catch (const DegeneratePostselectionError&) {
        // keep the raw settings
    }
    result.S = chsh_of_phases(state.rho, kappa, x);
    return result;
}

} // namespace icbox
