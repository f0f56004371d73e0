#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string_view>

#include "icbox/box.hpp"

namespace icbox {

// Two-qubit polarization state over the basis {HH, HV, VH, VV}; bit
// convention H -> 0, V -> 1, so the computational index of |A B> is 2A+B.
struct TwoQubitState {
    Eigen::Matrix4cd rho;
};

// Lossy phase gate: acts as the identity on |u> and imposes the phase phi on
// |w>, where |u> = (sqrt(1+k)|H> + sqrt(1-k)|V>)/sqrt(2) and
// |w> = (sqrt(1+k)|H> - sqrt(1-k)|V>)/sqrt(2) overlap in <u|w> = kappa.
// Built from the biorthogonal (dual) basis and rescaled so the largest
// singular value is 1 (a valid post-selected filter).
struct PdlGate {
    double kappa = 0.0;
    double phi = 0.0;
    Eigen::Matrix2cd matrix;
};

// Gate phases per input bit; values stored modulo 2*pi.
struct MeasurementSettings {
    std::array<double, 2> phases_alice{};
    std::array<double, 2> phases_bob{};
};

MeasurementSettings normalized(const MeasurementSettings& s);

class DegeneratePostselectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

TwoQubitState psi_plus();  // (|HV> + |VH>)/sqrt(2), projector
TwoQubitState rho_sep();   // (|HV><HV| + |VH><VH|)/2
TwoQubitState state_hv();
TwoQubitState state_vh();
// Accepts "psi-plus", "rho-sep", "hv", "vh".
TwoQubitState state_by_name(std::string_view name);
bool is_valid_state_name(std::string_view name);

// Hermitian within 1e-12, unit trace within 1e-12, min eigenvalue >= -1e-10.
void validate_state(const TwoQubitState& state);

PdlGate pdl_gate(double kappa, double phi); // requires 0 <= kappa < 1

struct QuantumBoxResult {
    Box box;
    // Post-selection success probability Tr(rho') per setting, (a,b) ordered
    // (0,0),(0,1),(1,0),(1,1).
    std::array<double, 4> success_probability{};
};

// Apply the setting-dependent gates to both arms, post-select, renormalize.
QuantumBoxResult quantum_box_full(const TwoQubitState& state, double kappa,
                                  const MeasurementSettings& settings);
Box quantum_box(const TwoQubitState& state, double kappa, const MeasurementSettings& settings);

// Closed-form S for the post-selected psi_plus family, with the approximate
// Theta(kappa) = pi*(17 + cos(pi*kappa))/12. The kappa=1 endpoint is the
// 0/0 limit, evaluated at 1 - 1e-6.
double theory_S(double kappa);

struct OptimizeResult {
    MeasurementSettings settings;
    double S = 0.0;
};

// Maximize chsh_value(quantum_box(state, kappa, .)) over the four phases:
// coarse 32-point-per-phase grid scan, deterministic tie-break, then
// coordinate-descent refinement to phase resolution 1e-6. The result is
// gauge-canonicalized (Alice input-1 phase shifted to zero) whenever that
// shift provably leaves the box unchanged.
OptimizeResult optimize_settings(const TwoQubitState& state, double kappa);

} // namespace icbox
