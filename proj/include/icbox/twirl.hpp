#pragma once

#include "icbox/box.hpp"

namespace icbox {

// Shared-randomness relabeling (3 bits). The wiring below preserves the CHSH
// game indicator A xor B xor ab for every value, so all 8 relabelings leave S
// unchanged; averaging over all of them is the depolarizing twirl.
struct Relabeling {
    int alpha = 0;
    int beta = 0;
    int gamma = 0;
};

// Feed (a xor alpha, b xor beta) to the inner box, obtain (A, B), output
// A' = A xor beta*a xor alpha*beta xor gamma and B' = B xor alpha*b xor gamma.
Box relabel(const Box& box, const Relabeling& r);

// Uniform mixture over all 8 relabelings: isotropic output (uniform marginals,
// equal per-setting success probabilities) with the same CHSH value.
Box depolarize(const Box& box);

// Uniform mixture over gamma only (the output-flip step): marginals become
// uniform while the four per-setting success probabilities are untouched, so
// any anisotropy survives.
Box symmetrize_outputs(const Box& box);

// Apply the relabeling to a single sampled outcome instead of the whole box;
// used for shot-by-shot twirling inside the protocol.
std::pair<int, int> relabel_outcome(const Relabeling& r, int a, int b, int A_inner, int B_inner);

} // namespace icbox
