#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "icbox/rng.hpp"

namespace icbox {

// Bipartite binary-input binary-output box: the full conditional distribution
// p[a][b][A][B] with Alice input a, Bob input b, outputs A and B. This is the
// common currency between the quantum, twirl, protocol and CLI layers. The
// full 16-entry table is stored (not marginals + correlators) because the
// post-selected lossy boxes are anisotropic and not determined by correlators.
struct Box {
    double p[2][2][2][2] = {};

    // P(A xor B = a*b | a, b) — the per-setting success probability of the
    // CHSH game in the rescaled form S = sum_{a,b} P(A xor B = ab | a, b).
    double success(int a, int b) const {
        int want = a & b;
        double s = 0.0;
        for (int A = 0; A < 2; ++A)
            for (int B = 0; B < 2; ++B)
                if ((A ^ B) == want) s += p[a][b][A][B];
        return s;
    }
};

struct NoSignalingReport {
    double max_violation = 0.0;
    bool passes = false; // max_violation <= 1e-12
};

class BoxError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parse failure; line is 1-based within the input text.
class BoxParseError : public BoxError {
public:
    BoxParseError(const std::string& msg, int line)
        : BoxError(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Validate normalization (1e-12 per setting) and nonnegativity; entries in
// [-1e-15, 0) are clamped to zero, anything more negative is rejected.
Box make_box(const double (&p)[2][2][2][2]);

Box pr_box();
Box uniform_box();
Box isotropic_box(double S); // S in [2, 4]
Box local_deterministic_box(int A0, int A1, int B0, int B1);

double chsh_value(const Box& box);
NoSignalingReport no_signaling(const Box& box);

// Per-setting success probabilities in (a,b) order (0,0),(0,1),(1,0),(1,1).
std::array<double, 4> success_probs(const Box& box);
// max - min of the four per-setting success probabilities.
double anisotropy(const Box& box);

// Joint sample of (A, B) for the given inputs; consumes exactly one draw.
std::pair<int, int> sample(const Box& box, int a, int b, RngStream& rng);

// Entrywise convex combination; weights must be nonnegative and sum to 1
// within 1e-12.
Box mix(const std::vector<Box>& boxes, const std::vector<double>& weights);

// Plain-text format: four lines "a b : p00 p01 p10 p11" (outputs ordered
// AB = 00,01,10,11), 17-significant-digit decimals. '#' starts a comment.
std::string serialize_box(const Box& box);
Box parse_box(const std::string& text);
Box load_box(const std::string& path);
void save_box(const Box& box, const std::string& path);

} // namespace icbox
