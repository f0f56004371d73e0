#pragma once

#include <utility>
#include <vector>

namespace icbox {

// -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0. Throws outside [0, 1].
double binary_entropy(double p);

struct MeritReport {
    double i_bound = 0.0;    // sum_k (1 - h(P_k)), bits
    double efficiency = 0.0; // sum_k (2 P_k - 1)^2
    std::vector<double> i_terms;
    std::vector<double> efficiency_terms;
    bool ic_violated = false;  // i_bound > 1 (message budget m = 1)
    bool rac_violated = false; // efficiency > 1
};

// P_k must have length 2^n for some n >= 1. Negative information terms
// (P_k < 1/2) are summed as-is so i_bound stays an algebraic identity on P_k.
MeritReport merit(const std::vector<double>& P_k);

// Plug-in estimator of sum_k I(a_k : G | b = k) from per-index samples of
// (a_k, G). Requires a_k to vary within every index (random-per-trial
// datasets); a constant a_k makes the conditional mutual information
// undefined and throws.
double empirical_mutual_information(
    const std::vector<std::vector<std::pair<int, int>>>& samples_per_index);

} // namespace icbox
