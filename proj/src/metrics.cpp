#include "icbox/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace icbox {

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("binary_entropy: p = " + std::to_string(p) +
                                " outside [0, 1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

MeritReport merit(const std::vector<double>& P_k) {
    std::size_t N = P_k.size();
    if (N < 2 || (N & (N - 1)) != 0)
        throw std::invalid_argument("merit: need 2^n probabilities with n >= 1, got " +
                                    std::to_string(N));
    MeritReport r;
    r.i_terms.reserve(N);
    r.efficiency_terms.reserve(N);
    for (double p : P_k) {
        double it = 1.0 - binary_entropy(p);
        double et = (2.0 * p - 1.0) * (2.0 * p - 1.0);
        r.i_terms.push_back(it);
        r.efficiency_terms.push_back(et);
        r.i_bound += it;
        r.efficiency += et;
    }
    r.ic_violated = r.i_bound > 1.0;
    r.rac_violated = r.efficiency > 1.0;
    return r;
}

double empirical_mutual_information(
    const std::vector<std::vector<std::pair<int, int>>>& samples_per_index) {
    if (samples_per_index.empty())
        throw std::invalid_argument("empirical_mutual_information: no indices");
    double total = 0.0;
    for (std::size_t k = 0; k < samples_per_index.size(); ++k) {
        const auto& samples = samples_per_index[k];
        if (samples.empty())
            throw std::invalid_argument("empirical_mutual_information: index " +
                                        std::to_string(k) + " has no samples");
        double joint[2][2] = {};
        for (auto [a, g] : samples) joint[a & 1][g & 1] += 1.0;
        double T = static_cast<double>(samples.size());
        double pa[2] = {(joint[0][0] + joint[0][1]) / T, (joint[1][0] + joint[1][1]) / T};
        double pg[2] = {(joint[0][0] + joint[1][0]) / T, (joint[0][1] + joint[1][1]) / T};
        if (pa[0] == 0.0 || pa[1] == 0.0)
            throw std::invalid_argument(
                "empirical_mutual_information: a_k constant at index " + std::to_string(k) +
                " (fixed dataset?); conditional mutual information undefined");
        double I = 0.0;
        for (int a = 0; a < 2; ++a) {
            for (int g = 0; g < 2; ++g) {
                double pj = joint[a][g] / T;
                if (pj > 0.0) I += pj * std::log2(pj / (pa[a] * pg[g]));
            }
        }
        total += I;
    }
    return total;
}

} // namespace icbox
