#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "icbox/box.hpp"
#include "icbox/rng.hpp"

namespace icbox {

enum class DatasetMode { fixed, random_per_run, random_per_trial };
enum class TwirlMode { none, symmetrize, depolarize };

std::string to_string(DatasetMode mode);
std::string to_string(TwirlMode mode);
DatasetMode dataset_mode_from_string(const std::string& s);
TwirlMode twirl_mode_from_string(const std::string& s);

struct ProtocolConfig {
    int n = 1; // nesting levels, 1..8; N = 2^n dataset bits
    DatasetMode dataset_mode = DatasetMode::random_per_trial;
    std::vector<int> fixed_dataset; // length 2^n when dataset_mode == fixed
    long trials_per_index = 0;      // 0 -> default: max(1, 10^5 / N)
    int replicates = 1;
    std::uint64_t seed = 0;
    // Shot-by-shot twirling: a fresh relabeling is drawn per box-pair use
    // (i.i.d. shared randomness, as in the depolarization procedure).
    TwirlMode twirl = TwirlMode::none;
};

// One record per box pair: Alice input, Bob input, outputs A and B.
struct BoxUse {
    int a = 0, b = 0, A = 0, B = 0;
};

struct TrialTranscript {
    std::vector<int> dataset;
    int b = 0;       // Bob's target index
    int message = 0; // the single communicated bit M
    int guess = 0;   // G
    bool success = false;
    // levels[l] holds the 2^l box pairs of level l (root is level 0), in
    // left-to-right order.
    std::vector<std::vector<BoxUse>> levels;
};

// One shot of the nested protocol. Alice encodes bottom-up (leaf pairs feed
// data[0] xor data[1] to the box and push A xor data[0] up; inner pairs do
// the same with their children's messages); Bob feeds the address bit of b
// for that level into every box of the level (most significant bit at the
// root), XORs the B outputs along his path into M, and guesses G.
TrialTranscript run_trial(const Box& box, int n, const std::vector<int>& dataset, int b,
                          RngStream& rng, TwirlMode twirl = TwirlMode::none);

struct RunSummary {
    int n = 0;
    long trials_per_index = 0;
    int replicates = 0;
    // Aggregated over all replicates.
    std::vector<double> P_k;
    std::vector<long> successes;
    std::vector<long> trials;
    double i_bound = 0.0;    // merit of the aggregate P_k
    double efficiency = 0.0;
    // Per-replicate merit values and their across-replicate statistics
    // (mean, sample standard deviation).
    std::vector<double> i_bound_replicates;
    std::vector<double> efficiency_replicates;
    double i_bound_mean = 0.0, i_bound_std = 0.0;
    double efficiency_mean = 0.0, efficiency_std = 0.0;
};

RunSummary run_protocol(const Box& box, const ProtocolConfig& config, int threads = 1);

// Exact per-index success probabilities, computed by a bottom-up dynamic
// program over per-subtree message/error distributions (only A xor B of each
// pair enters the message algebra, so no outcome enumeration is needed).
// For the random dataset modes the leaf data bits are averaged exactly.
// Supports n up to 8; fixed mode needs the dataset.
std::vector<double> exact_protocol_stats(const Box& box, int n, DatasetMode mode,
                                         const std::vector<int>* fixed_dataset = nullptr);

} // namespace icbox
