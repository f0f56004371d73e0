#include "icbox/icproto.hpp"

#include <cmath>
#include <stdexcept>

#include "icbox/metrics.hpp"
#include "icbox/parallel.hpp"
#include "icbox/twirl.hpp"

namespace icbox {

namespace {

constexpr long kDefaultTrialsBudget = 100000;

void check_levels(int n) {
    if (n < 1 || n > 8)
        throw std::invalid_argument("protocol: n must lie in 1..8, got " + std::to_string(n));
}

// Sample one box-pair use, optionally behind a fresh shot-by-shot relabeling.
BoxUse use_box(const Box& box, int a, int b, RngStream& rng, TwirlMode twirl) {
    Relabeling r;
    switch (twirl) {
    case TwirlMode::none:
        break;
    case TwirlMode::symmetrize:
        r.gamma = static_cast<int>(rng.next_bits(1));
        break;
    case TwirlMode::depolarize: {
        auto bits = rng.next_bits(3);
        r.alpha = static_cast<int>(bits & 1);
        r.beta = static_cast<int>((bits >> 1) & 1);
        r.gamma = static_cast<int>((bits >> 2) & 1);
        break;
    }
    }
    auto [Ai, Bi] = sample(box, a ^ r.alpha, b ^ r.beta, rng);
    auto [A, B] = relabel_outcome(r, a, b, Ai, Bi);
    return BoxUse{a, b, A, B};
}

// Alice's bottom-up encoding over the subtree whose box sits at (level, pos);
// returns the subtree's 1-bit message. Boxes are sampled in DFS post-order so
// the stream of random draws is a fixed function of (dataset, b, seed).
int encode(const Box& box, int n, const std::vector<int>& dataset,
           const std::vector<int>& bob_bits, int level, int pos, RngStream& rng,
           TwirlMode twirl, TrialTranscript& t) {
    int m_left, m_right;
    if (level == n - 1) {
        m_left = dataset[2 * pos];
        m_right = dataset[2 * pos + 1];
    } else {
        m_left = encode(box, n, dataset, bob_bits, level + 1, 2 * pos, rng, twirl, t);
        m_right = encode(box, n, dataset, bob_bits, level + 1, 2 * pos + 1, rng, twirl, t);
    }
    BoxUse use = use_box(box, m_left ^ m_right, bob_bits[level], rng, twirl);
    t.levels[level][pos] = use;
    return use.A ^ m_left;
}

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

} // namespace

std::string to_string(DatasetMode mode) {
    switch (mode) {
    case DatasetMode::fixed: return "fixed";
    case DatasetMode::random_per_run: return "random-per-run";
    case DatasetMode::random_per_trial: return "random-per-trial";
    }
    return "?";
}

std::string to_string(TwirlMode mode) {
    switch (mode) {
    case TwirlMode::none: return "none";
    case TwirlMode::symmetrize: return "symmetrize";
    case TwirlMode::depolarize: return "depolarize";
    }
    return "?";
}

DatasetMode dataset_mode_from_string(const std::string& s) {
    if (s == "fixed") return DatasetMode::fixed;
    if (s == "random-per-run") return DatasetMode::random_per_run;
    if (s == "random-per-trial") return DatasetMode::random_per_trial;
    throw std::invalid_argument("unknown dataset mode: " + s);
}

TwirlMode twirl_mode_from_string(const std::string& s) {
    if (s == "none") return TwirlMode::none;
    if (s == "symmetrize") return TwirlMode::symmetrize;
    if (s == "depolarize") return TwirlMode::depolarize;
    throw std::invalid_argument("unknown twirl mode: " + s);
}

TrialTranscript run_trial(const Box& box, int n, const std::vector<int>& dataset, int b,
                          RngStream& rng, TwirlMode twirl) {
    check_levels(n);
    const int N = 1 << n;
    if (static_cast<int>(dataset.size()) != N)
        throw std::invalid_argument("run_trial: dataset must have 2^n = " + std::to_string(N) +
                                    " bits");
    if (b < 0 || b >= N) throw std::invalid_argument("run_trial: target index out of range");

    TrialTranscript t;
    t.dataset = dataset;
    t.b = b;
    t.levels.resize(n);
    std::vector<int> bob_bits(n);
    for (int l = 0; l < n; ++l) {
        t.levels[l].resize(std::size_t{1} << l);
        bob_bits[l] = (b >> (n - 1 - l)) & 1; // MSB of b at the root
    }

    t.message = encode(box, n, dataset, bob_bits, 0, 0, rng, twirl, t);

    // Bob's side: descend from the root, XORing the B output of the box on
    // his path; the address bit of the level picks which child's message the
    // running value decodes to.
    int m = t.message;
    int pos = 0;
    for (int l = 0; l < n; ++l) {
        m ^= t.levels[l][pos].B;
        pos = 2 * pos + bob_bits[l];
    }
    t.guess = m;
    t.success = (t.guess == dataset[b]);
    return t;
}

RunSummary run_protocol(const Box& box, const ProtocolConfig& config, int threads) {
    check_levels(config.n);
    const int N = 1 << config.n;
    if (config.dataset_mode == DatasetMode::fixed &&
        static_cast<int>(config.fixed_dataset.size()) != N)
        throw std::invalid_argument("run_protocol: fixed dataset must have 2^n bits");
    if (config.replicates < 1)
        throw std::invalid_argument("run_protocol: replicates must be >= 1");
    long tpi = config.trials_per_index;
    if (tpi <= 0) tpi = std::max<long>(1, kDefaultTrialsBudget / N);

    // Per-run datasets are drawn up front from their own substream so the
    // result cannot depend on scheduling.
    std::vector<std::vector<int>> run_datasets(config.replicates);
    if (config.dataset_mode == DatasetMode::random_per_run) {
        for (int r = 0; r < config.replicates; ++r) {
            RngStream ds = substream(config.seed,
                                     {label_tag("dataset"), static_cast<std::uint64_t>(config.n),
                                      static_cast<std::uint64_t>(r)});
            run_datasets[r].resize(N);
            for (int i = 0; i < N; ++i) run_datasets[r][i] = static_cast<int>(ds.next_bits(1));
        }
    }

    const std::size_t tasks = static_cast<std::size_t>(config.replicates) * N;
    std::vector<long> counts(tasks, 0);
    parallel_for(tasks, threads, [&](std::size_t task) {
        int r = static_cast<int>(task / N);
        int k = static_cast<int>(task % N);
        std::vector<int> dataset;
        long good = 0;
        for (long trial = 0; trial < tpi; ++trial) {
            RngStream rng = substream(
                config.seed,
                {label_tag("trial"), static_cast<std::uint64_t>(config.n),
                 static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(k),
                 static_cast<std::uint64_t>(trial)});
            switch (config.dataset_mode) {
            case DatasetMode::fixed:
                dataset = config.fixed_dataset;
                break;
            case DatasetMode::random_per_run:
                dataset = run_datasets[r];
                break;
            case DatasetMode::random_per_trial:
                dataset.resize(N);
                for (int i = 0; i < N; ++i) dataset[i] = static_cast<int>(rng.next_bits(1));
                break;
            }
            if (run_trial(box, config.n, dataset, k, rng, config.twirl).success) ++good;
        }
        counts[task] = good;
    });

    RunSummary s;
    s.n = config.n;
    s.trials_per_index = tpi;
    s.replicates = config.replicates;
    s.P_k.assign(N, 0.0);
    s.successes.assign(N, 0);
    s.trials.assign(N, config.replicates * tpi);
    for (int r = 0; r < config.replicates; ++r) {
        std::vector<double> rep_P(N);
        for (int k = 0; k < N; ++k) {
            long c = counts[static_cast<std::size_t>(r) * N + k];
            s.successes[k] += c;
            rep_P[k] = static_cast<double>(c) / static_cast<double>(tpi);
        }
        MeritReport m = merit(rep_P);
        s.i_bound_replicates.push_back(m.i_bound);
        s.efficiency_replicates.push_back(m.efficiency);
    }
    for (int k = 0; k < N; ++k)
        s.P_k[k] = static_cast<double>(s.successes[k]) / static_cast<double>(s.trials[k]);
    MeritReport agg = merit(s.P_k);
    s.i_bound = agg.i_bound;
    s.efficiency = agg.efficiency;
    double isum = 0.0, esum = 0.0;
    for (double v : s.i_bound_replicates) isum += v;
    for (double v : s.efficiency_replicates) esum += v;
    s.i_bound_mean = isum / config.replicates;
    s.efficiency_mean = esum / config.replicates;
    s.i_bound_std = sample_std(s.i_bound_replicates, s.i_bound_mean);
    s.efficiency_std = sample_std(s.efficiency_replicates, s.efficiency_mean);
    return s;
}

namespace {

// DP state of an on-path subtree: joint[m][z] is the probability that the
// subtree's message is m and that the accumulated path error is z, where
// z = 0 means Bob's decode of this subtree would recover the addressed bit.
struct OnPathDist {
    double j[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

struct ExactCtx {
    const Box* box;
    int n;
    bool random_data;
    const std::vector<int>* dataset;
    std::vector<int> bob_bits;
    std::vector<int> path_pos; // box index of the path at each level
};

double off_path(const ExactCtx& c, int level, int pos);

OnPathDist on_path(const ExactCtx& c, int level, int pos) {
    const auto& p = c.box->p;
    int beta = c.bob_bits[level];
    OnPathDist out;
    if (level == c.n - 1) {
        // Leaf: children are the two data bits; the addressed bit is the one
        // selected by beta. z reduces to the box error A^B ^ x*beta.
        auto add = [&](int d0, int d1, double w) {
            int x = d0 ^ d1;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B) {
                    int m = A ^ d0;
                    int target = (beta == 0) ? d0 : d1;
                    int decoded = (A ^ d0) ^ B; // m xor B
                    int z = decoded ^ target;
                    out.j[m][z] += w * p[x][beta][A][B];
                }
        };
        if (c.random_data) {
            for (int d0 = 0; d0 < 2; ++d0)
                for (int d1 = 0; d1 < 2; ++d1) add(d0, d1, 0.25);
        } else {
            add((*c.dataset)[2 * pos], (*c.dataset)[2 * pos + 1], 1.0);
        }
        return out;
    }
    bool left_on = (c.path_pos[level + 1] == 2 * pos);
    OnPathDist child = on_path(c, level + 1, left_on ? 2 * pos : 2 * pos + 1);
    double sib1 = off_path(c, level + 1, left_on ? 2 * pos + 1 : 2 * pos);
    double sib[2] = {1.0 - sib1, sib1};
    for (int ms = 0; ms < 2; ++ms)
        for (int mc = 0; mc < 2; ++mc)
            for (int zc = 0; zc < 2; ++zc) {
                double w0 = sib[ms] * child.j[mc][zc];
                if (w0 == 0.0) continue;
                int ml = left_on ? mc : ms;
                int mr = left_on ? ms : mc;
                int x = ml ^ mr;
                for (int A = 0; A < 2; ++A)
                    for (int B = 0; B < 2; ++B) {
                        int m = A ^ ml;
                        int e = (A ^ B) ^ (x & beta);
                        out.j[m][zc ^ e] += w0 * p[x][beta][A][B];
                    }
            }
    return out;
}

// P(message = 1) of a subtree that is entirely off Bob's path. Bob still
// feeds the level's address bit into these boxes, which matters when the box
// itself signals.
double off_path(const ExactCtx& c, int level, int pos) {
    const auto& p = c.box->p;
    int beta = c.bob_bits[level];
    if (level == c.n - 1) {
        auto leaf = [&](int d0, int d1) {
            int x = d0 ^ d1;
            double m1 = 0.0;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B)
                    if ((A ^ d0) == 1) m1 += p[x][beta][A][B];
            return m1;
        };
        if (c.random_data) {
            double m1 = 0.0;
            for (int d0 = 0; d0 < 2; ++d0)
                for (int d1 = 0; d1 < 2; ++d1) m1 += 0.25 * leaf(d0, d1);
            return m1;
        }
        return leaf((*c.dataset)[2 * pos], (*c.dataset)[2 * pos + 1]);
    }
    double l1 = off_path(c, level + 1, 2 * pos);
    double r1 = off_path(c, level + 1, 2 * pos + 1);
    double pl[2] = {1.0 - l1, l1};
    double pr[2] = {1.0 - r1, r1};
    double m1 = 0.0;
    for (int ml = 0; ml < 2; ++ml)
        for (int mr = 0; mr < 2; ++mr) {
            double w0 = pl[ml] * pr[mr];
            if (w0 == 0.0) continue;
            int x = ml ^ mr;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B)
                    if ((A ^ ml) == 1) m1 += w0 * p[x][beta][A][B];
        }
    return m1;
}

} // namespace

std::vector<double> exact_protocol_stats(const Box& box, int n, DatasetMode mode,
                                         const std::vector<int>* fixed_dataset) {
    check_levels(n);
    const int N = 1 << n;
    bool random_data = (mode != DatasetMode::fixed);
    if (!random_data) {
        if (fixed_dataset == nullptr || static_cast<int>(fixed_dataset->size()) != N)
            throw std::invalid_argument(
                "exact_protocol_stats: fixed mode needs a 2^n-bit dataset");
    }
    std::vector<double> P(N);
    for (int k = 0; k < N; ++k) {
        ExactCtx c;
        c.box = &box;
        c.n = n;
        c.random_data = random_data;
        c.dataset = fixed_dataset;
        c.bob_bits.resize(n);
        c.path_pos.resize(n);
        int pos = 0;
        for (int l = 0; l < n; ++l) {
            c.bob_bits[l] = (k >> (n - 1 - l)) & 1;
            c.path_pos[l] = pos;
            pos = 2 * pos + c.bob_bits[l];
        }
        OnPathDist root = on_path(c, 0, 0);
        P[k] = root.j[0][0] + root.j[1][0];
    }
    return P;
}

} // namespace icbox
