#include <doctest.h>

#include <cmath>
#include <vector>

#include "icbox/box.hpp"
#include "icbox/icproto.hpp"
#include "icbox/metrics.hpp"
#include "icbox/rng.hpp"
#include "icbox/twirl.hpp"

using namespace icbox;

namespace {

Box random_box(RngStream& rng) {
    double p[2][2][2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double sum = 0.0;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B) {
                    p[a][b][A][B] = rng.next_double() + 1e-6;
                    sum += p[a][b][A][B];
                }
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B) p[a][b][A][B] /= sum;
        }
    return make_box(p);
}

// Box with uniform marginals and a prescribed per-setting success 4-tuple.
Box box_from_success(double s00, double s01, double s10, double s11) {
    double s[2][2] = {{s00, s01}, {s10, s11}};
    double p[2][2][2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            int want = a & b;
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B)
                    p[a][b][A][B] = ((A ^ B) == want ? s[a][b] : 1.0 - s[a][b]) / 2.0;
        }
    return make_box(p);
}

// Brute-force success probability of the nested protocol: enumerate the
// joint outcomes of all 2^n - 1 box pairs over an explicit heap-ordered tree
// (node 1 is the root, node v has children 2v and 2v+1). Structurally
// independent of the recursive implementation under test.
double naive_success(const Box& box, int n, const std::vector<int>& data, int b) {
    const int nodes = (1 << n) - 1;
    std::vector<int> level(nodes + 1), A(nodes + 1), B(nodes + 1);
    for (int v = 1; v <= nodes; ++v) {
        int l = 0;
        while ((v >> (l + 1)) != 0) ++l;
        level[v] = l;
    }
    double total = 0.0;
    std::vector<int> outcome(nodes, 0); // base-4 digit per node
    for (long combo = 0; combo < (1L << (2 * nodes)); ++combo) {
        long c = combo;
        for (int v = 1; v <= nodes; ++v) {
            A[v] = static_cast<int>(c & 1);
            B[v] = static_cast<int>((c >> 1) & 1);
            c >>= 2;
        }
        // Alice, bottom-up: message of node v
        std::vector<int> msg(nodes + 1, 0), ain(nodes + 1, 0);
        for (int v = nodes; v >= 1; --v) {
            int left, right;
            if (level[v] == n - 1) {
                // leaf pair: node v covers data[2*pos] and data[2*pos+1]
                int pos = v - (1 << (n - 1));
                left = data[2 * pos];
                right = data[2 * pos + 1];
            } else {
                left = msg[2 * v];
                right = msg[2 * v + 1];
            }
            ain[v] = left ^ right;
            msg[v] = A[v] ^ left;
        }
        // probability of this outcome combination, with Bob's level inputs
        double prob = 1.0;
        for (int v = 1; v <= nodes; ++v) {
            int beta = (b >> (n - 1 - level[v])) & 1;
            prob *= box.p[ain[v]][beta][A[v]][B[v]];
        }
        if (prob == 0.0) continue;
        // Bob, top-down along the path selected by the bits of b
        int m = msg[1], v = 1;
        for (int l = 0; l < n; ++l) {
            int beta = (b >> (n - 1 - l)) & 1;
            m ^= B[v];
            v = 2 * v + beta;
        }
        if (m == data[b]) total += prob;
    }
    return total;
}

std::vector<double> naive_stats_random(const Box& box, int n) {
    const int N = 1 << n;
    std::vector<double> P(N, 0.0);
    for (int d = 0; d < (1 << N); ++d) {
        std::vector<int> data(N);
        for (int i = 0; i < N; ++i) data[i] = (d >> i) & 1;
        for (int k = 0; k < N; ++k) P[k] += naive_success(box, n, data, k);
    }
    for (double& p : P) p /= (1 << N);
    return P;
}

} // namespace

TEST_CASE("pr box solves the protocol perfectly at any depth") {
    Box pr = pr_box();
    for (int n = 1; n <= 2; ++n) {
        const int N = 1 << n;
        // exhaustive over datasets and targets, sampled shots
        for (int d = 0; d < (1 << N); ++d) {
            std::vector<int> data(N);
            for (int i = 0; i < N; ++i) data[i] = (d >> i) & 1;
            for (int b = 0; b < N; ++b) {
                RngStream rng = substream(1, {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(b)});
                for (int t = 0; t < 8; ++t) {
                    TrialTranscript tr = run_trial(pr, n, data, b, rng);
                    REQUIRE(tr.success);
                    CHECK(tr.guess == data[b]);
                }
            }
        }
    }
    for (int n = 3; n <= 4; ++n) {
        const int N = 1 << n;
        RngStream rng = substream(2, {static_cast<std::uint64_t>(n)});
        for (int t = 0; t < 2500; ++t) {
            std::vector<int> data(N);
            for (int& bit : data) bit = static_cast<int>(rng.next_bits(1));
            int b = static_cast<int>(rng.next_bits(n));
            TrialTranscript tr = run_trial(pr, n, data, b, rng);
            REQUIRE(tr.success);
        }
    }
    // and the exact statistics agree
    for (int n = 1; n <= 8; ++n)
        for (double p : exact_protocol_stats(pr, n, DatasetMode::random_per_trial))
            CHECK(p == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("transcripts record a consistent computation") {
    RngStream boxgen = substream(3, {label_tag("box")});
    Box box = random_box(boxgen);
    RngStream rng = substream(3, {label_tag("trial")});
    const int n = 3;
    std::vector<int> data = {1, 0, 0, 1, 1, 1, 0, 0};
    for (int b = 0; b < 8; ++b) {
        TrialTranscript tr = run_trial(box, n, data, b, rng);
        REQUIRE(tr.levels.size() == n);
        for (int l = 0; l < n; ++l) REQUIRE(tr.levels[l].size() == (1u << l));
        CHECK(tr.dataset == data);
        CHECK(tr.b == b);

        // Bob's input at level l is the l-th address bit of b everywhere
        for (int l = 0; l < n; ++l)
            for (const BoxUse& use : tr.levels[l]) CHECK(use.b == ((b >> (n - 1 - l)) & 1));

        // recompute Alice's inputs and messages bottom-up from the outputs
        std::vector<std::vector<int>> msg(n);
        for (int l = n - 1; l >= 0; --l) {
            msg[l].resize(1 << l);
            for (int i = 0; i < (1 << l); ++i) {
                int left = (l == n - 1) ? data[2 * i] : msg[l + 1][2 * i];
                int right = (l == n - 1) ? data[2 * i + 1] : msg[l + 1][2 * i + 1];
                CHECK(tr.levels[l][i].a == (left ^ right));
                msg[l][i] = tr.levels[l][i].A ^ left;
            }
        }
        CHECK(tr.message == msg[0][0]);

        // Bob's decoding
        int m = tr.message, pos = 0;
        for (int l = 0; l < n; ++l) {
            m ^= tr.levels[l][pos].B;
            pos = 2 * pos + ((b >> (n - 1 - l)) & 1);
        }
        CHECK(tr.guess == m);
        CHECK(tr.success == (m == data[b]));
    }
}

TEST_CASE("exact statistics match brute-force enumeration") {
    RngStream rng = substream(4, {label_tag("oracle")});
    for (int i = 0; i < 20; ++i) {
        Box box = random_box(rng);
        for (int n = 1; n <= 2; ++n) {
            const int N = 1 << n;
            // every fixed dataset
            for (int d = 0; d < (1 << N); ++d) {
                std::vector<int> data(N);
                for (int j = 0; j < N; ++j) data[j] = (d >> j) & 1;
                auto got = exact_protocol_stats(box, n, DatasetMode::fixed, &data);
                for (int k = 0; k < N; ++k)
                    CHECK(got[k] == doctest::Approx(naive_success(box, n, data, k)).epsilon(1e-12));
            }
            // random data = exact average over datasets
            auto avg = naive_stats_random(box, n);
            auto got_trial = exact_protocol_stats(box, n, DatasetMode::random_per_trial);
            auto got_run = exact_protocol_stats(box, n, DatasetMode::random_per_run);
            for (int k = 0; k < N; ++k) {
                CHECK(got_trial[k] == doctest::Approx(avg[k]).epsilon(1e-12));
                CHECK(got_run[k] == doctest::Approx(avg[k]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("exact statistics on isotropic boxes follow the closed form") {
    for (double S : {2.0, 2.6, 2.0 + std::sqrt(2.0), 3.6, 4.0}) {
        double E = S / 2.0 - 1.0;
        for (int n = 1; n <= 6; ++n) {
            auto P = exact_protocol_stats(isotropic_box(S), n, DatasetMode::random_per_trial);
            double want = (1.0 + std::pow(E, n)) / 2.0;
            for (double p : P) CHECK(p == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("fixed datasets on an anisotropic box hit the per-setting values") {
    const double q = (2.0 + std::sqrt(2.0)) / 4.0;
    Box sep = box_from_success(0.5, 0.5, q, q); // the separable-state pattern
    std::vector<int> zz = {0, 0}, zo = {0, 1};
    auto p_zz = exact_protocol_stats(sep, 1, DatasetMode::fixed, &zz);
    CHECK(p_zz[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p_zz[1] == doctest::Approx(0.5).epsilon(1e-15));
    auto p_zo = exact_protocol_stats(sep, 1, DatasetMode::fixed, &zo);
    CHECK(p_zo[0] == doctest::Approx(q).epsilon(1e-15));
    CHECK(p_zo[1] == doctest::Approx(q).epsilon(1e-15));
    // dataset dependence shows up in the efficiency
    CHECK(merit(p_zz).efficiency == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(merit(p_zo).efficiency == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("run_protocol frequencies live within 5 sigma of the exact values") {
    RngStream rng = substream(5, {label_tag("freq")});
    Box box = random_box(rng);
    for (int n : {1, 2}) {
        ProtocolConfig cfg;
        cfg.n = n;
        cfg.trials_per_index = 4000;
        cfg.replicates = 1;
        cfg.seed = 77;
        RunSummary sum = run_protocol(box, cfg);
        auto exact = exact_protocol_stats(box, n, DatasetMode::random_per_trial);
        for (std::size_t k = 0; k < exact.size(); ++k) {
            double sigma = std::sqrt(exact[k] * (1 - exact[k]) / cfg.trials_per_index);
            CHECK(std::abs(sum.P_k[k] - exact[k]) <= 5.0 * sigma + 1e-12);
        }
    }
}

TEST_CASE("run_protocol is reproducible and thread-count invariant") {
    Box box = isotropic_box(3.4);
    ProtocolConfig cfg;
    cfg.n = 3;
    cfg.trials_per_index = 500;
    cfg.replicates = 4;
    cfg.seed = 123;
    RunSummary one = run_protocol(box, cfg, 1);
    RunSummary eight = run_protocol(box, cfg, 8);
    CHECK(one.P_k == eight.P_k);
    CHECK(one.successes == eight.successes);
    CHECK(one.trials == eight.trials);
    CHECK(one.i_bound_replicates == eight.i_bound_replicates);
    CHECK(one.efficiency_replicates == eight.efficiency_replicates);
    CHECK(one.i_bound_mean == eight.i_bound_mean);
    CHECK(one.efficiency_std == eight.efficiency_std);

    RunSummary again = run_protocol(box, cfg, 1);
    CHECK(again.P_k == one.P_k);

    cfg.seed = 124;
    RunSummary other = run_protocol(box, cfg, 1);
    CHECK(other.successes != one.successes);
}

TEST_CASE("replicate statistics are the sample mean and standard deviation") {
    Box box = isotropic_box(3.2);
    ProtocolConfig cfg;
    cfg.n = 2;
    cfg.trials_per_index = 300;
    cfg.replicates = 5;
    cfg.seed = 9;
    RunSummary sum = run_protocol(box, cfg);
    REQUIRE(sum.i_bound_replicates.size() == 5);
    REQUIRE(sum.efficiency_replicates.size() == 5);
    double mean = 0.0;
    for (double v : sum.efficiency_replicates) mean += v;
    mean /= 5.0;
    double var = 0.0;
    for (double v : sum.efficiency_replicates) var += (v - mean) * (v - mean);
    var /= 4.0; // ddof = 1
    CHECK(sum.efficiency_mean == doctest::Approx(mean).epsilon(1e-15));
    CHECK(sum.efficiency_std == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
    // aggregate trial counts: replicates x trials_per_index
    for (long t : sum.trials) CHECK(t == 1500);
}

TEST_CASE("default trial budget is 1e5 divided across the indices") {
    Box box = isotropic_box(3.0);
    ProtocolConfig cfg;
    cfg.n = 1;
    cfg.replicates = 1;
    cfg.seed = 5;
    RunSummary sum = run_protocol(box, cfg);
    CHECK(sum.trials_per_index == 50000);
    cfg.n = 4;
    sum = run_protocol(box, cfg);
    CHECK(sum.trials_per_index == 6250);
}

TEST_CASE("shot-by-shot twirling matches the analytically twirled box") {
    const double q = (2.0 + std::sqrt(2.0)) / 4.0;
    Box aniso = box_from_success(0.62, 0.55, 0.9, q);

    ProtocolConfig cfg;
    cfg.n = 2;
    cfg.trials_per_index = 20000;
    cfg.replicates = 1;
    cfg.seed = 31;

    cfg.twirl = TwirlMode::depolarize;
    RunSummary depol = run_protocol(aniso, cfg);
    auto exact_depol = exact_protocol_stats(depolarize(aniso), 2, DatasetMode::random_per_trial);
    for (std::size_t k = 0; k < exact_depol.size(); ++k) {
        double sigma = std::sqrt(exact_depol[k] * (1 - exact_depol[k]) / cfg.trials_per_index);
        CHECK(std::abs(depol.P_k[k] - exact_depol[k]) <= 5.0 * sigma);
    }

    // symmetrization leaves the per-setting success probabilities alone, so
    // the protocol statistics stay those of the raw box
    cfg.twirl = TwirlMode::symmetrize;
    RunSummary sym = run_protocol(aniso, cfg);
    auto exact_raw = exact_protocol_stats(aniso, 2, DatasetMode::random_per_trial);
    auto exact_sym = exact_protocol_stats(symmetrize_outputs(aniso), 2, DatasetMode::random_per_trial);
    for (std::size_t k = 0; k < exact_raw.size(); ++k) {
        CHECK(exact_sym[k] == doctest::Approx(exact_raw[k]).epsilon(1e-13));
        double sigma = std::sqrt(exact_raw[k] * (1 - exact_raw[k]) / cfg.trials_per_index);
        CHECK(std::abs(sym.P_k[k] - exact_raw[k]) <= 5.0 * sigma);
    }
}

TEST_CASE("configuration validation") {
    Box box = isotropic_box(3.0);
    ProtocolConfig cfg;
    cfg.n = 0;
    CHECK_THROWS_AS(run_protocol(box, cfg), std::invalid_argument);
    cfg.n = 9;
    CHECK_THROWS_AS(run_protocol(box, cfg), std::invalid_argument);
    cfg.n = 2;
    cfg.dataset_mode = DatasetMode::fixed;
    cfg.fixed_dataset = {0, 1}; // needs 4 bits
    CHECK_THROWS_AS(run_protocol(box, cfg), std::invalid_argument);
    cfg.fixed_dataset = {0, 1, 1, 0};
    cfg.trials_per_index = 10;
    CHECK_NOTHROW(run_protocol(box, cfg));
    cfg.replicates = 0;
    CHECK_THROWS_AS(run_protocol(box, cfg), std::invalid_argument);

    std::vector<int> short_data = {0, 1};
    RngStream rng = substream(1, {1});
    CHECK_THROWS_AS(run_trial(box, 2, short_data, 0, rng), std::invalid_argument);
    std::vector<int> ok_data = {0, 1, 1, 0};
    CHECK_THROWS_AS(run_trial(box, 2, ok_data, 4, rng), std::invalid_argument);
    CHECK_THROWS_AS(exact_protocol_stats(box, 9, DatasetMode::random_per_trial),
                    std::invalid_argument);
    CHECK_THROWS_AS(exact_protocol_stats(box, 2, DatasetMode::fixed, &short_data),
                    std::invalid_argument);

    CHECK(dataset_mode_from_string("fixed") == DatasetMode::fixed);
    CHECK(dataset_mode_from_string("random-per-run") == DatasetMode::random_per_run);
    CHECK(dataset_mode_from_string("random-per-trial") == DatasetMode::random_per_trial);
    CHECK_THROWS_AS(dataset_mode_from_string("sometimes"), std::invalid_argument);
    CHECK(twirl_mode_from_string("none") == TwirlMode::none);
    CHECK(twirl_mode_from_string("symmetrize") == TwirlMode::symmetrize);
    CHECK(twirl_mode_from_string("depolarize") == TwirlMode::depolarize);
    CHECK_THROWS_AS(twirl_mode_from_string("spin"), std::invalid_argument);
    for (auto m : {DatasetMode::fixed, DatasetMode::random_per_run, DatasetMode::random_per_trial})
        CHECK(dataset_mode_from_string(to_string(m)) == m);
    for (auto t : {TwirlMode::none, TwirlMode::symmetrize, TwirlMode::depolarize})
        CHECK(twirl_mode_from_string(to_string(t)) == t);
}
