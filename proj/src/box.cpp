#include "icbox/box.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace icbox {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kNegTol = -1e-15;

} // namespace

Box make_box(const double (&p)[2][2][2][2]) {
    Box box;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            double sum = 0.0;
            for (int A = 0; A < 2; ++A) {
                for (int B = 0; B < 2; ++B) {
                    double v = p[a][b][A][B];
                    if (v < kNegTol)
                        throw BoxError("box entry " + std::to_string(v) +
                                       " is negative beyond tolerance");
                    if (v < 0.0) v = 0.0;
                    box.p[a][b][A][B] = v;
                    sum += v;
                }
            }
            if (std::abs(sum - 1.0) > kNormTol)
                throw BoxError("box setting (" + std::to_string(a) + "," + std::to_string(b) +
                               ") sums to " + std::to_string(sum) + ", not 1");
        }
    }
    return box;
}

Box pr_box() {
    double p[2][2][2][2] = {};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B)
                    p[a][b][A][B] = ((A ^ B) == (a & b)) ? 0.5 : 0.0;
    return make_box(p);
}

Box uniform_box() {
    double p[2][2][2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B)
                    p[a][b][A][B] = 0.25;
    return make_box(p);
}

Box isotropic_box(double S) {
    if (!(S >= 2.0 && S <= 4.0))
        throw BoxError("isotropic_box: S must lie in [2, 4], got " + std::to_string(S));
    // Success probability S/4 per setting, uniform marginals: the winning
    // output pairs share the probability S/8 each, the losing pairs (1-S/4)/2.
    double win = S / 8.0;
    double lose = (1.0 - S / 4.0) / 2.0;
    double p[2][2][2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int A = 0; A < 2; ++A)
                for (int B = 0; B < 2; ++B)
                    p[a][b][A][B] = ((A ^ B) == (a & b)) ? win : lose;
    return make_box(p);
}

Box local_deterministic_box(int A0, int A1, int B0, int B1) {
    const int Aout[2] = {A0 & 1, A1 & 1};
    const int Bout[2] = {B0 & 1, B1 & 1};
    double p[2][2][2][2] = {};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            p[a][b][Aout[a]][Bout[b]] = 1.0;
    return make_box(p);
}

double chsh_value(const Box& box) {
    double S = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            S += box.success(a, b);
    return S;
}

NoSignalingReport no_signaling(const Box& box) {
    double worst = 0.0;
    // Alice's marginal must not depend on b, and vice versa.
    for (int a = 0; a < 2; ++a) {
        for (int A = 0; A < 2; ++A) {
            double m0 = box.p[a][0][A][0] + box.p[a][0][A][1];
            double m1 = box.p[a][1][A][0] + box.p[a][1][A][1];
            worst = std::max(worst, std::abs(m0 - m1));
        }
    }
    for (int b = 0; b < 2; ++b) {
        for (int B = 0; B < 2; ++B) {
            double m0 = box.p[0][b][0][B] + box.p[0][b][1][B];
            double m1 = box.p[1][b][0][B] + box.p[1][b][1][B];
            worst = std::max(worst, std::abs(m0 - m1));
        }
    }
    return NoSignalingReport{worst, worst <= 1e-12};
}

std::array<double, 4> success_probs(const Box& box) {
    return {box.success(0, 0), box.success(0, 1), box.success(1, 0), box.success(1, 1)};
}

double anisotropy(const Box& box) {
    auto s = success_probs(box);
    double lo = s[0], hi = s[0];
    for (double v : s) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

std::pair<int, int> sample(const Box& box, int a, int b, RngStream& rng) {
    double u = rng.next_double();
    double cum = 0.0;
    for (int A = 0; A < 2; ++A) {
        for (int B = 0; B < 2; ++B) {
            cum += box.p[a][b][A][B];
            if (u < cum) return {A, B};
        }
    }
    // u fell into the float residue above the last cumulative step; return the
    // last outcome with nonzero probability.
    for (int A = 1; A >= 0; --A)
        for (int B = 1; B >= 0; --B)
            if (box.p[a][b][A][B] > 0.0) return {A, B};
    return {1, 1};
}

Box mix(const std::vector<Box>& boxes, const std::vector<double>& weights) {
    if (boxes.size() != weights.size())
        throw BoxError("mix: got " + std::to_string(boxes.size()) + " boxes but " +
                       std::to_string(weights.size()) + " weights");
    if (boxes.empty()) throw BoxError("mix: empty input");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw BoxError("mix: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw BoxError("mix: weights sum to " + std::to_string(total) + ", not 1");
    double p[2][2][2][2] = {};
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int A = 0; A < 2; ++A)
                    for (int B = 0; B < 2; ++B)
                        p[a][b][A][B] += weights[i] * boxes[i].p[a][b][A][B];
    return make_box(p);
}

std::string serialize_box(const Box& box) {
    std::string out;
    char buf[128];
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            std::snprintf(buf, sizeof buf, "%d %d : %.16e %.16e %.16e %.16e\n", a, b,
                          box.p[a][b][0][0], box.p[a][b][0][1], box.p[a][b][1][0],
                          box.p[a][b][1][1]);
            out += buf;
        }
    }
    return out;
}

Box parse_box(const std::string& text) {
    double p[2][2][2][2] = {};
    bool seen[2][2] = {};
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // skip blank lines
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        int a, b;
        char colon;
        double v[4];
        if (!(ls >> a >> b >> colon >> v[0] >> v[1] >> v[2] >> v[3]) || colon != ':')
            throw BoxParseError("expected 'a b : p00 p01 p10 p11'", lineno);
        std::string trailing;
        if (ls >> trailing) throw BoxParseError("trailing content '" + trailing + "'", lineno);
        if (a < 0 || a > 1 || b < 0 || b > 1)
            throw BoxParseError("inputs must be bits", lineno);
        if (seen[a][b])
            throw BoxParseError("duplicate setting (" + std::to_string(a) + "," +
                                    std::to_string(b) + ")",
                                lineno);
        seen[a][b] = true;
        for (int k = 0; k < 4; ++k) p[a][b][k / 2][k % 2] = v[k];
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            if (!seen[a][b])
                throw BoxParseError("missing setting (" + std::to_string(a) + "," +
                                        std::to_string(b) + ")",
                                    lineno);
    try {
        return make_box(p);
    } catch (const BoxError& e) {
        throw BoxParseError(e.what(), lineno);
    }
}

Box load_box(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BoxError("cannot open box file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_box(ss.str());
}

void save_box(const Box& box, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BoxError("cannot write box file: " + path);
    out << serialize_box(box);
}

} // namespace icbox
