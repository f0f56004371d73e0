#include "icbox/twirl.hpp"

namespace icbox {

std::pair<int, int> relabel_outcome(const Relabeling& r, int a, int b, int A_inner,
                                    int B_inner) {
    int A = A_inner ^ (r.beta & a) ^ (r.alpha & r.beta) ^ r.gamma;
    int B = B_inner ^ (r.alpha & b) ^ r.gamma;
    return {A, B};
}

Box relabel(const Box& box, const Relabeling& r) {
    double p[2][2][2][2] = {};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            int ai = a ^ r.alpha;
            int bi = b ^ r.beta;
            for (int A = 0; A < 2; ++A) {
                for (int B = 0; B < 2; ++B) {
                    auto [Ao, Bo] = relabel_outcome(r, a, b, A, B);
                    p[a][b][Ao][Bo] += box.p[ai][bi][A][B];
                }
            }
        }
    }
    return make_box(p);
}

Box depolarize(const Box& box) {
    std::vector<Box> parts;
    parts.reserve(8);
    for (int alpha = 0; alpha < 2; ++alpha)
        for (int beta = 0; beta < 2; ++beta)
            for (int gamma = 0; gamma < 2; ++gamma)
                parts.push_back(relabel(box, Relabeling{alpha, beta, gamma}));
    return mix(parts, std::vector<double>(8, 0.125));
}

Box symmetrize_outputs(const Box& box) {
    std::vector<Box> parts = {relabel(box, Relabeling{0, 0, 0}), relabel(box, Relabeling{0, 0, 1})};
    return mix(parts, {0.5, 0.5});
}

} // namespace icbox
