#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace purity_mc {

struct QuadratureRule {
    std::vector<double> nodes;    // ascending, on [-1, 1]
    std::vector<double> weights;  // matching order, sum to 2
};

// Gauss-Legendre nodes and weights on [-1, 1]: Newton iteration on P_n with
// the three-term recurrence, seeded by the Chebyshev-like asymptotic guess,
// then mirrored across 0 so symmetric pairs are bit-identical.
inline QuadratureRule gauss_legendre(std::size_t n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // i-th root of P_n in descending order of x.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n(x) and P_n'(x) by upward recurrence.
            double p_prev = 1.0;
            double p = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kd = static_cast<double>(k);
                const double p_next = ((2.0 * kd - 1.0) * x * p - (kd - 1.0) * p_prev) / kd;
                p_prev = p;
                p = p_next;
            }
            dp = static_cast<double>(n) * (x * p - p_prev) / (x * x - 1.0);
            const double step = p / dp;
            x -= step;
            if (std::fabs(step) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
        rule.nodes[i] = -x;
        rule.weights[i] = w;
    }
    if (n % 2 == 1) rule.nodes[half - 1] = 0.0;  // exact midpoint for odd rules
    return rule;
}

// Affine image of the reference rule on [lo, hi]; weights pick up the
// Jacobian (hi - lo)/2.
inline QuadratureRule mapped_rule(const QuadratureRule& ref, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("mapped_rule: need lo < hi");
    QuadratureRule out = ref;
    const double mid = 0.5 * (lo + hi);
    const double scale = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        out.nodes[i] = mid + scale * ref.nodes[i];
        out.weights[i] = scale * ref.weights[i];
    }
    return out;
}

}  // namespace purity_mc
