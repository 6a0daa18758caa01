#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "purity_mc/gauss_legendre.hpp"
#include "purity_mc/rng.hpp"
#include "purity_mc/sum.hpp"

namespace purity_mc {

// A bipartite 1-D x 1-D pure state sampled on a midpoint grid:
// psi(x_i, y_j) with x_i = x_min + (i + 1/2) dx. The grid oracle works at
// this resolution; nothing here touches the Monte Carlo code path.
struct GridWavefunction {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double x_min = -8.0;
    double x_max = 8.0;
    double y_min = -8.0;
    double y_max = 8.0;
    Eigen::MatrixXd amplitudes;  // nx rows, ny cols

    double dx() const { return (x_max - x_min) / static_cast<double>(nx); }
    double dy() const { return (y_max - y_min) / static_cast<double>(ny); }
    double grid_x(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
    double grid_y(std::size_t j) const { return y_min + (static_cast<double>(j) + 0.5) * dy(); }

    double norm_sq() const { return amplitudes.squaredNorm() * dx() * dy(); }

    void normalize() { amplitudes /= std::sqrt(norm_sq()); }

    void require_normalized() const {
        if (nx == 0 || ny == 0 || amplitudes.rows() != static_cast<Eigen::Index>(nx) ||
            amplitudes.cols() != static_cast<Eigen::Index>(ny))
            throw std::invalid_argument("GridWavefunction: amplitude matrix shape mismatch");
        if (std::fabs(norm_sq() - 1.0) > 1e-8)
            throw std::invalid_argument(
                "GridWavefunction: state is not normalized (|psi|^2 dx dy != 1 within 1e-8)");
    }
};

// Schmidt weights lambda_i^2 in descending order; a probability vector for
// any normalized input state.
struct SchmidtSpectrum {
    std::vector<double> weights;

    std::size_t effective_rank(double rel_eps = 1e-12) const {
        if (weights.empty() || weights.front() <= 0.0) return 0;
        std::size_t d = 0;
        for (double w : weights)
            if (w > rel_eps * weights.front()) ++d;
        return d;
    }
};

struct SchmidtResult {
    SchmidtSpectrum spectrum;
    double purity = 0.0;
};

// Position-basis purity: rho_1(x,x') = sum_z psi(x,z) psi(x',z) dy, then
// Tr(rho_1^2) = sum_{x,x'} rho_1(x,x') rho_1(x',x) dx^2.
inline double grid_purity(const GridWavefunction& psi) {
    psi.require_normalized();
    const Eigen::MatrixXd rho = psi.amplitudes * psi.amplitudes.transpose();  // dy applied below
    const double dxdy = psi.dx() * psi.dy();
    return rho.squaredNorm() * dxdy * dxdy;
}

// Schmidt-basis purity: the singular values s_i of psi * sqrt(dx dy) give
// weights lambda_i^2 = s_i^2 and purity = sum lambda_i^4.
inline SchmidtResult schmidt_purity(const GridWavefunction& psi) {
    psi.require_normalized();
    const Eigen::MatrixXd scaled = psi.amplitudes * std::sqrt(psi.dx() * psi.dy());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled);
    const Eigen::VectorXd s = svd.singularValues();  // descending
    SchmidtResult out;
    out.spectrum.weights.resize(static_cast<std::size_t>(s.size()));
    CompensatedSum purity;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double w = s[i] * s[i];
        out.spectrum.weights[static_cast<std::size_t>(i)] = w;
        purity.add(w * w);
    }
    out.purity = purity.value();
    return out;
}

// Orthonormal Hermite function h_k(x) by the stable normalized recurrence.
inline double hermite_function(std::size_t k, double x) {
    const double h0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    if (k == 0) return h0;
    double prev = h0;
    double cur = std::numbers::sqrt2 * x * h0;
    for (std::size_t m = 2; m <= k; ++m) {
        const double md = static_cast<double>(m);
        const double next =
            std::sqrt(2.0 / md) * x * cur - std::sqrt((md - 1.0) / md) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// psi(x,y) = sum_i lambda_i h_i(x) h_i(y) with lambda_i^2 the requested
// Schmidt weights; weights must sum to 1. One weight of 1 gives the
// separable Gaussian product state.
inline GridWavefunction make_hermite_schmidt_state(const std::vector<double>& lambda_sq,
                                                   std::size_t n = 256, double box = 8.0) {
    if (lambda_sq.empty())
        throw std::invalid_argument("make_hermite_schmidt_state: need at least one weight");
    double total = 0.0;
    for (double w : lambda_sq) {
        if (w < 0.0)
            throw std::invalid_argument("make_hermite_schmidt_state: weights must be >= 0");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("make_hermite_schmidt_state: weights must sum to 1");
    GridWavefunction psi;
    psi.nx = psi.ny = n;
    psi.x_min = psi.y_min = -box;
    psi.x_max = psi.y_max = box;
    psi.amplitudes = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                           static_cast<Eigen::Index>(n));
    for (std::size_t mode = 0; mode < lambda_sq.size(); ++mode) {
        if (lambda_sq[mode] == 0.0) continue;
        const double lambda = std::sqrt(lambda_sq[mode]);
        Eigen::VectorXd hx(static_cast<Eigen::Index>(n));
        Eigen::VectorXd hy(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            hx[static_cast<Eigen::Index>(i)] = hermite_function(mode, psi.grid_x(i));
            hy[static_cast<Eigen::Index>(i)] = hermite_function(mode, psi.grid_y(i));
        }
        psi.amplitudes += lambda * hx * hy.transpose();
    }
    return psi;
}

// psi proportional to e^{-(x^2+y^2)/2 - c x y}, normalized on the grid.
// |c| < 1 keeps the quadratic form positive definite.
inline GridWavefunction make_correlated_gaussian(double c, std::size_t n = 256,
                                                 double box = 8.0) {
    if (!(std::fabs(c) < 1.0))
        throw std::invalid_argument("make_correlated_gaussian: need |c| < 1");
    GridWavefunction psi;
    psi.nx = psi.ny = n;
    psi.x_min = psi.y_min = -box;
    psi.x_max = psi.y_max = box;
    psi.amplitudes.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double x = psi.grid_x(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double y = psi.grid_y(j);
            psi.amplitudes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::exp(-0.5 * (x * x + y * y) - c * x * y);
        }
    }
    psi.normalize();
    return psi;
}

// Unit-norm state with uniform random amplitudes in [-1, 1); reproducible
// from the stream state.
inline GridWavefunction make_random_state(std::size_t nx, std::size_t ny, RngStream& stream,
                                          double box = 8.0) {
    GridWavefunction psi;
    psi.nx = nx;
    psi.ny = ny;
    psi.x_min = psi.y_min = -box;
    psi.x_max = psi.y_max = box;
    psi.amplitudes.resize(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            psi.amplitudes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                2.0 * next_uniform(stream) - 1.0;
    psi.normalize();
    return psi;
}

// Deterministic oracle for the 12-D harmonic-family purity: the integrand
// factorizes per Cartesian component, so the value is the cube of the 4-D
// integral I4 = (beta^2/pi) * Int_{[-1,1]^4} e^{-2 beta^2 [(x1-x2)^2 +
// (x1'-x2)^2 + (x1-x2')^2 + (x1'-x2')^2]}. Tensor Gauss-Legendre with an
// O(n^3) regrouping: summing the x1 (and x1') axis first against fixed
// (x2, x2') turns the 4-D sum into sums of squares.
inline double harmonic_purity_quadrature(double alpha, std::size_t nodes) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("harmonic_purity_quadrature: alpha must be > 0");
    if (nodes < 16)
        throw std::invalid_argument(
            "harmonic_purity_quadrature: nodes < 16 cannot resolve the Gaussian peak");
    const double beta = alpha / 4.0;
    const double rate = 2.0 * beta * beta;
    const QuadratureRule rule = gauss_legendre(nodes);
    const auto n = static_cast<Eigen::Index>(nodes);

    Eigen::MatrixXd kernel(n, n);  // e^{-2 beta^2 (x_a - x_c)^2}
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index c = 0; c < n; ++c) {
            const double diff = rule.nodes[static_cast<std::size_t>(a)] -
                                rule.nodes[static_cast<std::size_t>(c)];
            kernel(a, c) = std::exp(-rate * diff * diff);
        }
    Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), n);
    // S(c,d) = sum_a w_a kernel(a,c) kernel(a,d): the x1 axis integrated out.
    const Eigen::MatrixXd s = kernel.transpose() * w.asDiagonal() * kernel;
    // I4 = (beta^2/pi) sum_{c,d} w_c w_d S(c,d)^2: x1' contributes the
    // second S factor, x2 and x2' the outer weights.
    const double quad = (w.transpose() * s.array().square().matrix() * w).value();
    const double i4 = beta * beta / std::numbers::pi * quad;
    return i4 * i4 * i4;
}

// The two 12-D exponential-cycle purity families, named for the states that
// produce them. Tensor quadrature cannot reach these (the integrand couples
// all four points through |.| distances), so their independent cross-check
// below is importance sampling instead.
enum class CycleFamily { ground, excited };

struct ImportanceEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

namespace detail {

// 3-D vector from q(v) = rate^3/(8 pi) e^{-rate |v|}: the radius is
// Gamma(3, 1/rate) (three exponential draws), the direction uniform on the
// sphere. Consumes exactly five uniforms.
inline std::array<double, 3> next_exponential3(RngStream& stream, double rate) {
    const double u1 = 1.0 - next_uniform(stream);  // (0, 1]: keeps the log finite
    const double u2 = 1.0 - next_uniform(stream);
    const double u3 = 1.0 - next_uniform(stream);
    const double r = -std::log(u1 * u2 * u3) / rate;
    const double cos_t = 2.0 * next_uniform(stream) - 1.0;
    const double phi = 2.0 * std::numbers::pi * next_uniform(stream);
    const double sin_t = std::sqrt(1.0 - cos_t * cos_t);
    return {r * sin_t * std::cos(phi), r * sin_t * std::sin(phi), r * cos_t};
}

}  // namespace detail

// Importance-sampled reference value for the exponential-cycle purity
// integrals on the [-1,1]^12 box. The proposal draws the central point
// uniformly in the box and the three cycle displacements from the 3-D
// exponential density matched to the integrand's rate, which cancels three
// of the four exponential factors analytically; the surviving weight is
// bounded, so the estimator converges at the plain 1/sqrt(n) rate with a
// tiny constant at every alpha -- including the high-alpha regime where the
// integrand's support is far too thin for uniform sampling. With
// `large_box` the box indicator on the three displaced points is dropped,
// giving the limit of a domain much larger than the exponential's range
// (only the central point's volume then matters). Each sample consumes
// exactly 18 uniforms, so results are reproducible from the stream state.
inline ImportanceEstimate cycle_purity_importance(CycleFamily family, double alpha,
                                                  std::uint64_t samples, RngStream& stream,
                                                  bool large_box = false) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("cycle_purity_importance: alpha must be > 0");
    if (samples < 2)
        throw std::invalid_argument("cycle_purity_importance: need at least 2 samples");
    const bool excited = family == CycleFamily::excited;
    const double rate = excited ? alpha / 4.0 : alpha;
    const double q = excited ? rate / 2.0 : rate / 4.0;
    const double q3 = q * q * q;
    const double pref = q3 * q3 / (std::numbers::pi * std::numbers::pi);
    const double proposal_volume = 8.0 * std::numbers::pi / (rate * rate * rate);
    const double weight_const =
        pref * 8.0 * proposal_volume * proposal_volume * proposal_volume;

    const auto norm3 = [](const std::array<double, 3>& v) {
        return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    };
    const auto in_box = [](const std::array<double, 3>& v) {
        return std::fabs(v[0]) <= 1.0 && std::fabs(v[1]) <= 1.0 && std::fabs(v[2]) <= 1.0;
    };

    CompensatedSum sum;
    CompensatedSum sum_sq;
    for (std::uint64_t i = 0; i < samples; ++i) {
        std::array<double, 3> g2;
        for (double& c : g2) c = 2.0 * next_uniform(stream) - 1.0;
        const std::array<double, 3> s = detail::next_exponential3(stream, rate);
        const std::array<double, 3> t = detail::next_exponential3(stream, rate);
        const std::array<double, 3> w = detail::next_exponential3(stream, rate);
        const std::array<double, 3> g1 = {g2[0] + s[0], g2[1] + s[1], g2[2] + s[2]};
        const std::array<double, 3> g1p = {g2[0] + t[0], g2[1] + t[1], g2[2] + t[2]};
        const std::array<double, 3> g2p = {g1[0] + w[0], g1[1] + w[1], g1[2] + w[2]};
        if (!large_box && !(in_box(g1) && in_box(g1p) && in_box(g2p)))
            continue;  // zero weight; the sample still counts in the mean
        const std::array<double, 3> diag = {g1p[0] - g2p[0], g1p[1] - g2p[1],
                                            g1p[2] - g2p[2]};
        const double d1p2p = norm3(diag);
        double weight = weight_const * std::exp(-rate * d1p2p);
        if (excited)
            weight *= (1.0 - rate * norm3(s)) * (1.0 - rate * norm3(t)) *
                      (1.0 - rate * norm3(w)) * (1.0 - rate * d1p2p);
        sum.add(weight);
        sum_sq.add(weight * weight);
    }
    const double n = static_cast<double>(samples);
    const double mean = sum.value() / n;
    const double var = std::max(0.0, (sum_sq.value() / n - mean * mean)) / (n - 1.0);
    return {mean, std::sqrt(var)};
}

// Deterministic 6-D tensor quadrature of the ground-family trace integrand
// (1/pi)(alpha/4)^3 e^{-alpha |g1 - g2|}. The summand depends on the six
// indices only through the three per-axis squared differences, so the sum
// collapses to unordered node pairs per axis (m = n(n+1)/2 of them) and,
// since the three axes are identical, to sorted pair-index triples with a
// multinomial multiplicity. Practical for alpha <= 20 only: beyond that the
// exponential peak outruns tensor quadrature.
inline double trace_ground_quadrature(double alpha, std::size_t nodes) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("trace_ground_quadrature: alpha must be > 0");
    if (alpha > 20.0)
        throw std::invalid_argument(
            "trace_ground_quadrature: alpha > 20 defeats tensor quadrature (documented limit)");
    if (nodes < 24)
        throw std::invalid_argument("trace_ground_quadrature: nodes < 24 under-resolves the peak");
    const QuadratureRule rule = gauss_legendre(nodes);

    const std::size_t m = nodes * (nodes + 1) / 2;
    std::vector<double> pair_weight(m);
    std::vector<double> pair_dist_sq(m);
    std::size_t p = 0;
    for (std::size_t i = 0; i < nodes; ++i)
        for (std::size_t j = i; j < nodes; ++j, ++p) {
            const double diff = rule.nodes[i] - rule.nodes[j];
            const double w = rule.weights[i] * rule.weights[j];
            pair_weight[p] = (i == j) ? w : 2.0 * w;
            pair_dist_sq[p] = diff * diff;
        }

    CompensatedSum acc;
    for (std::size_t a = 0; a < m; ++a) {
        const double wa = pair_weight[a];
        const double da = pair_dist_sq[a];
        for (std::size_t b = a; b < m; ++b) {
            const double wab = wa * pair_weight[b];
            const double dab = da + pair_dist_sq[b];
            for (std::size_t c = b; c < m; ++c) {
                const double mult = (a == b && b == c) ? 1.0 : (a == b || b == c) ? 3.0 : 6.0;
                acc.add(mult * wab * pair_weight[c] *
                        std::exp(-alpha * std::sqrt(dab + pair_dist_sq[c])));
            }
        }
    }
    const double q = alpha / 4.0;
    return q * q * q / std::numbers::pi * acc.value();
}

}  // namespace purity_mc
