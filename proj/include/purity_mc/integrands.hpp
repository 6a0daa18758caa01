#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>

#include "purity_mc/integrand.hpp"

namespace purity_mc {

// Euclidean distance between two 3-vectors.
inline double pair_distance(std::span<const double> p, std::span<const double> q) {
    const double dx = p[0] - q[0];
    const double dy = p[1] - q[1];
    const double dz = p[2] - q[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// A real, spherically symmetric relative-motion wavefunction φ(r) with its
// own normalization baked into eval. `scale_a` is the length scale that the
// dimensionless box ratio α multiplies to give the box side L = α·scale_a.
struct RadialWavefunction {
    enum class Family { exp_ground, exp_excited, gaussian_harmonic, custom };

    Family family = Family::custom;
    double scale_a = 1.0;
    std::function<double(double)> eval;

    // φ(r) = sqrt(1/(π a³)) e^(−r/a)
    static RadialWavefunction exp_ground(double a) {
        check_scale(a);
        const double norm = std::sqrt(1.0 / (std::numbers::pi * a * a * a));
        return {Family::exp_ground, a, [norm, a](double r) { return norm * std::exp(-r / a); }};
    }

    // φ(r) = sqrt(1/(8π a³)) (1 − r/(2a)) e^(−r/(2a))
    static RadialWavefunction exp_excited(double a) {
        check_scale(a);
        const double norm = std::sqrt(1.0 / (8.0 * std::numbers::pi * a * a * a));
        return {Family::exp_excited, a, [norm, a](double r) {
                    const double t = r / (2.0 * a);
                    return norm * (1.0 - t) * std::exp(-t);
                }};
    }

    // φ(r) = sqrt(1/(π^{3/2} a³)) e^(−(r/a)²/2)
    static RadialWavefunction gaussian_harmonic(double a) {
        check_scale(a);
        const double norm =
            std::sqrt(1.0 / (std::pow(std::numbers::pi, 1.5) * a * a * a));
        return {Family::gaussian_harmonic, a, [norm, a](double r) {
                    const double t = r / a;
                    return norm * std::exp(-0.5 * t * t);
                }};
    }

    // Caller-normalized wavefunction; no normalization pass is performed.
    static RadialWavefunction custom(double a, std::function<double(double)> eval) {
        check_scale(a);
        if (!eval) throw std::invalid_argument("RadialWavefunction: eval must be callable");
        return {Family::custom, a, std::move(eval)};
    }

  private:
    static void check_scale(double a) {
        if (!(a > 0.0)) throw std::invalid_argument("RadialWavefunction: scale_a must be > 0");
    }
};

namespace detail {

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("integrand builders require alpha > 0");
}

// 12-D point layout: (γ₁, γ₁′, γ₂, γ₂′), three components each. The four
// pair distances below are the only way any purity integrand reads a point.
struct PairDistances {
    double d12, d1p2, d12p, d1p2p;
};

inline PairDistances purity_distances(std::span<const double> x) {
    const auto g1 = x.subspan(0, 3);
    const auto g1p = x.subspan(3, 3);
    const auto g2 = x.subspan(6, 3);
    const auto g2p = x.subspan(9, 3);
    return {pair_distance(g1, g2), pair_distance(g1p, g2), pair_distance(g1, g2p),
            pair_distance(g1p, g2p)};
}

}  // namespace detail

// 6-D trace integrand over (γ₁, γ₂): (1/π)(α/4)³ e^(−α·γ₁₂).
inline Integrand make_trace_ground(double alpha) {
    detail::check_alpha(alpha);
    const double q = alpha / 4.0;
    const double pref = q * q * q / std::numbers::pi;
    return {6, "trace_ground", alpha, [pref, alpha](std::span<const double> x) {
                const double d12 = pair_distance(x.subspan(0, 3), x.subspan(3, 3));
                return pref * std::exp(-alpha * d12);
            }};
}

// 12-D ground-state purity integrand: (1/π²)(α/4)⁶ e^(−α(γ₁₂+γ₁′₂+γ₁₂′+γ₁′₂′)).
inline Integrand make_purity_ground(double alpha) {
    detail::check_alpha(alpha);
    const double q = alpha / 4.0;
    const double q3 = q * q * q;
    const double pref = q3 * q3 / (std::numbers::pi * std::numbers::pi);
    return {12, "purity_ground", alpha, [pref, alpha](std::span<const double> x) {
                const auto d = detail::purity_distances(x);
                return pref * std::exp(-alpha * (d.d12 + d.d1p2 + d.d12p + d.d1p2p));
            }};
}

// 12-D excited-state purity integrand, β = α/4:
// (1/π²)(β/2)⁶ (1−βγ₁₂)(1−βγ₁′₂)(1−βγ₁₂′)(1−βγ₁′₂′) e^(−β(γ₁₂+γ₁′₂+γ₁₂′+γ₁′₂′)).
// The polynomial factors make this the one family with sign changes.
inline Integrand make_purity_excited(double alpha) {
    detail::check_alpha(alpha);
    const double beta = alpha / 4.0;
    const double h = beta / 2.0;
    const double h3 = h * h * h;
    const double pref = h3 * h3 / (std::numbers::pi * std::numbers::pi);
    return {12, "purity_excited", alpha, [pref, beta](std::span<const double> x) {
                const auto d = detail::purity_distances(x);
                const double poly = (1.0 - beta * d.d12) * (1.0 - beta * d.d1p2) *
                                    (1.0 - beta * d.d12p) * (1.0 - beta * d.d1p2p);
                return pref * poly *
                       std::exp(-beta * (d.d12 + d.d1p2 + d.d12p + d.d1p2p));
            }};
}

// 12-D harmonic-state purity integrand, β = α/4:
// (β⁶/π³) e^(−2β²(γ₁₂²+γ₁′₂²+γ₁₂′²+γ₁′₂′²)).
inline Integrand make_purity_harmonic(double alpha) {
    detail::check_alpha(alpha);
    const double beta = alpha / 4.0;
    const double b3 = beta * beta * beta;
    const double pi3 = std::numbers::pi * std::numbers::pi * std::numbers::pi;
    const double pref = b3 * b3 / pi3;
    const double rate = 2.0 * beta * beta;
    return {12, "purity_harmonic", alpha, [pref, rate](std::span<const double> x) {
                const auto d = detail::purity_distances(x);
                const double s2 = d.d12 * d.d12 + d.d1p2 * d.d1p2 + d.d12p * d.d12p +
                                  d.d1p2p * d.d1p2p;
                return pref * std::exp(-rate * s2);
            }};
}

// 12-D purity integrand for an arbitrary radial wavefunction via the
// box-limit form: with L = α·scale_a and w(γ) = φ(γ·L/2),
//   evaluate = (L/2)¹² · L⁻⁶ · w(γ₁₂) w(γ₁′₂) w(γ₁₂′) w(γ₁′₂′).
// All length scales cancel between the prefactor and φ's normalization, so
// the value is a function of α alone (up to roundoff in the cancellation).
inline Integrand make_purity_generic(const RadialWavefunction& wf, double alpha) {
    detail::check_alpha(alpha);
    if (!wf.eval) throw std::invalid_argument("make_purity_generic: wavefunction not callable");
    if (!(wf.scale_a > 0.0))
        throw std::invalid_argument("make_purity_generic: scale_a must be > 0");
    const double box_l = alpha * wf.scale_a;
    const double half_l = 0.5 * box_l;
    const double pref = std::pow(half_l, 12) * std::pow(box_l, -6);
    auto phi = wf.eval;
    return {12, "purity_generic", alpha, [pref, half_l, phi](std::span<const double> x) {
                const auto d = detail::purity_distances(x);
                return pref * phi(d.d12 * half_l) * phi(d.d1p2 * half_l) *
                       phi(d.d12p * half_l) * phi(d.d1p2p * half_l);
            }};
}

}  // namespace purity_mc
