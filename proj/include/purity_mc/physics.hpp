#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace purity_mc {

// Gravitational constant and reduced Planck constant, in SI units.
// `paper_rounded` carries the two-digit values the reference results were
// printed with, so regression numbers are reproduced as printed; `codata`
// carries the committee values for honest physics.
struct PhysicalConstants {
    enum class Mode { paper_rounded, codata };

    double G = 6.67e-11;      // m^3 kg^-1 s^-2
    double hbar = 1.06e-34;   // m^2 kg s^-1
    Mode mode = Mode::paper_rounded;

    static PhysicalConstants paper_rounded() { return {6.67e-11, 1.06e-34, Mode::paper_rounded}; }
    static PhysicalConstants codata() { return {6.67430e-11, 1.054571817e-34, Mode::codata}; }
};

struct MassPair {
    double m1 = 0.0;  // kg
    double m2 = 0.0;  // kg

    MassPair(double m1_, double m2_) : m1(m1_), m2(m2_) {
        if (!(m1 > 0.0 && m2 > 0.0))
            throw std::invalid_argument("MassPair: masses must be positive");
    }

    double reduced_mass() const { return m1 * m2 / (m1 + m2); }
    double total_mass() const { return m1 + m2; }
};

// Two-arm interferometer geometry: two masses a distance d apart, one of
// them displaced by +/- dx/... between arms so the four arm-pair distances
// are d, d, d + dx, and d - dx.
struct MzConfig {
    MassPair masses;
    double tau = 0.0;  // interaction time, s
    double d = 0.0;    // center distance, m
    double dx = 0.0;   // arm displacement, m

    MzConfig(MassPair masses_, double tau_, double d_, double dx_)
        : masses(masses_), tau(tau_), d(d_), dx(dx_) {
        if (!(tau > 0.0)) throw std::invalid_argument("MzConfig: tau must be positive");
        if (!(d > 0.0)) throw std::invalid_argument("MzConfig: d must be positive");
        if (!(dx >= 0.0)) throw std::invalid_argument("MzConfig: dx must be nonnegative");
        if (!(dx < d))
            throw std::invalid_argument("MzConfig: dx must be smaller than d (r = d - dx > 0)");
    }
};

// E = 1 - Tr(rho_1^2), with `clamped` flagging inputs that statistical noise
// pushed slightly outside [0, 1] before clamping.
struct EntanglementMeasure {
    double value = 0.0;
    bool clamped = false;
};

inline EntanglementMeasure entanglement_measure(double purity) {
    if (!(purity >= -0.01 && purity <= 1.01))
        throw std::invalid_argument("entanglement_measure: purity outside [-0.01, 1.01]");
    EntanglementMeasure out;
    if (purity < 0.0) {
        out.value = 1.0;
        out.clamped = true;
    } else if (purity > 1.0) {
        out.value = 0.0;
        out.clamped = true;
    } else {
        out.value = 1.0 - purity;
    }
    return out;
}

// a = hbar^2 / (G * mu * m1 * m2), the length scale of the gravitationally
// bound ground state.
inline double gravitational_bohr_radius(const MassPair& masses, const PhysicalConstants& c) {
    const double mu = masses.reduced_mass();
    return c.hbar * c.hbar / (c.G * mu * masses.m1 * masses.m2);
}

// Analytic ceiling (sqrt(2*pi)/alpha)^3 on the harmonic-family purity.
// Computed as t*t*t so that bound(2*alpha) == bound(alpha)/8 bit-exactly.
inline double harmonic_purity_bound(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("harmonic_purity_bound: alpha must be > 0");
    const double t = std::sqrt(2.0 * std::numbers::pi) / alpha;
    return t * t * t;
}

// Rational-polynomial error function (Abramowitz & Stegun 7.1.26), odd
// extension; absolute error <= 1.5e-7 everywhere. Self-contained so the
// pipeline does not silently depend on libm's erf.
inline double erf_approx(double x) {
    constexpr double p = 0.3275911;
    constexpr double a1 = 0.254829592;
    constexpr double a2 = -0.284496736;
    constexpr double a3 = 1.421413741;
    constexpr double a4 = -1.453152027;
    constexpr double a5 = 1.061405429;
    if (x == 0.0) return 0.0;  // the fit's constant term misses zero by ~1e-9
    const double ax = std::fabs(x);
    const double t = 1.0 / (1.0 + p * ax);
    const double poly = ((((a5 * t + a4) * t + a3) * t + a2) * t + a1) * t;
    const double val = 1.0 - poly * std::exp(-ax * ax);
    return x < 0.0 ? -val : val;
}

// Net two-arm phase difference
//   dphi = (G m1 m2 tau / hbar) * (2/d - 1/(d+dx) - 1/(d-dx)),
// negative for 0 < dx < d because the harmonic-mean term beats 2/d.
inline double mz_phase_shift(const MzConfig& cfg, const PhysicalConstants& c) {
    const double pref = c.G * cfg.masses.m1 * cfg.masses.m2 * cfg.tau / c.hbar;
    const double bracket = 2.0 / cfg.d - 1.0 / (cfg.d + cfg.dx) - 1.0 / (cfg.d - cfg.dx);
    return pref * bracket;
}

// The final interferometer state factorizes iff the accumulated phase is an
// integer multiple of 2*pi; entangling means the distance to the nearest
// such multiple exceeds tol.
inline bool mz_is_entangling(double delta_phi, double tol = 1e-6) {
    if (!(tol > 0.0 && tol < std::numbers::pi))
        throw std::invalid_argument("mz_is_entangling: tol must be in (0, pi)");
    const double dist = std::fabs(std::remainder(delta_phi, 2.0 * std::numbers::pi));
    return dist > tol;
}

}  // namespace purity_mc
