// spectral_core.hpp — self-energy on both Riemann sheets, pole finding and classification
//
// The Laplace transform of the emitter amplitude is
//     c(s) = 1 / (s + i dw0 + i Sigma(s)),
//     Sigma(s) = i sigma (w - q(w)),   w = s + gamma,   q(w) = sqrt(w^2 + 4 J^2),
// with q on the branch that behaves like w at infinity. That branch has its cut on
// the segment Re(s) = -gamma, |Im(s)| <= 2J. The second sheet flips the sign of q.

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "nhbath/errors.hpp"
#include "nhbath/model.hpp"
#include "nhbath/quadratic.hpp"

namespace nhbath::spectral {

inline constexpr double kCutExclusion = 1e-12;   // in units of J
inline constexpr double kPoleTolerance = 1e-13;  // |denominator| in units of J
inline constexpr double kClassifyTolerance = 1e-9;
inline constexpr double kDegenerateQuadratic = 1e-12;
inline constexpr double kResidueTolerance = 1e-12;

enum class CutSide { Right, Left };

// sqrt(w^2 + 4J^2) ~ w at infinity; discontinuous only across w in i[-2J, 2J].
inline cplx band_root(cplx w, double J) {
    if (w == cplx{0.0, 0.0}) return {2.0 * J, 0.0};
    return w * std::sqrt(1.0 + 4.0 * J * J / (w * w));
}

inline bool on_cut(cplx s, const ModelParams& p, double tol = kCutExclusion) {
    const double w_re = s.real() + p.gamma;
    return std::abs(w_re) <= tol * p.J && std::abs(s.imag()) <= 2.0 * p.J + tol * p.J;
}

namespace detail {

inline cplx sheet_root(cplx s, const ModelParams& p, Sheet sheet) {
    const cplx q = band_root(s + p.gamma, p.J);
    return sheet == Sheet::First ? q : -q;
}

inline cplx self_energy_from_root(cplx s, cplx q, const ModelParams& p) {
    return I * p.sigma() * (s + p.gamma - q);
}

} // namespace detail

// Denominator s + i dw0 + i Sigma(s) without cut or pole checks.
inline cplx laplace_denominator(cplx s, const ModelParams& p, Sheet sheet) {
    const cplx q = detail::sheet_root(s, p, sheet);
    return s + I * p.delta_omega0 + I * detail::self_energy_from_root(s, q, p);
}

inline cplx self_energy(cplx s, const ModelParams& p, Sheet sheet,
                        double cut_tol = kCutExclusion) {
    p.validate();
    if (on_cut(s, p, cut_tol))
        throw Error(ErrorCode::BranchCutEvaluation, "self-energy requested on the branch cut");
    return detail::self_energy_from_root(s, detail::sheet_root(s, p, sheet), p);
}

// One-sided limit onto the cut from Re(s) -> -gamma +/- 0. On the cut the band
// root tends to +sqrt(4J^2 - y^2) from the right and to its negative from the left.
// Off the cut this is the ordinary value.
inline cplx self_energy_limit(cplx s, const ModelParams& p, Sheet sheet, CutSide side,
                              double cut_tol = kCutExclusion) {
    p.validate();
    if (!on_cut(s, p, cut_tol))
        return detail::self_energy_from_root(s, detail::sheet_root(s, p, sheet), p);
    const double y = s.imag();
    const cplx on_line{-p.gamma, y};
    double q = std::sqrt(std::max(0.0, 4.0 * p.J * p.J - y * y));
    if (side == CutSide::Left) q = -q;
    if (sheet == Sheet::Second) q = -q;
    return detail::self_energy_from_root(on_line, q, p);
}

inline cplx laplace_amplitude(cplx s, const ModelParams& p, Sheet sheet,
                              double pole_tol = kPoleTolerance,
                              double cut_tol = kCutExclusion) {
    p.validate();
    if (on_cut(s, p, cut_tol))
        throw Error(ErrorCode::BranchCutEvaluation, "Laplace amplitude requested on the branch cut");
    const cplx den = laplace_denominator(s, p, sheet);
    if (std::abs(den) < pole_tol * p.J)
        throw Error(ErrorCode::PoleEvaluation, "Laplace amplitude evaluated on a pole");
    return 1.0 / den;
}

// <e| (z - H_NH)^{-1} |e> on the requested sheet.
inline cplx resolvent_ee(cplx z, const ModelParams& p, Sheet sheet,
                         double pole_tol = kPoleTolerance, double cut_tol = kCutExclusion) {
    return -I * laplace_amplitude(-I * z, p, sheet, pole_tol, cut_tol);
}

// Siegert wavenumber from b_n = exp(i k n); principal log gives Re(k) in (-pi, pi].
inline cplx bloch_wavenumber(cplx z, const ModelParams& p, double tol = 1e-14) {
    const cplx dz = z - p.delta_omega0;
    if (std::abs(dz) < tol * p.J)
        throw Error(ErrorCode::DetuningSingularity, "z coincides with the emitter detuning");
    const cplx x = (p.g0 * p.g0 / dz - z - I * p.gamma) / p.J;
    return -I * std::log(x);
}

struct StateClass {
    StateKind kind{StateKind::Bound};
    bool on_boundary{false};
};

inline StateClass classify_state(cplx k, double tol = kClassifyTolerance) {
    if (k.imag() > tol) return {StateKind::Bound, false};
    if (k.imag() < -tol)
        return {k.real() > 0.0 ? StateKind::Resonant : StateKind::AntiResonant, false};
    return {StateKind::Bound, true};
}

// Residue of c(s) at a simple pole, 1 / D'(s) reduced with the pole relation.
// The denominator is -P'(s)/2 for the pole polynomial P, so it vanishes at a double root.
inline cplx residue(const Pole& pole, const ModelParams& p, double tol = kResidueTolerance) {
    const double sg = p.sigma();
    const double dw = p.delta_omega0;
    const cplx s = pole.s;
    const cplx num = (sg - 1.0) * s + p.gamma * sg - I * dw;
    const cplx den = (2.0 * sg - 1.0) * s + p.gamma * sg + I * dw * (sg - 1.0);
    if (std::abs(den) < tol * p.J)
        throw Error(ErrorCode::NearDegenerate, "pole is (nearly) double; residue undefined");
    return num / den;
}

struct PoleEquation {
    cplx a, b, c; // a s^2 + b s + c = 0
};

inline PoleEquation pole_equation(const ModelParams& p) {
    const double sg = p.sigma();
    const double g = p.gamma;
    const double dw = p.delta_omega0;
    return {cplx{1.0 - 2.0 * sg, 0.0},
            -2.0 * (g * sg + I * dw * (sg - 1.0)),
            -4.0 * sg * sg * p.J * p.J - dw * dw - 2.0 * I * g * sg * dw};
}

// Whether the horizontal Hankel paths enclose s on the second sheet:
// left of the cut and between the lines Im(s) = +/-2J.
inline bool inside_hankel_strip(cplx s, const ModelParams& p) {
    return s.real() < -p.gamma && std::abs(s.imag()) < 2.0 * p.J;
}

// Sheet, kind, residue and contour membership for a root of the pole equation.
inline Pole make_pole(cplx s, const ModelParams& p) {
    Pole pole;
    pole.s = s;
    pole.z = I * s;
    pole.k = bloch_wavenumber(pole.z, p);
    StateClass cls = classify_state(pole.k);
    const bool near_cut =
        std::abs(s.real() + p.gamma) < kClassifyTolerance * p.J && std::abs(s.imag()) <= 2.0 * p.J;
    if (near_cut) cls = {StateKind::Bound, true};
    pole.kind = cls.kind;
    pole.on_boundary = cls.on_boundary;
    pole.sheet = pole.kind == StateKind::Bound ? Sheet::First : Sheet::Second;
    try {
        pole.residue = residue(pole, p);
    } catch (const Error&) {
        pole.residue.reset();
    }
    switch (pole.kind) {
    case StateKind::Bound: pole.contributes = s.real() <= kClassifyTolerance * p.J; break;
    case StateKind::Resonant: pole.contributes = inside_hankel_strip(s, p); break;
    case StateKind::AntiResonant: pole.contributes = false; break;
    }
    return pole;
}

// Roots of (1-2σ)s² - 2[γσ + iΔ(σ-1)]s - 4σ²J² - Δ² - 2iγσΔ = 0, ordered as
// s_p1 = (-b - sqrt(disc))/2a, s_p2 = (-b + sqrt(disc))/2a. At σ = 1/2 the
// equation is linear and a single pole flagged degenerate_quadratic is returned
// (none at all when γ = Δ = 0 as well).
inline std::vector<Pole> find_poles(const ModelParams& p) {
    p.validate_coupled();
    const PoleEquation eq = pole_equation(p);
    std::vector<Pole> poles;
    QuadraticRoots roots;
    if (std::abs(eq.a) < kDegenerateQuadratic) {
        roots.linear = true;
        if (eq.b != cplx{0.0, 0.0}) {
            roots.roots[0] = -eq.c / eq.b;
            roots.count = 1;
        }
    } else {
        roots = solve_quadratic(eq.a, eq.b, eq.c, 0.0);
    }
    for (std::size_t i = 0; i < roots.count; ++i) {
        Pole pole = make_pole(roots.roots[i], p);
        pole.degenerate_quadratic = roots.linear;
        poles.push_back(pole);
    }
    return poles;
}

struct CriticalRates {
    double gamma_c1{0.0};                 // pole crosses the cut
    std::optional<double> gamma_c2;       // pole coalescence, only for g0 > J
};

inline void require_resonant(const ModelParams& p) {
    if (p.delta_omega0 != 0.0)
        throw Error(ErrorCode::DetunedCriticality,
                    "critical quantities are only defined at zero detuning");
}

inline CriticalRates critical_gammas(const ModelParams& p) {
    p.validate_coupled();
    require_resonant(p);
    CriticalRates out;
    out.gamma_c1 = p.g0 * p.g0 / p.J;
    if (p.g0 > p.J) out.gamma_c2 = 2.0 * std::sqrt(p.g0 * p.g0 - p.J * p.J);
    return out;
}

struct RegimeClass {
    Regime regime{Regime::Weak};
    bool on_boundary{false};
};

inline RegimeClass coupling_regime(const ModelParams& p, double tol = 1e-12) {
    p.validate_coupled();
    const double r = p.g0 / p.J;
    const double root2 = std::sqrt(2.0);
    if (std::abs(r - 1.0) <= tol) return {Regime::Weak, true};
    if (std::abs(r - root2) <= tol) return {Regime::Moderate, true};
    if (r < 1.0) return {Regime::Weak, false};
    if (r < root2) return {Regime::Moderate, false};
    return {Regime::Strong, false};
}

// Coalescence of the two poles as gamma varies (gamma in p is ignored).
// The EP kind comes from classifying the double root, not from the regime alone.
inline std::optional<EpRecord> detect_ep(const ModelParams& p) {
    p.validate_coupled();
    require_resonant(p);
    if (p.g0 <= p.J) return std::nullopt;
    const double gamma_ep = 2.0 * std::sqrt(p.g0 * p.g0 - p.J * p.J);
    const ModelParams at_ep = p.with_gamma(gamma_ep);
    const std::vector<Pole> poles = find_poles(at_ep);
    if (poles.size() != 2 || poles[0].sheet != poles[1].sheet) return std::nullopt;

    const RegimeClass regime = coupling_regime(p);
    EpRecord ep;
    ep.gamma_ep = gamma_ep;
    ep.s_ep = 0.5 * (poles[0].s + poles[1].s);
    ep.kind = poles[0].sheet == Sheet::First ? EpKind::Physical : EpKind::Virtual;
    ep.regime = regime.regime;
    ep.on_boundary = regime.on_boundary || poles[0].on_boundary;
    return ep;
}

} // namespace nhbath::spectral
