// laplace_inversion.hpp — exact time-domain emitter amplitude from poles and Hankel paths
//
// Deforming the Bromwich line across the cut leaves
//     c(t) = sum of residues r e^{st} of enclosed poles + H1(t) + H2(t),
// where H1/H2 wrap the rays leaving the band edges -gamma +/- 2iJ towards Re(s) -> -inf.
// Between the rays and left of the cut the contour lives on the second sheet, so
// resonances count only inside that strip; bound poles count wherever they are.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nhbath/errors.hpp"
#include "nhbath/model.hpp"
#include "nhbath/quadrature.hpp"
#include "nhbath/spectral_core.hpp"

namespace nhbath::inversion {

enum class CutEdge { Upper, Lower };

struct InversionOptions {
    double t_min{1e-2};            // shortest time served by the spectral route, 1/J
    double ep_window{1e-3};        // pole separation below which the confluent form is used, J
    std::size_t contour_nodes{128};
    double contour_radius_factor{10.0};
    double edge_split{1e-3};       // (0, edge_split) integrated in sqrt(x), J
    double pole_on_path{1e-6};     // J
    double tilt_threshold{1e-3};   // rays are rotated when a pole is this close, J
    double tilt_angle{0.1};        // radians
    std::size_t max_intervals{4000};
};

// Ray directions leaving the band edges. A positive tilt rotates the ray away
// from the strip and so enlarges the region evaluated on the second sheet.
struct HankelGeometry {
    double upper_tilt{0.0};
    double lower_tilt{0.0};

    cplx direction(CutEdge edge) const {
        return edge == CutEdge::Upper ? -std::exp(-I * upper_tilt) : -std::exp(I * lower_tilt);
    }
    bool tilted() const { return upper_tilt != 0.0 || lower_tilt != 0.0; }
};

inline cplx branch_point(const ModelParams& p, CutEdge edge) {
    return {-p.gamma, edge == CutEdge::Upper ? 2.0 * p.J : -2.0 * p.J};
}

// Second-sheet region swept by the deformed contour.
inline bool inside_swept_region(cplx s, const ModelParams& p, const HankelGeometry& geo) {
    if (s.real() >= -p.gamma) return false;
    const cplx du = geo.direction(CutEdge::Upper);
    const cplx dl = geo.direction(CutEdge::Lower);
    const bool below_upper = std::imag(std::conj(du) * (s - branch_point(p, CutEdge::Upper))) > 0.0;
    const bool above_lower = std::imag(std::conj(dl) * (s - branch_point(p, CutEdge::Lower))) < 0.0;
    return below_upper && above_lower;
}

inline double distance_to_ray(cplx s, cplx origin, cplx dir) {
    const cplx rel = std::conj(dir) * (s - origin);
    if (rel.real() <= 0.0) return std::abs(s - origin);
    return std::abs(rel.imag());
}

inline bool contributes(const Pole& pole, const ModelParams& p, const HankelGeometry& geo) {
    switch (pole.kind) {
    case StateKind::Bound:
        return pole.s.real() <= spectral::kClassifyTolerance * p.J &&
               !inside_swept_region(pole.s, p, geo);
    case StateKind::Resonant: return inside_swept_region(pole.s, p, geo);
    case StateKind::AntiResonant: return false;
    }
    return false;
}

namespace detail {

inline cplx jump(cplx s, const ModelParams& p, CutEdge edge) {
    const cplx first = 1.0 / spectral::laplace_denominator(s, p, Sheet::First);
    const cplx second = 1.0 / spectral::laplace_denominator(s, p, Sheet::Second);
    return edge == CutEdge::Upper ? second - first : first - second;
}

inline void check_poles_off_rays(const ModelParams& p, const HankelGeometry& geo, double tol) {
    for (const Pole& pole : spectral::find_poles(p)) {
        for (CutEdge edge : {CutEdge::Upper, CutEdge::Lower}) {
            if (distance_to_ray(pole.s, branch_point(p, edge), geo.direction(edge)) < tol * p.J)
                throw Error(ErrorCode::PoleOnPath, "a pole lies on a Hankel integration ray");
        }
    }
}

} // namespace detail

// f+^(II)(x) - f+(x) (Upper) or f-(x) - f-^(II)(x) (Lower), f at s = -gamma - x +/- 2iJ.
inline cplx cut_discontinuity(double x, const ModelParams& p, CutEdge edge,
                              double pole_tol = 1e-6) {
    p.validate();
    if (!(x > 0.0)) throw Error(ErrorCode::InvalidParams, "x must be > 0");
    const cplx s = branch_point(p, edge) - x;
    if (p.g0 > 0.0) {
        for (const Pole& pole : spectral::find_poles(p))
            if (std::abs(pole.s - s) < pole_tol * p.J)
                throw Error(ErrorCode::PoleOnPath, "a pole lies on the integration ray");
    }
    return detail::jump(s, p, edge);
}

struct HankelPair {
    cplx h1, h2;   // full contributions C e^{(-gamma +/- 2iJ) t}
    cplx c1, c2;   // slowly varying amplitudes
    double quadrature_error{0.0};
    bool warning{false};
};

// C(t) = (1/2 pi i) (-d) int_0^inf jump(b + u d) e^{u d t} du along a ray b + u d.
inline cplx hankel_amplitude(double t, const ModelParams& p, CutEdge edge, double tol,
                             const HankelGeometry& geo, const InversionOptions& opt,
                             double& error, bool& converged) {
    const cplx b = branch_point(p, edge);
    const cplx d = geo.direction(edge);
    const double cos_tilt = -d.real();
    const double delta = opt.edge_split * p.J;
    const double u_max = std::max(50.0 / t, 10.0 * p.J) / cos_tilt;

    auto near_edge = [&](double v) {
        const double u = v * v;
        return 2.0 * v * detail::jump(b + u * d, p, edge) * std::exp(u * d * t);
    };
    auto r1 = quad::integrate(near_edge, 0.0, std::sqrt(delta), tol, 0.0, opt.max_intervals);

    quad::Result<cplx> r2;
    if (t > 1.0 / p.J) {
        auto scaled = [&](double y) {
            return detail::jump(b + (y / t) * d, p, edge) * std::exp(y * d) / t;
        };
        r2 = quad::integrate(scaled, delta * t, u_max * t, tol, 0.0, opt.max_intervals);
    } else {
        auto plain = [&](double u) { return detail::jump(b + u * d, p, edge) * std::exp(u * d * t); };
        r2 = quad::integrate(plain, delta, u_max, tol, 0.0, opt.max_intervals);
    }
    const double two_pi = 2.0 * kPi;
    error += (r1.error + r2.error) / two_pi;
    converged = converged && r1.converged && r2.converged;
    return (-d) * (r1.value + r2.value) / (two_pi * I);
}

inline HankelPair hankel_contributions(double t, const ModelParams& p, double tol = 1e-10,
                                       const InversionOptions& opt = {},
                                       const HankelGeometry& geo = {}) {
    p.validate();
    if (t < opt.t_min)
        throw Error(ErrorCode::TimeTooSmall, "t below the spectral-route minimum; use an oracle");
    if (p.g0 > 0.0) detail::check_poles_off_rays(p, geo, opt.pole_on_path);

    HankelPair out;
    bool converged = true;
    out.c1 = hankel_amplitude(t, p, CutEdge::Upper, tol, geo, opt, out.quadrature_error, converged);
    out.c2 = hankel_amplitude(t, p, CutEdge::Lower, tol, geo, opt, out.quadrature_error, converged);
    out.h1 = out.c1 * std::exp(branch_point(p, CutEdge::Upper) * t);
    out.h2 = out.c2 * std::exp(branch_point(p, CutEdge::Lower) * t);
    out.warning = !converged;
    return out;
}

struct PoleTerm {
    Pole pole;
    cplx residue;
    cplx at(double t) const { return residue * std::exp(pole.s * t); }
};

// (A + B t) e^{s0 t}: two nearly coincident poles summed through contour moments.
struct ConfluentTerm {
    cplx a, b, s0;
    Sheet sheet{Sheet::First};
    StateKind kind{StateKind::Bound};
    double radius{0.0};
    cplx at(double t) const { return (a + b * t) * std::exp(s0 * t); }
};

struct DecayDecomposition {
    std::vector<double> t;
    std::vector<PoleTerm> pole_terms;          // contributing simple poles only
    std::optional<ConfluentTerm> confluent;
    std::vector<HankelPair> hankel;            // one per time sample
    std::vector<cplx> total;
    HankelGeometry geometry;
    std::vector<std::string> warnings;

    std::size_t count_terms(StateKind kind) const {
        std::size_t n = 0;
        for (const PoleTerm& term : pole_terms)
            if (term.pole.kind == kind) ++n;
        if (confluent && confluent->kind == kind) n += 2;
        return n;
    }
    std::size_t bound_terms() const { return count_terms(StateKind::Bound); }
    std::size_t resonant_terms() const { return count_terms(StateKind::Resonant); }

    cplx pole_part(double time) const {
        cplx sum{0.0, 0.0};
        for (const PoleTerm& term : pole_terms) sum += term.at(time);
        if (confluent) sum += confluent->at(time);
        return sum;
    }
};

// Zeroth and first moments (1/2 pi i) \oint c(s) (s - s0)^n ds on a circle.
inline ConfluentTerm confluent_moments(cplx s0, double radius, const ModelParams& p, Sheet sheet,
                                       std::size_t nodes) {
    ConfluentTerm term;
    term.s0 = s0;
    term.sheet = sheet;
    term.radius = radius;
    cplx m0{0.0, 0.0};
    cplx m1{0.0, 0.0};
    for (std::size_t j = 0; j < nodes; ++j) {
        const double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(nodes);
        const cplx offset = radius * std::exp(I * theta);
        const cplx value = 1.0 / spectral::laplace_denominator(s0 + offset, p, sheet);
        m0 += value * offset;
        m1 += value * offset * offset;
    }
    term.a = m0 / static_cast<double>(nodes);
    term.b = m1 / static_cast<double>(nodes);
    return term;
}

namespace detail {

inline double distance_to_cut(cplx s, const ModelParams& p) {
    const double y = std::clamp(s.imag(), -2.0 * p.J, 2.0 * p.J);
    return std::abs(s - cplx{-p.gamma, y});
}

inline HankelGeometry choose_geometry(const std::vector<Pole>& poles, const ModelParams& p,
                                      const InversionOptions& opt,
                                      std::vector<std::string>& warnings) {
    HankelGeometry geo;
    for (const Pole& pole : poles) {
        for (CutEdge edge : {CutEdge::Upper, CutEdge::Lower}) {
            const double dist =
                distance_to_ray(pole.s, branch_point(p, edge), geo.direction(edge));
            if (dist < opt.tilt_threshold * p.J) {
                (edge == CutEdge::Upper ? geo.upper_tilt : geo.lower_tilt) = opt.tilt_angle;
                warnings.push_back("pole near a Hankel ray; ray rotated by " +
                                   std::to_string(opt.tilt_angle) + " rad");
            }
        }
    }
    return geo;
}

} // namespace detail

// Pole terms + optional confluent term + H1 + H2 on a time grid.
inline DecayDecomposition survival_amplitude_spectral(const std::vector<double>& t_grid,
                                                      const ModelParams& p, double tol = 1e-10,
                                                      const InversionOptions& opt = {}) {
    p.validate_coupled();
    for (double t : t_grid)
        if (t < opt.t_min)
            throw Error(ErrorCode::TimeTooSmall, "t below the spectral-route minimum; use an oracle");

    DecayDecomposition out;
    out.t = t_grid;
    std::vector<Pole> poles = spectral::find_poles(p);
    out.geometry = detail::choose_geometry(poles, p, opt, out.warnings);
    for (Pole& pole : poles) pole.contributes = contributes(pole, p, out.geometry);

    const bool close_pair = poles.size() == 2 && std::abs(poles[0].s - poles[1].s) < opt.ep_window * p.J;
    if (close_pair && (poles[0].contributes || poles[1].contributes)) {
        if (poles[0].sheet != poles[1].sheet || poles[0].contributes != poles[1].contributes)
            throw Error(ErrorCode::NearDegenerate,
                        "coalescing poles straddle the cut; no confluent form available");
        const cplx s0 = 0.5 * (poles[0].s + poles[1].s);
        double radius = opt.contour_radius_factor * opt.ep_window * p.J;
        const double clearance = detail::distance_to_cut(s0, p);
        if (radius > 0.5 * clearance) {
            radius = 0.5 * clearance;
            out.warnings.push_back("confluent contour shrunk to stay clear of the cut");
        }
        ConfluentTerm term = confluent_moments(s0, radius, p, poles[0].sheet, opt.contour_nodes);
        term.kind = poles[0].kind;
        out.confluent = term;
    } else {
        for (const Pole& pole : poles) {
            if (!pole.contributes) continue;
            if (!pole.residue)
                throw Error(ErrorCode::NearDegenerate, "contributing pole without a residue");
            out.pole_terms.push_back({pole, *pole.residue});
        }
    }

    out.hankel.reserve(t_grid.size());
    out.total.reserve(t_grid.size());
    bool quad_warning = false;
    for (double t : t_grid) {
        HankelPair h = hankel_contributions(t, p, tol, opt, out.geometry);
        quad_warning = quad_warning || h.warning;
        out.total.push_back(out.pole_part(t) + h.h1 + h.h2);
        out.hankel.push_back(h);
    }
    if (quad_warning) out.warnings.push_back("Hankel quadrature did not reach the requested tolerance");
    return out;
}

enum class Channel { HankelEnvelope, BoundPole, BoundPoleOscillating };

constexpr std::string_view to_string(Channel c) {
    switch (c) {
    case Channel::HankelEnvelope: return "hankel-envelope";
    case Channel::BoundPole: return "bound-pole";
    case Channel::BoundPoleOscillating: return "bound-pole-oscillating";
    }
    return "?";
}

struct AsymptoticModel {
    Channel channel{Channel::HankelEnvelope};
    double rate{0.0};                 // |c(t)| ~ e^{-rate t}
    std::optional<double> frequency;  // oscillation frequency of P_s(t)
};

// Long-time channel. A bound pole never decays faster than gamma, so any bound
// pole dominates the t^{-3/2} e^{-gamma t} Hankel envelope, including one sitting
// on the cut edge at gamma = gamma_c1.
inline AsymptoticModel asymptotic_model(const ModelParams& p) {
    p.validate_coupled();
    spectral::require_resonant(p);
    const std::vector<Pole> poles = spectral::find_poles(p);
    std::vector<const Pole*> bound;
    for (const Pole& pole : poles)
        if (pole.kind == StateKind::Bound && pole.contributes) bound.push_back(&pole);

    AsymptoticModel out;
    if (bound.empty()) {
        out.channel = Channel::HankelEnvelope;
        out.rate = p.gamma;
        out.frequency = 4.0 * p.J;
        return out;
    }
    std::sort(bound.begin(), bound.end(),
              [](const Pole* a, const Pole* b) { return a->s.real() > b->s.real(); });
    out.rate = std::min(p.gamma, -bound.front()->s.real());
    const double tol = spectral::kClassifyTolerance * p.J;
    if (bound.size() == 2 && std::abs(bound[0]->s.real() - bound[1]->s.real()) < tol &&
        std::abs(bound[0]->s.imag() - bound[1]->s.imag()) > tol) {
        out.channel = Channel::BoundPoleOscillating;
        out.frequency = std::abs(bound[0]->s.imag() - bound[1]->s.imag());
    } else {
        out.channel = Channel::BoundPole;
    }
    return out;
}

} // namespace nhbath::inversion
