// oracles.hpp — independent reference evaluations used by the test suites
//
// Nothing here calls into nhbath::spectral; each oracle rebuilds its quantity
// from a different representation.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>

#include "nhbath/model.hpp"

namespace oracle {

using nhbath::cplx;
using nhbath::ModelParams;
using ldc = std::complex<long double>;

// Self-energy from its momentum integral,
//   Sigma(s) = int_0^pi dk g(k)^2 / (i s - w(k)),  g = sqrt(2/pi) g0 sin k,
// on the first sheet. The integrand is even and 2pi-periodic in k, so the
// trapezoid rule over a full period converges geometrically.
inline cplx self_energy_k_integral(cplx s, const ModelParams& p, std::size_t nodes = 1 << 14) {
    const double h = 2.0 * nhbath::kPi / static_cast<double>(nodes);
    cplx sum{0.0, 0.0};
    for (std::size_t j = 0; j < nodes; ++j) {
        const double k = h * static_cast<double>(j);
        const double g = std::sqrt(2.0 / nhbath::kPi) * p.g0 * std::sin(k);
        const cplx omega{-2.0 * p.J * std::cos(k), -p.gamma};
        sum += g * g / (nhbath::I * s - omega);
    }
    return 0.5 * h * sum;
}

// Resolvent element written directly in the energy variable,
//   G(z) = 1 / (z - dw0 - sigma (u - sqrt(u^2 - 4J^2))),  u = z + i gamma,
// with the root that behaves like u at infinity.
inline cplx resolvent_closed_form(cplx z, const ModelParams& p) {
    const cplx u = z + nhbath::I * p.gamma;
    const cplx root = u * std::sqrt(1.0 - 4.0 * p.J * p.J / (u * u));
    return 1.0 / (z - p.delta_omega0 - p.sigma() * (u - root));
}

// Resonant-case poles (gamma +/- sqrt(gamma^2 + 4(J^2 - g0^2))) / (2 (J^2/g0^2 - 1)),
// in extended precision.
inline std::pair<ldc, ldc> resonant_poles(const ModelParams& p) {
    const long double g = p.gamma, J = p.J, g0 = p.g0;
    const ldc root = std::sqrt(ldc{g * g + 4.0L * (J * J - g0 * g0), 0.0L});
    const long double den = 2.0L * (J * J / (g0 * g0) - 1.0L);
    return {(g + root) / den, (g - root) / den};
}

// Continued amplitude whose cuts are the two horizontal rays leaving the band
// edges: first sheet outside the strip |Im s| < 2J, Re s < -gamma; second inside.
inline cplx amplitude_ray_cut(cplx s, const ModelParams& p) {
    const cplx w = s + p.gamma;
    const cplx q = std::sqrt(w - 2.0 * nhbath::I * p.J) * std::sqrt(w + 2.0 * nhbath::I * p.J);
    return 1.0 / (s + nhbath::I * p.delta_omega0 + p.sigma() * (q - w));
}

// Jump across a Hankel ray at s = -gamma - x +/- 2iJ, as the difference of
// limits from below and above the ray.
inline cplx ray_jump(double x, const ModelParams& p, bool upper, double eps = 1e-8) {
    const cplx s{-p.gamma - x, upper ? 2.0 * p.J : -2.0 * p.J};
    const cplx de{0.0, eps};
    return amplitude_ray_cut(s - de, p) - amplitude_ray_cut(s + de, p);
}

// (1/2 pi i) \oint f ds on a circle, by the trapezoid rule.
template <class F>
cplx circle_integral(F f, cplx centre, double radius, std::size_t nodes) {
    cplx sum{0.0, 0.0};
    for (std::size_t j = 0; j < nodes; ++j) {
        const double theta = 2.0 * nhbath::kPi * static_cast<double>(j) / static_cast<double>(nodes);
        const cplx offset = radius * std::exp(nhbath::I * theta);
        sum += f(centre + offset) * offset;
    }
    return sum / static_cast<double>(nodes);
}

// Laplace amplitude on an explicit sheet, built from the principal root.
inline cplx amplitude_on_sheet(cplx s, const ModelParams& p, bool second) {
    const cplx w = s + p.gamma;
    cplx q = w * std::sqrt(1.0 + 4.0 * p.J * p.J / (w * w));
    if (second) q = -q;
    return 1.0 / (s + nhbath::I * p.delta_omega0 + p.sigma() * (q - w));
}

} // namespace oracle
