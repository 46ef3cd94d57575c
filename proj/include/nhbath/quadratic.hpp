// quadratic.hpp — cancellation-free roots of a complex quadratic

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>

namespace nhbath {

struct QuadraticRoots {
    // roots[0] = (-b - sqrt(disc)) / 2a, roots[1] = (-b + sqrt(disc)) / 2a,
    // principal square root; only roots[0] is set when count == 1.
    std::array<std::complex<double>, 2> roots{};
    std::size_t count{0};
    bool linear{false};       // leading coefficient dropped below the tolerance
    bool double_root{false};  // discriminant indistinguishable from zero
};

// Solves a x^2 + b x + c = 0. The larger-magnitude root is formed first and
// the other follows from the product of roots, so neither suffers cancellation.
// |a| < linear_tol * (|b| + |c|) degrades to the linear equation. A discriminant
// within its own rounding bound is taken as exactly zero.
inline QuadraticRoots solve_quadratic(std::complex<double> a, std::complex<double> b,
                                      std::complex<double> c, double linear_tol = 1e-12) {
    using C = std::complex<double>;
    QuadraticRoots out;
    const double scale = std::abs(b) + std::abs(c);
    if (std::abs(a) <= linear_tol * (scale > 0.0 ? scale : 1.0)) {
        out.linear = true;
        if (b != C{0.0, 0.0}) {
            out.roots[0] = -c / b;
            out.count = 1;
        }
        return out;
    }

    C disc = b * b - 4.0 * a * c;
    const double disc_bound =
        8.0 * std::numeric_limits<double>::epsilon() * (std::norm(b) + 4.0 * std::abs(a * c));
    if (std::abs(disc) <= disc_bound) {
        disc = C{0.0, 0.0};
        out.double_root = true;
    }
    const C sq = std::sqrt(disc);
    const bool plus = (std::real(std::conj(b) * sq) >= 0.0);
    const C q = plus ? -0.5 * (b + sq) : -0.5 * (b - sq);

    C big = q / a;
    C small = (q != C{0.0, 0.0}) ? c / q : C{0.0, 0.0};
    if (out.double_root) small = big;
    // q built with +sq gives the "minus" root first.
    if (plus) {
        out.roots = {big, small};
    } else {
        out.roots = {small, big};
    }
    out.count = 2;
    return out;
}

} // namespace nhbath
