// quadrature.hpp — globally adaptive Gauss-Kronrod (7/15) for complex integrands

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <vector>

namespace nhbath::quad {

template <class T>
struct Result {
    T value{};
    double error{0.0};
    std::size_t intervals{0};
    bool converged{false};
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights pair with the odd-indexed Kronrod nodes (and the centre).
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
    double a, b;
    T value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T>
inline double magnitude(const T& v) {
    return std::abs(v);
}

template <class T, class F>
Segment<T> gk15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(centre);
    T kronrod = kKronrodWeights[7] * fc;
    T gauss = kGaussWeights[3] * fc;
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const T pair = f(centre - dx) + f(centre + dx);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, magnitude(kronrod - gauss)};
}

} // namespace detail

// Bisects the worst interval until the summed error estimate drops below
// max(abs_tol, rel_tol * |I|) or max_intervals is reached.
template <class F>
auto integrate(F f, double a, double b, double abs_tol, double rel_tol = 0.0,
               std::size_t max_intervals = 4000) {
    using T = decltype(f(a));
    using Seg = detail::Segment<T>;
    Result<T> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<Seg> heap;
    Seg first = detail::gk15<T>(f, a, b);
    T total = first.value;
    double error = first.error;
    heap.push(first);
    while (error > std::max(abs_tol, rel_tol * detail::magnitude(total)) &&
           heap.size() < max_intervals) {
        Seg worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            heap.push(worst);
            break;
        }
        Seg left = detail::gk15<T>(f, worst.a, mid);
        Seg right = detail::gk15<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    T sum{};
    double err = 0.0;
    std::vector<Seg> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const Seg& l, const Seg& r) { return l.a < r.a; });
    for (const Seg& s : segs) {
        sum += s.value;
        err += s.error;
    }
    out.value = sum;
    out.error = err;
    out.intervals = segs.size();
    out.converged = err <= std::max(abs_tol, rel_tol * detail::magnitude(sum));
    return out;
}

} // namespace nhbath::quad
