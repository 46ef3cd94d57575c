// lattice_dynamics.hpp — direct-integration oracles for the emitter amplitude
//
// Three independent routes: the truncated real-space lattice, the discretized
// momentum-space (Friedrichs-Lee) form, and the single-excitation Lindblad master
// equation on a small lattice. None of them touches the spectral machinery.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "nhbath/errors.hpp"
#include "nhbath/model.hpp"

namespace nhbath::lattice {

using State = std::vector<cplx>;

struct TimeSeries {
    std::vector<double> t;
    std::vector<cplx> c_a;
    std::vector<double> p_s;         // |c_a|^2
    std::vector<double> b_norm;      // photon-sector norm
    std::vector<double> loss_accum;  // probability lost to the bath, integrated
};

enum class Boundary { HardWall, Absorbing };

struct LatticeConfig {
    std::size_t n_sites{150};
    double t_max{50.0};
    double rel_tol{1e-10};
    double abs_tol{1e-12};
    Boundary boundary{Boundary::HardWall};
    double margin{50.0};           // sites beyond the 2 J t_max light cone
    bool allow_reflection{false};  // skip the light-cone check (small-lattice comparisons)
    std::size_t absorbing_layer{20};
    double absorbing_strength{2.0}; // extra loss reached at the last site, J

    static LatticeConfig for_horizon(double t_max, double J = 1.0) {
        LatticeConfig c;
        c.t_max = t_max;
        c.n_sites = static_cast<std::size_t>(std::ceil(2.0 * J * t_max)) + 50;
        return c;
    }
};

namespace detail {

inline void check_grid(const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw Error(ErrorCode::InvalidParams, "empty time grid");
    if (t_grid.front() < 0.0) throw Error(ErrorCode::InvalidParams, "negative time");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw Error(ErrorCode::InvalidParams, "time grid must be strictly increasing");
}

// Integrates x' = f(x) with a controlled Dormand-Prince stepper, calling
// observe(x, t) at each grid time. A grid that starts after 0 is reached silently.
template <class System, class Observer>
void integrate_on_grid(System system, State x, const std::vector<double>& t_grid, double rel_tol,
                       double abs_tol, Observer observe) {
    namespace odeint = boost::numeric::odeint;
    std::vector<double> times;
    times.reserve(t_grid.size() + 1);
    const bool prepend = t_grid.front() > 0.0;
    if (prepend) times.push_back(0.0);
    times.insert(times.end(), t_grid.begin(), t_grid.end());

    auto stepper = odeint::make_controlled(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
    std::size_t index = 0;
    auto observer = [&](const State& state, double t) {
        if (!(prepend && index == 0)) observe(state, t);
        ++index;
    };
    const double dt0 = std::min(1e-3, times.size() > 1 ? times[1] - times[0] : 1e-3);
    try {
        odeint::integrate_times(stepper, system, x, times.begin(), times.end(), dt0, observer,
                                odeint::max_step_checker(10000000));
    } catch (const odeint::odeint_error& e) {
        throw Error(ErrorCode::ToleranceNotMet, e.what());
    }
}

} // namespace detail

inline std::vector<double> site_losses(const ModelParams& p, const LatticeConfig& config) {
    std::vector<double> loss(config.n_sites, p.gamma);
    if (config.boundary == Boundary::Absorbing) {
        const std::size_t layer = std::min(config.absorbing_layer, config.n_sites);
        for (std::size_t i = 0; i < layer; ++i) {
            const std::size_t n = config.n_sites - layer + i;
            loss[n] += config.absorbing_strength * p.J * static_cast<double>(i + 1) /
                       static_cast<double>(layer);
        }
    }
    return loss;
}

// i c' = dw c + g0 b1;  i b1' = g0 c - J b2 - i gamma b1;
// i bn' = -J (b_{n+1} + b_{n-1}) - i gamma bn.
inline TimeSeries evolve_lattice(const ModelParams& p, const LatticeConfig& config,
                                 const std::vector<double>& t_grid) {
    p.validate();
    detail::check_grid(t_grid);
    if (config.n_sites < 2) throw Error(ErrorCode::InvalidParams, "n_sites must be >= 2");
    if (t_grid.back() > config.t_max * (1.0 + 1e-12))
        throw Error(ErrorCode::InvalidParams, "time grid exceeds t_max");
    if (config.boundary == Boundary::HardWall && !config.allow_reflection &&
        static_cast<double>(config.n_sites) < 2.0 * p.J * config.t_max + config.margin)
        throw Error(ErrorCode::ReflectionRisk, "lattice too short for t_max; wavefront would reflect");

    const std::size_t n = config.n_sites;
    const std::vector<double> loss = site_losses(p, config);
    const double g0 = p.g0, J = p.J, dw = p.delta_omega0;

    // State: [c_a, b_1 .. b_n, p_t]; p_t is carried in the real part.
    auto system = [&](const State& x, State& dxdt, double) {
        const cplx c = x[0];
        dxdt[0] = -I * (dw * c + g0 * x[1]);
        double drain = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            const cplx left = (k == 1) ? cplx{0.0, 0.0} : x[k - 1];
            const cplx right = (k == n) ? cplx{0.0, 0.0} : x[k + 1];
            cplx h = -J * (left + right) - I * loss[k - 1] * x[k];
            if (k == 1) h = g0 * c - J * right - I * loss[0] * x[1];
            dxdt[k] = -I * h;
            drain += 2.0 * loss[k - 1] * std::norm(x[k]);
        }
        dxdt[n + 1] = drain;
    };

    State x0(n + 2, cplx{0.0, 0.0});
    x0[0] = 1.0;
    TimeSeries out;
    detail::integrate_on_grid(system, x0, t_grid, config.rel_tol, config.abs_tol,
                              [&](const State& x, double t) {
                                  double photons = 0.0;
                                  for (std::size_t k = 1; k <= n; ++k) photons += std::norm(x[k]);
                                  out.t.push_back(t);
                                  out.c_a.push_back(x[0]);
                                  out.p_s.push_back(std::norm(x[0]));
                                  out.b_norm.push_back(photons);
                                  out.loss_accum.push_back(x[n + 1].real());
                              });
    return out;
}

struct MomentumConfig {
    std::size_t n_modes{1024};
    double rel_tol{1e-10};
    double abs_tol{1e-12};
};

// Midpoint discretization of k in (0, pi): i c' = dw c + sum dk g(k) c_k,
// i c_k' = w(k) c_k + g(k) c, w(k) = -2J cos k - i gamma, g(k) = sqrt(2/pi) g0 sin k.
inline TimeSeries evolve_momentum(const ModelParams& p, const MomentumConfig& config,
                                  const std::vector<double>& t_grid) {
    p.validate();
    detail::check_grid(t_grid);
    if (config.n_modes < 64) throw Error(ErrorCode::InvalidParams, "n_modes must be >= 64");

    const std::size_t m = config.n_modes;
    const double dk = kPi / static_cast<double>(m);
    std::vector<cplx> omega(m);
    std::vector<double> coupling(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double k = (static_cast<double>(j) + 0.5) * dk;
        omega[j] = cplx{-2.0 * p.J * std::cos(k), -p.gamma};
        coupling[j] = std::sqrt(2.0 / kPi) * p.g0 * std::sin(k);
    }
    const double dw = p.delta_omega0, gamma = p.gamma;

    auto system = [&](const State& x, State& dxdt, double) {
        const cplx c = x[0];
        cplx feed{0.0, 0.0};
        double modes = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            feed += dk * coupling[j] * x[j + 1];
            dxdt[j + 1] = -I * (omega[j] * x[j + 1] + coupling[j] * c);
            modes += dk * std::norm(x[j + 1]);
        }
        dxdt[0] = -I * (dw * c + feed);
        dxdt[m + 1] = 2.0 * gamma * modes;
    };

    State x0(m + 2, cplx{0.0, 0.0});
    x0[0] = 1.0;
    TimeSeries out;
    detail::integrate_on_grid(system, x0, t_grid, config.rel_tol, config.abs_tol,
                              [&](const State& x, double t) {
                                  double modes = 0.0;
                                  for (std::size_t j = 0; j < m; ++j) modes += dk * std::norm(x[j + 1]);
                                  out.t.push_back(t);
                                  out.c_a.push_back(x[0]);
                                  out.p_s.push_back(std::norm(x[0]));
                                  out.b_norm.push_back(modes);
                                  out.loss_accum.push_back(x[m + 1].real());
                              });
    return out;
}

inline constexpr std::size_t kMaxLindbladSites = 12;

struct LindbladSeries {
    // c_a holds sqrt(rho_ee); the phase of the amplitude is not recoverable from rho.
    TimeSeries populations;
    std::vector<double> trace;
    std::vector<double> hermiticity_error;
    std::vector<double> min_eigenvalue;
};

struct LindbladConfig {
    double rel_tol{1e-10};
    double abs_tol{1e-12};
};

// Dense density matrix on {|e,0>, |g,1_1> .. |g,1_n>, |g,0>}:
// rho' = -i (H_nh rho - rho H_nh^dag) + 2 gamma sum_n rho_nn |g,0><g,0|.
inline LindbladSeries evolve_lindblad(const ModelParams& p, std::size_t n_sites,
                                      const std::vector<double>& t_grid,
                                      const LindbladConfig& config = {}) {
    p.validate();
    detail::check_grid(t_grid);
    if (n_sites > kMaxLindbladSites)
        throw Error(ErrorCode::DimensionTooLarge, "Lindblad route is capped at 12 sites");
    if (n_sites < 1) throw Error(ErrorCode::InvalidParams, "n_sites must be >= 1");

    const Eigen::Index dim = static_cast<Eigen::Index>(n_sites) + 2;
    const Eigen::Index ground = dim - 1;
    Eigen::MatrixXcd h_nh = Eigen::MatrixXcd::Zero(dim, dim);
    h_nh(0, 0) = p.delta_omega0;
    h_nh(0, 1) = h_nh(1, 0) = p.g0;
    for (Eigen::Index k = 1; k <= static_cast<Eigen::Index>(n_sites); ++k) {
        h_nh(k, k) = cplx{0.0, -p.gamma};
        if (k < static_cast<Eigen::Index>(n_sites)) h_nh(k, k + 1) = h_nh(k + 1, k) = -p.J;
    }
    const Eigen::MatrixXcd h_dag = h_nh.adjoint();
    const double gamma = p.gamma;

    auto system = [&](const State& x, State& dxdt, double) {
        Eigen::Map<const Eigen::MatrixXcd> rho(x.data(), dim, dim);
        Eigen::Map<Eigen::MatrixXcd> drho(dxdt.data(), dim, dim);
        drho.noalias() = -I * (h_nh * rho);
        drho.noalias() += I * (rho * h_dag);
        double jumps = 0.0;
        for (Eigen::Index k = 1; k <= static_cast<Eigen::Index>(n_sites); ++k)
            jumps += rho(k, k).real();
        drho(ground, ground) += 2.0 * gamma * jumps;
    };

    State x0(static_cast<std::size_t>(dim * dim), cplx{0.0, 0.0});
    x0[0] = 1.0;
    LindbladSeries out;
    detail::integrate_on_grid(system, x0, t_grid, config.rel_tol, config.abs_tol,
                              [&](const State& x, double t) {
                                  Eigen::Map<const Eigen::MatrixXcd> rho(x.data(), dim, dim);
                                  double photons = 0.0;
                                  for (Eigen::Index k = 1; k <= static_cast<Eigen::Index>(n_sites); ++k)
                                      photons += rho(k, k).real();
                                  const double ree = rho(0, 0).real();
                                  TimeSeries& pop = out.populations;
                                  pop.t.push_back(t);
                                  pop.c_a.push_back(std::sqrt(std::max(ree, 0.0)));
                                  pop.p_s.push_back(ree);
                                  pop.b_norm.push_back(photons);
                                  pop.loss_accum.push_back(rho(ground, ground).real());
                                  out.trace.push_back(rho.trace().real());
                                  out.hermiticity_error.push_back((rho - rho.adjoint()).cwiseAbs().maxCoeff());
                                  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
                                  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
                                  out.min_eigenvalue.push_back(eig.eigenvalues().minCoeff());
                              });
    return out;
}

struct SiegertProfile {
    cplx c_a;
    std::vector<cplx> b;     // b_n = exp(i k n), n = 1 .. n_sites
    double max_residual{0.0}; // eigen-equation residual relative to the local amplitude scale
};

// Siegert eigenvector of H_nh for a pole: plane wave with complex Bloch number k.
inline SiegertProfile siegert_profile(const Pole& pole, const ModelParams& p, std::size_t n_sites) {
    p.validate();
    if (n_sites < 2) throw Error(ErrorCode::InvalidParams, "n_sites must be >= 2");
    SiegertProfile out;
    const cplx z = pole.z;
    auto b_at = [&](std::size_t n) { return std::exp(I * pole.k * static_cast<double>(n)); };
    out.b.resize(n_sites);
    for (std::size_t n = 1; n <= n_sites; ++n) out.b[n - 1] = b_at(n);
    out.c_a = p.g0 * out.b[0] / (z - p.delta_omega0);

    const double scale = std::abs(z) + std::abs(p.delta_omega0) + p.g0 + 2.0 * p.J + p.gamma;
    auto relative = [&](cplx r, double amplitude) { return std::abs(r) / (scale * amplitude); };

    double worst = relative(z * out.c_a - p.delta_omega0 * out.c_a - p.g0 * out.b[0],
                            std::max(std::abs(out.c_a), std::abs(out.b[0])));
    const cplx b2 = b_at(2);
    worst = std::max(worst, relative(z * out.b[0] - (p.g0 * out.c_a - p.J * b2 - I * p.gamma * out.b[0]),
                                     std::max({std::abs(out.c_a), std::abs(out.b[0]), std::abs(b2)})));
    for (std::size_t n = 2; n <= n_sites; ++n) {
        const cplx bn = b_at(n), up = b_at(n + 1), down = b_at(n - 1);
        const cplx r = z * bn - (-p.J * (up + down) - I * p.gamma * bn);
        worst = std::max(worst, relative(r, std::max({std::abs(bn), std::abs(up), std::abs(down)})));
    }
    out.max_residual = worst;
    return out;
}

} // namespace nhbath::lattice
