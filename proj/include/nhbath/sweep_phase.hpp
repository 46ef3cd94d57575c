// sweep_phase.hpp — pole trajectories in gamma, phase maps and the optimal loss rate

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nhbath/analysis.hpp"
#include "nhbath/errors.hpp"
#include "nhbath/laplace_inversion.hpp"
#include "nhbath/model.hpp"
#include "nhbath/spectral_core.hpp"

namespace nhbath::sweep {

struct GammaRange {
    double lo{0.0};
    double hi{1.0};
    std::size_t n{2};

    std::vector<double> values() const {
        if (n < 2) throw Error(ErrorCode::InvalidParams, "gamma grid needs n >= 2");
        if (!(hi > lo)) throw Error(ErrorCode::InvalidParams, "gamma grid must be increasing");
        if (lo < 0.0) throw Error(ErrorCode::InvalidParams, "gamma must be >= 0");
        return analysis::linspace(lo, hi, n);
    }
};

struct Census {
    std::size_t n_bound{0};
    std::size_t n_resonant{0};
    std::size_t n_antiresonant{0};

    std::size_t total() const { return n_bound + n_resonant + n_antiresonant; }
    bool operator==(const Census&) const = default;
};

inline Census census(const std::vector<Pole>& poles) {
    Census c;
    for (const Pole& pole : poles) {
        switch (pole.kind) {
        case StateKind::Bound: ++c.n_bound; break;
        case StateKind::Resonant: ++c.n_resonant; break;
        case StateKind::AntiResonant: ++c.n_antiresonant; break;
        }
    }
    return c;
}

enum class EventKind { SheetCrossing, KindChange, Coalescence };

constexpr std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::SheetCrossing: return "sheet-crossing";
    case EventKind::KindChange: return "kind-change";
    case EventKind::Coalescence: return "coalescence";
    }
    return "?";
}

struct TrajectoryEvent {
    EventKind kind{EventKind::SheetCrossing};
    double gamma{0.0};
    double bracket{0.0};          // width of the final bisection bracket
    Census before, after;
    cplx s;                       // crossing pole, or the double root
    std::optional<Sheet> sheet;   // common sheet of coalescing poles
};

struct PoleTrajectory {
    std::vector<double> gamma_grid;
    std::vector<std::vector<Pole>> poles_at_gamma; // index within a row is the tracked label
    std::vector<TrajectoryEvent> events;

    std::vector<TrajectoryEvent> of_kind(EventKind kind) const {
        std::vector<TrajectoryEvent> out;
        for (const TrajectoryEvent& e : events)
            if (e.kind == kind) out.push_back(e);
        return out;
    }
    std::vector<TrajectoryEvent> crossings() const { return of_kind(EventKind::SheetCrossing); }
    std::vector<TrajectoryEvent> coalescences() const { return of_kind(EventKind::Coalescence); }

    // Largest |ds|/dgamma of a tracked label over grid intervals farther than
    // `exclusion` from every coalescence.
    double max_speed(double exclusion) const {
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < gamma_grid.size(); ++i) {
            const double g0 = gamma_grid[i], g1 = gamma_grid[i + 1];
            bool near_ep = false;
            for (const TrajectoryEvent& e : events)
                if (e.kind == EventKind::Coalescence && e.gamma > g0 - exclusion && e.gamma < g1 + exclusion)
                    near_ep = true;
            if (near_ep) continue;
            const auto& a = poles_at_gamma[i];
            const auto& b = poles_at_gamma[i + 1];
            if (a.size() != b.size()) continue;
            for (std::size_t j = 0; j < a.size(); ++j)
                worst = std::max(worst, std::abs(b[j].s - a[j].s) / (g1 - g0));
        }
        return worst;
    }
};

struct SweepOptions {
    double event_tol{1e-10}; // bisection bracket in gamma, J
};

namespace detail {

inline bool oscillatory_pair(const std::vector<Pole>& poles) {
    const cplx d = poles[0].s - poles[1].s;
    return std::abs(d.imag()) > std::abs(d.real());
}

// Orders `current` to follow `previous` by nearest neighbour.
inline void track(const std::vector<Pole>& previous, std::vector<Pole>& current) {
    if (previous.size() != 2 || current.size() != 2) return;
    const double keep = std::abs(previous[0].s - current[0].s) + std::abs(previous[1].s - current[1].s);
    const double swap = std::abs(previous[0].s - current[1].s) + std::abs(previous[1].s - current[0].s);
    if (swap < keep) std::swap(current[0], current[1]);
}

inline void freeze_labels(std::vector<Pole>& poles) {
    std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) {
        if (a.s.imag() != b.s.imag()) return a.s.imag() > b.s.imag();
        return a.s.real() > b.s.real();
    });
}

template <class Pred>
std::pair<double, double> bisect(double a, double b, double tol, Pred same_as_left) {
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        if (same_as_left(m)) a = m;
        else b = m;
    }
    return {a, b};
}

} // namespace detail

// Pole positions over a gamma grid with continuity-tracked labels. Census changes
// and (at zero detuning) coalescences are located by bisection.
inline PoleTrajectory sweep_gamma(double g0, double J, const GammaRange& range,
                                  double delta_omega0 = 0.0, const SweepOptions& opt = {}) {
    const ModelParams base{.g0 = g0, .J = J, .gamma = range.lo, .delta_omega0 = delta_omega0};
    base.validate_coupled();
    PoleTrajectory out;
    out.gamma_grid = range.values();
    const double tol = opt.event_tol * J;
    auto poles_at = [&](double gamma) { return spectral::find_poles(base.with_gamma(gamma)); };

    for (std::size_t i = 0; i < out.gamma_grid.size(); ++i) {
        std::vector<Pole> current = poles_at(out.gamma_grid[i]);
        if (i == 0) {
            out.poles_at_gamma.push_back(std::move(current));
            continue;
        }
        const double ga = out.gamma_grid[i - 1], gb = out.gamma_grid[i];
        const std::vector<Pole>& previous = out.poles_at_gamma.back();

        bool coalesced = false;
        if (delta_omega0 == 0.0 && previous.size() == 2 && current.size() == 2 &&
            detail::oscillatory_pair(previous) != detail::oscillatory_pair(current)) {
            const bool left = detail::oscillatory_pair(previous);
            auto [a, b] = detail::bisect(ga, gb, tol, [&](double g) {
                const std::vector<Pole> p = poles_at(g);
                return p.size() == 2 && detail::oscillatory_pair(p) == left;
            });
            TrajectoryEvent e;
            e.kind = EventKind::Coalescence;
            e.gamma = 0.5 * (a + b);
            e.bracket = b - a;
            const std::vector<Pole> at = poles_at(e.gamma);
            e.before = census(previous);
            e.after = census(current);
            e.s = 0.5 * (at[0].s + at[1].s);
            if (at[0].sheet == at[1].sheet) e.sheet = at[0].sheet;
            out.events.push_back(e);
            coalesced = true;
        }

        const Census ca = census(previous), cb = census(current);
        if (!(ca == cb)) {
            auto [a, b] = detail::bisect(ga, gb, tol, [&](double g) { return census(poles_at(g)) == ca; });
            TrajectoryEvent e;
            e.kind = ca.n_bound != cb.n_bound ? EventKind::SheetCrossing : EventKind::KindChange;
            e.gamma = 0.5 * (a + b);
            e.bracket = b - a;
            e.before = ca;
            e.after = cb;
            const std::vector<Pole> at = poles_at(e.gamma);
            const ModelParams pe = base.with_gamma(e.gamma);
            double best = 1e300;
            for (const Pole& pole : at) {
                const double d = inversion::detail::distance_to_cut(pole.s, pe);
                if (d < best) {
                    best = d;
                    e.s = pole.s;
                }
            }
            out.events.push_back(e);
        }

        if (coalesced) detail::freeze_labels(current);
        else detail::track(previous, current);
        out.poles_at_gamma.push_back(std::move(current));
    }
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const TrajectoryEvent& a, const TrajectoryEvent& b) { return a.gamma < b.gamma; });
    return out;
}

// Exponent of |s1 - s2| ~ (gamma - gamma_ep)^p just above the coalescence.
inline double ep_unfolding_exponent(double g0, double J, double width = 0.05, std::size_t n = 40) {
    const ModelParams p{.g0 = g0, .J = J};
    const std::optional<EpRecord> ep = spectral::detect_ep(p);
    if (!ep) throw Error(ErrorCode::InvalidParams, "no coalescence for g0 <= J");
    std::vector<double> offsets = analysis::logspace(1e-6 * width * J, width * J, n);
    std::vector<double> gaps;
    for (double d : offsets) {
        const std::vector<Pole> poles = spectral::find_poles(p.with_gamma(ep->gamma_ep + d));
        gaps.push_back(std::abs(poles[0].s - poles[1].s));
    }
    return analysis::power_law_exponent(offsets, gaps);
}

inline double asymptotic_rate(const ModelParams& p) { return inversion::asymptotic_model(p).rate; }

struct OptimumReport {
    double gamma_star{0.0};
    double rate_star{0.0};
    double grid_gamma{0.0};      // best grid sample before refinement
    double grid_rate{0.0};
    Regime regime{Regime::Weak};
    double expected_gamma{0.0};  // gamma_c1 (weak, moderate) or gamma_c2 (strong)
    std::string expected_label;
    bool matches_expected{false};
};

struct OptimumOptions {
    std::size_t grid_points{401};
};

// Maximizes the asymptotic decay rate over gamma: grid scan, then golden-section
// refinement on the bracket around the best sample. The regime expectation is
// compared against the result, never substituted for it.
inline OptimumReport optimal_dissipation(double g0, double J, double lo, double hi, double resolution,
                                         double delta_omega0 = 0.0, const OptimumOptions& opt = {}) {
    const ModelParams base{.g0 = g0, .J = J, .gamma = lo, .delta_omega0 = delta_omega0};
    base.validate_coupled();
    spectral::require_resonant(base);
    if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidParams, "resolution must be > 0");
    auto rate = [&](double gamma) { return asymptotic_rate(base.with_gamma(gamma)); };

    const std::vector<double> grid = GammaRange{lo, hi, std::max<std::size_t>(opt.grid_points, 3)}.values();
    std::size_t best = 0;
    double best_rate = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = rate(grid[i]);
        if (r > best_rate) {
            best_rate = r;
            best = i;
        }
    }
    OptimumReport out;
    out.grid_gamma = grid[best];
    out.grid_rate = best_rate;

    double a = grid[best == 0 ? 0 : best - 1];
    double b = grid[std::min(best + 1, grid.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = rate(x1), f2 = rate(x2);
    while (b - a > resolution) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = rate(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = rate(x1);
        }
    }
    out.gamma_star = 0.5 * (a + b);
    out.rate_star = rate(out.gamma_star);
    if (out.grid_rate > out.rate_star) {
        out.gamma_star = out.grid_gamma;
        out.rate_star = out.grid_rate;
    }

    const spectral::CriticalRates crit = spectral::critical_gammas(base);
    out.regime = spectral::coupling_regime(base).regime;
    if (out.regime == Regime::Strong && crit.gamma_c2) {
        out.expected_gamma = *crit.gamma_c2;
        out.expected_label = "gamma_c2";
    } else {
        out.expected_gamma = crit.gamma_c1;
        out.expected_label = "gamma_c1";
    }
    out.matches_expected = std::abs(out.gamma_star - out.expected_gamma) <= resolution;
    return out;
}

struct RegimeReport {
    Regime regime{Regime::Weak};
    bool regime_boundary{false};
    double gamma_c1{0.0};
    std::optional<double> gamma_c2;
    std::optional<EpRecord> ep;
    double optimal_gamma{0.0};
    double optimal_rate{0.0};
    bool optimum_matches_expected{false};
    std::vector<std::pair<double, inversion::AsymptoticModel>> channel_map;
};

inline RegimeReport regime_report(double g0, double J, const GammaRange& range, double resolution = 1e-6) {
    const ModelParams base{.g0 = g0, .J = J};
    base.validate_coupled();
    RegimeReport out;
    const spectral::RegimeClass rc = spectral::coupling_regime(base);
    out.regime = rc.regime;
    out.regime_boundary = rc.on_boundary;
    const spectral::CriticalRates crit = spectral::critical_gammas(base);
    out.gamma_c1 = crit.gamma_c1;
    out.gamma_c2 = crit.gamma_c2;
    out.ep = spectral::detect_ep(base);
    for (double gamma : range.values())
        out.channel_map.emplace_back(gamma, inversion::asymptotic_model(base.with_gamma(gamma)));
    const OptimumReport opt = optimal_dissipation(g0, J, range.lo, range.hi, resolution);
    out.optimal_gamma = opt.gamma_star;
    out.optimal_rate = opt.rate_star;
    out.optimum_matches_expected = opt.matches_expected;
    return out;
}

struct PhaseCell {
    double g0{0.0};
    double gamma{0.0};
    Regime regime{Regime::Weak};
    bool regime_boundary{false};
    std::size_t n_bound{0};
    std::size_t n_resonant{0};
    std::size_t n_antiresonant{0};
    std::size_t n_roots{0};
    inversion::Channel channel{inversion::Channel::HankelEnvelope};
    double rate{0.0};
};

struct PhaseDiagram {
    std::vector<double> g0;
    std::vector<double> gamma;
    std::vector<PhaseCell> cells; // g0-major

    const PhaseCell& at(std::size_t i_g0, std::size_t i_gamma) const {
        return cells[i_g0 * gamma.size() + i_gamma];
    }
};

inline PhaseCell phase_cell(double g0, double gamma, double J) {
    const ModelParams p{.g0 = g0, .J = J, .gamma = gamma};
    p.validate_coupled();
    PhaseCell cell;
    cell.g0 = g0;
    cell.gamma = gamma;
    const spectral::RegimeClass rc = spectral::coupling_regime(p);
    cell.regime = rc.regime;
    cell.regime_boundary = rc.on_boundary;
    const std::vector<Pole> poles = spectral::find_poles(p);
    const Census c = census(poles);
    cell.n_bound = c.n_bound;
    cell.n_resonant = c.n_resonant;
    cell.n_antiresonant = c.n_antiresonant;
    cell.n_roots = poles.size();
    const inversion::AsymptoticModel model = inversion::asymptotic_model(p);
    cell.channel = model.channel;
    cell.rate = model.rate;
    return cell;
}

inline PhaseDiagram phase_diagram(const std::vector<double>& g0_grid, const std::vector<double>& gamma_grid,
                                  double J) {
    if (g0_grid.empty() || gamma_grid.empty())
        throw Error(ErrorCode::InvalidParams, "phase diagram grids must be non-empty");
    PhaseDiagram out;
    out.g0 = g0_grid;
    out.gamma = gamma_grid;
    out.cells.reserve(g0_grid.size() * gamma_grid.size());
    for (double g0 : g0_grid)
        for (double gamma : gamma_grid) out.cells.push_back(phase_cell(g0, gamma, J));
    return out;
}

} // namespace nhbath::sweep
