// model.hpp — physical parameters and spectral bookkeeping types

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include "nhbath/errors.hpp"

namespace nhbath {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Emitter at the edge of a semi-infinite lattice with uniform loss.
// All rates share the unit of J (J = 1 by default).
struct ModelParams {
    double g0{0.0};           // atom-photon coupling
    double J{1.0};            // hopping rate
    double gamma{0.0};        // uniform photon loss rate
    double delta_omega0{0.0}; // emitter detuning from the cavity resonance

    // Normalized coupling g0^2 / (2 J^2); always derived, never stored.
    double sigma() const { return g0 * g0 / (2.0 * J * J); }

    ModelParams with_gamma(double g) const {
        ModelParams p = *this;
        p.gamma = g;
        return p;
    }

    bool resonant() const { return delta_omega0 == 0.0; }

    void validate() const {
        if (!std::isfinite(g0) || !std::isfinite(J) || !std::isfinite(gamma) ||
            !std::isfinite(delta_omega0))
            throw Error(ErrorCode::InvalidParams, "parameters must be finite");
        if (g0 < 0.0) throw Error(ErrorCode::InvalidParams, "g0 must be >= 0");
        if (J <= 0.0) throw Error(ErrorCode::InvalidParams, "J must be > 0");
        if (gamma < 0.0) throw Error(ErrorCode::InvalidParams, "gamma must be >= 0");
    }

    // Pole-based quantities need a coupled emitter.
    void validate_coupled() const {
        validate();
        if (g0 <= 0.0) throw Error(ErrorCode::InvalidParams, "g0 must be > 0");
    }
};

enum class Sheet { First, Second };

enum class StateKind { Bound, Resonant, AntiResonant };

enum class Regime { Weak, Moderate, Strong };

enum class EpKind { Physical, Virtual };

constexpr std::string_view to_string(Sheet s) {
    return s == Sheet::First ? "first" : "second";
}

constexpr std::string_view to_string(StateKind k) {
    switch (k) {
    case StateKind::Bound: return "bound";
    case StateKind::Resonant: return "resonant";
    case StateKind::AntiResonant: return "anti-resonant";
    }
    return "?";
}

constexpr std::string_view to_string(Regime r) {
    switch (r) {
    case Regime::Weak: return "weak";
    case Regime::Moderate: return "moderate";
    case Regime::Strong: return "strong";
    }
    return "?";
}

constexpr std::string_view to_string(EpKind k) {
    return k == EpKind::Physical ? "physical" : "virtual";
}

// A root of the pole equation with its sheet, Siegert classification and residue.
struct Pole {
    cplx s;                      // Laplace variable
    cplx z;                      // complex energy, z = i s
    cplx k;                      // Bloch wavenumber, Re(k) in (-pi, pi]
    Sheet sheet{Sheet::First};
    StateKind kind{StateKind::Bound};
    std::optional<cplx> residue; // empty when the pole is (nearly) double
    bool contributes{false};     // picked up by the deformed Bromwich contour
    bool on_boundary{false};     // sits on the cut within the classification tolerance
    bool degenerate_quadratic{false}; // sigma = 1/2: single root of the linear equation
};

struct EpRecord {
    double gamma_ep{0.0};
    cplx s_ep;
    EpKind kind{EpKind::Physical};
    Regime regime{Regime::Weak};
    bool on_boundary{false};
};

} // namespace nhbath
