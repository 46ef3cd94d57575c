// cli.hpp — run configuration, command implementations and CSV/JSON rendering

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nhbath/analysis.hpp"
#include "nhbath/errors.hpp"
#include "nhbath/laplace_inversion.hpp"
#include "nhbath/lattice_dynamics.hpp"
#include "nhbath/model.hpp"
#include "nhbath/spectral_core.hpp"
#include "nhbath/sweep_phase.hpp"

namespace nhbath::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "nhbath 0.1.0";

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"poles", "decay", "sweep", "phase-diagram", "optimal", "verify", "fig"};
    return c;
}

inline const std::vector<int>& figure_ids() {
    static const std::vector<int> ids{3, 4, 5, 6, 7, 8, 9, 10, 11, 13};
    return ids;
}

// Keys accepted in config files; the same names as the long flags.
inline const std::set<std::string>& config_keys() {
    static const std::set<std::string> k{"g0",     "J",      "gamma",  "detuning",  "tmax",   "tmin",
                                         "nsites", "nmodes", "route",  "out",       "format", "points",
                                         "gamma-max", "g0-max", "resolution", "figure"};
    return k;
}

using KeyValues = std::map<std::string, std::string>;

struct RunConfig {
    std::string command;
    std::optional<double> g0;
    double J{1.0};
    double gamma{0.0};
    double detuning{0.0};
    double tmax{50.0};
    double tmin{0.01};
    std::size_t nsites{0};      // 0: sized from tmax
    std::size_t nmodes{1024};
    std::string route{"spectral"};
    std::string out;            // empty: stdout
    std::optional<std::string> format;
    std::size_t points{0};      // 0: command default
    double gamma_max{0.0};      // 0: command default
    double g0_max{3.0};
    double resolution{1e-6};
    std::optional<int> figure;

    ModelParams params() const {
        return {.g0 = g0.value_or(0.0), .J = J, .gamma = gamma, .delta_omega0 = detuning};
    }
    std::string output_format() const {
        if (format) return *format;
        return command == "poles" || command == "optimal" || command == "verify" ? "json" : "csv";
    }
    std::size_t points_or(std::size_t fallback) const { return points ? points : fallback; }
    double gamma_max_or(double fallback) const { return gamma_max > 0.0 ? gamma_max : fallback; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw Error(ErrorCode::InvalidParams, "'" + key + "' expects a finite number, got '" + text + "'");
    return v;
}

inline std::size_t to_count(const std::string& key, const std::string& text) {
    long long v = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || v < 0)
        throw Error(ErrorCode::InvalidParams, "'" + key + "' expects a non-negative integer, got '" + text + "'");
    return static_cast<std::size_t>(v);
}

} // namespace detail

// `key = value` lines; `#` starts a comment.
inline KeyValues parse_config_text(const std::string& text) {
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::InvalidParams, "config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!config_keys().count(key))
            throw Error(ErrorCode::InvalidParams, "config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        out[key] = value;
    }
    return out;
}

inline KeyValues read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidParams, "cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

// Later layers override earlier ones.
inline KeyValues merge(const KeyValues& lower, const KeyValues& upper) {
    KeyValues out = lower;
    for (const auto& [k, v] : upper) out[k] = v;
    return out;
}

inline void validate(const RunConfig& c) {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidParams, what); };
    if (std::find(commands().begin(), commands().end(), c.command) == commands().end())
        bad("unknown command '" + c.command + "'");
    c.params().validate();
    if (c.g0 && *c.g0 < 0.0) bad("g0 must be >= 0");
    const bool needs_g0 = c.command != "fig" && c.command != "verify" && c.command != "phase-diagram";
    if (needs_g0 && !c.g0) bad("--g0 is required for '" + c.command + "'");
    const bool pole_based = c.command == "poles" || c.command == "sweep" || c.command == "optimal";
    if (pole_based && *c.g0 == 0.0) bad("g0 must be > 0 for pole-based commands");
    if (c.command == "verify" && c.g0 && *c.g0 == 0.0) bad("verify needs g0 > 0");
    if (!(c.tmin >= 0.0)) bad("tmin must be >= 0");
    if (!(c.tmax > c.tmin)) bad("tmax must exceed tmin");
    if (c.nmodes < 64) bad("nmodes must be >= 64");
    if (c.points == 1) bad("points must be >= 2");
    if (c.gamma_max < 0.0) bad("gamma-max must be > 0");
    if (!(c.g0_max > 0.0)) bad("g0-max must be > 0");
    if (!(c.resolution > 0.0)) bad("resolution must be > 0");
    static const std::set<std::string> routes{"spectral", "lattice", "momentum", "lindblad", "all"};
    if (!routes.count(c.route)) bad("route must be one of spectral|lattice|momentum|lindblad|all");
    const std::string fmt = c.output_format();
    if (fmt != "csv" && fmt != "json") bad("format must be csv or json");
    if (c.command == "fig") {
        if (!c.figure) bad("fig needs a figure id");
        if (std::find(figure_ids().begin(), figure_ids().end(), *c.figure) == figure_ids().end())
            bad("figure id must be one of 3,4,5,6,7,8,9,10,11,13");
    }
    if (c.command == "decay" && (c.route == "spectral" || c.route == "all")) {
        if (c.tmin < inversion::InversionOptions{}.t_min)
            throw Error(ErrorCode::TimeTooSmall, "spectral route needs tmin >= 0.01/J");
        if (*c.g0 == 0.0) bad("spectral route needs g0 > 0");
    }
    if ((c.command == "optimal" || c.command == "phase-diagram") && c.detuning != 0.0)
        throw Error(ErrorCode::DetunedCriticality, "'" + c.command + "' is defined at zero detuning only");
}

inline RunConfig make_config(const std::string& command, const KeyValues& kv) {
    RunConfig c;
    c.command = command;
    for (const auto& [key, value] : kv) {
        if (!config_keys().count(key)) throw Error(ErrorCode::InvalidParams, "unknown key '" + key + "'");
        if (key == "g0") c.g0 = detail::to_double(key, value);
        else if (key == "J") c.J = detail::to_double(key, value);
        else if (key == "gamma") c.gamma = detail::to_double(key, value);
        else if (key == "detuning") c.detuning = detail::to_double(key, value);
        else if (key == "tmax") c.tmax = detail::to_double(key, value);
        else if (key == "tmin") c.tmin = detail::to_double(key, value);
        else if (key == "nsites") c.nsites = detail::to_count(key, value);
        else if (key == "nmodes") c.nmodes = detail::to_count(key, value);
        else if (key == "route") c.route = value;
        else if (key == "out") c.out = value;
        else if (key == "format") c.format = value;
        else if (key == "points") c.points = detail::to_count(key, value);
        else if (key == "gamma-max") c.gamma_max = detail::to_double(key, value);
        else if (key == "g0-max") c.g0_max = detail::to_double(key, value);
        else if (key == "resolution") c.resolution = detail::to_double(key, value);
        else if (key == "figure") c.figure = static_cast<int>(detail::to_count(key, value));
    }
    validate(c);
    return c;
}

// Parameter block echoed in every JSON report; re-parses through make_config.
inline json params_json(const RunConfig& c) {
    json j;
    if (c.g0) j["g0"] = *c.g0;
    j["J"] = c.J;
    j["gamma"] = c.gamma;
    j["detuning"] = c.detuning;
    j["tmax"] = c.tmax;
    j["tmin"] = c.tmin;
    j["nsites"] = c.nsites;
    j["nmodes"] = c.nmodes;
    j["route"] = c.route;
    j["format"] = c.output_format();
    j["points"] = c.points;
    j["gamma-max"] = c.gamma_max;
    j["g0-max"] = c.g0_max;
    j["resolution"] = c.resolution;
    if (c.figure) j["figure"] = *c.figure;
    return j;
}

inline KeyValues key_values_from_json(const json& params) {
    KeyValues kv;
    for (const auto& [key, value] : params.items()) {
        if (value.is_string()) kv[key] = value.get<std::string>();
        else {
            std::ostringstream os;
            os.precision(17);
            if (value.is_number_integer() || value.is_number_unsigned()) os << value.get<long long>();
            else os << value.get<double>();
            kv[key] = os.str();
        }
    }
    return kv;
}

// ---- tabular output ----

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

struct Report {
    json params;
    json results = json::object();
    json diagnostics = json::object();
    std::vector<std::string> warnings;
    std::vector<std::string> metadata; // CSV preamble lines, without the '#'
    Table table;
    bool failed{false};                // verify: a check did not pass
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string render_csv(const Report& r) {
    std::ostringstream os;
    os << "# " << kVersion << "\n";
    for (const std::string& m : r.metadata) os << "# " << m << "\n";
    for (const std::string& w : r.warnings) os << "# warning: " << w << "\n";
    if (!r.diagnostics.empty()) os << "# diagnostics: " << r.diagnostics.dump() << "\n";
    for (std::size_t i = 0; i < r.table.header.size(); ++i) os << (i ? "," : "") << r.table.header[i];
    os << "\n";
    for (const auto& row : r.table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) os << format_double(v);
                    else if constexpr (std::is_same_v<T, long long>) os << v;
                    else if constexpr (std::is_same_v<T, std::string>) os << csv_escape(v);
                },
                row[i]);
        }
        os << "\n";
    }
    return os.str();
}

inline std::string render_json(const Report& r) {
    json j;
    j["params"] = r.params;
    j["results"] = r.results;
    j["diagnostics"] = r.diagnostics;
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

inline std::string render(const Report& r, const std::string& format) {
    return format == "json" ? render_json(r) : render_csv(r);
}

inline json error_json(ErrorCode code, const std::string& message) {
    json j;
    j["error"]["code"] = std::string(to_string(code));
    j["error"]["message"] = message;
    j["error"]["exit_code"] = is_validation_error(code) ? 2 : 3;
    return j;
}

// ---- command helpers ----

namespace detail {

inline json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json pole_json(const Pole& p) {
    json j;
    j["s"] = complex_json(p.s);
    j["z"] = complex_json(p.z);
    j["k"] = complex_json(p.k);
    j["sheet"] = std::string(to_string(p.sheet));
    j["kind"] = std::string(to_string(p.kind));
    j["contributes"] = p.contributes;
    j["on_boundary"] = p.on_boundary;
    j["degenerate_quadratic"] = p.degenerate_quadratic;
    j["residue"] = p.residue ? complex_json(*p.residue) : json(nullptr);
    return j;
}

inline std::vector<double> time_grid(const RunConfig& c, std::size_t fallback) {
    return analysis::linspace(c.tmin, c.tmax, c.points_or(fallback));
}

inline lattice::LatticeConfig lattice_config(const RunConfig& c) {
    lattice::LatticeConfig lc = lattice::LatticeConfig::for_horizon(c.tmax, c.J);
    if (c.nsites) lc.n_sites = c.nsites;
    return lc;
}

struct RouteCurve {
    std::string route;
    std::vector<double> t;
    std::vector<cplx> c_a;
    std::vector<double> norm;                  // empty for the spectral route
    std::optional<inversion::DecayDecomposition> parts;
};

inline RouteCurve run_route(const std::string& route, const ModelParams& p, const RunConfig& c,
                            const std::vector<double>& grid, std::vector<std::string>& warnings) {
    RouteCurve out;
    out.route = route;
    out.t = grid;
    auto take = [&](const lattice::TimeSeries& ts) {
        out.c_a = ts.c_a;
        for (std::size_t i = 0; i < ts.p_s.size(); ++i) out.norm.push_back(ts.p_s[i] + ts.b_norm[i]);
    };
    if (route == "spectral") {
        inversion::DecayDecomposition d = inversion::survival_amplitude_spectral(grid, p);
        out.c_a = d.total;
        for (const std::string& w : d.warnings) warnings.push_back("spectral: " + w);
        out.parts = std::move(d);
    } else if (route == "lattice") {
        take(lattice::evolve_lattice(p, lattice_config(c), grid));
    } else if (route == "momentum") {
        lattice::MomentumConfig mc;
        mc.n_modes = c.nmodes;
        take(lattice::evolve_momentum(p, mc, grid));
    } else {
        const std::size_t n = c.nsites ? c.nsites : lattice::kMaxLindbladSites;
        if (static_cast<double>(n) < 2.0 * c.J * c.tmax + 50.0)
            warnings.push_back("lindblad: " + std::to_string(n) + " sites reflect before tmax; agreement with the "
                               "open-chain routes holds only for short times");
        take(lattice::evolve_lindblad(p, n, grid).populations);
    }
    return out;
}

inline double max_deviation(const RouteCurve& a, const RouteCurve& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.c_a.size(); ++i) worst = std::max(worst, std::abs(a.c_a[i] - b.c_a[i]));
    return worst;
}

inline Cell opt_cell(std::optional<double> v) { return v ? Cell{*v} : Cell{}; }

inline void trajectory_rows(const sweep::PoleTrajectory& tr, const std::string& curve, double g0, Table& table) {
    for (std::size_t i = 0; i < tr.gamma_grid.size(); ++i) {
        const auto& row = tr.poles_at_gamma[i];
        for (std::size_t j = 0; j < row.size(); ++j) {
            const Pole& p = row[j];
            table.rows.push_back({curve, g0, tr.gamma_grid[i], static_cast<long long>(j + 1), p.s.real(),
                                  p.s.imag(), p.k.real(), p.k.imag(), std::string(to_string(p.sheet)),
                                  std::string(to_string(p.kind))});
        }
    }
}

inline const std::vector<std::string>& trajectory_header() {
    static const std::vector<std::string> h{"curve", "g0", "gamma", "label", "re_s", "im_s",
                                            "re_k",  "im_k", "sheet", "kind"};
    return h;
}

inline json events_json(const sweep::PoleTrajectory& tr) {
    json ev = json::array();
    for (const sweep::TrajectoryEvent& e : tr.events) {
        json j;
        j["kind"] = std::string(sweep::to_string(e.kind));
        j["gamma"] = e.gamma;
        j["bracket"] = e.bracket;
        j["s"] = complex_json(e.s);
        j["sheet"] = e.sheet ? json(std::string(to_string(*e.sheet))) : json(nullptr);
        j["before"] = {{"bound", e.before.n_bound}, {"resonant", e.before.n_resonant},
                       {"antiresonant", e.before.n_antiresonant}};
        j["after"] = {{"bound", e.after.n_bound}, {"resonant", e.after.n_resonant},
                      {"antiresonant", e.after.n_antiresonant}};
        ev.push_back(j);
    }
    return ev;
}

inline std::string event_line(const sweep::TrajectoryEvent& e) {
    std::string line = "event " + std::string(sweep::to_string(e.kind)) + " gamma=" + format_double(e.gamma);
    if (e.sheet) line += " sheet=" + std::string(to_string(*e.sheet));
    return line;
}

} // namespace detail

// ---- commands ----

inline Report cmd_poles(const RunConfig& c) {
    Report r;
    r.params = params_json(c);
    const ModelParams p = c.params();
    const std::vector<Pole> poles = spectral::find_poles(p);
    json list = json::array();
    r.table.header = {"label", "re_s", "im_s", "re_z", "im_z", "re_k", "im_k", "sheet", "kind",
                      "contributes", "re_residue", "im_residue"};
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const Pole& pole = poles[i];
        list.push_back(detail::pole_json(pole));
        r.table.rows.push_back({static_cast<long long>(i + 1), pole.s.real(), pole.s.imag(), pole.z.real(),
                                pole.z.imag(), pole.k.real(), pole.k.imag(), std::string(to_string(pole.sheet)),
                                std::string(to_string(pole.kind)), static_cast<long long>(pole.contributes),
                                pole.residue ? Cell{pole.residue->real()} : Cell{},
                                pole.residue ? Cell{pole.residue->imag()} : Cell{}});
        if (pole.degenerate_quadratic) r.warnings.push_back("DegenerateQuadratic: sigma = 1/2, single root");
        if (!pole.residue) r.warnings.push_back("pole " + std::to_string(i + 1) + ": residue undefined near a double root");
    }
    const sweep::Census census = sweep::census(poles);
    r.results["poles"] = list;
    r.results["census"] = {{"bound", census.n_bound}, {"resonant", census.n_resonant},
                           {"antiresonant", census.n_antiresonant}};
    const spectral::RegimeClass rc = spectral::coupling_regime(p);
    r.results["regime"] = std::string(to_string(rc.regime));
    r.results["regime_boundary"] = rc.on_boundary;
    r.metadata.push_back("regime: " + std::string(to_string(rc.regime)));
    if (p.resonant()) {
        const spectral::CriticalRates crit = spectral::critical_gammas(p);
        r.results["gamma_c1"] = crit.gamma_c1;
        r.results["gamma_c2"] = crit.gamma_c2 ? json(*crit.gamma_c2) : json(nullptr);
        if (const auto ep = spectral::detect_ep(p)) {
            r.results["ep"] = {{"gamma_ep", ep->gamma_ep}, {"s_ep", detail::complex_json(ep->s_ep)},
                               {"kind", std::string(to_string(ep->kind))}, {"on_boundary", ep->on_boundary}};
        } else {
            r.results["ep"] = nullptr;
        }
        r.metadata.push_back("gamma_c1: " + format_double(crit.gamma_c1));
        if (crit.gamma_c2) r.metadata.push_back("gamma_c2: " + format_double(*crit.gamma_c2));
    } else {
        r.results["gamma_c1"] = nullptr;
        r.results["gamma_c2"] = nullptr;
        r.results["ep"] = nullptr;
        r.warnings.push_back("critical rates are not defined at nonzero detuning");
    }
    return r;
}

inline Report cmd_decay(const RunConfig& c) {
    Report r;
    r.params = params_json(c);
    const ModelParams p = c.params();
    const std::vector<double> grid = detail::time_grid(c, 501);
    std::vector<std::string> routes;
    if (c.route == "all") routes = {"spectral", "lattice", "momentum"};
    else routes = {c.route};

    std::vector<detail::RouteCurve> curves;
    for (const std::string& route : routes) curves.push_back(detail::run_route(route, p, c, grid, r.warnings));

    r.table.header = {"t",         "re_ca",     "im_ca",     "ps",        "route",     "re_pole1",
                      "im_pole1",  "re_pole2",  "im_pole2",  "re_hankel1", "im_hankel1", "re_hankel2",
                      "im_hankel2", "norm"};
    json results = json::object();
    for (const detail::RouteCurve& curve : curves) {
        json jr;
        jr["t"] = curve.t;
        std::vector<double> re, im, ps;
        for (cplx z : curve.c_a) {
            re.push_back(z.real());
            im.push_back(z.imag());
            ps.push_back(std::norm(z));
        }
        jr["re_ca"] = re;
        jr["im_ca"] = im;
        jr["ps"] = ps;
        if (!curve.norm.empty()) jr["norm"] = curve.norm;
        if (curve.parts) {
            const inversion::DecayDecomposition& d = *curve.parts;
            jr["terms"] = {{"bound", d.bound_terms()}, {"resonant", d.resonant_terms()},
                           {"confluent", d.confluent.has_value()}};
            r.metadata.push_back("spectral terms: bound=" + std::to_string(d.bound_terms()) +
                                 " resonant=" + std::to_string(d.resonant_terms()) +
                                 (d.confluent ? " (confluent pair)" : ""));
        }
        results[curve.route] = jr;

        for (std::size_t i = 0; i < curve.t.size(); ++i) {
            const double t = curve.t[i];
            std::vector<Cell> row{t, curve.c_a[i].real(), curve.c_a[i].imag(), std::norm(curve.c_a[i]), curve.route};
            if (curve.parts) {
                const inversion::DecayDecomposition& d = *curve.parts;
                std::vector<cplx> terms;
                if (d.confluent) terms.push_back(d.confluent->at(t));
                for (const inversion::PoleTerm& term : d.pole_terms) terms.push_back(term.at(t));
                for (std::size_t k = 0; k < 2; ++k) {
                    if (k < terms.size()) {
                        row.push_back(terms[k].real());
                        row.push_back(terms[k].imag());
                    } else {
                        row.push_back(Cell{});
                        row.push_back(Cell{});
                    }
                }
                row.push_back(d.hankel[i].h1.real());
                row.push_back(d.hankel[i].h1.imag());
                row.push_back(d.hankel[i].h2.real());
                row.push_back(d.hankel[i].h2.imag());
                row.push_back(Cell{});
            } else {
                for (int k = 0; k < 8; ++k) row.push_back(Cell{});
                row.push_back(curve.norm[i]);
            }
            r.table.rows.push_back(std::move(row));
        }
    }
    r.results = results;
    json dev = json::object();
    for (std::size_t a = 0; a < curves.size(); ++a)
        for (std::size_t b = a + 1; b < curves.size(); ++b)
            dev[curves[a].route + "-" + curves[b].route] = detail::max_deviation(curves[a], curves[b]);
    if (!dev.empty()) r.diagnostics["max_deviation"] = dev;
    for (const detail::RouteCurve& curve : curves) {
        if (curve.norm.empty()) continue;
        double drift = 0.0;
        for (double n : curve.norm) drift = std::max(drift, std::abs(n - 1.0));
        if (p.gamma == 0.0) r.diagnostics["norm_drift"][curve.route] = drift;
    }
    return r;
}

inline Report cmd_sweep(const RunConfig& c) {
    Report r;
    r.params = params_json(c);
    const double hi = c.gamma_max_or(std::max(3.0 * c.J, 1.5 * *c.g0 * *c.g0 / c.J));
    const sweep::PoleTrajectory tr = sweep::sweep_gamma(*c.g0, c.J, {0.0, hi, c.points_or(301)}, c.detuning);
    r.table.header = detail::trajectory_header();
    detail::trajectory_rows(tr, "sweep", *c.g0, r.table);
    for (const sweep::TrajectoryEvent& e : tr.events) r.metadata.push_back(detail::event_line(e));
    r.results["gamma_range"] = {0.0, hi};
    r.results["events"] = detail::events_json(tr);
    json rows = json::array();
    for (std::size_t i = 0; i < tr.gamma_grid.size(); ++i) {
        json poles = json::array();
        for (const Pole& p : tr.poles_at_gamma[i]) poles.push_back(detail::pole_json(p));
        rows.push_back({{"gamma", tr.gamma_grid[i]}, {"poles", poles}});
    }
    r.results["trajectory"] = rows;
    if (c.detuning != 0.0) r.warnings.push_back("nonzero detuning: coalescence events are not searched");
    return r;
}

inline Report cmd_phase_diagram(const RunConfig& c) {
    Report r;
    r.params = params_json(c);
    const std::size_t n = c.points_or(41);
    const std::vector<double> g0s = analysis::linspace(c.g0_max / static_cast<double>(n), c.g0_max, n);
    const std::vector<double> gammas = analysis::linspace(0.0, c.gamma_max_or(6.0 * c.J), n);
    const sweep::PhaseDiagram d = sweep::phase_diagram(g0s, gammas, c.J);
    r.table.header = {"g0", "gamma", "regime", "regime_boundary", "n_bound", "n_resonant", "n_antiresonant",
                      "n_roots", "channel", "rate"};
    json cells = json::array();
    for (const sweep::PhaseCell& cell : d.cells) {
        r.table.rows.push_back({cell.g0, cell.gamma, std::string(to_string(cell.regime)),
                                static_cast<long long>(cell.regime_boundary), static_cast<long long>(cell.n_bound),
                                static_cast<long long>(cell.n_resonant), static_cast<long long>(cell.n_antiresonant),
                                static_cast<long long>(cell.n_roots), std::string(inversion::to_string(cell.channel)),
                                cell.rate});
        cells.push_back({{"g0", cell.g0},
                         {"gamma", cell.gamma},
                         {"regime", std::string(to_string(cell.regime))},
                         {"n_bound", cell.n_bound},
                         {"n_resonant", cell.n_resonant},
                         {"n_antiresonant", cell.n_antiresonant},
                         {"channel", std::string(inversion::to_string(cell.channel))},
                         {"rate", cell.rate}});
    }
    r.results["g0"] = g0s;
    r.results["gamma"] = gammas;
    r.results["cells"] = cells;
    return r;
}

inline Report cmd_optimal(const RunConfig& c) {
    Report r;
    r.params = params_json(c);
    const double hi = c.gamma_max_or(std::max(3.0 * c.J, 2.0 * *c.g0 * *c.g0 / c.J));
    const sweep::OptimumReport o = sweep::optimal_dissipation(*c.g0, c.J, 0.0, hi, c.resolution, c.detuning);
    r.results["gamma_star"] = o.gamma_star;
    r.results["rate_star"] = o.rate_star;
    r.results["regime"] = std::string(to_string(o.regime));
    r.results["expected"] = {{"label", o.expected_label}, {"gamma", o.expected_gamma}};
    r.results["matches_expected"] = o.matches_expected;
    r.diagnostics["grid_gamma"] = o.grid_gamma;
    r.diagnostics["grid_rate"] = o.grid_rate;
    r.diagnostics["search_range"] = {0.0, hi};
    if (!o.matches_expected)
        r.warnings.push_back("numerical optimum differs from " + o.expected_label + " by more than the resolution");
    r.table.header = {"gamma_star", "rate_star", "expected_label", "expected_gamma", "matches_expected"};
    r.table.rows.push_back({o.gamma_star, o.rate_star, o.expected_label, o.expected_gamma,
                            static_cast<long long>(o.matches_expected)});
    return r;
}

// Spectral reconstruction against the real-space and momentum-space oracles.
inline Report cmd_verify(const RunConfig& c) {
    Report r;
    r.params = params_json(c);
    std::vector<std::pair<double, double>> sets;
    if (c.g0) sets.push_back({*c.g0, c.gamma});
    else
        sets = {{0.6, 0.05}, {0.6, 0.5}, {1.2, 1.1}, {1.2, 1.35}, {1.2, 2.0},
                {2.0, 2.0},  {2.0, 3.7}, {2.0, 4.5}, {2.0, 2.0 * std::sqrt(3.0)}};
    const double tol = 1e-4;
    const std::vector<double> grid = detail::time_grid(c, 501);
    r.table.header = {"g0", "gamma", "spectral_lattice", "spectral_momentum", "lattice_momentum", "pass"};
    json checks = json::array();
    bool all = true;
    for (auto [g0, gamma] : sets) {
        RunConfig one = c;
        one.g0 = g0;
        one.gamma = gamma;
        const ModelParams p = one.params();
        const auto s = detail::run_route("spectral", p, one, grid, r.warnings);
        const auto l = detail::run_route("lattice", p, one, grid, r.warnings);
        const auto m = detail::run_route("momentum", p, one, grid, r.warnings);
        const double sl = detail::max_deviation(s, l), sm = detail::max_deviation(s, m), lm = detail::max_deviation(l, m);
        const bool pass = sl < tol && sm < tol && lm < tol;
        all = all && pass;
        checks.push_back({{"g0", g0}, {"gamma", gamma}, {"spectral_lattice", sl}, {"spectral_momentum", sm},
                          {"lattice_momentum", lm}, {"pass", pass}});
        r.table.rows.push_back({g0, gamma, sl, sm, lm, static_cast<long long>(pass)});
    }
    r.results["checks"] = checks;
    r.results["tolerance"] = tol;
    r.results["pass"] = all;
    r.failed = !all;
    return r;
}

namespace detail {

inline void survival_rows(double g0, double gamma, const std::string& curve, const RunConfig& c, Report& r) {
    const ModelParams p{.g0 = g0, .J = c.J, .gamma = gamma};
    RunConfig local = c;
    local.g0 = g0;
    local.gamma = gamma;
    const std::vector<double> grid = time_grid(local, 501);
    const RouteCurve s = run_route("spectral", p, local, grid, r.warnings);
    const RouteCurve l = run_route("lattice", p, local, grid, r.warnings);
    const inversion::DecayDecomposition& d = *s.parts;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx hankel = d.hankel[i].h1 + d.hankel[i].h2;
        r.table.rows.push_back({curve, g0, gamma, grid[i], std::norm(s.c_a[i]), std::norm(l.c_a[i]),
                                std::norm(d.pole_part(grid[i])), std::norm(hankel)});
    }
    r.diagnostics["max_deviation"][curve] = max_deviation(s, l);
    r.metadata.push_back(curve + ": g0/J = " + format_double(g0) + ", gamma/J = " + format_double(gamma) +
                         ", bound terms " + std::to_string(d.bound_terms()) + ", resonant terms " +
                         std::to_string(d.resonant_terms()));
}

inline void trajectory_figure(double g0, double hi, const RunConfig& c, Report& r, const std::string& curve) {
    const sweep::PoleTrajectory tr = sweep::sweep_gamma(g0, c.J, {0.0, hi, c.points_or(301)});
    trajectory_rows(tr, curve, g0, r.table);
    r.metadata.push_back(curve + ": g0/J = " + format_double(g0) + ", gamma/J in [0, " + format_double(hi) + "]");
    for (const sweep::TrajectoryEvent& e : tr.events) r.metadata.push_back(curve + " " + event_line(e));
    r.results[curve] = events_json(tr);
}

} // namespace detail

inline Report cmd_fig(const RunConfig& c) {
    Report r;
    r.params = params_json(c);
    const int id = *c.figure;
    r.metadata.push_back("figure " + std::to_string(id));
    const std::vector<std::string> survival_header{"curve", "g0", "gamma", "t", "ps", "ps_lattice", "ps_poles",
                                                   "ps_hankel"};
    switch (id) {
    case 3:
        r.table.header = detail::trajectory_header();
        detail::trajectory_figure(0.8, 3.0, c, r, "weak");
        break;
    case 6:
        r.table.header = detail::trajectory_header();
        detail::trajectory_figure(1.2, 2.0, c, r, "moderate");
        break;
    case 9:
        r.table.header = detail::trajectory_header();
        detail::trajectory_figure(2.0, 5.0, c, r, "strong");
        break;
    case 13:
        r.table.header = detail::trajectory_header();
        detail::trajectory_figure(0.8, 5.0, c, r, "weak");
        detail::trajectory_figure(1.2, 5.0, c, r, "moderate");
        detail::trajectory_figure(2.0, 5.0, c, r, "strong");
        break;
    case 4:
        r.table.header = survival_header;
        detail::survival_rows(0.6, 0.05, "b", c, r);
        break;
    case 5:
        r.table.header = survival_header;
        detail::survival_rows(0.6, 0.5, "b", c, r);
        break;
    case 7:
        r.table.header = survival_header;
        r.metadata.push_back("normalization: panel b gamma/J given as '1,1', read as 1.1");
        detail::survival_rows(1.2, 1.1, "b", c, r);
        detail::survival_rows(1.2, 1.35, "d", c, r);
        break;
    case 8:
        r.table.header = survival_header;
        detail::survival_rows(1.2, 2.0, "b", c, r);
        break;
    case 10:
        r.table.header = survival_header;
        detail::survival_rows(2.0, 2.0, "b", c, r);
        detail::survival_rows(2.0, 3.7, "d", c, r);
        break;
    case 11:
        r.table.header = survival_header;
        detail::survival_rows(2.0, 4.5, "b", c, r);
        break;
    default:
        throw Error(ErrorCode::InvalidParams, "unknown figure id");
    }
    r.results["figure"] = id;
    return r;
}

inline Report run(const RunConfig& c) {
    validate(c);
    if (c.command == "poles") return cmd_poles(c);
    if (c.command == "decay") return cmd_decay(c);
    if (c.command == "sweep") return cmd_sweep(c);
    if (c.command == "phase-diagram") return cmd_phase_diagram(c);
    if (c.command == "optimal") return cmd_optimal(c);
    if (c.command == "verify") return cmd_verify(c);
    return cmd_fig(c);
}

} // namespace nhbath::cli
