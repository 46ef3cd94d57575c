// nhbath.cpp — command-line front end

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "nhbath/cli.hpp"

namespace {

struct Flag {
    const char* name;
    const char* help;
};

const Flag kFlags[] = {
    {"g0", "atom-photon coupling"},
    {"J", "hopping rate"},
    {"gamma", "uniform photon loss rate"},
    {"detuning", "emitter detuning"},
    {"tmax", "last time sample, 1/J"},
    {"tmin", "first time sample, 1/J"},
    {"nsites", "lattice sites (0: sized from tmax)"},
    {"nmodes", "momentum modes"},
    {"route", "spectral|lattice|momentum|lindblad|all"},
    {"out", "output path (default stdout)"},
    {"format", "csv|json"},
    {"points", "samples per grid axis"},
    {"gamma-max", "upper end of gamma grids"},
    {"g0-max", "upper end of the g0 grid"},
    {"resolution", "optimum search resolution"},
};

int fail(nhbath::ErrorCode code, const std::string& message) {
    const auto j = nhbath::cli::error_json(code, message);
    std::cerr << j.dump() << "\n";
    return j["error"]["exit_code"].get<int>();
}

} // namespace

int main(int argc, char** argv) {
    using namespace nhbath;
    CLI::App app{"Emitter decay into a lossy semi-infinite lattice"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cli::kVersion);

    std::string config_path;
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, CLI::Option*>> options;
    std::string figure;

    for (const std::string& name : cli::commands()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value file; flags override it");
        for (const Flag& f : kFlags)
            options[name][f.name] = sub->add_option(std::string("--") + f.name, values[name][f.name], f.help);
        if (name == "fig") sub->add_option("figure", figure, "figure id")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail(ErrorCode::InvalidParams, e.what());
    }

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        cli::KeyValues flags;
        for (const auto& [key, opt] : options[command])
            if (opt->count() > 0) flags[key] = values[command][key];
        if (command == "fig") flags["figure"] = figure;
        const cli::KeyValues file = config_path.empty() ? cli::KeyValues{} : cli::read_config_file(config_path);
        const cli::RunConfig config = cli::make_config(command, cli::merge(file, flags));

        const cli::Report report = cli::run(config);
        const std::string text = cli::render(report, config.output_format());
        if (config.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(config.out, std::ios::binary);
            if (!out) return fail(ErrorCode::InvalidParams, "cannot write '" + config.out + "'");
            out << text;
        }
        if (report.failed) return fail(ErrorCode::ToleranceNotMet, "verification exceeded tolerance");
        return 0;
    } catch (const Error& e) {
        return fail(e.code(), e.what());
    } catch (const std::exception& e) {
        return fail(ErrorCode::ToleranceNotMet, e.what());
    }
}
