#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "heatcurve/commands.hpp"
#include "heatcurve/errors.hpp"

using namespace heatcurve;

namespace {

// Flag values are kept as text and fed through the same key=value parser as
// config files, so both paths share one set of diagnostics.
struct FlagValues {
    std::string config_file;
    std::vector<std::pair<std::string, std::vector<std::string>>> opts;
};

void add_common(CLI::App* sub, FlagValues& fv) {
    sub->add_option("--config", fv.config_file, "key=value file; flags override it");
    static const std::vector<std::pair<std::string, std::string>> scalar = {
        {"curve", "circle | ellipse | trefoil | custom"},
        {"radius", "circle radius"},
        {"coeffs-file", "Fourier coefficient file for --curve custom"},
        {"tol", "relative tolerance of the direct quadrature"},
        {"tube-tol", "relative tolerance of the tube integrators"},
        {"seed", "seed of the quasi-Monte Carlo shifts"},
        {"out", "output CSV path (stdout if absent)"},
        {"svg", "optional SVG plot path"},
        {"tmin", "smallest t"},
        {"tmax", "largest t"},
        {"tsteps", "number of geometric t points"},
        {"tfixed", "t of the eps-convergence table (compare)"},
        {"backend", "tube integrator: product | qmc | automatic"},
        {"samples", "quasi-Monte Carlo samples"},
        {"replicas", "quasi-Monte Carlo replicas"},
        {"n-s", "tube product rule: arc-length nodes"},
        {"n-theta", "tube product rule: angle nodes"},
        {"n-r", "tube product rule: radial nodes"},
        {"n-inner", "tube product rule: inner nodes"},
    };
    fv.opts.reserve(32);
    for (const auto& [name, help] : scalar) {
        fv.opts.push_back({name, {}});
        sub->add_option("--" + name, fv.opts.back().second, help)->expected(1);
    }
    fv.opts.push_back({"axes", {}});
    sub->add_option("--axes", fv.opts.back().second, "ellipse semi-axes a b")->expected(2);
    fv.opts.push_back({"torus", {}});
    sub->add_option("--torus", fv.opts.back().second, "trefoil torus radii R r")->expected(2);
    fv.opts.push_back({"eps", {}});
    sub->add_option("--eps", fv.opts.back().second, "tube radius (repeatable)")->expected(1, 64);
    fv.opts.push_back({"lambda", {}});
    sub->add_option("--lambda", fv.opts.back().second, "Laplace parameter for oracle (repeatable)")->expected(1, 64);
}

std::string joined(const std::vector<std::string>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heat content of closed space curves: series, direct quadrature and tube approximation"};
    app.require_subcommand(1);
    std::vector<std::pair<Command, FlagValues>> subs;
    subs.reserve(5);
    const std::vector<std::pair<Command, std::string>> descr = {
        {Command::expand, "series constants and coefficients"},
        {Command::direct, "direct quadrature of H_S(t)"},
        {Command::tube, "tube heat content H^eps(t)"},
        {Command::compare, "side-by-side comparison of the two expansions"},
        {Command::oracle, "circle closed-form and Bessel oracles"},
    };
    std::vector<CLI::App*> apps;
    for (const auto& [cmd, text] : descr) {
        subs.push_back({cmd, {}});
        CLI::App* sub = app.add_subcommand(to_string(cmd), text);
        add_common(sub, subs.back().second);
        apps.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    for (std::size_t i = 0; i < apps.size(); ++i) {
        if (!apps[i]->parsed()) continue;
        const FlagValues& fv = subs[i].second;
        ExperimentConfig config;
        config.command = subs[i].first;
        std::string diagnostics;
        try {
            if (!fv.config_file.empty()) {
                std::ifstream f(fv.config_file, std::ios::binary);
                if (!f) throw ConfigurationError("cannot read config file '" + fv.config_file + "'");
                std::ostringstream text;
                text << f.rdbuf();
                apply_config_text(config, text.str(), fv.config_file);
            }
            for (const auto& [key, values] : fv.opts) {
                if (!values.empty()) config.set(key, joined(values), "--" + key);
            }
            config.resolve();
        } catch (const Error& e) {
            std::cerr << "configuration error: " << e.what() << '\n';
            return 1;
        }
        const int code = execute(config, diagnostics);
        if (code != 0) std::cerr << diagnostics << '\n';
        return code;
    }
    return 1;
}
