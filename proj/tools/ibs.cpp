#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ibs/cli/config.hpp"
#include "ibs/cli/run.hpp"
#include "ibs/cli/selfcheck.hpp"

namespace {

struct Flags {
    std::string config_file;
    std::optional<std::string> out, method, eps, omega, potential;
    std::optional<int> fine, coarse, iterations, stride, workers;
    std::optional<double> epsilon, tau, noise, b1_norm;
    std::optional<long long> seed;
    bool full_scale = false;
    std::vector<std::string> sets;
};

void add_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_file, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--fine", f.fine, "cells per side of the synthesis grid");
    cmd->add_option("--coarse", f.coarse, "cells per side of the reconstruction grid");
    cmd->add_option("--epsilon", f.epsilon, "boundary distance of the potential support");
    cmd->add_option("--eps", f.eps, "comma-separated epsilon list for radius tables");
    cmd->add_option("--potential", f.potential, "smooth | piecewise");
    cmd->add_option("--method", f.method, "ibs-K | gn | ch | ribs-k");
    cmd->add_option("--iterations", f.iterations, "outer iterations of gn, ch and ribs");
    cmd->add_option("--tau", f.tau, "relative singular value threshold");
    cmd->add_option("--noise", f.noise, "relative Gaussian noise level");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--omega", f.omega, "frequency pair w1,w2");
    cmd->add_option("--stride", f.stride, "probe stride for Green function sweeps");
    cmd->add_option("--b1-norm", f.b1_norm, "norm of the linear inverse used in radius tables");
    cmd->add_option("--workers", f.workers, "worker threads (sets IBS_WORKERS)")->check(CLI::PositiveNumber);
    cmd->add_flag("--full-scale", f.full_scale, "use 400 / 80 cell grids");
    cmd->add_option("--set", f.sets, "extra key=value override, repeatable");
}

ibs::cli::ExperimentConfig resolve(const std::string& kind, const Flags& f) {
    ibs::cli::ExperimentConfig cfg;
    cfg.experiment = kind;
    cfg.output = "out/" + kind;
    if (!f.config_file.empty()) {
        std::ifstream is(f.config_file);
        auto kv = ibs::cli::parse_key_values(is);
        if (auto it = kv.find("experiment"); it != kv.end() && it->second != kind)
            throw ibs::ConfigError("config file describes experiment '" + it->second + "', not '" + kind + "'");
        cfg.merge(kv);
    }
    if (f.full_scale) {
        cfg.fine = 400;
        cfg.coarse = 80;
    }
    auto put = [&](const char* key, const auto& v) {
        if (!v) return;
        if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>) cfg.set(key, *v);
        else cfg.set(key, ibs::io::format_double(double(*v)));
    };
    put("output", f.out);
    put("fine", f.fine);
    put("coarse", f.coarse);
    put("epsilon", f.epsilon);
    put("eps_list", f.eps);
    put("potential", f.potential);
    put("method", f.method);
    put("iterations", f.iterations);
    put("tau", f.tau);
    put("noise", f.noise);
    put("seed", f.seed);
    put("stride", f.stride);
    put("b1_norm", f.b1_norm);
    if (f.omega) {
        const auto w = ibs::cli::parse_double_list(*f.omega);
        if (w.size() != 2) throw ibs::ConfigError("--omega expects two comma-separated frequencies");
        cfg.omega1 = w[0];
        cfg.omega2 = w[1];
    }
    for (const auto& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ibs::ConfigError("--set expects key=value, got '" + s + "'");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (cfg.experiment != kind) throw ibs::ConfigError("experiment cannot be overridden");
    cfg.validate();
    return cfg;
}

int exit_code(const ibs::Error& e) {
    const std::string k = e.kind();
    if (k == "SingularOperator") return 3;
    if (k == "ConditionViolated") return 4;
    if (k == "ConfigError" || k == "EqualFrequencies" || k == "NonPositiveSigma" || k == "IncompatibleGrids" ||
        k == "GridMismatch")
        return 2;
    return 1;
}

int report_error(const std::string& kind, const std::string& message, int code) {
    nlohmann::json rec{{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << rec.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inverse Born series experiments"};
    app.require_subcommand(1);

    Flags flags;
    std::string run_kind;
    std::string chosen;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"toy", "toy"}, {"schrodinger-recon", "schrodinger"}, {"bounds-radius", "bounds"}, {"hydro-recon", "hydro"}};
    for (const auto& [name, kind] : commands) {
        auto* cmd = app.add_subcommand(name, "run the " + kind + " experiment");
        add_flags(cmd, flags);
        cmd->callback([&chosen, kind = kind] { chosen = kind; });
    }
    auto* run = app.add_subcommand("run", "run an experiment by kind");
    run->add_option("kind", run_kind, "toy | schrodinger | bounds | hydro")->required();
    add_flags(run, flags);
    run->callback([&] { chosen = run_kind; });
    auto* check = app.add_subcommand("selfcheck", "fast invariant checks of every model");
    check->callback([&] { chosen = "selfcheck"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("ConfigError", e.what(), 2);
    }

    try {
        if (flags.workers) {
            setenv("IBS_WORKERS", std::to_string(*flags.workers).c_str(), 1);
            ibs::set_worker_count(*flags.workers);
        }
        if (chosen == "selfcheck") return ibs::cli::print_selfcheck(std::cout, ibs::cli::selfcheck()) ? 0 : 4;
        const ibs::cli::ExperimentConfig cfg = resolve(chosen, flags);
        const ibs::cli::Summary summary = ibs::cli::run(cfg);
        nlohmann::ordered_json out{{"experiment", cfg.experiment}, {"output", cfg.output}};
        for (const auto& [k, v] : summary) out[k] = v;
        std::cout << out.dump(2) << '\n';
        return 0;
    } catch (const ibs::Error& e) {
        return report_error(e.kind(), e.what(), exit_code(e));
    } catch (const std::exception& e) {
        return report_error("Error", e.what(), 1);
    }
}
