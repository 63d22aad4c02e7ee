#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/io.hpp"
#include "ibs/schrodinger/reconstruct.hpp"
#include "ibs/toy/model.hpp"

namespace ibs::cli {

/// Flat `key = value` text: one pair per line, `#` starts a comment, blank
/// lines are ignored.  Later keys override earlier ones.
inline std::map<std::string, std::string> parse_key_values(std::istream& is) {
    std::map<std::string, std::string> out;
    std::string line;
    int number = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

inline std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(io::parse_double(item));
    if (out.empty()) throw ConfigError("empty number list");
    return out;
}

inline std::string format_double_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + io::format_double(v[i]);
    return out;
}

struct ExperimentConfig {
    std::string experiment = "toy";  // toy | schrodinger | bounds | hydro
    int fine = 100;
    int coarse = 20;
    double epsilon = 0.1;
    std::string wells = "standard";
    double well_radius = 0.05;
    std::string potential = "smooth";  // smooth | piecewise
    std::string method = "ibs-5";
    int iterations = 10;
    std::optional<double> tau;
    double noise = 0.0;
    std::optional<std::uint64_t> seed;
    double omega1 = 1.0;
    double omega2 = 10.0;
    std::vector<double> eps_list{0.0, 0.05, 0.1, 0.15, 0.2, 0.25};
    int stride = 0;  // 0: one node per 0.05 of length
    double b1_norm = 1.0;
    int steps = 8;
    std::string output = "out";

    static constexpr const char* kKinds[] = {"toy", "schrodinger", "bounds", "hydro"};

    void set(const std::string& key, const std::string& value) {
        auto as_int = [&] {
            const double v = io::parse_double(value);
            if (v != double(static_cast<long long>(v))) throw ConfigError(key + " must be an integer");
            return static_cast<long long>(v);
        };
        if (key == "experiment") experiment = value;
        else if (key == "fine") fine = int(as_int());
        else if (key == "coarse") coarse = int(as_int());
        else if (key == "epsilon") epsilon = io::parse_double(value);
        else if (key == "wells") wells = value;
        else if (key == "well_radius") well_radius = io::parse_double(value);
        else if (key == "potential") potential = value;
        else if (key == "method") method = value;
        else if (key == "iterations") iterations = int(as_int());
        else if (key == "tau") tau = value == "auto" ? std::nullopt : std::optional<double>(io::parse_double(value));
        else if (key == "noise") noise = io::parse_double(value);
        else if (key == "seed") {
            const long long s = as_int();
            if (s < 0) throw ConfigError("seed must be nonnegative");
            seed = std::uint64_t(s);
        } else if (key == "omega1") omega1 = io::parse_double(value);
        else if (key == "omega2") omega2 = io::parse_double(value);
        else if (key == "eps_list") eps_list = parse_double_list(value);
        else if (key == "stride") stride = int(as_int());
        else if (key == "b1_norm") b1_norm = io::parse_double(value);
        else if (key == "steps") steps = int(as_int());
        else if (key == "output") output = value;
        else throw ConfigError("unknown config key '" + key + "'");
    }

    void merge(const std::map<std::string, std::string>& kv) {
        for (const auto& [k, v] : kv) set(k, v);
    }

    std::uint64_t resolved_seed() const { return seed.value_or(experiment == "toy" ? toy::kToySeed : 1); }
    double resolved_tau() const {
        if (tau) return *tau;
        return experiment == "toy" ? 1e-6 : schrodinger::default_tau(noise);
    }
    int resolved_stride(int n_cells) const { return stride > 0 ? stride : std::max(1, int(std::lround(0.05 * n_cells))); }

    void validate() const {
        bool known = false;
        for (const char* k : kKinds) known = known || experiment == k;
        if (!known) throw ConfigError("unknown experiment '" + experiment + "'");
        if (fine < 2 || coarse < 2) throw ConfigError("grids need at least 2 cells");
        if (fine % coarse != 0) throw ConfigError("coarse grid (" + std::to_string(coarse) + ") must divide fine grid (" + std::to_string(fine) + ")");
        if (!(epsilon >= 0.0 && epsilon <= 0.25)) throw ConfigError("epsilon must lie in [0, 0.25]");
        if (wells != "standard") throw ConfigError("unknown well layout '" + wells + "'");
        if (!(well_radius > 0.0 && well_radius <= 0.1)) throw ConfigError("well_radius must lie in (0, 0.1]");
        if (potential != "smooth" && potential != "piecewise") throw ConfigError("unknown potential '" + potential + "'");
        schrodinger::Method::parse(method, iterations);
        const double t = resolved_tau();
        if (!(t > 0.0 && t < 1.0)) throw ConfigError("tau must lie in (0, 1)");
        if (!(noise >= 0.0)) throw ConfigError("noise must be nonnegative");
        if (omega1 == omega2) throw EqualFrequencies("omega1 and omega2 must differ");
        for (double e : eps_list)
            if (!(e >= 0.0 && e <= 0.25)) throw ConfigError("eps_list entries must lie in [0, 0.25]");
        if (stride < 0) throw ConfigError("stride must be nonnegative");
        if (!(b1_norm > 0.0)) throw ConfigError("b1_norm must be positive");
        if (steps < 1) throw ConfigError("steps must be at least 1");
    }

    /// Resolved configuration in the same key = value format; feeding it back
    /// through merge() reproduces the run.
    void write(std::ostream& os) const {
        os << "experiment = " << experiment << '\n'
           << "fine = " << fine << '\n'
           << "coarse = " << coarse << '\n'
           << "epsilon = " << io::format_double(epsilon) << '\n'
           << "wells = " << wells << '\n'
           << "well_radius = " << io::format_double(well_radius) << '\n'
           << "potential = " << potential << '\n'
           << "method = " << method << '\n'
           << "iterations = " << iterations << '\n'
           << "tau = " << io::format_double(resolved_tau()) << '\n'
           << "noise = " << io::format_double(noise) << '\n'
           << "seed = " << resolved_seed() << '\n'
           << "omega1 = " << io::format_double(omega1) << '\n'
           << "omega2 = " << io::format_double(omega2) << '\n'
           << "eps_list = " << format_double_list(eps_list) << '\n'
           << "stride = " << stride << '\n'
           << "b1_norm = " << io::format_double(b1_norm) << '\n'
           << "steps = " << steps << '\n'
           << "output = " << output << '\n';
    }
};

}  // namespace ibs::cli
