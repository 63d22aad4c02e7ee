#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ibs/numerics/errors.hpp"
#include "ibs/numerics/grid.hpp"

namespace ibs::io {

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ConfigError("not a number: '" + s + "'");
    return v;
}

/// Grid function CSV: a header `# n_cells=<n>,h=<h>` followed by one line per
/// grid row l = 0..n, each holding the values for k = 0..n.
inline void write_grid_csv(std::ostream& os, const Grid2D& grid, const RealGridFunction& f) {
    require_grid_function(grid, f.size(), "write_grid_csv");
    os << "# n_cells=" << grid.n_cells() << ",h=" << format_double(grid.h()) << '\n';
    for (int l = 0; l <= grid.n_cells(); ++l) {
        for (int k = 0; k <= grid.n_cells(); ++k) {
            if (k) os << ',';
            os << format_double(f[grid.node(k, l)]);
        }
        os << '\n';
    }
}

inline RealGridFunction read_grid_csv(std::istream& is, Grid2D& grid_out) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# n_cells=", 0) != 0) {
        throw ConfigError("grid CSV: missing '# n_cells=' header");
    }
    const int n = std::stoi(line.substr(10));
    Grid2D grid(n);
    RealGridFunction f(grid.node_count());
    for (int l = 0; l <= n; ++l) {
        if (!std::getline(is, line)) throw ConfigError("grid CSV: truncated");
        std::stringstream ss(line);
        std::string cell;
        for (int k = 0; k <= n; ++k) {
            if (!std::getline(ss, cell, ',')) throw ConfigError("grid CSV: short row");
            f[grid.node(k, l)] = parse_double(cell);
        }
    }
    grid_out = grid;
    return f;
}

/// 16-bit binary PGM, min..max mapped to 0..65535, top image row is y = 1.
inline void write_pgm16(std::ostream& os, const Grid2D& grid, const RealGridFunction& f) {
    require_grid_function(grid, f.size(), "write_pgm16");
    const int side = grid.nodes_per_side();
    const double lo = f.minCoeff();
    const double hi = f.maxCoeff();
    const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
    os << "P5\n" << side << ' ' << side << "\n65535\n";
    for (int l = grid.n_cells(); l >= 0; --l) {
        for (int k = 0; k <= grid.n_cells(); ++k) {
            const double v = (f[grid.node(k, l)] - lo) * scale;
            const auto px = std::uint16_t(std::clamp(v + 0.5, 0.0, 65535.0));
            os.put(char(px >> 8));
            os.put(char(px & 0xff));
        }
    }
}

/// Plain matrix CSV, one matrix row per line.
inline void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ',';
            os << format_double(m(r, c));
        }
        os << '\n';
    }
}

inline std::ofstream open_output(const std::filesystem::path& path, bool binary = false) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
    return os;
}

inline void save_grid_csv(const std::filesystem::path& path, const Grid2D& grid, const RealGridFunction& f) {
    auto os = open_output(path);
    write_grid_csv(os, grid, f);
}

inline void save_pgm16(const std::filesystem::path& path, const Grid2D& grid, const RealGridFunction& f) {
    auto os = open_output(path, true);
    write_pgm16(os, grid, f);
}

/// Writes `<stem>_re.csv` and `<stem>_im.csv` for a complex matrix.
inline void save_complex_matrix(const std::filesystem::path& dir, const std::string& stem, const Eigen::MatrixXcd& m) {
    {
        auto os = open_output(dir / (stem + "_re.csv"));
        write_matrix_csv(os, m.real());
    }
    auto os = open_output(dir / (stem + "_im.csv"));
    write_matrix_csv(os, m.imag());
}

}  // namespace ibs::io
