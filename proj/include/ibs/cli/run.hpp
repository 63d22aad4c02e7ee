#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ibs/bounds/report.hpp"
#include "ibs/cli/config.hpp"
#include "ibs/hydro/pipeline.hpp"
#include "ibs/numerics/io.hpp"
#include "ibs/schrodinger/reconstruct.hpp"
#include "ibs/toy/comparison.hpp"

namespace ibs::cli {

/// Ordered name/value pairs describing the outcome of a run.
using Summary = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline void add(Summary& s, const std::string& key, double v) { s.emplace_back(key, io::format_double(v)); }
inline void add(Summary& s, const std::string& key, const std::string& v) { s.emplace_back(key, v); }

inline void write_summary(const std::filesystem::path& dir, const Summary& s) {
    auto os = io::open_output(dir / "summary.csv");
    os << "key,value\n";
    for (const auto& [k, v] : s) os << k << ',' << v << '\n';
}

inline void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg) {
    auto os = io::open_output(dir / "manifest.txt");
    os << "# resolved configuration; rerun with --config manifest.txt\n";
    cfg.write(os);
}

inline void write_trace(const std::filesystem::path& path, const born::IterationTrace& t) {
    auto os = io::open_output(path);
    t.write_csv(os);
}

inline RealGridFunction real_part(const GridFunction& f) { return f.real(); }

}  // namespace detail

inline Summary run_toy(const ExperimentConfig& cfg) {
    const std::filesystem::path dir = cfg.output;
    const toy::ToyModel model(toy::ToyData::generate(cfg.resolved_seed()));
    const toy::ComparisonResult r = toy::three_method_comparison(model, cfg.resolved_tau(), cfg.steps);
    {
        auto os = io::open_output(dir / "comparison.csv");
        r.write_csv(os);
    }
    detail::write_trace(dir / "ibs_trace.csv", r.ibs_trace);
    detail::write_trace(dir / "gn_trace.csv", r.gn_trace);
    detail::write_trace(dir / "ch_trace.csv", r.ch_trace);
    Summary s;
    detail::add(s, "gn1_minus_ibs1", param_norm(r.gn.iterates[1] - r.ibs.iterates[1]));
    if (r.ibs.iterates.size() > 2) detail::add(s, "ch1_minus_ibs2", param_norm(r.ch.iterates[1] - r.ibs.iterates[2]));
    detail::add(s, "ibs_log_ratio_variance",
                toy::log_ratio_variance(r.ibs.residual, 1e-12 * r.ibs.iterate_error.front()));
    detail::add(s, "gn_fitted_order", toy::fitted_order(r.gn.iterate_error, 1e-12 * r.gn.iterate_error.front()));
    detail::add(s, "ch_fitted_order", toy::fitted_order(r.ch.iterate_error, 1e-12 * r.ch.iterate_error.front()));
    detail::write_summary(dir, s);
    detail::write_manifest(dir, cfg);
    return s;
}

inline Summary run_schrodinger(const ExperimentConfig& cfg) {
    const std::filesystem::path dir = cfg.output;
    schrodinger::TwoGridProblem p{Grid2D(cfg.fine, cfg.epsilon), Grid2D(cfg.coarse, cfg.epsilon)};
    auto shape = cfg.potential == "smooth" ? &schrodinger::smooth_test_potential : &schrodinger::piecewise_test_potential;
    p.q_true_fine = embed_support(p.fine, support_values(p.fine, p.fine.sample(shape)));
    p.q0_fine = GridFunction::Zero(p.fine.node_count());
    p.wells = schrodinger::WellSet::standard(cfg.well_radius);
    p.noise = cfg.noise;
    p.seed = cfg.resolved_seed();
    const auto rec = p.solve(schrodinger::Method::parse(cfg.method, cfg.iterations), cfg.resolved_tau());
    const RealGridFunction truth = p.q_true_coarse().real();
    io::save_grid_csv(dir / "q_rec.csv", p.coarse, detail::real_part(rec.q));
    io::save_grid_csv(dir / "q_true.csv", p.coarse, truth);
    io::save_pgm16(dir / "q_rec.pgm", p.coarse, detail::real_part(rec.q));
    io::save_pgm16(dir / "q_true.pgm", p.coarse, truth);
    detail::write_trace(dir / "trace.csv", rec.trace);
    io::save_complex_matrix(dir, "data", p.data());
    Summary s;
    detail::add(s, "method", rec.method);
    detail::add(s, "tau", rec.tau);
    detail::add(s, "initial_misfit", rec.initial_misfit);
    detail::add(s, "final_misfit", rec.final_misfit);
    detail::add(s, "misfit_reduction", rec.misfit_reduction());
    detail::add(s, "cosine_to_truth", schrodinger::support_cosine(p.coarse, rec.q, p.q_true_coarse()));
    detail::write_summary(dir, s);
    detail::write_manifest(dir, cfg);
    return s;
}

inline Summary run_bounds(const ExperimentConfig& cfg) {
    const std::filesystem::path dir = cfg.output;
    const Grid2D grid(cfg.fine);
    bounds::RadiusOptions opts;
    opts.stride = cfg.resolved_stride(cfg.fine);
    opts.b1_norm = cfg.b1_norm;
    const auto rows = bounds::radius_vs_epsilon(grid, GridFunction::Zero(grid.node_count()), cfg.eps_list,
                                                schrodinger::WellSet::standard(cfg.well_radius), opts);
    {
        auto os = io::open_output(dir / "radius.csv");
        bounds::write_radius_csv(os, rows);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (cfg.eps_list[i] >= cfg.eps_list[i - 1]) monotone = monotone && rows[i].data_radius >= rows[i - 1].data_radius;
    Summary s;
    detail::add(s, "stride", std::to_string(opts.stride));
    detail::add(s, "radius_monotone", monotone ? "true" : "false");
    detail::write_summary(dir, s);
    detail::write_manifest(dir, cfg);
    return s;
}

inline Summary run_hydro(const ExperimentConfig& cfg) {
    const std::filesystem::path dir = cfg.output;
    hydro::HydroExperiment ex;
    ex.fine = Grid2D(cfg.fine, cfg.epsilon);
    ex.coarse = Grid2D(cfg.coarse, cfg.epsilon);
    ex.wells = schrodinger::WellSet::standard(cfg.well_radius);
    ex.omega1 = cfg.omega1;
    ex.omega2 = cfg.omega2;
    ex.noise = cfg.noise;
    ex.seed = cfg.resolved_seed();
    ex.method = schrodinger::Method::parse(cfg.method, cfg.iterations);
    ex.tau = cfg.resolved_tau();
    const hydro::HydroResult r = hydro::run_hydro(ex);
    io::save_grid_csv(dir / "sigma.csv", ex.coarse, r.sigma.sigma);
    io::save_grid_csv(dir / "S.csv", ex.coarse, r.S);
    io::save_grid_csv(dir / "sigma_true.csv", ex.coarse, r.truth.sigma);
    io::save_grid_csv(dir / "S_true.csv", ex.coarse, r.truth.S);
    io::save_pgm16(dir / "sigma.pgm", ex.coarse, r.sigma.sigma);
    io::save_pgm16(dir / "S.pgm", ex.coarse, r.S);
    detail::write_trace(dir / "trace_omega1.csv", r.rec1.trace);
    detail::write_trace(dir / "trace_omega2.csv", r.rec2.trace);
    Summary s;
    detail::add(s, "method", ex.method.name());
    detail::add(s, "tau", ex.tau);
    detail::add(s, "sigma_error", r.sigma_error);
    detail::add(s, "S_error", r.S_error);
    detail::add(s, "misfit_reduction_omega1", r.rec1.misfit_reduction());
    detail::add(s, "misfit_reduction_omega2", r.rec2.misfit_reduction());
    detail::add(s, "split_imag_residue", r.split.imag_residue);
    detail::add(s, "negative_root", r.sigma.negative_root ? "true" : "false");
    detail::write_summary(dir, s);
    detail::write_manifest(dir, cfg);
    return s;
}

inline Summary run(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.experiment == "toy") return run_toy(cfg);
    if (cfg.experiment == "schrodinger") return run_schrodinger(cfg);
    if (cfg.experiment == "bounds") return run_bounds(cfg);
    return run_hydro(cfg);
}

}  // namespace ibs::cli
