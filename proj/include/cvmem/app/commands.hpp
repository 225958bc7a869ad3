// Subcommands of the cvmem tool. Each writes one table under the output
// directory and returns 0 on success, 1 when a tolerance or validation
// check fails; I/O problems surface as IoError (exit 2).

#pragma once

#include "cvmem/app/config.hpp"
#include "cvmem/app/output.hpp"
#include "cvmem/benchmark.hpp"
#include "cvmem/epr.hpp"
#include "cvmem/fidelity.hpp"
#include "cvmem/memory.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>

namespace cvmem::app {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_io = 2;

inline constexpr double reproduction_tolerance = 0.01;

/// Recomputed overlaps of the 18 stored states beside the measured ones.
inline int cmd_table1(const RunConfig& cfg, std::ostream& log) {
    Table t{"table1", {"x_in", "p_in", "phi_deg", "overlap_reference", "overlap", "abs_deviation"}, {}};
    double worst = 0.0;
    for (const auto& r : table1_records()) {
        const double f = table1_overlap(r, cfg.s);
        const double dev = std::abs(f - r.overlap);
        worst = std::max(worst, dev);
        t.add({r.mean_x_in, r.mean_p_in, r.phi_deg, r.overlap, f, dev});
    }
    const auto path = write_table(cfg, t, {{"max_abs_deviation", rounded(worst)}, {"tolerance", reproduction_tolerance}});
    log << "table1: max |deviation| = " << format_number(worst) << " -> " << path.string() << '\n';
    return worst <= reproduction_tolerance ? exit_ok : exit_failure;
}

/// Storage noise inferred from the squeezed-vacuum runs.
inline int cmd_table2(const RunConfig& cfg, std::ostream& log) {
    Table t{"table2",
            {"phi_deg", "var_xA", "var_pA", "var_Sx", "var_Sp", "reference_Sx", "reference_Sp", "abs_deviation"},
            {}};
    double worst = 0.0;
    for (const auto& run : squeezed_vacuum_runs()) {
        const AddedNoise n = infer_added_noise(run.var_xA, run.var_pA, cfg.memory, run.phi_deg, cfg.s);
        const double dev =
            std::max(std::abs(n.var_Sx - run.published.var_Sx), std::abs(n.var_Sp - run.published.var_Sp));
        worst = std::max(worst, dev);
        t.add({run.phi_deg, run.var_xA, run.var_pA, n.var_Sx, n.var_Sp, run.published.var_Sx, run.published.var_Sp, dev});
    }
    const auto path = write_table(cfg, t, {{"max_abs_deviation", rounded(worst)}, {"tolerance", reproduction_tolerance}});
    log << "table2: max |deviation| = " << format_number(worst) << " -> " << path.string() << '\n';
    return worst <= reproduction_tolerance ? exit_ok : exit_failure;
}

inline GaussianSearchOptions search_options(const RunConfig& cfg) {
    GaussianSearchOptions o;
    o.gain_mode = cfg.benchmark.gain_mode;
    o.restarts = cfg.benchmark.restarts;
    o.max_evaluations = cfg.benchmark.max_evaluations;
    o.seed = cfg.seed;
    return o;
}

/// Averaged fidelity against d_max: model, measured moments, and the
/// Gaussian-strategy benchmark with its monotone envelope.
inline int cmd_curve(const RunConfig& cfg, std::ostream& log) {
    std::vector<double> d = cfg.d_max;
    std::sort(d.begin(), d.end());
    const double G = cfg.memory.memory_gain();
    std::vector<CurvePoint> bench;
    std::vector<double> model, measured;
    for (const double dm : d) {
        const Alphabet a = cfg.alphabet(dm);
        model.push_back(average_fidelity(a, cfg.memory));
        measured.push_back(average_fidelity_experimental(a, cfg.memory));
        bench.push_back({dm, optimize_gaussian_strategy(a, G, search_options(cfg)).second.value});
    }
    const auto envelope = monotone_envelope(bench);
    Table t{"curve",
            {"d_max", "model_fidelity", "experimental_fidelity", "benchmark_lower_bound", "benchmark_envelope"},
            {}};
    for (std::size_t i = 0; i < d.size(); ++i) {
        t.add({d[i], model[i], measured[i], bench[i].fidelity, envelope[i].fidelity});
    }
    const auto path = write_table(cfg, t, {{"seed", cfg.seed}});
    log << "curve: " << d.size() << " points -> " << path.string() << '\n';
    return exit_ok;
}

/// Duan sums of the input pair, both-cells storage and one-cell storage.
inline int cmd_epr(const RunConfig& cfg, std::ostream& log) {
    const MemoryParams pair_params = cfg.stored_pair_noise == StoredPairNoise::measured
                                         ? with_added_noise(cfg.memory, measured_added_noise(0.0))
                                         : cfg.memory;
    const double hybrid = hybrid_E_constructed(cfg.memory, cfg.s);
    const double closed = hybrid_E(cfg.memory, cfg.s);
    Table t{"epr", {"scenario", "E", "separable", "eof_lower_bound"}, {}};
    auto add = [&](const std::string& name, double E) {
        const EprReport r = make_epr_report(E);
        t.add({name, r.E, r.separable, r.eof_lower_bound});
    };
    add("input_pair", duan_E(two_mode_squeezed(cfg.s)));
    add("stored_pair", stored_pair_E(pair_params, cfg.s));
    add("hybrid", hybrid);
    const double mismatch = std::abs(hybrid - closed);
    const auto path = write_table(cfg, t, {{"hybrid_closed_form", rounded(closed)}});
    log << "epr: hybrid E = " << format_number(hybrid) << " -> " << path.string() << '\n';
    return mismatch <= 1e-9 ? exit_ok : exit_failure;
}

/// Gaussian-strategy lower bounds on the d_max grid, their envelope, and
/// seesaw estimates where configured.
inline int cmd_benchmark(const RunConfig& cfg, std::ostream& log) {
    std::vector<double> d = cfg.d_max;
    std::sort(d.begin(), d.end());
    const double G = cfg.memory.memory_gain();
    Table t{"benchmark", {"d_max", "kind", "value", "truncation_tail", "iterations", "seed", "converged"}, {}};
    auto add = [&](double dm, const BenchmarkResult& r) {
        t.add({dm, to_string(r.kind), r.value, r.truncation_tail, static_cast<long long>(r.iterations),
               static_cast<long long>(r.seed), r.converged});
    };

    std::map<double, double> gaussian;
    std::vector<CurvePoint> points;
    for (const double dm : d) {
        const BenchmarkResult r = optimize_gaussian_strategy(cfg.alphabet(dm), G, search_options(cfg)).second;
        gaussian[dm] = r.value;
        points.push_back({dm, r.value});
        add(dm, r);
    }
    for (const auto& p : monotone_envelope(points)) {
        BenchmarkResult r;
        r.kind = BenchmarkKind::monotone_envelope;
        r.value = p.fidelity;
        r.seed = cfg.seed;
        add(p.d_max, r);
    }

    bool consistent = true;
    if (cfg.benchmark.seesaw) {
        SeesawOptions so;
        so.grid_nodes = cfg.benchmark.grid_nodes;
        so.phases = cfg.benchmark.phases;
        so.cutoff = cfg.benchmark.cutoff;
        so.seed = cfg.seed;
        for (const double dm : cfg.benchmark.seesaw_d_max) {
            const BenchmarkResult r = seesaw_truncated(cfg.alphabet(dm), G, so);
            add(dm, r);
            const auto it = gaussian.find(dm);
            if (it != gaussian.end() && it->second > r.value + 1e-3) consistent = false;
        }
    }
    const auto path = write_table(cfg, t, {{"seed", cfg.seed}, {"gain_target", rounded(G)}});
    log << "benchmark: " << t.rows.size() << " rows -> " << path.string() << '\n';
    return consistent ? exit_ok : exit_failure;
}

/// Closed-loop coupling calibration: store a mean, pi-pulse, read out.
inline int cmd_calibrate(const RunConfig& cfg, std::ostream& log) {
    Table t{"calibrate", {"kappa", "injected_pL", "readout_xL", "kappa2_inferred", "abs_error"}, {}};
    double worst = 0.0;
    for (const double injected : cfg.injected_means) {
        const double readout = simulate_kappa_readout(cfg.memory, injected);
        const double k2 = calibrate_kappa(readout, injected);
        const double err = std::abs(k2 - cfg.memory.kappa * cfg.memory.kappa);
        worst = std::max(worst, err);
        t.add({cfg.memory.kappa, injected, readout, k2, err});
    }
    const auto path = write_table(cfg, t);
    log << "calibrate: max |kappa^2 error| = " << format_number(worst) << " -> " << path.string() << '\n';
    return worst <= 1e-10 ? exit_ok : exit_failure;
}

inline const std::map<std::string, std::function<int(const RunConfig&, std::ostream&)>>& commands() {
    static const std::map<std::string, std::function<int(const RunConfig&, std::ostream&)>> table{
        {"table1", cmd_table1},   {"table2", cmd_table2},       {"curve", cmd_curve},
        {"epr", cmd_epr},         {"benchmark", cmd_benchmark}, {"calibrate", cmd_calibrate},
    };
    return table;
}

/// Runs a command, mapping errors to exit codes.
inline int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    const auto it = commands().find(name);
    if (it == commands().end()) {
        err << "unknown command '" << name << "'\n";
        return exit_failure;
    }
    try {
        cfg.validate();
        return it->second(cfg, log);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace cvmem::app
