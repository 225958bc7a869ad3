// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 iff every criterion passes, except those named with
// --expect-fail N, which must fail (an unexpected pass is also an error).

#include "cvmem/benchmark.hpp"
#include "cvmem/epr.hpp"
#include "cvmem/fidelity.hpp"
#include "cvmem/fock.hpp"
#include "cvmem/memory.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace cvmem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [miss] " << what << ';';
        }
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

Outcome table1_reproduction() {
    Outcome o;
    double worst = 0.0;
    for (const auto& r : table1_records()) {
        const double f = table1_overlap(r);
        const double dev = std::abs(f - r.overlap);
        worst = std::max(worst, dev);
        o.require(dev <= 0.01, "row (" + num(r.mean_x_in) + "," + num(r.mean_p_in) + "," + num(r.phi_deg) +
                                   ") " + num(f) + " vs " + num(r.overlap));
    }
    o.detail << " max |dev| = " << num(worst);
    return o;
}

Outcome ideal_memory() {
    Outcome o;
    MemoryParams p = paper_2010_preset();
    p.var_xA_init = 0.5;
    auto overlap = [&](double phi) {
        const GaussianState in = squeezed_state(4, phi);
        return gaussian_overlap(in, to_light_frame(store_ideal(in, p)));
    };
    const double f0 = overlap(0), f90 = overlap(90), mean = 0.5 * (f0 + f90);
    o.require(within(f0, 0.95, 0.01), "phi=0 " + num(f0));
    o.require(within(f90, 0.61, 0.01), "phi=90 " + num(f90));
    o.require(within(mean, 0.78, 0.01), "mean " + num(mean));
    o.detail << " F = " << num(f0) << ", " << num(f90) << ", mean " << num(mean);
    return o;
}

Outcome added_noise() {
    Outcome o;
    for (const auto& run : squeezed_vacuum_runs()) {
        const AddedNoise n = infer_added_noise(run.var_xA, run.var_pA, paper_2010_preset(), run.phi_deg, 4);
        o.require(within(n.var_Sx, run.published.var_Sx, 0.01) && within(n.var_Sp, run.published.var_Sp, 0.01),
                  "phi=" + num(run.phi_deg));
        o.detail << " (" << num(n.var_Sx) << ", " << num(n.var_Sp) << ")";
    }
    const AggregateNoise agg = aggregate_added_noise(paper_2010_preset());
    o.require(within(agg.mean_x, 0.47, 0.06), "aggregate x " + num(agg.mean_x));
    o.require(within(agg.mean_p, 0.38, 0.11), "aggregate p " + num(agg.mean_p));
    o.detail << " aggregate " << num(agg.mean_x) << "/" << num(agg.mean_p);
    return o;
}

Outcome epr_diagnostics() {
    Outcome o;
    const double stored = stored_pair_E(with_added_noise(paper_2010_preset(), measured_added_noise(0)), 4);
    const double hybrid = hybrid_E_constructed(paper_2010_preset(), 4);
    const double eof = eof_lower_bound(1.52);
    const double input = duan_E(two_mode_squeezed(4));
    o.require(within(stored, 2.08, 0.01), "stored pair " + num(stored));
    o.require(within(hybrid, 1.51, 0.01), "hybrid " + num(hybrid));
    o.require(within(eof, 0.136, 0.005), "eof " + num(eof));
    o.require(input == 0.5, "input pair " + num(input));
    o.detail << " E = " << num(stored) << " / " << num(hybrid) << ", EoF(1.52) = " << num(eof) << ", input "
             << num(input);
    return o;
}

Outcome averaged_fidelity() {
    Outcome o;
    const MemoryParams p = paper_2010_preset();
    const std::array<double, 3> d{0.0, 3.8, 7.6};
    const auto curve = fidelity_curve(d, {0.0, 4.0, {0.0, 90.0}},
                                      [&](const Alphabet& a) { return average_fidelity_experimental(a, p); });
    o.require(curve[1].fidelity >= 0.50 && curve[1].fidelity <= 0.56, "d=3.8 " + num(curve[1].fidelity));
    for (std::size_t i = 1; i < curve.size(); ++i) o.require(curve[i].fidelity <= curve[i - 1].fidelity, "increasing");
    o.detail << " F(0, 3.8, 7.6) = " << num(curve[0].fidelity) << ", " << num(curve[1].fidelity) << ", "
             << num(curve[2].fidelity);
    return o;
}

Outcome benchmark_consistency() {
    Outcome o;
    const double coherent = optimize_gaussian_strategy({50.0, 1.0, {0.0}}, 1.0).second.value;
    o.require(within(coherent, 0.5, 0.005), "coherent limit " + num(coherent));
    const Alphabet a{3.8, 4.0, {0.0}};
    const double G = paper_2010_preset().memory_gain();
    const double gauss = optimize_gaussian_strategy(a, G).second.value;
    const BenchmarkResult seesaw = seesaw_truncated(a, G);
    o.require(gauss <= 0.48, "gaussian " + num(gauss));
    o.require(seesaw.value <= 0.48, "seesaw " + num(seesaw.value));
    o.require(seesaw.value >= gauss - 1e-3, "seesaw below gaussian");
    const std::vector<CurvePoint> raw{{0, 0.62}, {3.8, 0.45}, {7.6, 0.47}};
    const auto env = monotone_envelope(raw);
    o.require(env[2].fidelity == 0.45 && env[1].fidelity == 0.45 && env[0].fidelity == 0.62, "envelope");
    o.detail << " coherent " << num(coherent) << ", gaussian " << num(gauss) << ", seesaw " << num(seesaw.value)
             << " (tail " << num(seesaw.truncation_tail) << ")";
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    double worst = 0.0;
    for (const auto& r : table1_records()) {
        const GaussianState in = record_input_state(r);
        const GaussianState st = record_stored_state(r);
        const double diff = std::abs(wigner_overlap(in, st, WignerGrid::between(in, st)).value - gaussian_overlap(in, st));
        worst = std::max(worst, diff);
    }
    o.require(worst <= 1e-6, "wigner vs closed form " + num(worst));
    const FockArray f = tms_fock(4, 40);
    const double printed[] = {0.8, 0.48, 0.29, 0.18};
    for (int n = 0; n < 4; ++n) {
        o.require(std::abs(f.amplitudes(n).real() - printed[n]) <= 0.01, "c" + std::to_string(n));
    }
    o.detail << " max |wigner - closed| = " << num(worst) << ", c = " << num(f.amplitudes(0).real()) << ", "
             << num(f.amplitudes(1).real()) << ", " << num(f.amplitudes(2).real()) << ", "
             << num(f.amplitudes(3).real());
    return o;
}

/// Condensed property suites (the full ones live in the unit tests).
Outcome property_suites() {
    Outcome o;
    std::mt19937_64 rng(2024);
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    int failures = 0;
    auto check = [&](bool ok) { failures += ok ? 0 : 1; };
    for (int i = 0; i < 1000; ++i) {
        MemoryParams p;
        p.Z2 = u(1.05, 20);
        p.kappa = u(0, std::sqrt(p.Z2));
        p.g = u(-2, 2);
        p.var_xA_init = u(0.1, 1);
        p.var_pA_init = 0.25 / p.var_xA_init + u(0, 0.5);
        p.var_Sx = u(0, 0.5);
        p.var_Sp = u(0, 0.5);
        p.losses = {u(0.05, 1), u(0.05, 1), u(0.05, 1)};
        check(storage_map(p).is_symplectic() && phase_rotation(u(0, 360)).is_symplectic());

        const GaussianState in = squeezed_state(u(1, 20), u(0, 180), Vec2(u(-5, 5), u(-5, 5)));
        const double a = u(0, 1), b = u(0, 1);
        const Mat twice = apply_loss(apply_loss(in, 0, a), 0, b).cov();
        check((twice - apply_loss(in, 0, a * b).cov()).cwiseAbs().maxCoeff() < 1e-12);

        check(symplectic_eigenvalues(store_noisy(in, p).cov()).minCoeff() >= vacuum_variance - 1e-9);
        check(store_noisy(in, p).cov() == store_noisy(in, p).cov());

        if (i % 10 == 0) {
            SeesawOptions so;
            so.grid_nodes = 1 + i % 2;
            so.phases = 2;
            so.max_iterations = 15;
            so.random_start = true;
            so.seed = static_cast<std::uint64_t>(i);
            const BenchmarkResult r = seesaw_truncated({u(0, 1), u(1, 2.5), {0.0}}, u(0.3, 1), so);
            for (std::size_t k = 1; k < r.history.size(); ++k) check(r.history[k] >= r.history[k - 1]);
        }
    }
    o.require(failures == 0, std::to_string(failures) + " property failures");
    o.detail << " " << failures << " failures over 1000 cases";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cvmem acceptance run"};
    std::vector<int> expect_fail;
    app.add_option("--expect-fail", expect_fail, "criterion numbers documented as unattainable");
    CLI11_PARSE(app, argc, argv);
    const std::set<int> expected(expect_fail.begin(), expect_fail.end());

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Table 1 overlaps within 0.01", table1_reproduction},
        {"ideal-memory fidelities", ideal_memory},
        {"added-noise inversion", added_noise},
        {"EPR diagnostics", epr_diagnostics},
        {"averaged fidelity", averaged_fidelity},
        {"benchmark consistency", benchmark_consistency},
        {"oracle equivalence", oracle_equivalence},
        {"property suites", property_suites},
    };

    int status = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << id << ' ' << criteria[i].first << ':' << o.detail.str()
                  << std::endl;
        if (o.pass == expected.contains(id)) status = 1;
    }
    return status;
}
