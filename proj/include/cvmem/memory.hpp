// Atom-light quantum memory: the swap-type interaction, homodyne feedback
// storage, the added-noise model and the sideband / cos-sin / local-cell
// basis bookkeeping.
//
// Two-mode (light, atoms) systems are ordered (x_L, p_L, x_A, p_A).

#pragma once

#include "cvmem/gaussian.hpp"

#include <boost/math/tools/roots.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace cvmem {

struct MemoryParams {
    double Z2 = 6.4;       ///< detuning-dependent interaction constant Z^2
    double kappa = 1.0;    ///< coupling constant
    double g = 0.0;        ///< electronic feedback gain (not the memory gain G)
    double var_xA_init = 0.5;
    double var_pA_init = 0.5;
    double var_Sx = 0.0;   ///< extra storage noise on x_A
    double var_Sp = 0.0;   ///< extra storage noise on p_A
    LossBudget losses;

    /// G = sqrt(eta_loss * eta_ent).
    double memory_gain() const { return losses.memory_gain(); }

    void validate() const {
        if (!(Z2 > 0.0)) throw std::invalid_argument("MemoryParams: Z2 must be > 0");
        if (!(kappa >= 0.0) || kappa * kappa > Z2 * (1.0 + 1e-12)) {
            throw std::invalid_argument("MemoryParams: need 0 <= kappa^2 <= Z2");
        }
        if (var_xA_init < 0.0 || var_pA_init < 0.0 || var_Sx < 0.0 || var_Sp < 0.0) {
            throw std::invalid_argument("MemoryParams: variances must be >= 0");
        }
        losses.validate();
    }
};

/// sqrt(1 - kappa^2 / Z^2), the residual weight of the original operator.
inline double swap_residual(double kappa, double Z2) {
    return std::sqrt(std::max(0.0, 1.0 - kappa * kappa / Z2));
}

/// Feedback gain cancelling the initial p_A at kappa = 1.
inline double analytic_optimal_gain(double Z2) { return swap_residual(1.0, Z2); }

/// Values from the 2010 experiment: Z^2 = 6.4, kappa = 1 with optimal g,
/// spin-squeezed atoms (0.43, 1.07), losses (0.80, 0.90, 0.79) and the
/// rounded storage noise S_x ~ 0.1, S_p ~ 0.3.
inline MemoryParams paper_2010_preset() {
    MemoryParams p;
    p.Z2 = 6.4;
    p.kappa = 1.0;
    p.g = analytic_optimal_gain(p.Z2);
    p.var_xA_init = 0.43;
    p.var_pA_init = 1.07;
    p.var_Sx = 0.1;
    p.var_Sp = 0.3;
    p.losses = {0.80, 0.90, 0.79};
    return p;
}

/// Lossless, noiseless memory with a perfectly squeezed x_A.
inline MemoryParams perfect_memory_preset() {
    MemoryParams p = paper_2010_preset();
    p.var_xA_init = 0.0;
    p.var_pA_init = 0.5;
    p.var_Sx = 0.0;
    p.var_Sp = 0.0;
    p.losses = {1.0, 1.0, 1.0};
    return p;
}

inline std::optional<MemoryParams> memory_preset(std::string_view name) {
    if (name == "paper-2010") return paper_2010_preset();
    if (name == "perfect") return perfect_memory_preset();
    return std::nullopt;
}

struct AddedNoise {
    double var_Sx = 0.0;
    double var_Sp = 0.0;
    /// Set when an inferred variance came out negative (model mismatch);
    /// values are reported unclamped.
    bool negative = false;
};

/// Stored squeezed-vacuum variances and the noise they imply.
struct SqueezedVacuumRun {
    double phi_deg;
    double var_xA;
    double var_pA;
    AddedNoise published;
};

inline std::span<const SqueezedVacuumRun> squeezed_vacuum_runs() {
    static const SqueezedVacuumRun runs[] = {
        {0.0, 2.02, 0.52, {0.08, 0.29, false}},
        {90.0, 0.72, 1.90, {0.13, 0.32, false}},
    };
    return runs;
}

/// Storage noise inferred from the squeezed-vacuum runs (phi = 0 and 90).
inline AddedNoise measured_added_noise(double phi_deg) {
    for (const auto& run : squeezed_vacuum_runs()) {
        if (run.phi_deg == phi_deg) return run.published;
    }
    throw std::invalid_argument("measured_added_noise: only phi = 0 and 90 were measured");
}

inline MemoryParams with_added_noise(MemoryParams p, const AddedNoise& n) {
    p.var_Sx = n.var_Sx;
    p.var_Sp = n.var_Sp;
    return p;
}

// ---------------------------------------------------------------------------
// Interaction and feedback

/// Input-output map of the atom-light interaction on (x_L, p_L, x_A, p_A).
inline SymplecticMap interaction_map(const MemoryParams& params) {
    params.validate();
    const double c = swap_residual(params.kappa, params.Z2);
    const double k = params.kappa;
    const double kz = params.kappa / params.Z2;
    Mat s(4, 4);
    // clang-format off
    s << c,   0,  0,   k,    // x_L' = c x_L + kappa p_A
         0,   c, -kz,  0,    // p_L' = c p_L - (kappa/Z^2) x_A
         0,   k,  c,   0,    // x_A' = c x_A + kappa p_L
        -kz,  0,  0,   c;    // p_A' = c p_A - (kappa/Z^2) x_L
    // clang-format on
    return SymplecticMap::checked(s);
}

/// Homodyne measurement of x_L followed by the displacement p_A -= g x_L.
/// Written as the equivalent controlled-displacement gate; the light rows
/// are irrelevant once light is traced out.
inline SymplecticMap feedback_map(double g) {
    Mat s = Mat::Identity(4, 4);
    s(1, 2) = -g;  // p_L -= g x_A (back-action, keeps the gate symplectic)
    s(3, 0) = -g;  // p_A -= g x_L
    return SymplecticMap::checked(s);
}

/// Full (light, atoms) map of interaction followed by feedback.
inline SymplecticMap storage_map(const MemoryParams& params) {
    return feedback_map(params.g).after(interaction_map(params));
}

/// Coefficient of the initial p_A in the post-feedback p_A.
inline double residual_pA_coefficient(const MemoryParams& params, double g) {
    MemoryParams p = params;
    p.g = g;
    return storage_map(p).matrix(3, 3);
}

inline double numeric_optimal_gain(const MemoryParams& params) {
    params.validate();
    auto f = [&](double g) { return residual_pA_coefficient(params, g); };
    double hi = 1.0;
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e9) throw std::runtime_error("numeric_optimal_gain: no sign change");
    }
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, 0.0, hi, f(0.0), f(hi), boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (a + b);
}

/// Feedback gain for which the final p_A does not contain the initial p_A.
/// kappa = 1 uses the closed form; other couplings fall back to a bracketed
/// root search on the residual coefficient.
inline double optimal_gain(const MemoryParams& params) {
    params.validate();
    if (params.kappa == 1.0) return analytic_optimal_gain(params.Z2);
    return numeric_optimal_gain(params);
}

/// Storage of one light mode into the atoms as a Gaussian channel
/// (atoms_out = X light_in + noise Y). Obtained from the full symplectic
/// storage map by taking the atomic rows and averaging over the initial
/// atomic state (x_A, p_A) with variances (var_xA_init, var_pA_init).
inline GaussianChannel ideal_storage_channel(const MemoryParams& params) {
    const Mat full = storage_map(params).matrix;
    const Mat x = full.block(2, 0, 2, 2);
    const Mat from_atoms = full.block(2, 2, 2, 2);
    const Mat init = Vec2(params.var_xA_init, params.var_pA_init).asDiagonal();
    return {x, symmetrized(from_atoms * init * from_atoms.transpose()), Vec::Zero(2)};
}

/// Atomic state after storing `input_light` with the params' kappa and g.
inline GaussianState store_ideal(const GaussianState& input_light, const MemoryParams& params) {
    if (input_light.n_modes() != 1) throw std::invalid_argument("store_ideal: expects a single light mode");
    return apply_channel(input_light, ideal_storage_channel(params), {0});
}

/// Storage of the pure input including transmission/entrance loss (memory
/// gain G), the kappa = 1 optimal-gain storage, and the extra noise S_x, S_p.
inline GaussianChannel noisy_storage_channel(const MemoryParams& params) {
    params.validate();
    const double G = params.memory_gain();
    if (!(G >= 0.0 && G <= 1.0)) throw std::invalid_argument("noisy_storage_channel: G outside [0,1]");
    MemoryParams unit = params;
    unit.kappa = 1.0;
    unit.g = analytic_optimal_gain(params.Z2);
    return additive_noise_channel(params.var_Sx, params.var_Sp)
        .after(ideal_storage_channel(unit))
        .after(loss_channel(G * G));
}

inline GaussianState store_noisy(const GaussianState& input_pure_light, const MemoryParams& params) {
    if (input_pure_light.n_modes() != 1) throw std::invalid_argument("store_noisy: expects a single light mode");
    return apply_channel(input_pure_light, noisy_storage_channel(params), {0});
}

/// Inverts the stored-variance model for (Var S_x, Var S_p), given the
/// stored variances (Var x_A^fin, Var p_A^fin) of a squeezed vacuum with
/// squeezing `s` and phase `phi_deg`.
inline AddedNoise infer_added_noise(double stored_var_xA, double stored_var_pA, const MemoryParams& params,
                                    double phi_deg, double s) {
    if (stored_var_xA < 0.0 || stored_var_pA < 0.0) throw std::invalid_argument("infer_added_noise: negative variance");
    const Mat2 pure = squeezed_cov(s, phi_deg);
    const double G2 = params.memory_gain() * params.memory_gain();
    const double atomic = (1.0 - 1.0 / params.Z2) * params.var_xA_init;
    AddedNoise n;
    n.var_Sx = stored_var_xA - atomic - G2 * pure(1, 1) - (1.0 - G2) * vacuum_variance;
    n.var_Sp = stored_var_pA - G2 * pure(0, 0) - (1.0 - G2) * vacuum_variance;
    n.negative = n.var_Sx < 0.0 || n.var_Sp < 0.0;
    return n;
}

/// Noise operators of the lossy storage: O_x on x_A and O_p on p_A.
struct OutputNoise {
    double var_Ox;
    double var_Op;
};

inline OutputNoise output_noise(const MemoryParams& params) {
    const double G2 = params.memory_gain() * params.memory_gain();
    return {(1.0 - 1.0 / params.Z2) * params.var_xA_init + (1.0 - G2) * vacuum_variance + params.var_Sx,
            (1.0 - G2) * vacuum_variance + params.var_Sp};
}

// ---------------------------------------------------------------------------
// Mode bases

enum class ModeBasis { sideband, cos_sin, local };

inline std::string_view to_string(ModeBasis b) {
    switch (b) {
        case ModeBasis::sideband: return "sideband";
        case ModeBasis::cos_sin: return "cos-sin";
        case ModeBasis::local: return "local";
    }
    return "?";
}

namespace detail {

// (x+, p+, x-, p-) -> (x_c, p_c, x_s, p_s)
inline Mat sideband_to_cossin_matrix() {
    const double h = 1.0 / std::sqrt(2.0);
    Mat m(4, 4);
    // clang-format off
    m << h, 0, h, 0,
         0, h, 0, h,
         0,-h, 0, h,
         h, 0,-h, 0;
    // clang-format on
    return m;
}

// (x_c, p_c, x_s, p_s) -> (x_1, p_1, x_2, p_2)
inline Mat cossin_to_local_matrix() {
    const double h = 1.0 / std::sqrt(2.0);
    Mat m(4, 4);
    // clang-format off
    m << h, 0, 0, h,
         0, h,-h, 0,
         h, 0, 0,-h,
         0, h, h, 0;
    // clang-format on
    return m;
}

inline Mat to_cossin(ModeBasis b) {
    switch (b) {
        case ModeBasis::sideband: return sideband_to_cossin_matrix();
        case ModeBasis::cos_sin: return Mat::Identity(4, 4);
        case ModeBasis::local: return cossin_to_local_matrix().transpose();
    }
    throw std::invalid_argument("unknown basis");
}

}  // namespace detail

/// Orthogonal symplectic map taking 2-mode quadratures in `from` to `to`.
inline SymplecticMap basis_map(ModeBasis from, ModeBasis to) {
    const Mat m = detail::to_cossin(to).transpose() * detail::to_cossin(from);
    return SymplecticMap::checked(m);
}

inline GaussianState basis_transform(const GaussianState& state, ModeBasis from, ModeBasis to) {
    if (state.n_modes() != 2) throw std::invalid_argument("basis_transform: expects a 2-mode state");
    return apply_symplectic(state, basis_map(from, to));
}

/// Stores the sideband pair on modes (plus, minus) into the two cells: the
/// pair is rotated to cos-sin, each of c and s goes through the noisy storage
/// channel independently, and the result is rotated to the local cells.
/// Cell 1 replaces `plus`, cell 2 replaces `minus`.
inline GaussianState store_sidebands(const GaussianState& state, const MemoryParams& params, int plus, int minus) {
    if (plus == minus) throw std::invalid_argument("store_sidebands: modes must differ");
    const std::array<int, 2> pair{plus, minus};
    const int n = state.n_modes();
    const auto to_cs = embed(basis_map(ModeBasis::sideband, ModeBasis::cos_sin), pair, n);
    const auto to_local = embed(basis_map(ModeBasis::cos_sin, ModeBasis::local), pair, n);
    const GaussianChannel mem = noisy_storage_channel(params);
    GaussianState cs = apply_symplectic(state, to_cs);
    cs = apply_channel(cs, mem, {plus});
    cs = apply_channel(cs, mem, {minus});
    return apply_symplectic(cs, to_local);
}

inline GaussianState storage_in_local_picture(const GaussianState& input, const MemoryParams& params) {
    if (input.n_modes() != 2) throw std::invalid_argument("storage_in_local_picture: expects a 2-mode sideband state");
    return store_sidebands(input, params, 0, 1);
}

// ---------------------------------------------------------------------------
// Calibration

/// Magnetic pi-pulse on one atomic mode: x -> -p, p -> x.
inline SymplecticMap pi_pulse_map() {
    Mat s(2, 2);
    s << 0, -1, 1, 0;
    return SymplecticMap::checked(s);
}

/// Mean of x_L' on the third (readout) pulse after storing <p_L> =
/// `injected_pL` with the second pulse and rotating the atoms by a pi-pulse.
/// Atoms start with zero mean; both probe pulses are otherwise vacuum.
inline double simulate_kappa_readout(const MemoryParams& params, double injected_pL) {
    const SymplecticMap interact = interaction_map(params);
    Vec mean = Vec::Zero(4);
    mean(1) = injected_pL;
    mean = interact.matrix * mean;
    Vec atoms = pi_pulse_map().matrix * mean.segment<2>(2);
    Vec third(4);
    third << 0.0, 0.0, atoms(0), atoms(1);
    third = interact.matrix * third;
    return third(0);
}

/// kappa^2 from <x_L'^3rd> = kappa^2 <p_L^2nd>.
inline double calibrate_kappa(double readout_mean, double injected_mean) {
    if (std::abs(injected_mean) < 1e-9) throw std::invalid_argument("calibrate_kappa: injected mean too small");
    return readout_mean / injected_mean;
}

}  // namespace cvmem
