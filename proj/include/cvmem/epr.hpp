// Two-mode entanglement diagnostics: the Duan sum, the stored-pair and
// hybrid (stored + propagating) scenarios, and the entanglement-of-formation
// bound for symmetric states.

#pragma once

#include "cvmem/fidelity.hpp"
#include "cvmem/gaussian.hpp"
#include "cvmem/memory.hpp"

#include <array>
#include <cmath>

namespace cvmem {

/// plus_minus:  Var(x1 + x2) + Var(p1 - p2)
/// minus_plus:  Var(x1 - x2) + Var(p1 + p2)
enum class SignConvention { plus_minus, minus_plus };

inline double duan_E(const GaussianState& state, SignConvention convention = SignConvention::plus_minus) {
    if (state.n_modes() != 2) throw std::invalid_argument("duan_E: expects a 2-mode state");
    const double sx = convention == SignConvention::plus_minus ? 1.0 : -1.0;
    const double sp = -sx;
    const Mat& v = state.cov();
    const double var_x = v(0, 0) + v(2, 2) + 2.0 * sx * v(0, 2);
    const double var_p = v(1, 1) + v(3, 3) + 2.0 * sp * v(1, 3);
    return var_x + var_p;
}

/// Lower bound on the entanglement of formation (ebits) from the Duan sum,
/// using the symmetric-state closed form with Delta = E/2 (vacuum at 1).
inline double eof_lower_bound(double E) {
    if (!(E >= 0.0)) throw std::invalid_argument("eof_lower_bound: E must be >= 0");
    const double delta = E / 2.0;
    if (delta >= 1.0) return 0.0;
    if (delta == 0.0) return std::numeric_limits<double>::infinity();
    const double r = std::sqrt(delta);
    const double cp = (r + 1.0 / r) * (r + 1.0 / r) / 4.0;
    const double cm = (r - 1.0 / r) * (r - 1.0 / r) / 4.0;
    return cp * std::log2(cp) - cm * std::log2(cm);
}

struct EprReport {
    double E;
    bool separable;
    double eof_lower_bound;
};

inline EprReport make_epr_report(double E) { return {E, E >= 2.0, eof_lower_bound(E)}; }

/// Both sidebands of TMS(s) stored, cell 1 <- upper, cell 2 <- lower, in
/// atomic coordinates.
inline GaussianState stored_pair_state(const MemoryParams& params, double s) {
    return storage_in_local_picture(two_mode_squeezed(s), params);
}

/// Duan sum of the two cells. In atomic coordinates the storage maps
/// x -> -p, so the squeezed combinations are x1 - x2 and p1 + p2.
inline double stored_pair_E(const MemoryParams& params, double s) {
    return duan_E(stored_pair_state(params, s), SignConvention::minus_plus);
}

/// Closed form for storing only the upper sideband:
/// (1+G)^2/(2s) + s(1-G)^2/2 + Var(O_x) + Var(O_p).
inline double hybrid_E(const MemoryParams& params, double s) {
    check_squeezing(s, "hybrid_E");
    const double G = params.memory_gain();
    const OutputNoise n = output_noise(params);
    return (1.0 + G) * (1.0 + G) / (2.0 * s) + s * (1.0 - G) * (1.0 - G) / 2.0 + n.var_Ox + n.var_Op;
}

/// Explicit construction of the hybrid scenario: modes (+, -, vacuum);
/// the memory receives (+, vacuum) and stores + in cell 1. Returns
/// (cell 1 in the light frame, - sideband).
inline GaussianState hybrid_state(const MemoryParams& params, double s) {
    const GaussianState three = tensor(two_mode_squeezed(s), vacuum(1));
    const GaussianState stored = store_sidebands(three, params, 0, 2);
    const GaussianState pair = stored.reduced({0, 1});
    const std::array<int, 1> cell{0};
    return apply_symplectic(pair, embed(storage_frame_map(), cell, 2));
}

inline double hybrid_E_constructed(const MemoryParams& params, double s) {
    return duan_E(hybrid_state(params, s), SignConvention::plus_minus);
}

}  // namespace cvmem
