// Truncated number-basis states and a Wigner-grid overlap integrator. Used
// as an independent check on the covariance-matrix code and as the
// workspace of the truncated seesaw benchmark.

#pragma once

#include "cvmem/gaussian.hpp"

#include <complex>
#include <numbers>

namespace cvmem {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double default_fock_tail = 1e-8;
inline constexpr double max_fock_tail = 1e-4;
inline constexpr int max_fock_cutoff = 200;

/// Amplitudes c_0..c_N. For two-mode squeezed vacuum these are the
/// Schmidt coefficients on |n>|n>.
struct FockArray {
    int cutoff = 0;
    CVec amplitudes;
    /// 1 - sum |c_n|^2, the probability mass beyond the cutoff.
    double tail = 0.0;

    double norm() const { return amplitudes.squaredNorm(); }
    CMat density() const { return amplitudes * amplitudes.adjoint(); }
};

inline FockArray tms_fock(double s, int cutoff) {
    check_squeezing(s, "tms_fock");
    if (cutoff < 0) throw std::invalid_argument("tms_fock: cutoff must be >= 0");
    const double lambda = (std::sqrt(s) - 1.0 / std::sqrt(s)) / (std::sqrt(s) + 1.0 / std::sqrt(s));
    FockArray f;
    f.cutoff = cutoff;
    f.amplitudes.resize(cutoff + 1);
    const double c0 = std::sqrt(1.0 - lambda * lambda);
    double c = c0;
    for (int n = 0; n <= cutoff; ++n) {
        f.amplitudes(n) = c;
        c *= lambda;
    }
    // closed-form tail of the geometric series
    f.tail = std::pow(lambda * lambda, cutoff + 1);
    return f;
}

namespace detail {

/// <n|D(alpha) S(r e^{i psi})|0> from the eigen-relation
/// (a cosh r + a^dag e^{i psi} sinh r)|psi> = gamma |psi>.
inline CVec displaced_squeezed_amplitudes(double s, double phi_deg, const Vec2& displacement, int cutoff) {
    const double r = 0.5 * std::log(s);
    const double ch = std::cosh(r);
    const double sh = std::sinh(r);
    // squeezing x cos(phi) - p sin(phi) corresponds to psi = -2 phi
    const cplx e = std::polar(1.0, -2.0 * deg_to_rad(phi_deg));
    const cplx alpha(displacement(0) / std::sqrt(2.0), displacement(1) / std::sqrt(2.0));
    const cplx gamma = alpha * ch + std::conj(alpha) * e * sh;
    CVec c(cutoff + 1);
    c(0) = std::exp(-0.5 * std::norm(alpha) - 0.5 * std::conj(alpha) * std::conj(alpha) * e * std::tanh(r)) /
           std::sqrt(ch);
    if (cutoff >= 1) c(1) = gamma * c(0) / ch;
    for (int n = 1; n < cutoff; ++n) {
        c(n + 1) = (gamma * c(n) - e * sh * std::sqrt(static_cast<double>(n)) * c(n - 1)) /
                   (ch * std::sqrt(static_cast<double>(n + 1)));
    }
    return c;
}

}  // namespace detail

/// D(alpha) S(xi)|0> truncated at `cutoff`; throws if more than `max_tail`
/// probability lies beyond it.
inline FockArray displaced_squeezed_fock(double s, double phi_deg, const Vec2& displacement, int cutoff,
                                         double max_tail = max_fock_tail) {
    check_squeezing(s, "displaced_squeezed_fock");
    if (cutoff < 0) throw std::invalid_argument("displaced_squeezed_fock: cutoff must be >= 0");
    FockArray f;
    f.cutoff = cutoff;
    f.amplitudes = detail::displaced_squeezed_amplitudes(s, phi_deg, displacement, cutoff);
    f.tail = std::max(0.0, 1.0 - f.norm());
    if (f.tail > max_tail) {
        throw std::invalid_argument("displaced_squeezed_fock: cutoff too small (tail mass " + std::to_string(f.tail) +
                                    ")");
    }
    return f;
}

/// Smallest cutoff whose tail mass is below `tail`, capped at 200.
inline int default_cutoff(double s, double phi_deg, const Vec2& displacement, double tail = default_fock_tail) {
    const CVec c = detail::displaced_squeezed_amplitudes(s, phi_deg, displacement, max_fock_cutoff);
    double mass = 0.0;
    for (int n = 0; n <= max_fock_cutoff; ++n) {
        mass += std::norm(c(n));
        if (1.0 - mass < tail) return n;
    }
    return max_fock_cutoff;
}

/// Pure-loss channel on a truncated density matrix, Kraus form
/// K_k = sum_n sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k><n|. Exact on the
/// truncated subspace since loss never raises photon number.
inline CMat attenuate(const CMat& rho, double eta) {
    check_transmission(eta, "attenuate");
    const auto d = rho.rows();
    // binomial amplitudes via log-gamma for stability at large n
    auto amp = [eta](Eigen::Index n, Eigen::Index k) {
        if (eta == 1.0) return k == 0 ? 1.0 : 0.0;
        if (eta == 0.0) return k == n ? 1.0 : 0.0;
        const double lb = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        return std::exp(0.5 * (lb + (n - k) * std::log(eta) + k * std::log1p(-eta)));
    };
    CMat out = CMat::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        CMat kraus = CMat::Zero(d, d);
        for (Eigen::Index n = k; n < d; ++n) kraus(n - k, n) = amp(n, k);
        out.noalias() += kraus * rho * kraus.adjoint();
    }
    return out;
}

/// Thermal photon-number distribution with mean n_bar, truncated.
inline Vec thermal_distribution(double n_bar, int cutoff) {
    Vec p(cutoff + 1);
    const double q = n_bar / (1.0 + n_bar);
    for (int n = 0; n <= cutoff; ++n) p(n) = std::pow(q, n) / (1.0 + n_bar);
    return p;
}

/// Quadrature means and covariance of a truncated pure state.
inline std::pair<Vec2, Mat2> quadrature_moments(const FockArray& f) {
    const auto d = f.amplitudes.size();
    CMat a = CMat::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const CMat x = (a + a.adjoint()) / std::sqrt(2.0);
    const CMat p = (a - a.adjoint()) / cplx(0.0, std::sqrt(2.0));
    const CVec& v = f.amplitudes;
    auto ev = [&](const CMat& op) { return (v.adjoint() * op * v)(0).real(); };
    Vec2 mean(ev(x), ev(p));
    Mat2 cov;
    cov(0, 0) = ev(x * x) - mean(0) * mean(0);
    cov(1, 1) = ev(p * p) - mean(1) * mean(1);
    cov(0, 1) = cov(1, 0) = 0.5 * ev(x * p + p * x) - mean(0) * mean(1);
    return {mean, cov};
}

// ---------------------------------------------------------------------------
// Wigner grid

struct WignerGrid {
    double extent = 10.0;  ///< half-width around `center`, quadrature units
    int resolution = 801;  ///< points per axis
    Vec2 center = Vec2::Zero();

    /// Grid centred between the two states' means.
    static WignerGrid between(const GaussianState& a, const GaussianState& b, double extent = 10.0,
                              int resolution = 801) {
        return {extent, resolution, 0.5 * (a.mode_mean(0) + b.mode_mean(0))};
    }
};

inline double gaussian_wigner(const Vec2& r, const Vec2& mean, const Mat2& cov_inv, double det) {
    const Vec2 d = r - mean;
    return std::exp(-0.5 * d.dot(cov_inv * d)) / (2.0 * std::numbers::pi * std::sqrt(det));
}

struct WignerOverlap {
    double value;
    /// max over both states of |integral of W over the grid - 1|
    double grid_error;
};

/// 2 pi times the trapezoid-rule integral of W_a W_b over the grid.
inline WignerOverlap wigner_overlap(const GaussianState& a, const GaussianState& b, const WignerGrid& grid) {
    if (a.n_modes() != 1 || b.n_modes() != 1) throw std::invalid_argument("wigner_overlap: single-mode states only");
    if (grid.resolution < 3) throw std::invalid_argument("wigner_overlap: resolution too small");
    for (const GaussianState* st : {&a, &b}) {
        Eigen::SelfAdjointEigenSolver<Mat2> es(st->mode_cov(0));
        const double sigma = std::sqrt(es.eigenvalues().maxCoeff());
        const double offset = (st->mode_mean(0) - grid.center).cwiseAbs().maxCoeff();
        if (offset + 6.0 * sigma > grid.extent) {
            throw std::invalid_argument("wigner_overlap: grid extent smaller than 6 sigma of a state");
        }
    }
    const Mat2 va = a.mode_cov(0), vb = b.mode_cov(0);
    const Mat2 ia = va.inverse(), ib = vb.inverse();
    const double da = va.determinant(), db = vb.determinant();
    const Vec2 ma = a.mode_mean(0), mb = b.mode_mean(0);

    const int n = grid.resolution;
    const double h = 2.0 * grid.extent / (n - 1);
    double overlap = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (int i = 0; i < n; ++i) {
        const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        double row = 0.0, row_a = 0.0, row_b = 0.0;
        for (int j = 0; j < n; ++j) {
            const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            const Vec2 r(grid.center(0) - grid.extent + i * h, grid.center(1) - grid.extent + j * h);
            const double wa = gaussian_wigner(r, ma, ia, da);
            const double wb = gaussian_wigner(r, mb, ib, db);
            row += wj * wa * wb;
            row_a += wj * wa;
            row_b += wj * wb;
        }
        overlap += wi * row;
        norm_a += wi * row_a;
        norm_b += wi * row_b;
    }
    const double cell = h * h;
    return {2.0 * std::numbers::pi * overlap * cell,
            std::max(std::abs(norm_a * cell - 1.0), std::abs(norm_b * cell - 1.0))};
}

}  // namespace cvmem
