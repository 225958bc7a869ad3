// Multimode Gaussian states in the vacuum-variance-1/2 convention.
//
// Quadratures are ordered (x1, p1, x2, p2, ...). Every basis change or
// interaction is an explicit SymplecticMap or GaussianChannel; nothing in
// this library reorders quadratures implicitly.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvmem {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double symmetry = 1e-12;
/// Symplectic eigenvalues may dip this far below 1/2 (round-off over ~10
/// chained maps).
inline constexpr double uncertainty = 1e-9;
inline constexpr double symplectic = 1e-10;
inline constexpr double purity = 1e-9;
inline constexpr double max_squeezing = 1e6;
}  // namespace tol

inline constexpr double vacuum_variance = 0.5;

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Standard symplectic form, block-diagonal with [[0,1],[-1,0]].
inline Mat symplectic_form(int n_modes) {
    Mat omega = Mat::Zero(2 * n_modes, 2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        omega(2 * m, 2 * m + 1) = 1.0;
        omega(2 * m + 1, 2 * m) = -1.0;
    }
    return omega;
}

inline Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

/// Symplectic eigenvalues of a positive-definite covariance matrix,
/// ascending. Computed as the square roots of the (doubly degenerate)
/// eigenvalues of -(V^1/2 Ω V^1/2)^2.
inline Vec symplectic_eigenvalues(const Mat& cov) {
    const auto n = cov.rows();
    if (n % 2 != 0 || cov.cols() != n) {
        throw std::invalid_argument("symplectic_eigenvalues: covariance must be 2N x 2N");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(cov));
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw std::invalid_argument("symplectic_eigenvalues: covariance is not positive definite");
    }
    const Mat root = es.operatorSqrt();
    const Mat k = root * symplectic_form(static_cast<int>(n / 2)) * root;
    Eigen::SelfAdjointEigenSolver<Mat> ks(symmetrized(k.transpose() * k), Eigen::EigenvaluesOnly);
    Vec nu(n / 2);
    for (Eigen::Index i = 0; i < n / 2; ++i) {
        nu(i) = std::sqrt(std::max(0.0, ks.eigenvalues()(2 * i)));
    }
    return nu;
}

class GaussianState {
public:
    /// Validates symmetry and the uncertainty relation; the covariance is
    /// symmetrized before storage.
    GaussianState(Vec mean, Mat cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
        const auto dim = mean_.size();
        if (dim == 0 || dim % 2 != 0) {
            throw std::invalid_argument("GaussianState: mean must have even, non-zero length");
        }
        if (cov_.rows() != dim || cov_.cols() != dim) {
            throw std::invalid_argument("GaussianState: covariance shape does not match mean");
        }
        if (!mean_.allFinite() || !cov_.allFinite()) {
            throw std::invalid_argument("GaussianState: non-finite moments");
        }
        const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
        if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > tol::symmetry * scale) {
            throw std::invalid_argument("GaussianState: covariance is not symmetric");
        }
        cov_ = symmetrized(cov_);
        Eigen::SelfAdjointEigenSolver<Mat> es(cov_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 0.0 ||
            symplectic_eigenvalues(cov_).minCoeff() < vacuum_variance - tol::uncertainty) {
            throw std::invalid_argument("GaussianState: covariance violates the uncertainty relation");
        }
    }

    int n_modes() const { return static_cast<int>(mean_.size() / 2); }
    const Vec& mean() const { return mean_; }
    const Mat& cov() const { return cov_; }

    Vec2 mode_mean(int m) const { return mean_.segment<2>(2 * check_mode(m)); }
    Mat2 mode_cov(int m) const {
        const int i = 2 * check_mode(m);
        return cov_.block<2, 2>(i, i);
    }

    /// Marginal on the listed modes, in the listed order.
    GaussianState reduced(std::span<const int> modes) const {
        const auto k = static_cast<Eigen::Index>(modes.size());
        Vec mu(2 * k);
        Mat v(2 * k, 2 * k);
        for (Eigen::Index a = 0; a < k; ++a) {
            const int ia = 2 * check_mode(modes[a]);
            mu.segment<2>(2 * a) = mean_.segment<2>(ia);
            for (Eigen::Index b = 0; b < k; ++b) {
                const int ib = 2 * check_mode(modes[b]);
                v.block<2, 2>(2 * a, 2 * b) = cov_.block<2, 2>(ia, ib);
            }
        }
        return {std::move(mu), std::move(v)};
    }
    GaussianState reduced(std::initializer_list<int> modes) const {
        return reduced(std::span<const int>(modes.begin(), modes.size()));
    }

    /// det(2V) == 1 within tolerance.
    bool is_pure() const { return std::abs((2.0 * cov_).determinant() - 1.0) < tol::purity; }

private:
    int check_mode(int m) const {
        if (m < 0 || m >= n_modes()) {
            throw std::out_of_range("GaussianState: mode " + std::to_string(m) + " out of range");
        }
        return m;
    }

    Vec mean_;
    Mat cov_;
};

inline GaussianState vacuum(int n_modes) {
    if (n_modes < 1) throw std::invalid_argument("vacuum: n_modes must be >= 1");
    return {Vec::Zero(2 * n_modes), vacuum_variance * Mat::Identity(2 * n_modes, 2 * n_modes)};
}

inline GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    const auto na = a.mean().size();
    const auto nb = b.mean().size();
    Vec mu(na + nb);
    mu << a.mean(), b.mean();
    Mat v = Mat::Zero(na + nb, na + nb);
    v.topLeftCorner(na, na) = a.cov();
    v.bottomRightCorner(nb, nb) = b.cov();
    return {std::move(mu), std::move(v)};
}

inline void check_squeezing(double s, const char* who) {
    if (!(s > 0.0)) throw std::invalid_argument(std::string(who) + ": squeezing factor must be > 0");
    if (s > tol::max_squeezing || 1.0 / s > tol::max_squeezing) {
        throw std::invalid_argument(std::string(who) + ": squeezing factor beyond 1e6 is ill-conditioned");
    }
}

/// Phase-space rotation by `phi_deg`; R(phi) maps the x axis onto
/// (cos phi, -sin phi) so that x cos phi - p sin phi is the rotated x.
inline Mat2 rotation2(double phi_deg) {
    const double c = std::cos(deg_to_rad(phi_deg));
    const double s = std::sin(deg_to_rad(phi_deg));
    Mat2 r;
    r << c, s, -s, c;
    return r;
}

/// Covariance of a pure squeezed state: Var(x cos phi - p sin phi) = 1/(2s)
/// and the conjugate quadrature carries s/2.
inline Mat2 squeezed_cov(double s, double phi_deg) {
    const Mat2 r = rotation2(phi_deg);
    const Mat2 d = Eigen::Vector2d(1.0 / (2.0 * s), s / 2.0).asDiagonal();
    return r * d * r.transpose();
}

inline GaussianState squeezed_state(double s, double phi_deg, const Vec2& displacement = Vec2::Zero()) {
    check_squeezing(s, "squeezed_state");
    return {displacement, squeezed_cov(s, phi_deg)};
}

/// EPR state with Var(x1+x2)/2 = Var(p1-p2)/2 = 1/(2s).
inline GaussianState two_mode_squeezed(double s) {
    check_squeezing(s, "two_mode_squeezed");
    const double a = (s + 1.0 / s) / 4.0;
    const double c = (s - 1.0 / s) / 4.0;
    Mat v(4, 4);
    v << a, 0, -c, 0,
         0, a, 0, c,
         -c, 0, a, 0,
         0, c, 0, a;
    return {Vec::Zero(4), v};
}

// ---------------------------------------------------------------------------
// Symplectic maps

struct SymplecticMap {
    Mat matrix;
    Vec shift;

    int n_modes() const { return static_cast<int>(matrix.rows() / 2); }

    bool is_symplectic() const {
        const Mat omega = symplectic_form(n_modes());
        return (matrix * omega * matrix.transpose() - omega).cwiseAbs().maxCoeff() < tol::symplectic;
    }

    /// Throws unless the matrix is square, even-sized and symplectic.
    static SymplecticMap checked(Mat s, Vec shift) {
        if (s.rows() != s.cols() || s.rows() % 2 != 0 || shift.size() != s.rows()) {
            throw std::invalid_argument("SymplecticMap: inconsistent dimensions");
        }
        SymplecticMap map{std::move(s), std::move(shift)};
        if (!map.is_symplectic()) throw std::invalid_argument("SymplecticMap: matrix is not symplectic");
        return map;
    }
    static SymplecticMap checked(Mat s) {
        const auto n = s.rows();
        return checked(std::move(s), Vec::Zero(n));
    }

    static SymplecticMap identity(int n_modes) {
        return {Mat::Identity(2 * n_modes, 2 * n_modes), Vec::Zero(2 * n_modes)};
    }

    SymplecticMap inverse() const {
        const Mat inv = matrix.inverse();
        return {inv, -inv * shift};
    }

    /// `this` after `first`.
    SymplecticMap after(const SymplecticMap& first) const {
        return {matrix * first.matrix, matrix * first.shift + shift};
    }
};

/// Single-mode phase rotation.
inline SymplecticMap phase_rotation(double phi_deg) {
    return {rotation2(phi_deg), Vec::Zero(2)};
}

/// Lifts a k-mode map onto `modes` of an n-mode system.
inline SymplecticMap embed(const SymplecticMap& local, std::span<const int> modes, int n_modes) {
    const auto k = static_cast<Eigen::Index>(modes.size());
    if (2 * k != local.matrix.rows()) throw std::invalid_argument("embed: mode list does not match map size");
    SymplecticMap full = SymplecticMap::identity(n_modes);
    for (Eigen::Index a = 0; a < k; ++a) {
        if (modes[a] < 0 || modes[a] >= n_modes) throw std::out_of_range("embed: mode out of range");
        for (Eigen::Index b = 0; b < k; ++b) {
            full.matrix.block<2, 2>(2 * modes[a], 2 * modes[b]) = local.matrix.block<2, 2>(2 * a, 2 * b);
        }
        full.shift.segment<2>(2 * modes[a]) = local.shift.segment<2>(2 * a);
    }
    return full;
}
inline SymplecticMap embed(const SymplecticMap& local, std::initializer_list<int> modes, int n_modes) {
    return embed(local, std::span<const int>(modes.begin(), modes.size()), n_modes);
}

inline GaussianState apply_symplectic(const GaussianState& state, const SymplecticMap& map) {
    if (map.matrix.rows() != state.mean().size() || map.matrix.cols() != state.mean().size() ||
        map.shift.size() != state.mean().size()) {
        throw std::invalid_argument("apply_symplectic: dimension mismatch");
    }
    if (!map.is_symplectic()) throw std::invalid_argument("apply_symplectic: matrix is not symplectic");
    return {map.matrix * state.mean() + map.shift,
            symmetrized(map.matrix * state.cov() * map.matrix.transpose())};
}

// ---------------------------------------------------------------------------
// Gaussian channels: mean -> X mean + d, cov -> X cov X^T + Y

struct GaussianChannel {
    Mat X;
    Mat Y;
    Vec shift;

    static GaussianChannel identity(int n_modes) {
        const int d = 2 * n_modes;
        return {Mat::Identity(d, d), Mat::Zero(d, d), Vec::Zero(d)};
    }

    /// `this` after `first`.
    GaussianChannel after(const GaussianChannel& first) const {
        return {X * first.X, symmetrized(X * first.Y * X.transpose() + Y), X * first.shift + shift};
    }
};

inline void check_transmission(double eta, const char* who) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument(std::string(who) + ": transmission must lie in [0,1]");
    }
}

/// Beamsplitter coupling to vacuum with intensity transmission `eta`.
inline GaussianChannel loss_channel(double eta) {
    check_transmission(eta, "loss_channel");
    return {std::sqrt(eta) * Mat::Identity(2, 2), (1.0 - eta) * vacuum_variance * Mat::Identity(2, 2),
            Vec::Zero(2)};
}

/// Independent zero-mean classical noise on x and p.
inline GaussianChannel additive_noise_channel(double var_x, double var_p) {
    if (var_x < 0.0 || var_p < 0.0) throw std::invalid_argument("additive_noise_channel: negative variance");
    return {Mat::Identity(2, 2), Vec2(var_x, var_p).asDiagonal(), Vec::Zero(2)};
}

/// Applies a k-mode channel to `modes`; the result is validated as a state.
inline GaussianState apply_channel(const GaussianState& state, const GaussianChannel& ch, std::span<const int> modes) {
    const auto k = static_cast<Eigen::Index>(modes.size());
    if (ch.X.rows() != 2 * k || ch.X.cols() != 2 * k || ch.Y.rows() != 2 * k || ch.shift.size() != 2 * k) {
        throw std::invalid_argument("apply_channel: channel size does not match mode list");
    }
    const auto dim = state.mean().size();
    Mat x = Mat::Identity(dim, dim);
    Mat y = Mat::Zero(dim, dim);
    Vec d = Vec::Zero(dim);
    for (Eigen::Index a = 0; a < k; ++a) {
        if (modes[a] < 0 || modes[a] >= state.n_modes()) throw std::out_of_range("apply_channel: mode out of range");
        x.block<2, 2>(2 * modes[a], 2 * modes[a]).setZero();
    }
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            x.block<2, 2>(2 * modes[a], 2 * modes[b]) = ch.X.block<2, 2>(2 * a, 2 * b);
            y.block<2, 2>(2 * modes[a], 2 * modes[b]) = ch.Y.block<2, 2>(2 * a, 2 * b);
        }
        d.segment<2>(2 * modes[a]) = ch.shift.segment<2>(2 * a);
    }
    return {x * state.mean() + d, symmetrized(x * state.cov() * x.transpose() + y)};
}
inline GaussianState apply_channel(const GaussianState& state, const GaussianChannel& ch, std::initializer_list<int> modes) {
    return apply_channel(state, ch, std::span<const int>(modes.begin(), modes.size()));
}
inline GaussianState apply_channel(const GaussianState& state, const GaussianChannel& ch) {
    std::vector<int> all(static_cast<std::size_t>(state.n_modes()));
    for (int m = 0; m < state.n_modes(); ++m) all[static_cast<std::size_t>(m)] = m;
    return apply_channel(state, ch, all);
}

inline GaussianState apply_loss(const GaussianState& state, int mode, double eta) {
    check_transmission(eta, "apply_loss");
    if (mode < 0 || mode >= state.n_modes()) throw std::out_of_range("apply_loss: mode out of range");
    return apply_channel(state, loss_channel(eta), {mode});
}

inline GaussianState add_noise(const GaussianState& state, int mode, double var_x, double var_p) {
    return apply_channel(state, additive_noise_channel(var_x, var_p), {mode});
}

// ---------------------------------------------------------------------------
// Loss bookkeeping

struct LossBudget {
    double eta_loss = 1.0;  ///< sender to memory front, including source out-coupling
    double eta_ent = 1.0;   ///< memory entrance windows
    double eta_det = 1.0;   ///< after interaction, up to the detector

    void validate() const {
        check_transmission(eta_loss, "LossBudget.eta_loss");
        check_transmission(eta_ent, "LossBudget.eta_ent");
        check_transmission(eta_det, "LossBudget.eta_det");
    }
    double eta_tot() const { return eta_loss * eta_ent * eta_det; }
    /// Amplitude gain of the stored mean relative to the pure input.
    double memory_gain() const { return std::sqrt(eta_loss * eta_ent); }
};

struct LossInference {
    double eta;
    /// |0.5 + eta (s-1)/2 - measured antisqueezed variance|
    double antisqueezed_residual;
};

/// Solves eta/(2s) + (1-eta)/2 = measured_var_sq for eta and reports how well
/// the antisqueezed quadrature agrees with the same eta.
inline LossInference infer_total_loss(double measured_var_sq, double measured_var_antisq, double s) {
    check_squeezing(s, "infer_total_loss");
    if (s <= 1.0) throw std::invalid_argument("infer_total_loss: need s > 1 to resolve losses");
    const double lo = 1.0 / (2.0 * s);
    const double hi = s / 2.0;
    if (measured_var_sq < lo || measured_var_sq > vacuum_variance || measured_var_antisq < vacuum_variance ||
        measured_var_antisq > hi) {
        throw std::invalid_argument("infer_total_loss: variances outside the physical range");
    }
    const double eta = (vacuum_variance - measured_var_sq) / (vacuum_variance - lo);
    const double predicted_anti = vacuum_variance + eta * (hi - vacuum_variance);
    return {eta, std::abs(predicted_anti - measured_var_antisq)};
}

}  // namespace cvmem
