#include "cvmem/fidelity.hpp"
#include "cvmem/fock.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

using namespace cvmem;

TEST(TmsFock, LeadingAmplitudes) {
    const FockArray f = tms_fock(4, 10);
    const double expected[] = {0.8, 0.48, 0.288, 0.1728};
    for (int n = 0; n < 4; ++n) EXPECT_NEAR(f.amplitudes(n).real(), expected[n], 1e-12);
}

TEST(TmsFock, UnitSqueezingIsVacuum) {
    const FockArray f = tms_fock(1, 5);
    EXPECT_EQ(f.amplitudes(0), cplx(1.0));
    EXPECT_EQ(f.amplitudes.tail(5).norm(), 0.0);
    EXPECT_EQ(f.tail, 0.0);
}

TEST(TmsFock, TailAtCutoff40) {
    const FockArray f = tms_fock(4, 40);
    EXPECT_LT(f.tail, 1e-8);
    EXPECT_NEAR(f.norm(), 1.0 - f.tail, 1e-14);
    EXPECT_THROW(tms_fock(4, -1), std::invalid_argument);
}

TEST(TmsFock, ReducedStateIsThermal) {
    // marginal photon statistics lambda^(2n)(1 - lambda^2) with mean nu - 1/2
    const FockArray f = tms_fock(4, 80);
    const double nu = symplectic_eigenvalues(Mat(two_mode_squeezed(4).mode_cov(0)))(0);
    const Vec p = thermal_distribution(nu - 0.5, 80);
    for (int n = 0; n <= 80; ++n) EXPECT_NEAR(std::norm(f.amplitudes(n)), p(n), 1e-14);
}

TEST(TmsFock, TailMonotoneInCutoff) {
    double prev = 2.0;
    for (int c = 0; c < 30; ++c) {
        const double t = tms_fock(4, c).tail;
        EXPECT_LT(t, prev);
        prev = t;
    }
}

TEST(DisplacedSqueezedFock, VacuumCase) {
    const FockArray f = displaced_squeezed_fock(1, 0, Vec2::Zero(), 10);
    EXPECT_NEAR(std::abs(f.amplitudes(0)), 1.0, 1e-15);
    EXPECT_NEAR(f.amplitudes.tail(10).norm(), 0.0, 1e-15);
}

TEST(DisplacedSqueezedFock, MatchesMatrixExponential) {
    const int big = 120;
    CMat a = CMat::Zero(big, big);
    for (int n = 1; n < big; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const CMat ad = a.adjoint();
    const double s = 4, phi = 25;
    const Vec2 disp(0.7, -1.1);
    const double r = 0.5 * std::log(s);
    const cplx xi = r * std::polar(1.0, -2.0 * deg_to_rad(phi));
    const CMat sq = (0.5 * (std::conj(xi) * a * a - xi * ad * ad)).exp();
    const cplx alpha(disp(0) / std::sqrt(2.0), disp(1) / std::sqrt(2.0));
    const CMat d = (alpha * ad - std::conj(alpha) * a).exp();
    CVec vac = CVec::Zero(big);
    vac(0) = 1.0;
    const CVec ref = d * (sq * vac);
    const FockArray f = displaced_squeezed_fock(s, phi, disp, 40);
    for (int n = 0; n <= 40; ++n) EXPECT_NEAR(std::abs(f.amplitudes(n) - ref(n)), 0.0, 1e-12) << n;
}

TEST(DisplacedSqueezedFock, MomentsMatchGaussian) {
    const FockArray f = displaced_squeezed_fock(4, 60, Vec2(1.0, 0.5), 80);
    const auto [mean, cov] = quadrature_moments(f);
    EXPECT_TRUE(mean.isApprox(Vec2(1.0, 0.5), 1e-9));
    EXPECT_TRUE(cov.isApprox(squeezed_cov(4, 60), 1e-8));
}

TEST(DisplacedSqueezedFock, NormAtLargeDisplacement) {
    const FockArray f = displaced_squeezed_fock(4, 0, Vec2(3.8, 3.8), 80);
    EXPECT_NEAR(f.norm(), 1.0, f.tail + 1e-12);
    EXPECT_LT(f.tail, 1e-4);
}

TEST(DisplacedSqueezedFock, TailGuard) {
    EXPECT_THROW(displaced_squeezed_fock(4, 0, Vec2(3.8, 3.8), 10), std::invalid_argument);
}

TEST(DisplacedSqueezedFock, ZeroDisplacementOverlapWithTmsMarginal) {
    // <psi|rho_marginal|psi> from the number basis against the Gaussian formula
    const FockArray sq = displaced_squeezed_fock(4, 0, Vec2::Zero(), 100);
    const FockArray tms = tms_fock(4, 100);
    double fock = 0.0;
    for (int n = 0; n <= 100; ++n) fock += std::norm(sq.amplitudes(n)) * std::norm(tms.amplitudes(n));
    const double closed = gaussian_overlap(squeezed_state(4, 0), two_mode_squeezed(4).reduced({0}));
    EXPECT_NEAR(fock, closed, 1e-10);
    const WignerOverlap w = wigner_overlap(squeezed_state(4, 0), two_mode_squeezed(4).reduced({0}), {});
    EXPECT_NEAR(w.value, closed, 1e-6);
}

TEST(DefaultCutoff, SmallestMeetingTail) {
    const int c = default_cutoff(4, 0, Vec2(1, 1));
    EXPECT_LT(displaced_squeezed_fock(4, 0, Vec2(1, 1), c, 1.0).tail, default_fock_tail);
    EXPECT_GE(displaced_squeezed_fock(4, 0, Vec2(1, 1), c - 1, 1.0).tail, default_fock_tail);
}

TEST(Attenuate, MatchesGaussianLoss) {
    const FockArray f = displaced_squeezed_fock(2, 30, Vec2(0.5, 0.2), 60);
    const CMat rho = attenuate(f.density(), 0.6);
    CMat a = CMat::Zero(61, 61);
    for (int n = 1; n <= 60; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const CMat x = (a + a.adjoint()) / std::sqrt(2.0);
    const double mx = (rho * x).trace().real();
    const double vx = (rho * x * x).trace().real() - mx * mx;
    const GaussianState g = apply_loss(squeezed_state(2, 30, Vec2(0.5, 0.2)), 0, 0.6);
    EXPECT_NEAR(mx, g.mean()(0), 1e-9);
    EXPECT_NEAR(vx, g.cov()(0, 0), 1e-8);
    EXPECT_NEAR(rho.trace().real(), f.norm(), 1e-12);
}

TEST(WignerOverlapOracle, VacuumPair) {
    EXPECT_NEAR(wigner_overlap(vacuum(1), vacuum(1), {}).value, 1.0, 1e-9);
}

TEST(WignerOverlapOracle, FirstTableRow) {
    Mat c(2, 2);
    c << 0.52, 0, 0, 1.99;  // stored (x_A, p_A) variances (1.99, 0.52) in the light frame
    const GaussianState stored(Vec::Zero(2), c);
    EXPECT_NEAR(wigner_overlap(squeezed_state(4, 0), stored, {}).value, 0.623, 5e-4);
}

TEST(WignerOverlapOracle, DistantStates) {
    const GaussianState a = squeezed_state(1, 0, Vec2(-5, 0));
    const GaussianState b = squeezed_state(1, 0, Vec2(5, 0));
    EXPECT_LT(wigner_overlap(a, b, WignerGrid::between(a, b, 12.0)).value, 1e-10);
}

TEST(WignerOverlapOracle, ExtentGuard) {
    EXPECT_THROW(wigner_overlap(squeezed_state(4, 0, Vec2(8, 0)), vacuum(1), {}), std::invalid_argument);
    EXPECT_THROW(wigner_overlap(vacuum(2), vacuum(2), {}), std::invalid_argument);
}

TEST(WignerOverlapOracle, AllTableRowsMatchClosedForm) {
    for (const auto& r : table1_records()) {
        const GaussianState in = record_input_state(r);
        const GaussianState st = record_stored_state(r);
        const WignerOverlap w = wigner_overlap(in, st, WignerGrid::between(in, st));
        EXPECT_NEAR(w.value, gaussian_overlap(in, st), 1e-6);
        EXPECT_LT(w.grid_error, 1e-7);
    }
}
