#include "cvmem/gaussian.hpp"

#include <gtest/gtest.h>

using namespace cvmem;

TEST(Vacuum, SingleMode) {
    const GaussianState v = vacuum(1);
    EXPECT_EQ(v.mean(), Vec::Zero(2));
    EXPECT_EQ(v.cov(), Mat::Identity(2, 2) * 0.5);
}

TEST(Vacuum, TwoModeIsHalfIdentity) { EXPECT_EQ(vacuum(2).cov(), Mat::Identity(4, 4) * 0.5); }

TEST(Vacuum, SymplecticEigenvaluesAreHalf) {
    const Vec nu = symplectic_eigenvalues(vacuum(3).cov());
    ASSERT_EQ(nu.size(), 3);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(nu(i), 0.5, 1e-12);
}

TEST(Vacuum, RejectsZeroModes) { EXPECT_THROW(vacuum(0), std::invalid_argument); }

TEST(GaussianStateInvariants, RejectsAsymmetricCov) {
    Mat c = Mat::Identity(2, 2);
    c(0, 1) = 0.1;
    EXPECT_THROW(GaussianState(Vec::Zero(2), c), std::invalid_argument);
}

TEST(GaussianStateInvariants, RejectsUncertaintyViolation) {
    Mat c(2, 2);
    c << 0.1, 0, 0, 0.5;
    EXPECT_THROW(GaussianState(Vec::Zero(2), c), std::invalid_argument);
}

TEST(GaussianStateInvariants, RejectsOddDimension) {
    EXPECT_THROW(GaussianState(Vec::Zero(3), Mat::Identity(3, 3)), std::invalid_argument);
}

TEST(SqueezedState, PhaseZero) {
    const GaussianState s = squeezed_state(4, 0);
    EXPECT_NEAR(s.cov()(0, 0), 0.125, 1e-15);
    EXPECT_NEAR(s.cov()(1, 1), 2.0, 1e-15);
    EXPECT_NEAR(s.cov()(0, 1), 0.0, 1e-15);
    EXPECT_TRUE(s.is_pure());
}

TEST(SqueezedState, UnitSqueezingIsVacuum) {
    EXPECT_TRUE(squeezed_state(1, 0).cov().isApprox(vacuum(1).cov(), 1e-15));
}

TEST(SqueezedState, PhaseNinetyDisplaced) {
    const GaussianState s = squeezed_state(4, 90, Vec2(3.8, 0));
    EXPECT_NEAR(s.cov()(0, 0), 2.0, 1e-12);
    EXPECT_NEAR(s.cov()(1, 1), 0.125, 1e-12);
    EXPECT_NEAR(s.cov()(0, 1), 0.0, 1e-12);
    EXPECT_EQ(s.mean(), Vec2(3.8, 0));
}

TEST(SqueezedState, GeneralPhaseRotatesCov) {
    const Mat2 c = squeezed_cov(4, 30);
    const Mat2 r = rotation2(30);
    // the squeezed combination x cos(phi) - p sin(phi) has variance 1/(2s)
    const Vec2 u(std::cos(deg_to_rad(30)), -std::sin(deg_to_rad(30)));
    EXPECT_NEAR(u.dot(c * u), 0.125, 1e-12);
    EXPECT_NEAR(c.determinant(), 0.25, 1e-12);
    EXPECT_TRUE((r * r.transpose()).isApprox(Mat2::Identity(), 1e-15));
}

TEST(SqueezedState, RejectsBadSqueezing) {
    EXPECT_THROW(squeezed_state(0, 0), std::invalid_argument);
    EXPECT_THROW(squeezed_state(-2, 0), std::invalid_argument);
    EXPECT_THROW(squeezed_state(2e6, 0), std::invalid_argument);
}

namespace {
double duan_plus_minus(const Mat& v) {
    return v(0, 0) + v(2, 2) + 2 * v(0, 2) + v(1, 1) + v(3, 3) - 2 * v(1, 3);
}
}  // namespace

TEST(TwoModeSqueezed, DuanSumIsTwoOverS) {
    for (double s : {1.0, 2.0, 4.0, 10.0}) EXPECT_NEAR(duan_plus_minus(two_mode_squeezed(s).cov()), 2.0 / s, 1e-12);
}

TEST(TwoModeSqueezed, UnitIsVacuumPair) {
    EXPECT_TRUE(two_mode_squeezed(1).cov().isApprox(vacuum(2).cov(), 1e-15));
}

TEST(TwoModeSqueezed, ThermalMarginalsAndPurity) {
    const GaussianState t = two_mode_squeezed(4);
    EXPECT_TRUE(t.is_pure());
    const Mat2 m = t.mode_cov(0);
    EXPECT_NEAR(m(0, 0), (4 + 0.25) / 4, 1e-12);
    EXPECT_NEAR(m(0, 0), m(1, 1), 1e-15);
    EXPECT_NEAR(m(0, 1), 0.0, 1e-15);
}

TEST(ApplyLoss, TotalLossOnSqueezed) {
    const GaussianState out = apply_loss(squeezed_state(4, 0), 0, 0.567);
    EXPECT_NEAR(out.cov()(0, 0), 0.29, 0.005);
    EXPECT_NEAR(out.cov()(1, 1), 1.35, 0.005);
}

TEST(ApplyLoss, UnitTransmissionIsIdentity) {
    const GaussianState in = squeezed_state(3, 20, Vec2(1, -2));
    const GaussianState out = apply_loss(in, 0, 1.0);
    EXPECT_TRUE(out.cov().isApprox(in.cov(), 1e-15));
    EXPECT_TRUE(out.mean().isApprox(in.mean(), 1e-15));
}

TEST(ApplyLoss, MemoryInputVariances) {
    // 0.20(2) / 1.68(9) measured; the lossy-pure prediction is less squeezed
    const GaussianState out = apply_loss(squeezed_state(4, 0), 0, 0.72);
    EXPECT_NEAR(out.cov()(0, 0), 0.23, 0.005);
    EXPECT_NEAR(out.cov()(1, 1), 1.58, 0.005);
    EXPECT_LE(std::abs(out.cov()(1, 1) - 1.68), 0.09 + 0.02);
}

TEST(ApplyLoss, MeansScaleAndOtherModesUntouched) {
    const GaussianState in = tensor(squeezed_state(4, 0, Vec2(2, 3)), squeezed_state(2, 45, Vec2(-1, 1)));
    const GaussianState out = apply_loss(in, 0, 0.25);
    EXPECT_NEAR(out.mean()(0), 1.0, 1e-15);
    EXPECT_NEAR(out.mean()(1), 1.5, 1e-15);
    EXPECT_TRUE(out.mode_cov(1).isApprox(in.mode_cov(1), 1e-15));
    EXPECT_TRUE(out.mode_mean(1).isApprox(in.mode_mean(1), 1e-15));
}

TEST(ApplyLoss, Errors) {
    EXPECT_THROW(apply_loss(vacuum(1), 0, 1.5), std::invalid_argument);
    EXPECT_THROW(apply_loss(vacuum(1), 0, -0.1), std::invalid_argument);
    EXPECT_THROW(apply_loss(vacuum(1), 1, 0.5), std::out_of_range);
}

TEST(ApplySymplectic, IdentityMap) {
    const GaussianState in = squeezed_state(4, 10, Vec2(1, 2));
    const GaussianState out = apply_symplectic(in, SymplecticMap::identity(1));
    EXPECT_EQ(out.mean(), in.mean());
    EXPECT_TRUE(out.cov().isApprox(in.cov(), 1e-15));
}

TEST(ApplySymplectic, RotationLeavesVacuum) {
    const GaussianState out = apply_symplectic(vacuum(1), phase_rotation(90));
    EXPECT_TRUE(out.cov().isApprox(vacuum(1).cov(), 1e-15));
}

TEST(ApplySymplectic, QuarterTurnTwiceNegatesMean) {
    Mat s(2, 2);
    s << 0, 1, -1, 0;  // (x, p) -> (p, -x)
    const SymplecticMap pulse = SymplecticMap::checked(s);
    const SymplecticMap twice = pulse.after(pulse);
    EXPECT_TRUE(twice.matrix.isApprox(-Mat::Identity(2, 2)));
    const GaussianState in = squeezed_state(4, 0, Vec2(1.5, -0.5));
    const GaussianState out = apply_symplectic(in, twice);
    EXPECT_TRUE(out.mean().isApprox(-in.mean()));
    EXPECT_TRUE(out.cov().isApprox(in.cov()));
}

TEST(ApplySymplectic, Errors) {
    EXPECT_THROW(apply_symplectic(vacuum(2), phase_rotation(10)), std::invalid_argument);
    Mat bad = Mat::Identity(2, 2);
    bad(0, 0) = 2.0;
    EXPECT_THROW(SymplecticMap::checked(bad), std::invalid_argument);
}

TEST(SymplecticMapOps, InverseComposesToIdentity) {
    const SymplecticMap m = embed(phase_rotation(37), {1}, 2);
    EXPECT_TRUE(m.after(m.inverse()).matrix.isApprox(Mat::Identity(4, 4), 1e-14));
}

TEST(Tensor, BlockDiagonal) {
    const GaussianState t = tensor(squeezed_state(4, 0, Vec2(1, 0)), vacuum(1));
    EXPECT_EQ(t.n_modes(), 2);
    EXPECT_TRUE(t.cov().block(0, 2, 2, 2).isZero());
    EXPECT_EQ(t.mode_mean(0), Vec2(1, 0));
}

TEST(Reduced, PicksModes) {
    const GaussianState t = two_mode_squeezed(4);
    const GaussianState r = t.reduced({1});
    EXPECT_TRUE(r.cov().isApprox(Mat(t.mode_cov(1)), 1e-15));
    EXPECT_THROW(t.reduced({2}), std::out_of_range);
}

TEST(InferTotalLoss, MeasuredVariances) {
    const LossInference r = infer_total_loss(0.29, 1.34, 4);
    EXPECT_NEAR(r.eta, 0.56, 0.005);
    EXPECT_NEAR(r.antisqueezed_residual, std::abs(0.5 + 1.5 * r.eta - 1.34), 1e-12);
}

TEST(InferTotalLoss, Limits) {
    EXPECT_NEAR(infer_total_loss(0.125, 2.0, 4).eta, 1.0, 1e-12);
    EXPECT_NEAR(infer_total_loss(0.5, 0.5, 4).eta, 0.0, 1e-12);
}

TEST(InferTotalLoss, RejectsUnphysical) {
    EXPECT_THROW(infer_total_loss(0.1, 1.0, 4), std::invalid_argument);
    EXPECT_THROW(infer_total_loss(0.3, 0.4, 4), std::invalid_argument);
    EXPECT_THROW(infer_total_loss(0.3, 2.5, 4), std::invalid_argument);
}

TEST(LossBudgetValues, TotalAndMemoryGain) {
    const LossBudget b{0.80, 0.90, 0.79};
    EXPECT_NEAR(b.eta_tot(), 0.5688, 1e-12);
    EXPECT_NEAR(b.memory_gain(), std::sqrt(0.72), 1e-15);
    EXPECT_THROW((LossBudget{1.2, 1, 1}).validate(), std::invalid_argument);
}

TEST(Channels, LossCompositionLaw) {
    const GaussianState in = squeezed_state(4, 25, Vec2(0.7, -1.3));
    const GaussianState a = apply_loss(apply_loss(in, 0, 0.6), 0, 0.7);
    const GaussianState b = apply_loss(in, 0, 0.42);
    EXPECT_TRUE(a.cov().isApprox(b.cov(), 1e-12));
    EXPECT_TRUE(a.mean().isApprox(b.mean(), 1e-12));
}

TEST(Channels, AdditiveNoise) {
    const GaussianState out = add_noise(vacuum(1), 0, 0.1, 0.3);
    EXPECT_NEAR(out.cov()(0, 0), 0.6, 1e-15);
    EXPECT_NEAR(out.cov()(1, 1), 0.8, 1e-15);
    EXPECT_THROW(add_noise(vacuum(1), 0, -0.1, 0.0), std::invalid_argument);
}
