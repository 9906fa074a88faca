#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "qfc/errors.hpp"
#include "qfc/qubit.hpp"
#include "test_support.hpp"

namespace qfc {
namespace {

using namespace std::complex_literals;
constexpr double kPi = std::numbers::pi;

TEST(Pauli, ZIsDiagonalPlusMinusOne) {
    EXPECT_EQ(pauli(Axis::Z), Operator2::diagonal(1.0, -1.0));
}

TEST(Pauli, SquaresToIdentity) {
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
        EXPECT_EQ(pauli(a) * pauli(a), Operator2::identity());
    }
}

TEST(Pauli, CommutatorXYIsTwoIZ) {
    const Operator2 xy = pauli(Axis::X) * pauli(Axis::Y);
    const Operator2 yx = pauli(Axis::Y) * pauli(Axis::X);
    EXPECT_EQ(xy - yx, Complex(2i) * pauli(Axis::Z));
}

TEST(HermitianEigenvalues, MatchesKnownSpectrum) {
    const auto ev = hermitian_eigenvalues(pauli(Axis::Y));
    EXPECT_DOUBLE_EQ(ev[0], -1.0);
    EXPECT_DOUBLE_EQ(ev[1], 1.0);
    const auto half = hermitian_eigenvalues(0.5 * Operator2::identity());
    EXPECT_DOUBLE_EQ(half[0], 0.5);
    EXPECT_DOUBLE_EQ(half[1], 0.5);
}

TEST(PreparePair, ThetaZeroGivesPlusStateTwice) {
    for (double phi : {0.0, 1.0, 4.0}) {
        const StatePair s = prepare_pair(0.0, phi);
        for (int sign : {+1, -1}) {
            const BlochVector v = to_bloch(s.state(sign));
            EXPECT_NEAR(v.x, 1.0, 1e-15);
            EXPECT_NEAR(v.y, 0.0, 1e-15);
            EXPECT_NEAR(v.z, 0.0, 1e-15);
        }
    }
}

TEST(PreparePair, ThetaHalfPiPhiZeroGivesLogicalBasis) {
    const StatePair s = prepare_pair(kPi / 2, 0.0);
    EXPECT_NEAR(std::abs(s.ket_plus.amp0), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(s.ket_plus.amp1), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.ket_minus.amp0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.ket_minus.amp1), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(inner_product(s.ket_plus, s.ket_minus)), 0.0, 1e-15);
}

TEST(PreparePair, QuarterPiPairLiesInZEqualsMinusYPlane) {
    for (double theta : {0.1, 0.7, 1.3}) {
        const BlochVector v = to_bloch(prepare_pair(theta, kPi / 4).plus);
        EXPECT_NEAR(v.x, std::cos(theta), 1e-15);
        EXPECT_NEAR(v.y, -std::sin(theta) / std::numbers::sqrt2, 1e-15);
        EXPECT_NEAR(v.z, std::sin(theta) / std::numbers::sqrt2, 1e-15);
    }
}

TEST(PreparePair, GeneralBlochVectors) {
    testing::ParamSampler rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double theta = rng.uniform(0.0, kPi / 2), phi = rng.uniform(0.0, 2 * kPi);
        const StatePair s = prepare_pair(theta, phi);
        const BlochVector plus = to_bloch(s.plus), minus = to_bloch(s.minus);
        EXPECT_NEAR(plus.x, std::cos(theta), 1e-14);
        EXPECT_NEAR(plus.y, -std::sin(theta) * std::sin(phi), 1e-14);
        EXPECT_NEAR(plus.z, std::sin(theta) * std::cos(phi), 1e-14);
        EXPECT_NEAR(minus.x, std::cos(theta), 1e-14);
        EXPECT_NEAR(minus.y, std::sin(theta) * std::sin(phi), 1e-14);
        EXPECT_NEAR(minus.z, -std::sin(theta) * std::cos(phi), 1e-14);
    }
}

TEST(PreparePair, OverlapPurityAndGlobalPhase) {
    testing::ParamSampler rng(12);
    for (int i = 0; i < 1000; ++i) {
        const double theta = rng.uniform(0.0, kPi / 2), phi = rng.uniform(0.0, 2 * kPi);
        const StatePair s = prepare_pair(theta, phi);
        EXPECT_NEAR(std::abs(inner_product(s.ket_plus, s.ket_minus) - std::cos(theta)), 0.0, tol::kOverlap);
        EXPECT_NEAR(s.plus.purity(), 1.0, tol::kPurity);
        EXPECT_NEAR(s.minus.purity(), 1.0, tol::kPurity);
        EXPECT_TRUE(s.plus.is_valid());
        EXPECT_TRUE(s.minus.is_valid());
        // |+> amplitude real and non-negative
        for (const Ket& k : {s.ket_plus, s.ket_minus}) {
            const Complex plus_amp = (k.amp0 + k.amp1) / std::numbers::sqrt2;
            EXPECT_NEAR(plus_amp.imag(), 0.0, 1e-15);
            EXPECT_GE(plus_amp.real(), 0.0);
        }
    }
}

TEST(PreparePair, PhiZeroStaysInXZPlane) {
    for (int i = 0; i <= 100; ++i) {
        const double theta = i * (kPi / 2) / 100;
        EXPECT_LT(std::abs(to_bloch(prepare_pair(theta, 0.0).plus).y), 1e-13);
        EXPECT_LT(std::abs(to_bloch(prepare_pair(theta, 0.0).minus).y), 1e-13);
    }
}

TEST(PreparePair, RejectsOutOfRangeAngles) {
    EXPECT_THROW(prepare_pair(-0.01, 0.0), RangeError);
    EXPECT_THROW(prepare_pair(kPi / 2 + 1e-9, 0.0), RangeError);
    EXPECT_THROW(prepare_pair(0.5, 2 * kPi), RangeError);
    EXPECT_THROW(prepare_pair(0.5, -1e-12), RangeError);
    EXPECT_THROW(prepare_pair(std::nan(""), 0.0), RangeError);
}

TEST(ToBloch, BasisStates) {
    const BlochVector zero = to_bloch(QubitState::pure(1.0, 0.0));
    EXPECT_EQ(zero, (BlochVector{0.0, 0.0, 1.0, 1.0}));
    const BlochVector mixed = to_bloch(QubitState());
    EXPECT_EQ(mixed, (BlochVector{0.0, 0.0, 0.0, 1.0}));
}

TEST(FromBloch, BasisStates) {
    EXPECT_EQ(from_bloch({0.0, 0.0, 0.0, 1.0}).matrix(), 0.5 * Operator2::identity());
    const Operator2 plus = from_bloch({1.0, 0.0, 0.0, 1.0}).matrix();
    EXPECT_LT(max_abs_diff(plus, Operator2(0.5, 0.5, 0.5, 0.5)), 1e-16);
}

TEST(FromBloch, RoundTripRandomVectors) {
    testing::ParamSampler rng(13);
    for (int i = 0; i < 1000; ++i) {
        const BlochVector v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.01, 1)};
        const BlochVector w = to_bloch(from_bloch(v));
        EXPECT_NEAR(w.x, v.x, tol::kRoundTrip);
        EXPECT_NEAR(w.y, v.y, tol::kRoundTrip);
        EXPECT_NEAR(w.z, v.z, tol::kRoundTrip);
        EXPECT_NEAR(w.weight, v.weight, tol::kRoundTrip);
    }
}

TEST(FromBloch, RoundTripRandomHermitianMatrices) {
    testing::ParamSampler rng(14);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(-1, 1), d = rng.uniform(-1, 1);
        const Complex b(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const Operator2 h(a, b, std::conj(b), d);
        const Operator2 back = from_bloch(to_bloch(QubitState(h, false))).matrix();
        EXPECT_LT(max_abs_diff(back, h), tol::kRoundTrip);
    }
}

TEST(QubitState, ValidityDetectsDefects) {
    EXPECT_TRUE(QubitState().is_valid());
    EXPECT_FALSE(QubitState(Operator2::diagonal(1.5, -0.5)).is_valid());           // not PSD
    EXPECT_FALSE(QubitState(Operator2(0.5, 0.3, 0.1, 0.5)).is_valid());            // not Hermitian
    EXPECT_FALSE(QubitState(Operator2::diagonal(0.7, 0.7)).is_valid());            // trace 1.4
    EXPECT_TRUE(QubitState(Operator2::diagonal(0.35, 0.35), false).is_valid());    // branch state
}

TEST(BlochVector, NormalizedDividesByWeight) {
    const BlochVector v{0.1, -0.2, 0.3, 0.5};
    const BlochVector n = v.normalized();
    EXPECT_DOUBLE_EQ(n.x, 0.2);
    EXPECT_DOUBLE_EQ(n.y, -0.4);
    EXPECT_DOUBLE_EQ(n.z, 0.6);
    EXPECT_DOUBLE_EQ(n.weight, 1.0);
}

}  // namespace
}  // namespace qfc
