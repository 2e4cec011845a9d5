#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "aga/numerics.hpp"

using namespace aga;

namespace {

constexpr double kPi = std::numbers::pi;

// Largest singular value from the Hermitian eigenproblem of M^* M.
double norm_oracle(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Matrix cyclic_shift(Index n) {
    Matrix s = Matrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) s((k + 1) % n, k) = 1.0;
    return s;
}

Matrix flip(Index n) {
    Matrix f = Matrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) f(k, n - 1 - k) = 1.0;
    return f;
}

}  // namespace

TEST(OperatorNorm, Examples) {
    EXPECT_EQ(operator_norm(Matrix::Zero(3, 3)), 0.0);
    for (Index n : {1, 2, 7}) EXPECT_NEAR(operator_norm(Matrix::Identity(n, n)), 1.0, 1e-14);
    Matrix d = Matrix::Zero(4, 4);
    d(0, 0) = std::polar(1.0, kPi / 2) - 1.0;
    EXPECT_NEAR(operator_norm(d), std::sqrt(2.0), 1e-14);
}

TEST(OperatorNorm, MatchesEigenOracleAndUnitaryInvariance) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 1 + trial % 9;
        const Matrix m = random_gaussian(rng, n);
        const double norm = operator_norm(m);
        EXPECT_NEAR(norm, norm_oracle(m), 1e-10 * std::max(1.0, norm));
        const auto u = random_unitary(rng, n);
        const auto v = random_unitary(rng, n);
        EXPECT_NEAR(operator_norm(u.matrix() * m * v.matrix()), norm, 1e-9);
    }
}

TEST(OperatorNorm, RejectsNonFinite) {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = std::nan("");
    EXPECT_THROW(operator_norm(m), PreconditionError);
}

TEST(UnitaryMatrix, CheckedConstruction) {
    EXPECT_NO_THROW(UnitaryMatrix(Matrix::Identity(3, 3)));
    EXPECT_THROW(UnitaryMatrix(Matrix(2.0 * Matrix::Identity(3, 3))), PreconditionError);
    Rng rng(1);
    const auto u = random_unitary(rng, 6);
    EXPECT_TRUE(is_unitary(u.matrix()));
    EXPECT_TRUE(is_unitary((u * u.adjoint()).matrix()));
    EXPECT_LE(operator_norm((u * u.adjoint()).matrix() - Matrix::Identity(6, 6)), 1e-12);
}

TEST(NearestUnitary, Examples) {
    Rng rng(2);
    const auto u = random_unitary(rng, 5);
    EXPECT_LE(operator_norm(nearest_unitary(u.matrix()).matrix() - u.matrix()), 1e-12);
    EXPECT_LE(operator_norm(nearest_unitary(2.0 * Matrix::Identity(3, 3)).matrix() - Matrix::Identity(3, 3)), 1e-14);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = Complex(1.0, 1.0);
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    expected(1, 1) = Complex(1.0, 1.0) / std::sqrt(2.0);
    EXPECT_LE(operator_norm(nearest_unitary(d).matrix() - expected), 1e-14);
}

TEST(NearestUnitary, MinimizesFrobeniusDistance) {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix m = random_gaussian(rng, 4);
        const auto p = nearest_unitary(m);
        EXPECT_TRUE(is_unitary(p.matrix(), 1e-10));
        const double best = (m - p.matrix()).norm();
        for (int k = 0; k < 20; ++k) {
            const auto w = p * exp_skew(random_skew(rng, 4, 0.05));
            EXPECT_GE((m - w.matrix()).norm(), best - 1e-12);
        }
    }
}

TEST(NearestUnitary, RejectsSingular) {
    Matrix m = Matrix::Identity(3, 3);
    m(2, 2) = 0.0;
    EXPECT_THROW(nearest_unitary(m), PreconditionError);
}

TEST(Phases, Wrapping) {
    EXPECT_DOUBLE_EQ(phase_of(Complex(1.0, 0.0)), 0.0);
    EXPECT_NEAR(phase_of(Complex(0.0, -1.0)), 1.5 * kPi, 1e-15);
    EXPECT_NEAR(phase_of(Complex(1.0, -1e-300)), 0.0, 1e-15);
    EXPECT_NEAR(centered_phase(1.5 * kPi), -0.5 * kPi, 1e-15);
    EXPECT_NEAR(centered_phase(kPi), kPi, 1e-15);
}

TEST(PrincipalLog, Examples) {
    EXPECT_LE(operator_norm(principal_log_unitary(UnitaryMatrix::identity(4))), 1e-14);
    for (int n : {3, 5, 16}) {
        const Complex w = std::polar(1.0, 2 * kPi / n);
        const auto u = UnitaryMatrix(Matrix(w * Matrix::Identity(3, 3)));
        const Matrix expected = Complex(0.0, 2 * kPi / n) * Matrix::Identity(3, 3);
        EXPECT_LE(operator_norm(principal_log_unitary(u) - expected), 1e-12) << n;
    }
    EXPECT_THROW(principal_log_unitary(UnitaryMatrix(Matrix(-Matrix::Identity(2, 2)))), BranchCutError);
}

TEST(PrincipalLog, NearCutRespectsMargin) {
    Matrix d = Matrix::Identity(2, 2);
    d(1, 1) = std::polar(1.0, kPi - 1e-3);
    EXPECT_NO_THROW(principal_log_unitary(UnitaryMatrix(d)));
    EXPECT_THROW(principal_log_unitary(UnitaryMatrix(d), 1e-2), BranchCutError);
}

TEST(PrincipalLog, ExpInvertsAndResultIsSkew) {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 2 + trial % 7;
        const auto u = random_unitary(rng, n);
        const Matrix l = principal_log_unitary(u);
        EXPECT_LE(operator_norm(l + l.adjoint()), 1e-10);
        EXPECT_LE(operator_norm(exp_skew(l).matrix() - u.matrix()), 1e-8);
        Eigen::ComplexEigenSolver<Matrix> es(l);
        for (Index k = 0; k < n; ++k) EXPECT_LT(std::abs(es.eigenvalues()(k).imag()), kPi);
    }
}

TEST(Eigensystem, Diagonal) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = Complex(0.0, 1.0);
    const auto es = unitary_eigensystem(UnitaryMatrix(d));
    ASSERT_EQ(es.profile.size(), 2u);
    EXPECT_NEAR(es.profile.phases[0], 0.0, 1e-14);
    EXPECT_NEAR(es.profile.phases[1], kPi / 2, 1e-14);
}

TEST(Eigensystem, CyclicShiftHasRootsOfUnity) {
    for (Index n : {2, 3, 8, 33}) {
        const auto es = unitary_eigensystem(UnitaryMatrix(cyclic_shift(n)));
        ASSERT_EQ(es.profile.size(), static_cast<std::size_t>(n));
        for (Index k = 0; k < n; ++k)
            EXPECT_NEAR(es.profile.phases[static_cast<std::size_t>(k)], 2 * kPi * static_cast<double>(k) / static_cast<double>(n), 1e-9);
    }
}

TEST(Eigensystem, FlipSplitsIntoSymmetricAndAntisymmetric) {
    for (Index n : {2, 3, 4, 9, 16}) {
        const auto es = unitary_eigensystem(UnitaryMatrix(flip(n)));
        long zeros = 0, pis = 0;
        for (double p : es.profile.phases) {
            if (std::abs(p) < 1e-9) ++zeros;
            if (std::abs(p - kPi) < 1e-9) ++pis;
        }
        EXPECT_EQ(zeros, (n + 1) / 2);
        EXPECT_EQ(pis, n / 2);
    }
}

TEST(Eigensystem, ReconstructionAndSorting) {
    Rng rng(11);
    for (Index n : {1, 5, 40, 512}) {
        const auto u = random_unitary(rng, n);
        const auto es = unitary_eigensystem(u);
        EXPECT_TRUE(std::is_sorted(es.profile.phases.begin(), es.profile.phases.end()));
        EXPECT_LE(es.residual, 1e-8);
        Eigen::VectorXcd vals(n);
        for (Index k = 0; k < n; ++k) vals(k) = std::polar(1.0, es.profile.phases[static_cast<std::size_t>(k)]);
        EXPECT_LE(operator_norm(reassemble(es.basis, vals) - u.matrix()), 1e-8);
        for (double p : es.profile.phases) {
            EXPECT_GE(p, 0.0);
            EXPECT_LT(p, 2 * kPi);
        }
    }
}

TEST(DirectSum, Examples) {
    Rng rng(6);
    const auto a = random_unitary(rng, 3);
    const auto empty = UnitaryMatrix::identity(0);
    EXPECT_EQ(direct_sum(a, empty).matrix(), a.matrix());
    EXPECT_EQ(direct_sum(UnitaryMatrix::identity(2), UnitaryMatrix::identity(3)).matrix(), Matrix::Identity(5, 5));
    const auto b = random_unitary(rng, 4);
    const Matrix s = direct_sum(a, b).matrix() - Matrix::Identity(7, 7);
    const double expected = std::max(operator_norm(a.matrix() - Matrix::Identity(3, 3)),
                                     operator_norm(b.matrix() - Matrix::Identity(4, 4)));
    EXPECT_NEAR(operator_norm(s), expected, 1e-12);
}

TEST(Exponentials, HermitianAndSkewAgree) {
    Rng rng(8);
    const Matrix h = random_hermitian(rng, 5, 2.0);
    EXPECT_NEAR(operator_norm(h), 2.0, 1e-12);
    const Complex i(0.0, 1.0);
    EXPECT_LE(operator_norm(exp_i_hermitian(h).matrix() - exp_skew(i * h).matrix()), 1e-12);
    const Matrix s = random_skew(rng, 5, 0.3);
    EXPECT_NEAR(operator_norm(s), 0.3, 1e-12);
    EXPECT_LE(operator_norm(s + s.adjoint()), 1e-15);
}

TEST(Random, HaarSamplerIsSeeded) {
    Rng r1(42), r2(42);
    EXPECT_EQ(random_unitary(r1, 4).matrix(), random_unitary(r2, 4).matrix());
}
