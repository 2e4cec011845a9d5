#pragma once

// Dense complex matrix core: norms, unitary eigensystems, polar retraction,
// principal logarithms and random unitaries.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "aga/error.hpp"

namespace aga {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kReconstructionTol = 1e-8;
inline constexpr double kSingularityFloor = 1e-12;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline void require_finite(const Matrix& m, const char* who) {
    if (!m.allFinite()) throw PreconditionError(std::string(who) + ": non-finite matrix entry");
}

inline void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) throw PreconditionError(std::string(who) + ": matrix is not square");
}

/// Largest singular value.
inline double operator_norm(const Matrix& m) {
    require_finite(m, "operator_norm");
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 || m.cols() == 1) return m.norm();
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

inline double frobenius_norm(const Matrix& m) { return m.norm(); }

/// Cheap-first unitarity defect: the Frobenius norm bounds the operator norm from above,
/// so the SVD is only needed when the Frobenius value exceeds the tolerance.
inline bool is_unitary(const Matrix& m, double tol = kUnitarityTol) {
    if (m.rows() != m.cols() || !m.allFinite()) return false;
    const Matrix e = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
    if (e.norm() <= tol) return true;
    return operator_norm(e) <= tol;
}

/// Square complex matrix M with ||M*M - I||_op <= tol.
class UnitaryMatrix {
public:
    UnitaryMatrix() = default;

    explicit UnitaryMatrix(Matrix m, double tol = kUnitarityTol) : m_(std::move(m)), tol_(tol) {
        require_square(m_, "UnitaryMatrix");
        require_finite(m_, "UnitaryMatrix");
        if (!is_unitary(m_, tol_)) throw PreconditionError("UnitaryMatrix: matrix is not unitary within tolerance");
    }

    /// Wraps a product or factor of unitaries without re-checking.
    static UnitaryMatrix assume_unitary(Matrix m, double tol = kUnitarityTol) {
        UnitaryMatrix u;
        u.m_ = std::move(m);
        u.tol_ = tol;
        return u;
    }

    static UnitaryMatrix identity(Index n) { return assume_unitary(Matrix::Identity(n, n)); }

    const Matrix& matrix() const noexcept { return m_; }
    Index dim() const noexcept { return m_.rows(); }
    double tolerance() const noexcept { return tol_; }

    UnitaryMatrix adjoint() const { return assume_unitary(m_.adjoint(), tol_); }

    friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
        if (a.dim() != b.dim()) throw PreconditionError("UnitaryMatrix product: dimension mismatch");
        return assume_unitary(a.m_ * b.m_, std::max(a.tol_, b.tol_));
    }

private:
    Matrix m_;
    double tol_ = kUnitarityTol;
};

/// Unitary polar factor U V* of m = U S V*.
inline UnitaryMatrix nearest_unitary(const Matrix& m) {
    require_square(m, "nearest_unitary");
    require_finite(m, "nearest_unitary");
    if (m.size() == 0) return UnitaryMatrix::identity(0);
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smallest = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smallest > kSingularityFloor))
        throw PreconditionError("nearest_unitary: input is singular or nearly singular");
    return UnitaryMatrix::assume_unitary(svd.matrixU() * svd.matrixV().adjoint());
}

/// Eigenphases in [0, 2pi), ascending, with repetition.
struct SpectralProfile {
    std::vector<double> phases;

    std::size_t size() const noexcept { return phases.size(); }
};

/// Maps a unit-circle point to its phase in [0, 2pi).
inline double phase_of(Complex z) {
    double p = std::arg(z);
    if (p < 0.0) p += kTwoPi;
    if (p >= kTwoPi) p = 0.0;
    return p;
}

/// Phase representative in (-pi, pi].
inline double centered_phase(double phase) {
    double p = std::fmod(phase, kTwoPi);
    if (p > std::numbers::pi) p -= kTwoPi;
    if (p <= -std::numbers::pi) p += kTwoPi;
    return p;
}

struct UnitaryEigensystem {
    SpectralProfile profile;
    UnitaryMatrix basis;  // column j is an eigenvector for exp(i phases[j])
    double residual = 0.0;

    std::vector<Complex> eigenvalues() const {
        std::vector<Complex> out;
        out.reserve(profile.size());
        for (double p : profile.phases) out.push_back(std::polar(1.0, p));
        return out;
    }
};

/// Diagonalizes a unitary through its complex Schur form; for normal input the
/// triangular factor is diagonal up to rounding, so its Schur vectors are an
/// orthonormal eigenbasis.
inline UnitaryEigensystem unitary_eigensystem(const UnitaryMatrix& u) {
    const Index n = u.dim();
    UnitaryEigensystem out;
    if (n == 0) {
        out.basis = UnitaryMatrix::identity(0);
        return out;
    }
    Eigen::ComplexSchur<Matrix> schur(u.matrix());
    if (schur.info() != Eigen::Success) throw NumericalError("unitary_eigensystem: Schur iteration failed");
    const Matrix& t = schur.matrixT();
    const Matrix& z = schur.matrixU();

    std::vector<double> ph(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) ph[static_cast<std::size_t>(j)] = phase_of(t(j, j));
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return ph[static_cast<std::size_t>(a)] < ph[static_cast<std::size_t>(b)];
    });

    Matrix v(n, n);
    out.profile.phases.resize(static_cast<std::size_t>(n));
    Eigen::VectorXcd d(n);
    for (Index k = 0; k < n; ++k) {
        const Index j = order[static_cast<std::size_t>(k)];
        v.col(k) = z.col(j);
        out.profile.phases[static_cast<std::size_t>(k)] = ph[static_cast<std::size_t>(j)];
        d(k) = std::polar(1.0, ph[static_cast<std::size_t>(j)]);
    }
    out.residual = operator_norm(u.matrix() - v * d.asDiagonal() * v.adjoint());
    if (!(out.residual <= kReconstructionTol))
        throw NumericalError("unitary_eigensystem: reconstruction residual " + std::to_string(out.residual) +
                             " exceeds tolerance");
    out.basis = UnitaryMatrix::assume_unitary(std::move(v));
    return out;
}

/// V diag(values) V*.
inline Matrix reassemble(const UnitaryMatrix& basis, const Eigen::VectorXcd& values) {
    return basis.matrix() * values.asDiagonal() * basis.matrix().adjoint();
}

/// Skew-Hermitian L with exp(L) = u and spectrum of L in i(-pi, pi).
/// Throws BranchCutError if an eigenvalue lies within angular distance gap_margin of -1.
inline Matrix principal_log_unitary(const UnitaryMatrix& u, double gap_margin = 1e-6) {
    if (!(gap_margin > 0.0)) throw PreconditionError("principal_log_unitary: gap_margin must be positive");
    const auto es = unitary_eigensystem(u);
    Eigen::VectorXcd logs(u.dim());
    for (std::size_t j = 0; j < es.profile.size(); ++j) {
        const double p = centered_phase(es.profile.phases[j]);
        if (std::numbers::pi - std::abs(p) <= gap_margin) throw BranchCutError(std::polar(1.0, p));
        logs(static_cast<Index>(j)) = Complex(0.0, p);
    }
    Matrix l = reassemble(es.basis, logs);
    return 0.5 * (l - l.adjoint());
}

/// exp(i h) for Hermitian h.
inline UnitaryMatrix exp_i_hermitian(const Matrix& h) {
    require_square(h, "exp_i_hermitian");
    if (h.size() == 0) return UnitaryMatrix::identity(0);
    const Matrix herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    Eigen::VectorXcd phases(h.rows());
    for (Index j = 0; j < h.rows(); ++j) phases(j) = std::polar(1.0, es.eigenvalues()(j));
    return UnitaryMatrix::assume_unitary(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

/// exp(s) for skew-Hermitian s.
inline UnitaryMatrix exp_skew(const Matrix& s) {
    const Complex minus_i(0.0, -1.0);
    return exp_i_hermitian(minus_i * s);
}

inline UnitaryMatrix direct_sum(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    const Index n = a.dim(), m = b.dim();
    Matrix out = Matrix::Zero(n + m, n + m);
    out.topLeftCorner(n, n) = a.matrix();
    out.bottomRightCorner(m, m) = b.matrix();
    return UnitaryMatrix::assume_unitary(std::move(out), std::max(a.tolerance(), b.tolerance()));
}

inline Matrix skew_part(const Matrix& m) { return 0.5 * (m - m.adjoint()); }

// ---------------------------------------------------------------------------
// Random matrices. All draws go through an explicit engine so results are
// reproducible from a seed.

using Rng = std::mt19937_64;

inline Matrix random_gaussian(Rng& rng, Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            m(i, j) = Complex(re, im);
        }
    return m;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase-fixed R).
inline UnitaryMatrix random_unitary(Rng& rng, Index n) {
    const Matrix g = random_gaussian(rng, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        const double a = std::abs(r(j, j));
        if (a > 0.0) q.col(j) *= r(j, j) / a;
    }
    return nearest_unitary(q);
}

/// Random Hermitian matrix scaled to operator norm `norm`.
inline Matrix random_hermitian(Rng& rng, Index n, double norm) {
    const Matrix g = random_gaussian(rng, n);
    Matrix h = 0.5 * (g + g.adjoint());
    const double s = operator_norm(h);
    if (s > 0.0) h *= norm / s;
    return h;
}

/// Random skew-Hermitian matrix with operator norm `norm`.
inline Matrix random_skew(Rng& rng, Index n, double norm) {
    return Complex(0.0, 1.0) * random_hermitian(rng, n, norm);
}

/// Diagonal unitary with independent uniform phases.
inline UnitaryMatrix random_diagonal_unitary(Rng& rng, Index n) {
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    Eigen::VectorXcd d(n);
    for (Index j = 0; j < n; ++j) d(j) = std::polar(1.0, phase(rng));
    return UnitaryMatrix::assume_unitary(d.asDiagonal().toDenseMatrix());
}

}  // namespace aga
