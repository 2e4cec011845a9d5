#pragma once

// Homotopy obstructions for almost representations: the winding number of an
// almost-commuting pair, spectral lacunae, half-plane eigenvalue counts,
// rounding to an involution and the trace obstruction for <a,b,c>.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "aga/numerics.hpp"

namespace aga {

/// Multiplicative commutator u v u^-1 v^-1.
inline UnitaryMatrix gamma_commutator(const UnitaryMatrix& u, const UnitaryMatrix& v) {
    if (u.dim() != v.dim()) throw PreconditionError("gamma_commutator: dimension mismatch");
    return UnitaryMatrix::assume_unitary(u.matrix() * v.matrix() * u.matrix().adjoint() * v.matrix().adjoint());
}

inline constexpr double kWindingSnap = 0.1;

struct WindingReport {
    long value = 0;
    double commutator_distance = 0.0;  // ||u v u^-1 v^-1 - I||_op
    double raw_trace = 0.0;            // Tr(log gamma) / (2 pi i), before rounding
    double imaginary_residual = 0.0;   // imaginary part of the normalized trace
    bool reliable = true;              // |raw_trace - value| <= kWindingSnap
};

/// Normalized trace of the principal logarithm of the commutator.
/// Throws BranchCutError when the commutator spectrum reaches -1.
inline WindingReport winding_number(const UnitaryMatrix& u, const UnitaryMatrix& v, double gap_margin = 1e-6) {
    const UnitaryMatrix g = gamma_commutator(u, v);
    WindingReport out;
    out.commutator_distance = operator_norm(g.matrix() - Matrix::Identity(u.dim(), u.dim()));
    const Matrix l = principal_log_unitary(g, gap_margin);
    const Complex normalized = l.trace() / Complex(0.0, kTwoPi);
    out.raw_trace = normalized.real();
    out.imaginary_residual = normalized.imag();
    out.value = std::lround(out.raw_trace);
    out.reliable = std::abs(out.raw_trace - static_cast<double>(out.value)) <= kWindingSnap;
    return out;
}

/// Winding value, or nullopt where it is undefined (branch cut) or the snap is unreliable.
inline std::optional<long> try_winding(const UnitaryMatrix& u, const UnitaryMatrix& v) {
    try {
        const auto w = winding_number(u, v);
        if (!w.reliable) return std::nullopt;
        return w.value;
    } catch (const BranchCutError&) {
        return std::nullopt;
    }
}

struct Lacuna {
    double gap = kTwoPi;   // length of the largest eigenvalue-free arc
    double location = 0.0; // phase in [0, 2pi) at the midpoint of that arc
};

inline Lacuna spectral_lacuna(const SpectralProfile& profile) {
    Lacuna out;
    const auto& ph = profile.phases;
    if (ph.size() <= 1) {
        out.location = ph.empty() ? 0.0 : std::fmod(ph.front() + std::numbers::pi, kTwoPi);
        return out;
    }
    out.gap = -1.0;
    for (std::size_t j = 0; j < ph.size(); ++j) {
        const double start = ph[j];
        const double end = (j + 1 < ph.size()) ? ph[j + 1] : ph.front() + kTwoPi;
        if (end - start > out.gap) {
            out.gap = end - start;
            out.location = std::fmod(start + 0.5 * (end - start), kTwoPi);
        }
    }
    return out;
}

/// Largest circular gap between consecutive eigenphases.
inline Lacuna spectral_lacuna(const UnitaryMatrix& u) { return spectral_lacuna(unitary_eigensystem(u).profile); }

struct HalfplaneCount {
    long count = 0;             // eigenvalues with Re < 0
    double min_abs_real = 0.0;  // stability certificate: the count is locally constant while this is > 0
};

inline HalfplaneCount halfplane_count(const SpectralProfile& profile) {
    HalfplaneCount out;
    out.min_abs_real = std::numeric_limits<double>::infinity();
    for (double p : profile.phases) {
        const double re = std::cos(p);
        if (re < 0.0) ++out.count;
        out.min_abs_real = std::min(out.min_abs_real, std::abs(re));
    }
    if (profile.phases.empty()) out.min_abs_real = 0.0;
    return out;
}

inline HalfplaneCount halfplane_count(const UnitaryMatrix& u) { return halfplane_count(unitary_eigensystem(u).profile); }

struct RoundedInvolution {
    UnitaryMatrix involution;
    double distance = 0.0;  // max_j |lambda_j - sign(Re lambda_j)| = ||u - involution||_op
};

/// Replaces every eigenvalue by the sign of its real part, keeping the eigenbasis.
/// Requires |lambda^2 - 1| <= 1 for every eigenvalue.
inline RoundedInvolution round_involution(const UnitaryMatrix& u, double eps_prime) {
    if (!(eps_prime > 0.0)) throw PreconditionError("round_involution: eps_prime must be positive");
    const auto es = unitary_eigensystem(u);
    Eigen::VectorXcd signs(u.dim());
    double dist = 0.0;
    for (std::size_t j = 0; j < es.profile.size(); ++j) {
        const Complex lambda = std::polar(1.0, es.profile.phases[j]);
        if (std::abs(lambda * lambda - 1.0) > 1.0 + 1e-12) {
            std::ostringstream os;
            os.precision(17);
            os << "round_involution: eigenvalue (" << lambda.real() << ", " << lambda.imag()
               << ") violates |lambda^2 - 1| <= 1";
            throw PreconditionError(os.str());
        }
        const double s = lambda.real() > 0.0 ? 1.0 : -1.0;
        signs(static_cast<Index>(j)) = s;
        dist = std::max(dist, std::abs(lambda - s));
    }
    Matrix r = reassemble(es.basis, signs);
    r = 0.5 * (r + r.adjoint());
    return {UnitaryMatrix::assume_unitary(std::move(r)), dist};
}

/// The bookkeeping of the trace obstruction for an involution b' against a unitary a
/// of dimension n + m.
struct ObstructionReport {
    long n_small = 0;
    long m_pad = 0;
    double eps_prime = 0.0;
    double trace_abs = 0.0;    // |tr b'|
    double lower_bound = 0.0;  // m - n
    long N_count = 0;          // #{j : |Im w_j| > 2 eps'}
    double upper_bound = 0.0;  // n + m - N/4
    bool contradiction = false;

    // Audit of the diagonal estimate |b_jj (w_j - conj w_j)| <= 3 eps' in the eigenbasis of a.
    double abab_deviation = 0.0;       // ||a b' a b' - I||_op
    double max_diagonal_product = 0.0; // max_j |b_jj (w_j - conj w_j)|
    bool diagonal_estimate_applicable = false;  // abab_deviation <= 3 eps'
    bool diagonal_estimate_holds = false;
};

inline ObstructionReport trace_obstruction(const UnitaryMatrix& a_mat, const UnitaryMatrix& b_inv, long n_small,
                                           long m_pad, double eps_prime) {
    if (n_small < 0 || m_pad < 0) throw PreconditionError("trace_obstruction: negative block sizes");
    if (!(eps_prime > 0.0)) throw PreconditionError("trace_obstruction: eps_prime must be positive");
    const Index dim = a_mat.dim();
    if (b_inv.dim() != dim || dim != static_cast<Index>(n_small + m_pad))
        throw PreconditionError("trace_obstruction: dimension mismatch (expected n_small + m_pad = " +
                                std::to_string(n_small + m_pad) + ")");
    const Matrix id = Matrix::Identity(dim, dim);
    if (operator_norm(b_inv.matrix() * b_inv.matrix() - id) > 1e-8)
        throw PreconditionError("trace_obstruction: b is not an involution");

    ObstructionReport r;
    r.n_small = n_small;
    r.m_pad = m_pad;
    r.eps_prime = eps_prime;
    r.trace_abs = std::abs(b_inv.matrix().trace());
    r.lower_bound = static_cast<double>(m_pad - n_small);

    const auto es = unitary_eigensystem(a_mat);
    const Matrix b_eig = es.basis.matrix().adjoint() * b_inv.matrix() * es.basis.matrix();
    for (std::size_t j = 0; j < es.profile.size(); ++j) {
        const double im = std::sin(es.profile.phases[j]);
        if (std::abs(im) > 2.0 * eps_prime) ++r.N_count;
        // w - conj(w) = 2 i Im w
        r.max_diagonal_product =
            std::max(r.max_diagonal_product, std::abs(b_eig(static_cast<Index>(j), static_cast<Index>(j))) * 2.0 * std::abs(im));
    }
    r.upper_bound = 0.75 * static_cast<double>(r.N_count) + static_cast<double>(n_small + m_pad) -
                    static_cast<double>(r.N_count);
    r.contradiction = r.lower_bound > r.upper_bound;

    r.abab_deviation = operator_norm(a_mat.matrix() * b_inv.matrix() * a_mat.matrix() * b_inv.matrix() - id);
    r.diagonal_estimate_applicable = r.abab_deviation <= 3.0 * eps_prime;
    r.diagonal_estimate_holds = r.max_diagonal_product <= 3.0 * eps_prime;
    return r;
}

}  // namespace aga
