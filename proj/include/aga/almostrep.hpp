#pragma once

// Almost representations: unitary assignments to generators, word evaluation,
// the defect, pushforward along presentation morphisms and the Voiculescu family.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "aga/numerics.hpp"
#include "aga/presentation.hpp"

namespace aga {

class AlmostRep {
public:
    AlmostRep() = default;

    /// `assignment` is in generator order of `presentation`; every matrix has dimension n.
    AlmostRep(std::shared_ptr<const GroupPresentation> presentation, std::vector<UnitaryMatrix> assignment)
        : presentation_(std::move(presentation)), assignment_(std::move(assignment)) {
        if (!presentation_) throw PreconditionError("AlmostRep: null presentation");
        if (assignment_.size() != presentation_->generators().size())
            throw PreconditionError("AlmostRep: expected " + std::to_string(presentation_->generators().size()) +
                                    " matrices, got " + std::to_string(assignment_.size()));
        if (assignment_.empty()) throw PreconditionError("AlmostRep: presentation has no generators");
        n_ = assignment_.front().dim();
        if (n_ < 1) throw PreconditionError("AlmostRep: dimension must be positive");
        for (const auto& u : assignment_)
            if (u.dim() != n_) throw PreconditionError("AlmostRep: matrices of unequal dimension");
    }

    AlmostRep(const GroupPresentation& presentation, std::vector<UnitaryMatrix> assignment)
        : AlmostRep(std::make_shared<const GroupPresentation>(presentation), std::move(assignment)) {}

    const GroupPresentation& presentation() const noexcept { return *presentation_; }
    const std::shared_ptr<const GroupPresentation>& shared_presentation() const noexcept { return presentation_; }
    Index dimension() const noexcept { return n_; }
    const std::vector<UnitaryMatrix>& assignment() const noexcept { return assignment_; }

    const UnitaryMatrix& at(std::size_t index) const { return assignment_.at(index); }

    const UnitaryMatrix& at(std::string_view generator) const {
        const auto i = presentation_->index_of(generator);
        if (!i) throw PreconditionError("unknown generator '" + std::string(generator) + "'");
        return assignment_[*i];
    }

    /// Same presentation, new matrices.
    AlmostRep with_assignment(std::vector<UnitaryMatrix> assignment) const {
        return AlmostRep(presentation_, std::move(assignment));
    }

private:
    std::shared_ptr<const GroupPresentation> presentation_;
    std::vector<UnitaryMatrix> assignment_;
    Index n_ = 0;
};

/// Product of the assigned unitaries in letter order; exponent -1 is the adjoint.
inline UnitaryMatrix evaluate_word(const AlmostRep& rep, const Word& w) {
    Matrix acc = Matrix::Identity(rep.dimension(), rep.dimension());
    for (const Letter& l : w) {
        const auto i = rep.presentation().index_of(l.generator);
        if (!i) throw PreconditionError("evaluate_word: unknown generator '" + l.generator + "'");
        const Matrix& m = rep.at(*i).matrix();
        if (l.exponent > 0)
            acc = acc * m;
        else
            acc = acc * m.adjoint();
    }
    return UnitaryMatrix::assume_unitary(std::move(acc));
}

struct RelatorDeviation {
    std::size_t relator = 0;
    double deviation = 0.0;
};

struct DefectReport {
    std::vector<RelatorDeviation> per_relator;
    double max_deviation = 0.0;
};

/// Operator-norm distance of every evaluated relator from the identity.
inline DefectReport defect(const AlmostRep& rep) {
    DefectReport out;
    const auto& rels = rep.presentation().relators();
    const Matrix id = Matrix::Identity(rep.dimension(), rep.dimension());
    for (std::size_t j = 0; j < rels.size(); ++j) {
        const double d = operator_norm(evaluate_word(rep, rels[j]).matrix() - id);
        out.per_relator.push_back({j, d});
        out.max_deviation = std::max(out.max_deviation, d);
    }
    return out;
}

inline double defect_value(const AlmostRep& rep) { return defect(rep).max_deviation; }

/// The Voiculescu almost representation of <a,b,c | a c a^-1 c^-1, b^2, abab>:
/// a = diag(w, w^2, ..., w^n), c = cyclic shift e_i -> e_{i+1 mod n}, b = anti-diagonal flip,
/// w = exp(2 pi i / n).
inline AlmostRep voiculescu_family(int n) {
    if (n < 2) throw PreconditionError("voiculescu_family: n must be >= 2");
    const Index N = n;
    Matrix a = Matrix::Zero(N, N), b = Matrix::Zero(N, N), c = Matrix::Zero(N, N);
    for (Index k = 0; k < N; ++k) {
        // w^(k+1); the last entry is exactly 1.
        a(k, k) = (k + 1 == N) ? Complex(1.0, 0.0) : std::polar(1.0, kTwoPi * static_cast<double>(k + 1) / n);
        c((k + 1) % N, k) = 1.0;
        b(N - 1 - k, k) = 1.0;
    }
    return AlmostRep(builtin_presentation(BuiltinKey::gamma_no_aga),
                     {UnitaryMatrix(std::move(a)), UnitaryMatrix(std::move(b)), UnitaryMatrix(std::move(c))});
}

/// Along a morphism source -> target: target generator h gets evaluate_word(rep, image(h)).
inline AlmostRep pushforward(const AlmostRep& rep, const PresentationMorphism& phi) {
    if (!(phi.source() == rep.presentation()))
        throw PreconditionError("pushforward: morphism source does not match the representation's presentation");
    std::vector<UnitaryMatrix> out;
    for (const auto& h : phi.target().generators()) out.push_back(evaluate_word(rep, phi.image(h)));
    return AlmostRep(phi.target(), std::move(out));
}

/// Every generator becomes old (+) I_m.
inline AlmostRep pad_with_identity(const AlmostRep& rep, Index m) {
    if (m < 0) throw PreconditionError("pad_with_identity: negative padding");
    if (m == 0) return rep;
    const auto id = UnitaryMatrix::identity(m);
    std::vector<UnitaryMatrix> out;
    for (const auto& u : rep.assignment()) out.push_back(direct_sum(u, id));
    return rep.with_assignment(std::move(out));
}

/// Blockwise direct sum of two representations of the same presentation.
inline AlmostRep direct_sum(const AlmostRep& lhs, const AlmostRep& rhs) {
    if (!(lhs.presentation() == rhs.presentation()))
        throw PreconditionError("direct_sum: presentations differ");
    std::vector<UnitaryMatrix> out;
    for (std::size_t i = 0; i < lhs.assignment().size(); ++i)
        out.push_back(direct_sum(lhs.at(i), rhs.at(i)));
    return lhs.with_assignment(std::move(out));
}

/// W sigma W* generatorwise.
inline AlmostRep conjugate(const AlmostRep& rep, const UnitaryMatrix& w) {
    std::vector<UnitaryMatrix> out;
    for (const auto& u : rep.assignment()) out.push_back(w * u * w.adjoint());
    return rep.with_assignment(std::move(out));
}

/// Multiplies every generator by exp(S) with S random skew-Hermitian of operator norm `magnitude`.
/// Deterministic in the seed.
inline AlmostRep perturb(const AlmostRep& rep, double magnitude, std::uint64_t seed) {
    if (!(magnitude > 0.0) || !(magnitude < 0.5))
        throw PreconditionError("perturb: magnitude must lie in (0, 0.5)");
    Rng rng(seed);
    std::vector<UnitaryMatrix> out;
    for (const auto& u : rep.assignment())
        out.push_back(nearest_unitary((u * exp_skew(random_skew(rng, rep.dimension(), magnitude))).matrix()));
    return rep.with_assignment(std::move(out));
}

/// Size of the largest trailing block on which every generator is exactly the identity
/// (within tol), i.e. the unital tail in the U_n -> U_infinity embedding.
inline Index identity_tail_size(const AlmostRep& rep, double tol = 1e-10) {
    const Index n = rep.dimension();
    Index k = 0;
    for (Index j = n - 1; j >= 0; --j) {
        bool ok = true;
        for (const auto& u : rep.assignment()) {
            const Matrix& m = u.matrix();
            for (Index i = 0; i < n && ok; ++i) {
                const Complex want = (i == j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
                if (std::abs(m(i, j) - want) > tol || std::abs(m(j, i) - want) > tol) ok = false;
            }
            if (!ok) break;
        }
        if (!ok) break;
        ++k;
    }
    return k;
}

/// Smallest dimension carrying the representation once the identity tail is dropped (at least 1).
inline Index minimal_dimension(const AlmostRep& rep, double tol = 1e-10) {
    return std::max<Index>(1, rep.dimension() - identity_tail_size(rep, tol));
}

inline AlmostRep strip_identity_tail(const AlmostRep& rep, double tol = 1e-10) {
    const Index keep = minimal_dimension(rep, tol);
    std::vector<UnitaryMatrix> out;
    for (const auto& u : rep.assignment())
        out.push_back(UnitaryMatrix::assume_unitary(u.matrix().topLeftCorner(keep, keep)));
    return rep.with_assignment(std::move(out));
}

/// Round trip sigma -> sigma-bar (along forward) -> sigma-double-bar (along backward),
/// with both distances expressed as multiples of the input defect.
struct PushforwardAudit {
    double input_defect = 0.0;
    double forward_defect = 0.0;       // defect of sigma-bar in the target presentation
    double roundtrip_distance = 0.0;   // max_i ||sigma-double-bar(g_i) - sigma(g_i)||
    double forward_slope = 0.0;        // forward_defect / input_defect (0 if input is genuine)
    double roundtrip_slope = 0.0;
};

inline PushforwardAudit audit_roundtrip(const AlmostRep& rep, const PresentationMorphism& forward,
                                        const PresentationMorphism& backward) {
    PushforwardAudit out;
    const AlmostRep bar = pushforward(rep, forward);
    const AlmostRep barbar = pushforward(bar, backward);
    out.input_defect = defect_value(rep);
    out.forward_defect = defect_value(bar);
    for (std::size_t i = 0; i < rep.assignment().size(); ++i)
        out.roundtrip_distance =
            std::max(out.roundtrip_distance, operator_norm(barbar.at(i).matrix() - rep.at(i).matrix()));
    if (out.input_defect > 0.0) {
        out.forward_slope = out.forward_defect / out.input_defect;
        out.roundtrip_slope = out.roundtrip_distance / out.input_defect;
    }
    return out;
}

}  // namespace aga
