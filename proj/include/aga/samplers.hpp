#pragma once

// Seeded generators of the inputs used by the experiments: commuting pairs and
// their perturbations, near-genuine surface representations, irreducible pairs.

#include <cstdint>

#include "aga/almostrep.hpp"
#include "aga/invariants.hpp"

namespace aga {

/// W D1 W*, W D2 W* with Haar W and independent uniform diagonal phases.
inline std::pair<UnitaryMatrix, UnitaryMatrix> random_commuting_pair(Rng& rng, Index n) {
    const UnitaryMatrix w = random_unitary(rng, n);
    const UnitaryMatrix d1 = random_diagonal_unitary(rng, n);
    const UnitaryMatrix d2 = random_diagonal_unitary(rng, n);
    return {w * d1 * w.adjoint(), w * d2 * w.adjoint()};
}

/// A genuine representation of free_abelian(2) in U_n.
inline AlmostRep random_commuting_rep(Index n, std::uint64_t seed) {
    Rng rng(seed);
    auto [u, v] = random_commuting_pair(rng, n);
    return AlmostRep(builtin_presentation(BuiltinKey::free_abelian, 2), {u, v});
}

/// A random genuine representation of free_abelian(2) perturbed with `magnitude`.
inline AlmostRep perturbed_commuting_rep(Index n, double magnitude, std::uint64_t seed) {
    const AlmostRep base = random_commuting_rep(n, seed);
    return perturb(base, magnitude, seed ^ 0x9e3779b97f4a7c15ULL);
}

/// Second smallest singular value of X -> (uX - Xu, vX - Xv). The commutant of an irreducible
/// pair is the scalars, so this is zero exactly when the pair is reducible.
inline double irreducibility_margin(const UnitaryMatrix& u, const UnitaryMatrix& v) {
    const Index n = u.dim();
    if (n == 1) return 1.0;
    const Matrix id = Matrix::Identity(n, n);
    // vec(AX - XA) = (I (x) A - A^T (x) I) vec(X)
    auto commutator_operator = [&](const Matrix& a) {
        Matrix op = Matrix::Zero(n * n, n * n);
        for (Index j = 0; j < n; ++j)
            for (Index l = 0; l < n; ++l) {
                if (j == l) op.block(j * n, l * n, n, n) += a;
                op.block(j * n, l * n, n, n) -= a(l, j) * id;
            }
        return op;
    };
    Matrix stacked(2 * n * n, n * n);
    stacked << commutator_operator(u.matrix()), commutator_operator(v.matrix());
    Eigen::JacobiSVD<Matrix> svd(stacked);
    const auto& s = svd.singularValues();
    return s(s.size() - 2);
}

/// An irreducible pair whose commutator is close to I: a random commuting pair with v
/// multiplied by exp(S), ||S|| = scale. Draws again until the pair is irreducible with
/// margin >= min_margin.
inline std::pair<UnitaryMatrix, UnitaryMatrix> random_irreducible_pair_near_commuting(Index n, double scale,
                                                                                      std::uint64_t seed,
                                                                                      double min_margin = 1e-3) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto [u, v] = random_commuting_pair(rng, n);
        const UnitaryMatrix vp = nearest_unitary((v * exp_skew(random_skew(rng, n, scale))).matrix());
        if (irreducibility_margin(u, vp) >= min_margin) return {u, vp};
    }
    throw NumericalError("random_irreducible_pair_near_commuting: no irreducible draw found");
}

/// A representation of surface(m) in U_n with defect eps (to bisection accuracy). Pairs come in
/// couples (v, u), (u, v) for a Haar pair (u, v), whose commutators cancel; an odd last pair is
/// (I, I). The genuine representation is then perturbed with a magnitude bisected to hit eps.
inline AlmostRep near_genuine_surface_rep(int m, Index n, double eps, std::uint64_t seed) {
    if (m < 1) throw PreconditionError("near_genuine_surface_rep: genus must be >= 1");
    if (!(eps > 0.0) || !(eps < 0.5)) throw PreconditionError("near_genuine_surface_rep: eps must lie in (0, 0.5)");
    Rng rng(seed);
    std::vector<UnitaryMatrix> gens;
    for (int i = 0; i < m; i += 2) {
        const UnitaryMatrix u = random_unitary(rng, n);
        const UnitaryMatrix v = random_unitary(rng, n);
        if (i + 1 < m) {
            gens.push_back(v);
            gens.push_back(u);
            gens.push_back(u);
            gens.push_back(v);
        } else {
            gens.push_back(UnitaryMatrix::identity(n));
            gens.push_back(UnitaryMatrix::identity(n));
        }
    }
    const AlmostRep genuine(builtin_presentation(BuiltinKey::surface, m), gens);
    const std::uint64_t pseed = seed ^ 0x5851f42d4c957f2dULL;
    double lo = 0.0, hi = 0.49;
    if (defect_value(perturb(genuine, hi, pseed)) < eps)
        throw NumericalError("near_genuine_surface_rep: perturbation too weak to reach eps");
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (defect_value(perturb(genuine, mid, pseed)) < eps)
            lo = mid;
        else
            hi = mid;
    }
    return perturb(genuine, hi, pseed);
}

}  // namespace aga
