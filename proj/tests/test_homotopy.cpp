#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "aga/homotopy.hpp"
#include "aga/samplers.hpp"

using namespace aga;

namespace {

constexpr double kPi = std::numbers::pi;

AlmostRep random_rep(const GroupPresentation& p, Index n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<UnitaryMatrix> mats;
    for (std::size_t i = 0; i < p.generators().size(); ++i) mats.push_back(random_unitary(rng, n));
    return AlmostRep(p, mats);
}

// F(X_i exp(s S_i)) by central differences.
double fd_directional(const AlmostRep& rep, const std::vector<Matrix>& dirs, double h) {
    auto moved = [&](double s) {
        std::vector<UnitaryMatrix> mats;
        for (std::size_t i = 0; i < dirs.size(); ++i) mats.push_back(rep.at(i) * exp_skew(s * dirs[i]));
        return defect_objective(rep.with_assignment(mats));
    };
    return (moved(h) - moved(-h)) / (2 * h);
}

double analytic_directional(const std::vector<Matrix>& omega, const std::vector<Matrix>& dirs) {
    double d = 0.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) d += (omega[i].adjoint() * dirs[i]).trace().real();
    return d;
}

}  // namespace

TEST(DefectObjective, GenuineIsZero) {
    Rng rng(1);
    auto [u, v] = random_commuting_pair(rng, 5);
    EXPECT_LE(defect_objective(AlmostRep(builtin_presentation(BuiltinKey::free_abelian, 2), {u, v})), 1e-24);
}

TEST(DefectObjective, Voiculescu) {
    for (int n : {2, 3, 8, 17}) {
        const double w = 2 * std::sin(kPi / n);
        EXPECT_NEAR(defect_objective(voiculescu_family(n)), 2.0 * n * w * w, 1e-10) << n;
    }
}

TEST(DefectObjective, ConjugationInvarianceAndNormBracket) {
    Rng rng(2);
    for (const char* key : {"gamma_no_aga", "surface:2", "free_abelian:3", "h_infinite_dihedral"}) {
        const auto p = builtin_presentation(key);
        const auto rep = perturb(random_rep(p, 4, rng()), 0.2, rng());
        const auto w = random_unitary(rng, 4);
        const double f = defect_objective(rep);
        EXPECT_NEAR(defect_objective(conjugate(rep, w)), f, 1e-10);
        const double d = defect_value(rep);
        const double kn = static_cast<double>(p.relators().size()) * 4.0;
        EXPECT_LE(d * d, f + 1e-12) << key;
        EXPECT_LE(f, kn * d * d + 1e-12) << key;
    }
}

TEST(DefectGradient, MatchesFiniteDifferences) {
    Rng rng(3);
    for (const char* key : {"surface:2", "gamma_no_aga", "h_infinite_dihedral", "free_abelian:3", "free:2"}) {
        const auto p = builtin_presentation(key);
        for (int trial = 0; trial < 3; ++trial) {
            const auto rep = random_rep(p, 2 + trial, rng());
            const auto omega = defect_gradient(rep);
            for (int d = 0; d < 5; ++d) {
                std::vector<Matrix> dirs;
                for (std::size_t i = 0; i < p.generators().size(); ++i) dirs.push_back(random_skew(rng, rep.dimension(), 1.0));
                const double fd = fd_directional(rep, dirs, 1e-5);
                const double an = analytic_directional(omega, dirs);
                EXPECT_LE(std::abs(fd - an), 1e-5 * std::max(1.0, std::abs(an))) << key;
            }
        }
    }
}

TEST(Flow, GenuineInputIsAFixedPoint) {
    Rng rng(4);
    auto [u, v] = random_commuting_pair(rng, 4);
    const AlmostRep rep(builtin_presentation(BuiltinKey::free_abelian, 2), {u, v});
    const auto trace = flow_minimize(rep);
    EXPECT_EQ(trace.status, FlowStatus::converged);
    ASSERT_EQ(trace.samples.size(), 1u);
    EXPECT_EQ(trace.back().t, 0.0);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(operator_norm(trace.back().rep.at(i).matrix() - rep.at(i).matrix()), 1e-12);
}

TEST(Flow, ZeroBudget) {
    FlowConfig cfg;
    cfg.budget = 0;
    const auto trace = flow_minimize(voiculescu_family(5), cfg);
    EXPECT_EQ(trace.status, FlowStatus::budget_exhausted);
    EXPECT_EQ(trace.samples.size(), 1u);
    EXPECT_EQ(trace.steps, 0u);
}

TEST(Flow, CommutingPerturbationConvergesMonotonically) {
    const auto rep = perturbed_commuting_rep(8, 0.2, 7);
    const auto trace = flow_minimize(rep);
    EXPECT_EQ(trace.status, FlowStatus::converged);
    EXPECT_LE(trace.back().defect, 1e-8);
    EXPECT_LE(trace.steps, 10000u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(trace.samples.front().rep.at(i).matrix(), rep.at(i).matrix());
    for (std::size_t k = 1; k < trace.samples.size(); ++k) {
        EXPECT_GT(trace.samples[k].t, trace.samples[k - 1].t);
        EXPECT_LE(trace.samples[k].objective, trace.samples[k - 1].objective);
    }
    const auto& last = trace.back();
    EXPECT_NEAR(last.defect, defect_value(last.rep), 1e-15);
}

TEST(Flow, VoiculescuPlateausWithConstantInvariants) {
    FlowConfig cfg;
    cfg.track_invariants = true;
    const auto trace = flow_minimize(voiculescu_family(8), cfg);
    EXPECT_EQ(trace.status, FlowStatus::plateaued);
    EXPECT_GT(trace.back().defect, 0.05);
    ASSERT_EQ(trace.winding_pairs.size(), 1u);
    ASSERT_EQ(trace.involutions.size(), 1u);
    ASSERT_EQ(trace.invariant_log.size(), trace.samples.size());
    for (const auto& s : trace.invariant_log) {
        ASSERT_TRUE(s.windings[0].has_value());
        EXPECT_EQ(*s.windings[0], 1);
        EXPECT_EQ(s.halfplanes[0].count, 4);
    }
    const auto report = check_path_invariants(trace, std::pair<std::string, std::string>{"a", "c"}, "b");
    EXPECT_TRUE(report.constant);
    EXPECT_EQ(report.winding, 1);
    EXPECT_EQ(report.halfplane, 4);
    EXPECT_EQ(report.sampling_ok, report.max_sample_step < 0.1);
}

TEST(Flow, ConjugationEquivariance) {
    Rng rng(5);
    const auto rep = perturb(random_rep(builtin_presentation(BuiltinKey::gamma_no_aga), 4, 9), 0.1, 10);
    const auto w = random_unitary(rng, 4);
    FlowConfig cfg;
    cfg.budget = 300;
    cfg.stride = 5;
    const auto a = flow_minimize(rep, cfg);
    const auto b = flow_minimize(conjugate(rep, w), cfg);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k)
        EXPECT_NEAR(a.samples[k].objective, b.samples[k].objective, 1e-8);
}

TEST(TracelessLog, StaysInSpecialUnitary) {
    for (int n : {3, 4, 7}) {
        const auto rep = voiculescu_family(n);
        const auto g = gamma_commutator(rep.at("a"), rep.at("c"));
        const Matrix l = traceless_log(g);
        EXPECT_LE(std::abs(l.trace()), 1e-9);
        EXPECT_LE(operator_norm(exp_skew(l).matrix() - g.matrix()), 1e-9);
        for (const auto& c : su_geodesic_to_identity(g, 20))
            EXPECT_NEAR(std::abs(c.matrix().determinant() - 1.0), 0.0, 1e-9);
    }
    EXPECT_THROW(traceless_log(UnitaryMatrix(Matrix(Complex(0.0, 1.0) * Matrix::Identity(3, 3)))), PreconditionError);
}

TEST(Geodesic, EndpointsAndSpacing) {
    Rng rng(6);
    const auto g = gamma_commutator(random_unitary(rng, 3), random_unitary(rng, 3));
    const std::size_t k = su_geodesic_samples_for_gap(g, 0.01);
    const auto path = su_geodesic_to_identity(g, k);
    EXPECT_EQ(path.front().matrix(), g.matrix());
    EXPECT_EQ(path.back().matrix(), Matrix::Identity(3, 3));
    EXPECT_FALSE(first_path_gap_violation(path, 0.01).has_value());
    const auto coarse = first_path_gap_violation(su_geodesic_to_identity(g, 3), 0.01);
    ASSERT_TRUE(coarse.has_value());
    EXPECT_EQ(coarse->index, 1u);
}

TEST(Lift, ConstantPath) {
    auto [u, v] = random_irreducible_pair_near_commuting(3, 0.05, 1);
    const auto g = gamma_commutator(u, v);
    const std::vector<UnitaryMatrix> path(10, g);
    const auto r = lift_commutator_path(u, v, path, 1e-3);
    EXPECT_EQ(r.status, LiftStatus::success);
    EXPECT_LE(r.max_residual, 1e-12);
    ASSERT_EQ(r.lifted_path.size(), 10u);
    EXPECT_LE(operator_norm(r.lifted_path.back().u.matrix() - u.matrix()), 1e-12);
}

TEST(Lift, DimensionOneRejectsNonconstantPaths) {
    const auto one = UnitaryMatrix::identity(1);
    const std::vector<UnitaryMatrix> path{one, UnitaryMatrix(Matrix::Constant(1, 1, std::polar(1.0, 0.1)))};
    EXPECT_THROW(lift_commutator_path(one, one, path, 1e-3), PreconditionError);
}

TEST(Lift, GeodesicToIdentity) {
    auto [u, v] = random_irreducible_pair_near_commuting(3, 0.015, 500);
    const auto path = su_geodesic_to_identity(gamma_commutator(u, v), 200);
    const double delta = 1e-3;
    const auto r = lift_commutator_path(u, v, path, delta);
    ASSERT_EQ(r.status, LiftStatus::success);
    EXPECT_LT(r.max_residual, delta);
    ASSERT_EQ(r.lifted_path.size(), 200u);
    for (std::size_t k = 0; k < r.lifted_path.size(); ++k) {
        const auto& s = r.lifted_path[k];
        EXPECT_LE(s.residual, r.max_residual);
        EXPECT_NEAR(s.residual, operator_norm(gamma_commutator(s.u, s.v).matrix() - path[k].matrix()), 1e-12);
    }
    EXPECT_LE(operator_norm(gamma_commutator(r.lifted_path.back().u, r.lifted_path.back().v).matrix() -
                            Matrix::Identity(3, 3)),
              delta);
}

TEST(Lift, Preconditions) {
    Rng rng(7);
    const auto u = random_unitary(rng, 3), v = random_unitary(rng, 3);
    const auto g = gamma_commutator(u, v);
    const std::vector<UnitaryMatrix> sparse{g, UnitaryMatrix::identity(3)};
    try {
        lift_commutator_path(u, v, sparse, 1e-3);
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("samples 0 and 1"), std::string::npos);
    }
    const std::vector<UnitaryMatrix> wrong_start{UnitaryMatrix::identity(3)};
    if (operator_norm(g.matrix() - Matrix::Identity(3, 3)) > 1e-4) {
        EXPECT_THROW(lift_commutator_path(u, v, wrong_start, 1e-3), PreconditionError);
    }
    EXPECT_THROW(lift_commutator_path(u, v, {}, 1e-3), PreconditionError);
    EXPECT_THROW(lift_commutator_path(u, v, {g}, 0.0), PreconditionError);
}

TEST(CommutingPairs, ContractionStaysCommutingAndEndsAtIdentity) {
    Rng rng(8);
    auto [u, v] = random_commuting_pair(rng, 5);
    const auto jd = joint_diagonalize(u, v, 3);
    EXPECT_LE(jd.off_diagonal, 1e-8);
    const auto path = contract_commuting_pair(jd, 16);
    ASSERT_EQ(path.size(), 16u);
    EXPECT_LE(operator_norm(path.front().first.matrix() - u.matrix()), 1e-8);
    EXPECT_LE(operator_norm(path.front().second.matrix() - v.matrix()), 1e-8);
    EXPECT_EQ(path.back().first.matrix(), Matrix::Identity(5, 5));
    for (const auto& [x, y] : path)
        EXPECT_LE(operator_norm(gamma_commutator(x, y).matrix() - Matrix::Identity(5, 5)), 1e-12);
}

TEST(SurfaceReduce, AlreadyStandardFormIsUntouched) {
    Rng rng(9);
    const auto p = builtin_presentation(BuiltinKey::surface, 2);
    auto [u, v] = random_commuting_pair(rng, 3);
    const AlmostRep rep(p, {u, v, UnitaryMatrix::identity(3), UnitaryMatrix::identity(3)});
    const auto trace = surface_reduce(rep);
    EXPECT_EQ(trace.samples.size(), 1u);
    EXPECT_EQ(trace.status, FlowStatus::converged);
}

TEST(SurfaceReduce, GenusTwo) {
    const auto rep = near_genuine_surface_rep(2, 4, 0.05, 700);
    const double eps = defect_value(rep);
    EXPECT_NEAR(eps, 0.05, 1e-9);
    const auto trace = surface_reduce(rep);
    const auto& end = trace.back().rep;
    EXPECT_LE(operator_norm(end.at(2).matrix() - Matrix::Identity(4, 4)), 1e-8);
    EXPECT_LE(operator_norm(end.at(3).matrix() - Matrix::Identity(4, 4)), 1e-8);
    EXPECT_LE(trace.max_defect(), 2 * eps + 1e-6);
    for (const auto& s : trace.samples) EXPECT_NEAR(s.defect, defect_value(s.rep), 1e-12);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(trace.samples.front().rep.at(i).matrix(), rep.at(i).matrix());
}

TEST(SurfaceReduce, Preconditions) {
    EXPECT_THROW(surface_reduce(voiculescu_family(3)), PreconditionError);
    Rng rng(10);
    const auto s1 = builtin_presentation(BuiltinKey::surface, 1);
    EXPECT_THROW(surface_reduce(AlmostRep(s1, {UnitaryMatrix::identity(2), UnitaryMatrix::identity(2)})),
                 PreconditionError);
    const auto wild = random_rep(builtin_presentation(BuiltinKey::surface, 2), 3, 11);
    EXPECT_THROW(surface_reduce(wild), PreconditionError);
}

TEST(PathInvariants, ConstantTrace) {
    FlowTrace trace;
    const auto rep = voiculescu_family(6);
    for (int k = 0; k < 4; ++k) trace.samples.push_back({static_cast<double>(k), rep, 0.0, 0.0});
    const auto r = check_path_invariants(trace, std::pair<std::string, std::string>{"a", "c"}, "b");
    EXPECT_TRUE(r.constant);
    EXPECT_FALSE(r.first_violation.has_value());
    EXPECT_EQ(r.max_sample_step, 0.0);
}

TEST(PathInvariants, DetectsWindingJump) {
    FlowTrace trace;
    const auto rep = voiculescu_family(6);
    const auto flat = rep.with_assignment({rep.at("a"), rep.at("b"), UnitaryMatrix::identity(6)});
    trace.samples.push_back({0.0, rep, 0.0, 0.0});
    trace.samples.push_back({1.0, flat, 0.0, 0.0});
    const auto r = check_path_invariants(trace, std::pair<std::string, std::string>{"a", "c"}, std::nullopt);
    EXPECT_FALSE(r.constant);
    ASSERT_TRUE(r.first_violation.has_value());
    EXPECT_EQ(*r.first_violation, 1u);
    EXPECT_EQ(r.violation_kind, "winding");
    EXPECT_FALSE(r.sampling_ok);
}
