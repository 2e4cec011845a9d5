#pragma once

// Deformations of almost representations: the defect-minimizing flow, lifting
// of paths through the commutator map, the genus reduction for surface groups
// and invariant tracking along the produced paths.

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aga/almostrep.hpp"
#include "aga/invariants.hpp"
#include "aga/objective.hpp"

namespace aga {

// ---------------------------------------------------------------------------
// Flow

enum class FlowStatus { converged, plateaued, budget_exhausted, diverged };

inline const char* to_string(FlowStatus s) {
    switch (s) {
    case FlowStatus::converged: return "converged";
    case FlowStatus::plateaued: return "plateaued";
    case FlowStatus::budget_exhausted: return "budget_exhausted";
    case FlowStatus::diverged: return "diverged";
    }
    return "unknown";
}

struct FlowConfig {
    std::size_t budget = 10000;        // accepted steps
    double tolerance = 1e-8;           // operator-norm defect for "converged"
    std::size_t stride = 10;           // record every stride-th accepted step
    bool track_invariants = false;
    std::size_t plateau_window = 200;
    double plateau_relative_decrease = 1e-10;
    ArmijoParams armijo;
};

struct FlowSample {
    double t = 0.0;
    AlmostRep rep;
    double defect = 0.0;
    double objective = 0.0;
};

struct InvariantSample {
    double t = 0.0;
    std::vector<std::optional<long>> windings;  // per tracked pair; nullopt where undefined
    std::vector<HalfplaneCount> halfplanes;     // per tracked involution
};

struct FlowTrace {
    std::vector<FlowSample> samples;
    FlowStatus status = FlowStatus::budget_exhausted;
    std::size_t steps = 0;
    std::vector<std::pair<std::string, std::string>> winding_pairs;
    std::vector<std::string> involutions;
    std::vector<InvariantSample> invariant_log;

    const FlowSample& back() const { return samples.back(); }
    double max_defect() const {
        double d = 0.0;
        for (const auto& s : samples) d = std::max(d, s.defect);
        return d;
    }
};

/// Relators of the form x y x^-1 y^-1 give tracked pairs, relators x^2 / x^-2 give tracked involutions.
inline void detect_tracked_invariants(const GroupPresentation& p, std::vector<std::pair<std::string, std::string>>& pairs,
                                      std::vector<std::string>& involutions) {
    for (const auto& r : p.relators()) {
        const auto& ls = r.letters();
        if (ls.size() == 4 && ls[0].generator == ls[2].generator && ls[1].generator == ls[3].generator &&
            ls[0].generator != ls[1].generator && ls[0].exponent == 1 && ls[1].exponent == 1 &&
            ls[2].exponent == -1 && ls[3].exponent == -1)
            pairs.emplace_back(ls[0].generator, ls[1].generator);
        if (ls.size() == 2 && ls[0] == ls[1]) involutions.push_back(ls[0].generator);
    }
}

inline InvariantSample measure_invariants(double t, const AlmostRep& rep,
                                          const std::vector<std::pair<std::string, std::string>>& pairs,
                                          const std::vector<std::string>& involutions) {
    InvariantSample s;
    s.t = t;
    for (const auto& [x, y] : pairs) s.windings.push_back(try_winding(rep.at(x), rep.at(y)));
    for (const auto& g : involutions) s.halfplanes.push_back(halfplane_count(rep.at(g)));
    return s;
}

/// Retracted gradient descent on the product of unitary groups minimizing defect_objective.
/// The first sample is the input representation itself.
inline FlowTrace flow_minimize(const AlmostRep& rep, const FlowConfig& config = {}) {
    const WordObjective obj = WordObjective::from_presentation(rep.presentation());
    const double kn = static_cast<double>(std::max<std::size_t>(1, obj.term_count())) *
                      static_cast<double>(rep.dimension());
    FlowTrace trace;
    if (config.track_invariants) detect_tracked_invariants(rep.presentation(), trace.winding_pairs, trace.involutions);

    std::vector<Matrix> xs = matrices_of(rep);
    double f = obj.value(xs);
    double t = 0.0;

    // defect <= sqrt(F) <= sqrt(k n) defect, so the exact SVD is only needed in the bracket.
    auto defect_of = [&](const std::vector<Matrix>& m, double fv) {
        if (fv == 0.0) return 0.0;
        return obj.max_residual(m);
    };
    auto is_converged = [&](const std::vector<Matrix>& m, double fv) {
        const double tol = config.tolerance;
        if (std::sqrt(fv) <= tol) return true;
        if (fv > kn * tol * tol) return false;
        return obj.max_residual(m) <= tol;
    };
    auto record = [&](const AlmostRep& r, double fv) {
        trace.samples.push_back({t, r, defect_of(xs, fv), fv});
        if (config.track_invariants)
            trace.invariant_log.push_back(measure_invariants(t, r, trace.winding_pairs, trace.involutions));
    };

    record(rep, f);
    if (is_converged(xs, f)) {
        trace.status = FlowStatus::converged;
        return trace;
    }

    std::deque<double> history{f};
    bool finished = false;
    bool last_recorded = true;
    for (std::size_t step = 0; step < config.budget; ++step) {
        const ArmijoResult res = armijo_step(obj, xs, f, config.armijo);
        if (!res.accepted) {
            trace.status = FlowStatus::plateaued;
            finished = true;
            break;
        }
        f = res.objective;
        t += res.step;
        ++trace.steps;
        last_recorded = false;
        if (!std::isfinite(f)) {
            trace.status = FlowStatus::diverged;
            finished = true;
            break;
        }
        if (is_converged(xs, f)) {
            trace.status = FlowStatus::converged;
            finished = true;
            break;
        }
        history.push_back(f);
        if (history.size() > config.plateau_window + 1) history.pop_front();
        if (history.size() == config.plateau_window + 1 &&
            history.front() - history.back() < config.plateau_relative_decrease * history.front()) {
            trace.status = FlowStatus::plateaued;
            finished = true;
            break;
        }
        if (config.stride > 0 && trace.steps % config.stride == 0) {
            record(rep.with_assignment(unitaries_of(xs)), f);
            last_recorded = true;
        }
    }
    if (!finished) trace.status = FlowStatus::budget_exhausted;
    if (!last_recorded) record(rep.with_assignment(unitaries_of(xs)), f);
    return trace;
}

// ---------------------------------------------------------------------------
// Paths in the special unitary group

/// Skew-Hermitian L with exp(L) = c and tr L = 0, for c of determinant one. Among the branches
/// obtained by shifting eigenphases by multiples of 2 pi it picks the one that moves the
/// phases closest to +-pi, which has the smallest operator norm.
inline Matrix traceless_log(const UnitaryMatrix& c) {
    const auto es = unitary_eigensystem(c);
    const std::size_t n = es.profile.size();
    std::vector<double> phi(n);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        phi[j] = centered_phase(es.profile.phases[j]);
        sum += phi[j];
    }
    const long k = std::lround(sum / kTwoPi);
    if (std::abs(sum - kTwoPi * static_cast<double>(k)) > 1e-6)
        throw PreconditionError("traceless_log: matrix is not in the special unitary group");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return phi[a] > phi[b]; });
    if (k > 0)
        for (long i = 0; i < k; ++i) phi[order[static_cast<std::size_t>(i)]] -= kTwoPi;
    if (k < 0)
        for (long i = 0; i < -k; ++i) phi[order[n - 1 - static_cast<std::size_t>(i)]] += kTwoPi;
    Eigen::VectorXcd d(static_cast<Index>(n));
    for (std::size_t j = 0; j < n; ++j) d(static_cast<Index>(j)) = Complex(0.0, phi[j]);
    return skew_part(reassemble(es.basis, d));
}

/// c(t) = exp((1 - t) L) for t = 0, 1/(samples-1), ..., 1 with L the traceless log of c0.
inline std::vector<UnitaryMatrix> su_geodesic_to_identity(const UnitaryMatrix& c0, std::size_t samples) {
    if (samples < 2) throw PreconditionError("su_geodesic_to_identity: need at least two samples");
    const Matrix l = traceless_log(c0);
    std::vector<UnitaryMatrix> out;
    out.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const double s = 1.0 - static_cast<double>(k) / static_cast<double>(samples - 1);
        out.push_back(k == 0 ? c0 : (k + 1 == samples ? UnitaryMatrix::identity(c0.dim()) : exp_skew(s * l)));
    }
    return out;
}

/// Number of samples for which consecutive points of the geodesic from c0 to I are at most max_gap apart.
inline std::size_t su_geodesic_samples_for_gap(const UnitaryMatrix& c0, double max_gap) {
    if (!(max_gap > 0.0)) throw PreconditionError("su_geodesic_samples_for_gap: max_gap must be positive");
    const Matrix l = traceless_log(c0);
    // ||exp(L/K) - I|| <= ||L|| / K
    const double len = operator_norm(l);
    return static_cast<std::size_t>(std::ceil(len / max_gap)) + 1;
}

struct PathGap {
    std::size_t index = 0;  // gap between samples index-1 and index
    double gap = 0.0;
};

/// First consecutive pair farther apart than max_gap in operator norm, if any.
inline std::optional<PathGap> first_path_gap_violation(const std::vector<UnitaryMatrix>& path, double max_gap) {
    for (std::size_t k = 1; k < path.size(); ++k) {
        const double g = operator_norm(path[k].matrix() - path[k - 1].matrix());
        if (g > max_gap) return PathGap{k, g};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lifting through the commutator map

struct LiftConfig {
    std::size_t corrector_budget = 400;  // Armijo steps per attempt
    double corrector_fraction = 0.1;     // corrector aims at residual <= fraction * delta
    int max_retries = 5;
    std::uint64_t seed = 0;
    double density_fraction = 0.25;      // consecutive c samples must be within fraction * delta
    ArmijoParams armijo;
};

enum class LiftStatus { success, stalled };

struct LiftSample {
    double t = 0.0;
    UnitaryMatrix u;
    UnitaryMatrix v;
    double residual = 0.0;  // ||gamma(u, v) - c(t)||_op
};

struct ContinuationResult {
    std::vector<LiftSample> lifted_path;
    double max_residual = 0.0;
    LiftStatus status = LiftStatus::success;
    double stalled_at = 0.0;
    std::size_t retries = 0;
    std::size_t corrector_steps = 0;
};

namespace detail {

inline WordObjective commutator_objective(const Matrix& target) {
    WordTerm t;
    t.letters = {{0, 1}, {1, 1}, {0, -1}, {1, -1}};
    t.target = target;
    return WordObjective(2, {std::move(t)});
}

inline double commutator_residual(const std::vector<Matrix>& uv, const Matrix& target) {
    return operator_norm(uv[0] * uv[1] * uv[0].adjoint() * uv[1].adjoint() - target);
}

// Runs Armijo steps until the residual drops to `target_residual` or the budget runs out.
// Returns the final operator-norm residual.
inline double correct(std::vector<Matrix>& uv, const Matrix& target, double target_residual, std::size_t budget,
                      const ArmijoParams& armijo, std::size_t& steps) {
    const WordObjective obj = commutator_objective(target);
    double f = obj.value(uv);
    const double n = static_cast<double>(uv[0].rows());
    for (std::size_t k = 0;; ++k) {
        if (std::sqrt(f) <= target_residual) return commutator_residual(uv, target);
        if (f <= n * target_residual * target_residual) {
            const double r = commutator_residual(uv, target);
            if (r <= target_residual) return r;
        }
        if (k >= budget) break;
        const ArmijoResult res = armijo_step(obj, uv, f, armijo);
        if (!res.accepted) break;
        f = res.objective;
        ++steps;
    }
    return commutator_residual(uv, target);
}

}  // namespace detail

/// Predictor-corrector continuation of (u, v) along a sampled path c in the special unitary
/// group so that ||gamma(u_t, v_t) - c(t)|| <= delta at every sample. Stalls are answered by
/// seeded random skew perturbations of size delta/10, at most max_retries per sample.
inline ContinuationResult lift_commutator_path(const UnitaryMatrix& u0, const UnitaryMatrix& v0,
                                               const std::vector<UnitaryMatrix>& c_path, double delta,
                                               const LiftConfig& config = {}) {
    if (!(delta > 0.0)) throw PreconditionError("lift_commutator_path: delta must be positive");
    if (u0.dim() != v0.dim()) throw PreconditionError("lift_commutator_path: u0 and v0 differ in dimension");
    if (c_path.empty()) throw PreconditionError("lift_commutator_path: empty c-path");
    const Index n = u0.dim();
    for (std::size_t k = 0; k < c_path.size(); ++k)
        if (c_path[k].dim() != n)
            throw PreconditionError("lift_commutator_path: c-path sample " + std::to_string(k) +
                                    " has the wrong dimension");
    if (n == 1) {
        for (std::size_t k = 0; k < c_path.size(); ++k)
            if (std::abs(c_path[k].matrix()(0, 0) - 1.0) > delta)
                throw PreconditionError("lift_commutator_path: in dimension 1 every commutator is 1, but c-path sample " +
                                        std::to_string(k) + " is not");
    }

    const double initial = operator_norm(gamma_commutator(u0, v0).matrix() - c_path.front().matrix());
    if (initial > delta / 10.0) {
        std::ostringstream os;
        os.precision(6);
        os << "lift_commutator_path: initial residual " << initial << " exceeds delta/10 = " << delta / 10.0;
        throw PreconditionError(os.str());
    }
    const double max_gap = config.density_fraction * delta;
    if (const auto bad = first_path_gap_violation(c_path, max_gap)) {
        std::ostringstream os;
        os.precision(6);
        os << "lift_commutator_path: c-path samples " << bad->index - 1 << " and " << bad->index << " are "
           << bad->gap << " apart, more than " << max_gap;
        throw PreconditionError(os.str());
    }

    ContinuationResult out;
    Rng rng(config.seed);
    const double target_residual = config.corrector_fraction * delta;
    const std::size_t last = c_path.size() - 1;
    auto time_of = [&](std::size_t k) { return last == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(last); };

    std::vector<Matrix> cur{u0.matrix(), v0.matrix()};
    std::vector<Matrix> prev = cur;
    out.lifted_path.push_back({0.0, u0, v0, initial});
    out.max_residual = initial;

    for (std::size_t k = 1; k <= last; ++k) {
        const Matrix& target = c_path[k].matrix();

        // Secant predictor X_k (X_{k-1}^* X_k), kept only if it beats the previous point.
        std::vector<Matrix> guess = cur;
        if (k >= 2) {
            std::vector<Matrix> secant{nearest_unitary(cur[0] * prev[0].adjoint() * cur[0]).matrix(),
                                       nearest_unitary(cur[1] * prev[1].adjoint() * cur[1]).matrix()};
            if (detail::commutator_residual(secant, target) < detail::commutator_residual(cur, target))
                guess = std::move(secant);
        }

        double r = detail::correct(guess, target, target_residual, config.corrector_budget, config.armijo,
                                   out.corrector_steps);
        int tries = 0;
        while (r > delta && tries < config.max_retries) {
            ++tries;
            ++out.retries;
            guess = cur;
            for (auto& x : guess) x = nearest_unitary(x * exp_skew(random_skew(rng, n, delta / 10.0)).matrix()).matrix();
            r = detail::correct(guess, target, target_residual, config.corrector_budget, config.armijo,
                                out.corrector_steps);
        }
        if (r > delta) {
            out.status = LiftStatus::stalled;
            out.stalled_at = time_of(k);
            return out;
        }
        prev = std::move(cur);
        cur = std::move(guess);
        out.lifted_path.push_back(
            {time_of(k), UnitaryMatrix::assume_unitary(cur[0]), UnitaryMatrix::assume_unitary(cur[1]), r});
        out.max_residual = std::max(out.max_residual, r);
    }
    out.status = LiftStatus::success;
    return out;
}

// ---------------------------------------------------------------------------
// Commuting pairs

struct JointDiagonalization {
    UnitaryMatrix basis;
    std::vector<double> u_phases;  // in (-pi, pi]
    std::vector<double> v_phases;
    double off_diagonal = 0.0;     // max(||offdiag(W* u W)||, ||offdiag(W* v W)||) in Frobenius norm
};

/// Common eigenbasis of a (nearly) commuting pair from a generic Hermitian combination of
/// their real and imaginary parts; several seeded combinations are tried and the one with the
/// smallest off-diagonal remainder kept.
inline JointDiagonalization joint_diagonalize(const UnitaryMatrix& u, const UnitaryMatrix& v, std::uint64_t seed = 0,
                                              int attempts = 5) {
    const Complex i(0.0, 1.0);
    const Matrix hu_re = 0.5 * (u.matrix() + u.matrix().adjoint());
    const Matrix hu_im = -0.5 * i * (u.matrix() - u.matrix().adjoint());
    const Matrix hv_re = 0.5 * (v.matrix() + v.matrix().adjoint());
    const Matrix hv_im = -0.5 * i * (v.matrix() - v.matrix().adjoint());
    Rng rng(seed);
    std::uniform_real_distribution<double> coef(0.5, 1.5);
    std::optional<JointDiagonalization> best;
    for (int a = 0; a < attempts; ++a) {
        const Matrix h = coef(rng) * hu_re + coef(rng) * hu_im + coef(rng) * hv_re + coef(rng) * hv_im;
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
        const Matrix& w = es.eigenvectors();
        const Matrix du = w.adjoint() * u.matrix() * w;
        const Matrix dv = w.adjoint() * v.matrix() * w;
        JointDiagonalization jd;
        jd.basis = UnitaryMatrix::assume_unitary(w);
        const double off_u = std::sqrt(std::max(0.0, du.squaredNorm() - du.diagonal().squaredNorm()));
        const double off_v = std::sqrt(std::max(0.0, dv.squaredNorm() - dv.diagonal().squaredNorm()));
        jd.off_diagonal = std::max(off_u, off_v);
        for (Index j = 0; j < du.rows(); ++j) {
            jd.u_phases.push_back(std::arg(du(j, j)));
            jd.v_phases.push_back(std::arg(dv(j, j)));
        }
        if (!best || jd.off_diagonal < best->off_diagonal) best = std::move(jd);
    }
    return *best;
}

/// Path of exactly commuting pairs W diag(e^{i s phi}) W*, s from 1 down to 0, ending at (I, I).
inline std::vector<std::pair<UnitaryMatrix, UnitaryMatrix>> contract_commuting_pair(const JointDiagonalization& jd,
                                                                                    std::size_t samples) {
    if (samples < 2) throw PreconditionError("contract_commuting_pair: need at least two samples");
    const Index n = jd.basis.dim();
    std::vector<std::pair<UnitaryMatrix, UnitaryMatrix>> out;
    for (std::size_t k = 0; k < samples; ++k) {
        const double s = 1.0 - static_cast<double>(k) / static_cast<double>(samples - 1);
        if (k + 1 == samples) {
            out.emplace_back(UnitaryMatrix::identity(n), UnitaryMatrix::identity(n));
            break;
        }
        Eigen::VectorXcd du(n), dv(n);
        for (Index j = 0; j < n; ++j) {
            du(j) = std::polar(1.0, s * jd.u_phases[static_cast<std::size_t>(j)]);
            dv(j) = std::polar(1.0, s * jd.v_phases[static_cast<std::size_t>(j)]);
        }
        out.emplace_back(UnitaryMatrix::assume_unitary(reassemble(jd.basis, du)),
                         UnitaryMatrix::assume_unitary(reassemble(jd.basis, dv)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Surface groups

struct SurfaceReduceConfig {
    std::optional<double> delta;        // per-stage lift tolerance; defaults to eps / (2 m)
    LiftConfig lift;
    FlowConfig finish = [] {
        FlowConfig c;
        c.budget = 20000;
        c.tolerance = 1e-11;
        c.stride = 50;
        return c;
    }();
    std::size_t contraction_samples = 64;
    std::uint64_t seed = 0;
};

/// Genus of a surface(m) presentation, or nullopt if `p` is not of that exact shape.
inline std::optional<int> surface_genus(const GroupPresentation& p) {
    const auto& gens = p.generators();
    if (gens.empty() || gens.size() % 2 != 0 || p.relators().size() != 1) return std::nullopt;
    const int m = static_cast<int>(gens.size() / 2);
    const auto expected = builtin_presentation(BuiltinKey::surface, m);
    if (gens != expected.generators() || p.relators() != expected.relators()) return std::nullopt;
    return m;
}

/// Deforms an eps-almost representation of the genus-m surface group to one with
/// u_2 = v_2 = ... = u_m = v_m = I, pair by pair from the last one. Stage i lifts the
/// geodesic from gamma(u_i, v_i) to I while pair i-1 compensates along
/// gamma_{i-1} gamma_i c_i(t)^{-1}; the pair that reached gamma ~ I is then flowed to an
/// exactly commuting pair and contracted to (I, I) through commuting pairs.
inline FlowTrace surface_reduce(const AlmostRep& rep, const SurfaceReduceConfig& config = {}) {
    const auto genus = surface_genus(rep.presentation());
    if (!genus) throw PreconditionError("surface_reduce: presentation is not a builtin surface(m)");
    const int m = *genus;
    if (m < 2) throw PreconditionError("surface_reduce: genus must be at least 2");
    const double eps = defect_value(rep);
    if (eps > 0.2) throw PreconditionError("surface_reduce: initial defect exceeds 0.2");
    const double delta = config.delta.value_or(std::max(eps / (2.0 * m), 1e-7));
    if (!(delta > 0.0)) throw PreconditionError("surface_reduce: delta must be positive");

    const Index n = rep.dimension();
    const WordObjective obj = WordObjective::from_presentation(rep.presentation());
    std::vector<UnitaryMatrix> gens = rep.assignment();
    FlowTrace trace;
    double t = 0.0;

    auto push = [&](double dt) {
        t += dt;
        const AlmostRep cur = rep.with_assignment(gens);
        const auto xs = matrices_of(cur);
        trace.samples.push_back({t, cur, defect_value(cur), obj.value(xs)});
    };
    auto is_identity = [&](const UnitaryMatrix& x) {
        return operator_norm(x.matrix() - Matrix::Identity(n, n)) <= 1e-12;
    };

    push(0.0);
    std::uint64_t stage_seed = config.seed;
    for (int i = m; i >= 2; --i) {
        const std::size_t ui = 2 * static_cast<std::size_t>(i - 1), vi = ui + 1;
        const std::size_t up = ui - 2, vp = ui - 1;
        if (is_identity(gens[ui]) && is_identity(gens[vi])) continue;

        const UnitaryMatrix gi = gamma_commutator(gens[ui], gens[vi]);
        const UnitaryMatrix gp = gamma_commutator(gens[up], gens[vp]);
        const double gap = 0.9 * config.lift.density_fraction * delta;
        const std::size_t samples = std::max<std::size_t>(2, su_geodesic_samples_for_gap(gi, gap));
        const auto ci = su_geodesic_to_identity(gi, samples);
        std::vector<UnitaryMatrix> cp;
        cp.reserve(samples);
        const UnitaryMatrix prod = gp * gi;
        for (const auto& c : ci) cp.push_back(prod * c.adjoint());

        LiftConfig lc = config.lift;
        lc.seed = stage_seed++;
        const auto lift_i = lift_commutator_path(gens[ui], gens[vi], ci, delta, lc);
        if (lift_i.status != LiftStatus::success) {
            std::ostringstream os;
            os << "surface_reduce: stage " << i << ": lifting pair " << i << " stalled at t = " << lift_i.stalled_at;
            throw NumericalError(os.str());
        }
        lc.seed = stage_seed++;
        const auto lift_p = lift_commutator_path(gens[up], gens[vp], cp, delta, lc);
        if (lift_p.status != LiftStatus::success) {
            std::ostringstream os;
            os << "surface_reduce: stage " << i << ": lifting pair " << i - 1 << " stalled at t = " << lift_p.stalled_at;
            throw NumericalError(os.str());
        }
        const double dt = 1.0 / static_cast<double>(samples - 1);
        for (std::size_t k = 1; k < samples; ++k) {
            gens[ui] = lift_i.lifted_path[k].u;
            gens[vi] = lift_i.lifted_path[k].v;
            gens[up] = lift_p.lifted_path[k].u;
            gens[vp] = lift_p.lifted_path[k].v;
            push(dt);
        }

        // Pair i is now close to commuting: flow it onto the commuting set.
        const AlmostRep pair(builtin_presentation(BuiltinKey::free_abelian, 2), {gens[ui], gens[vi]});
        const FlowTrace fin = flow_minimize(pair, config.finish);
        for (std::size_t k = 1; k < fin.samples.size(); ++k) {
            gens[ui] = fin.samples[k].rep.at(0);
            gens[vi] = fin.samples[k].rep.at(1);
            push(fin.samples[k].t - fin.samples[k - 1].t);
        }

        // Snap to the exactly commuting pair in the joint eigenbasis and contract its phases.
        const auto jd = joint_diagonalize(gens[ui], gens[vi], stage_seed++);
        const auto path = contract_commuting_pair(jd, config.contraction_samples);
        for (const auto& [u, v] : path) {
            gens[ui] = u;
            gens[vi] = v;
            push(1.0 / static_cast<double>(config.contraction_samples - 1));
        }
    }
    trace.status = FlowStatus::converged;
    return trace;
}

// ---------------------------------------------------------------------------
// Invariant checks along traces

struct PathInvariantReport {
    bool constant = true;
    std::optional<std::size_t> first_violation;  // sample index
    std::string violation_kind;                   // "winding" or "halfplane"
    std::optional<long> winding;                  // value seen wherever defined
    std::optional<long> halfplane;                // count seen wherever stable
    double max_sample_step = 0.0;                 // max per-generator jump between consecutive samples
    bool sampling_ok = true;                      // max_sample_step < 0.1
};

/// Checks that the winding of the selected pair is constant wherever defined and that the
/// half-plane count of the selected generator is constant wherever min |Re lambda| > 0.05.
inline PathInvariantReport check_path_invariants(const FlowTrace& trace,
                                                 const std::optional<std::pair<std::string, std::string>>& pair,
                                                 const std::optional<std::string>& involution,
                                                 double stability_floor = 0.05) {
    PathInvariantReport r;
    for (std::size_t k = 0; k < trace.samples.size(); ++k) {
        const AlmostRep& rep = trace.samples[k].rep;
        if (k > 0) {
            const AlmostRep& before = trace.samples[k - 1].rep;
            for (std::size_t g = 0; g < rep.assignment().size(); ++g)
                r.max_sample_step =
                    std::max(r.max_sample_step, operator_norm(rep.at(g).matrix() - before.at(g).matrix()));
        }
        if (!r.constant) continue;
        if (pair) {
            if (const auto w = try_winding(rep.at(pair->first), rep.at(pair->second))) {
                if (!r.winding)
                    r.winding = *w;
                else if (*r.winding != *w) {
                    r.constant = false;
                    r.first_violation = k;
                    r.violation_kind = "winding";
                    continue;
                }
            }
        }
        if (involution) {
            const auto h = halfplane_count(rep.at(*involution));
            if (h.min_abs_real > stability_floor) {
                if (!r.halfplane)
                    r.halfplane = h.count;
                else if (*r.halfplane != h.count) {
                    r.constant = false;
                    r.first_violation = k;
                    r.violation_kind = "halfplane";
                }
            }
        }
    }
    r.sampling_ok = r.max_sample_step < 0.1;
    return r;
}

}  // namespace aga
