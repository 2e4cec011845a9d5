#pragma once

// Sum-of-squares word objectives on products of unitary groups and the
// retracted Armijo step shared by the flow and the path-lifting corrector.

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "aga/almostrep.hpp"
#include "aga/numerics.hpp"

namespace aga {

/// One term ||w(X) - T||_F^2 with w a word in generator indices and T a fixed target (identity if absent).
struct WordTerm {
    std::vector<std::pair<std::size_t, int>> letters;  // (generator index, +1/-1)
    std::optional<Matrix> target;
};

/// F(X_1..X_k) = sum over terms of ||w(X) - T||_F^2, with its Riemannian gradient
/// in the left trivialization: the skew-Hermitian Omega_i such that the derivative along
/// X_i -> X_i exp(s S_i) is sum_i Re tr(Omega_i^* S_i).
class WordObjective {
public:
    WordObjective() = default;
    WordObjective(std::size_t generator_count, std::vector<WordTerm> terms)
        : generator_count_(generator_count), terms_(std::move(terms)) {}

    static WordObjective from_presentation(const GroupPresentation& p) {
        std::vector<WordTerm> terms;
        for (const auto& r : p.relators()) {
            WordTerm t;
            for (const Letter& l : r) t.letters.emplace_back(*p.index_of(l.generator), l.exponent);
            terms.push_back(std::move(t));
        }
        return WordObjective(p.generators().size(), std::move(terms));
    }

    std::size_t generator_count() const noexcept { return generator_count_; }
    std::size_t term_count() const noexcept { return terms_.size(); }
    const std::vector<WordTerm>& terms() const noexcept { return terms_; }

    Matrix evaluate(const WordTerm& term, const std::vector<Matrix>& xs) const {
        const Index n = xs.front().rows();
        Matrix acc = Matrix::Identity(n, n);
        for (const auto& [g, e] : term.letters) acc = (e > 0) ? Matrix(acc * xs[g]) : Matrix(acc * xs[g].adjoint());
        return acc;
    }

    Matrix residual(const WordTerm& term, const std::vector<Matrix>& xs) const {
        Matrix r = evaluate(term, xs);
        if (term.target)
            r -= *term.target;
        else
            r -= Matrix::Identity(r.rows(), r.cols());
        return r;
    }

    double value(const std::vector<Matrix>& xs) const {
        double f = 0.0;
        for (const auto& t : terms_) f += residual(t, xs).squaredNorm();
        return f;
    }

    /// Largest operator-norm residual over the terms.
    double max_residual(const std::vector<Matrix>& xs) const {
        double d = 0.0;
        for (const auto& t : terms_) d = std::max(d, operator_norm(residual(t, xs)));
        return d;
    }

    /// Returns F and fills `omega` with the Riemannian gradient.
    double value_and_gradient(const std::vector<Matrix>& xs, std::vector<Matrix>& omega) const {
        const Index n = xs.front().rows();
        std::vector<Matrix> euclid(generator_count_, Matrix::Zero(n, n));
        double f = 0.0;
        for (const auto& term : terms_) {
            const std::size_t len = term.letters.size();
            std::vector<Matrix> prefix(len + 1), suffix(len + 1);
            prefix[0] = Matrix::Identity(n, n);
            for (std::size_t k = 0; k < len; ++k) {
                const auto& [g, e] = term.letters[k];
                prefix[k + 1] = (e > 0) ? Matrix(prefix[k] * xs[g]) : Matrix(prefix[k] * xs[g].adjoint());
            }
            suffix[len] = Matrix::Identity(n, n);
            for (std::size_t k = len; k-- > 0;) {
                const auto& [g, e] = term.letters[k];
                suffix[k] = (e > 0) ? Matrix(xs[g] * suffix[k + 1]) : Matrix(xs[g].adjoint() * suffix[k + 1]);
            }
            Matrix d = prefix[len];
            if (term.target)
                d -= *term.target;
            else
                d -= Matrix::Identity(n, n);
            f += d.squaredNorm();
            // dF = 2 Re tr(D^* P dL S); letter k has prefix P = prefix[k], suffix S = suffix[k+1].
            for (std::size_t k = 0; k < len; ++k) {
                const auto& [g, e] = term.letters[k];
                const Matrix& p = prefix[k];
                const Matrix& s = suffix[k + 1];
                if (e > 0)
                    euclid[g].noalias() += 2.0 * (p.adjoint() * d * s.adjoint());
                else
                    euclid[g].noalias() += 2.0 * (s * d.adjoint() * p);
            }
        }
        omega.resize(generator_count_);
        for (std::size_t i = 0; i < generator_count_; ++i) omega[i] = skew_part(xs[i].adjoint() * euclid[i]);
        return f;
    }

private:
    std::size_t generator_count_ = 0;
    std::vector<WordTerm> terms_;
};

inline std::vector<Matrix> matrices_of(const AlmostRep& rep) {
    std::vector<Matrix> xs;
    xs.reserve(rep.assignment().size());
    for (const auto& u : rep.assignment()) xs.push_back(u.matrix());
    return xs;
}

inline std::vector<UnitaryMatrix> unitaries_of(const std::vector<Matrix>& xs) {
    std::vector<UnitaryMatrix> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(UnitaryMatrix::assume_unitary(x));
    return out;
}

/// F(sigma) = sum_j ||r_j(sigma) - I||_F^2.
inline double defect_objective(const AlmostRep& rep) {
    return WordObjective::from_presentation(rep.presentation()).value(matrices_of(rep));
}

/// Riemannian gradient of defect_objective, one skew-Hermitian matrix per generator.
inline std::vector<Matrix> defect_gradient(const AlmostRep& rep) {
    std::vector<Matrix> omega;
    WordObjective::from_presentation(rep.presentation()).value_and_gradient(matrices_of(rep), omega);
    return omega;
}

struct ArmijoParams {
    double initial_step = 1.0;
    double shrink = 0.5;
    double slope = 1e-4;
    int max_halvings = 60;
};

struct ArmijoResult {
    bool accepted = false;
    double step = 0.0;
    double objective = 0.0;
    double gradient_norm_sq = 0.0;
};

/// X_i <- polar(X_i (I - step Omega_i)) with backtracking until
/// F(new) <= F - slope * step * ||Omega||^2. On failure `xs` is left untouched.
inline ArmijoResult armijo_step(const WordObjective& obj, std::vector<Matrix>& xs, double f0,
                                const ArmijoParams& params = {}) {
    std::vector<Matrix> omega;
    obj.value_and_gradient(xs, omega);
    ArmijoResult out;
    out.objective = f0;
    for (const auto& o : omega) out.gradient_norm_sq += o.squaredNorm();
    if (!(out.gradient_norm_sq > 0.0)) return out;

    const Index n = xs.front().rows();
    const Matrix id = Matrix::Identity(n, n);
    std::vector<Matrix> trial(xs.size());
    double step = params.initial_step;
    for (int h = 0; h <= params.max_halvings; ++h, step *= params.shrink) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (omega[i].squaredNorm() == 0.0) {
                trial[i] = xs[i];
                continue;
            }
            trial[i] = nearest_unitary(xs[i] * (id - step * omega[i])).matrix();
        }
        const double f1 = obj.value(trial);
        if (std::isfinite(f1) && f1 <= f0 - params.slope * step * out.gradient_norm_sq) {
            xs.swap(trial);
            out.accepted = true;
            out.step = step;
            out.objective = f1;
            return out;
        }
    }
    return out;
}

}  // namespace aga
