#pragma once

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>

#include "gradstate/fem.hpp"

namespace gradstate {

using LinearOperator = std::function<Vector(const Vector&)>;

/// Factorization handle of a sparse SPD matrix. The default backend is a
/// direct Cholesky; an iterative conjugate-gradient backend is available
/// behind the same contract for matrices whose factorization is too costly.
class SpdFactor {
  public:
    enum class Method { Cholesky, ConjugateGradient };

    explicit SpdFactor(const SpMat& A, Method method = Method::Cholesky,
                       double cg_tol = 1e-13);

    Vector solve(const Vector& b) const;
    Eigen::Index rows() const { return n_; }

  private:
    Eigen::Index n_ = 0;
    Method method_;
    std::shared_ptr<Eigen::SimplicialLLT<SpMat>> llt_;
    std::shared_ptr<Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>> cg_;
    std::shared_ptr<SpMat> A_;  // kept alive for the iterative backend
};

SpdFactor spd_factorize(const SpMat& A,
                        SpdFactor::Method method = SpdFactor::Method::Cholesky);

/// The 2x2 block operator [[M, -alpha K], [K', M]] acting on stacked [p; y].
struct SaddleOperator {
    const SpMat* M = nullptr;
    const SpMat* K = nullptr;
    double alpha = 1.0;

    Eigen::Index rows() const { return 2 * M->rows(); }
    Vector apply(const Vector& x) const;
    LinearOperator as_operator() const {
        return [this](const Vector& x) { return apply(x); };
    }
};

/// Block preconditioner [[M, -alpha K], [K', M + 2 sqrt(alpha) K]], applied
/// through two solves with Q = M + sqrt(alpha) K.
class SaddlePreconditioner {
  public:
    SaddlePreconditioner(const SpMat& M, const SpMat& K, double alpha);

    /// Solves B [v1; v2] = [r1; r2].
    std::pair<Vector, Vector> apply(const Vector& r1, const Vector& r2) const;
    Vector apply_stacked(const Vector& r) const;
    LinearOperator as_operator() const {
        return [this](const Vector& r) { return apply_stacked(r); };
    }

    const SpdFactor& factor_Q() const { return *factor_Q_; }
    double alpha() const { return alpha_; }

  private:
    SpMat M_;
    double alpha_;
    std::shared_ptr<SpdFactor> factor_Q_;
};

std::pair<Vector, Vector> apply_preconditioner(const SaddlePreconditioner& P,
                                               const Vector& r1, const Vector& r2);

struct GmresResult {
    Vector x;
    int iters = 0;
    double relres = 0.0;
    bool converged = false;
    bool breakdown = false;
};

/// Right-preconditioned restarted GMRES with reorthogonalized modified
/// Gram-Schmidt. The residual reported is that of the unpreconditioned
/// system. Zero starting guess; an Arnoldi breakdown returns the current
/// iterate flagged converged.
GmresResult gmres(const LinearOperator& apply_A, const LinearOperator& apply_Pinv,
                  const Vector& b, double tol, int max_iter, int restart = 50);

/// Densifies P^-1 A column by column and returns the extreme real parts of
/// its eigenvalues. Test utility; guarded to dim <= 600.
std::pair<double, double> spectrum_check(const LinearOperator& apply_A,
                                         const SaddlePreconditioner& P, int dim);

}  // namespace gradstate
