#include "gradstate/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace gradstate {

SpdFactor::SpdFactor(const SpMat& A, Method method, double cg_tol)
    : n_(A.rows()), method_(method) {
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("SpdFactor: matrix must be square");
    }
    if (method_ == Method::Cholesky) {
        llt_ = std::make_shared<Eigen::SimplicialLLT<SpMat>>();
        llt_->compute(A);
        if (llt_->info() != Eigen::Success) {
            throw std::runtime_error(
                "SpdFactor: Cholesky failed, matrix is not positive definite");
        }
    } else {
        A_ = std::make_shared<SpMat>(A);
        cg_ = std::make_shared<
            Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>>();
        cg_->setTolerance(cg_tol);
        cg_->setMaxIterations(10 * A.rows() + 100);
        cg_->compute(*A_);
    }
}

Vector SpdFactor::solve(const Vector& b) const {
    if (b.size() != n_) {
        throw std::invalid_argument("SpdFactor::solve: dimension mismatch");
    }
    if (method_ == Method::Cholesky) return llt_->solve(b);
    Vector x = cg_->solve(b);
    if (cg_->info() != Eigen::Success && cg_->error() > 1e-8) {
        throw std::runtime_error("SpdFactor::solve: conjugate gradient stagnated");
    }
    return x;
}

SpdFactor spd_factorize(const SpMat& A, SpdFactor::Method method) {
    return SpdFactor(A, method);
}

Vector SaddleOperator::apply(const Vector& x) const {
    const Eigen::Index n = M->rows();
    if (x.size() != 2 * n) {
        throw std::invalid_argument("SaddleOperator: dimension mismatch");
    }
    const auto p = x.head(n);
    const auto y = x.tail(n);
    Vector out(2 * n);
    out.head(n) = (*M) * p - alpha * ((*K) * y);
    out.tail(n) = K->transpose() * p + (*M) * y;
    return out;
}

SaddlePreconditioner::SaddlePreconditioner(const SpMat& M, const SpMat& K,
                                           double alpha)
    : M_(M), alpha_(alpha) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("SaddlePreconditioner: alpha must be positive");
    }
    SpMat Q = M + std::sqrt(alpha) * K;
    factor_Q_ = std::make_shared<SpdFactor>(Q);
}

std::pair<Vector, Vector> SaddlePreconditioner::apply(const Vector& r1,
                                                      const Vector& r2) const {
    const double sqrt_alpha = std::sqrt(alpha_);
    const Vector g = factor_Q_->solve(r1 + sqrt_alpha * r2);
    const Vector h = factor_Q_->solve(r1 - M_ * g);
    return {g + h, -std::sqrt(1.0 / alpha_) * h};
}

Vector SaddlePreconditioner::apply_stacked(const Vector& r) const {
    const Eigen::Index n = M_.rows();
    if (r.size() != 2 * n) {
        throw std::invalid_argument("SaddlePreconditioner: dimension mismatch");
    }
    auto [v1, v2] = apply(r.head(n), r.tail(n));
    Vector out(2 * n);
    out.head(n) = v1;
    out.tail(n) = v2;
    return out;
}

std::pair<Vector, Vector> apply_preconditioner(const SaddlePreconditioner& P,
                                               const Vector& r1, const Vector& r2) {
    return P.apply(r1, r2);
}

GmresResult gmres(const LinearOperator& apply_A, const LinearOperator& apply_Pinv,
                  const Vector& b, double tol, int max_iter, int restart) {
    if (!(tol > 0.0)) throw std::invalid_argument("gmres: tol must be positive");
    const Eigen::Index n = b.size();
    GmresResult res;
    res.x = Vector::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }

    const int m = std::max(1, restart);
    Eigen::MatrixXd V(n, m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs(m), sn(m), g(m + 1);

    int total_iters = 0;
    double relres = 1.0;
    while (total_iters < max_iter) {
        Vector r = b - apply_A(res.x);
        const double beta = r.norm();
        relres = beta / bnorm;
        if (relres <= tol) {
            res.converged = true;
            break;
        }
        V.col(0) = r / beta;
        g.setZero();
        g[0] = beta;

        int j = 0;
        bool broke_down = false;
        for (; j < m && total_iters < max_iter; ++j, ++total_iters) {
            Vector w = apply_A(apply_Pinv(V.col(j)));
            // Modified Gram-Schmidt with one reorthogonalization pass.
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const double hij = V.col(i).dot(w);
                    H(i, j) += hij;
                    w -= hij * V.col(i);
                }
            }
            H(j + 1, j) = w.norm();
            if (H(j + 1, j) <= 1e-14 * bnorm) {
                broke_down = true;
            } else {
                V.col(j + 1) = w / H(j + 1, j);
            }
            // Apply accumulated Givens rotations to the new column.
            for (int i = 0; i < j; ++i) {
                const double tmp = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
                H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
                H(i, j) = tmp;
            }
            const double denom = std::hypot(H(j, j), H(j + 1, j));
            if (denom == 0.0) {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = H(j, j) / denom;
                sn[j] = H(j + 1, j) / denom;
            }
            H(j, j) = denom;
            H(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            relres = std::abs(g[j + 1]) / bnorm;
            if (relres <= tol || broke_down) {
                ++j;
                ++total_iters;
                break;
            }
        }
        if (j > 0) {
            const Eigen::VectorXd y =
                H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
            res.x += apply_Pinv(V.leftCols(j) * y);
        }
        H.setZero();
        if (broke_down) {
            res.converged = true;
            res.breakdown = true;
            relres = (b - apply_A(res.x)).norm() / bnorm;
            break;
        }
        if (relres <= tol) {
            res.converged = true;
            relres = (b - apply_A(res.x)).norm() / bnorm;
            break;
        }
    }
    res.iters = total_iters;
    res.relres = relres;
    return res;
}

std::pair<double, double> spectrum_check(const LinearOperator& apply_A,
                                         const SaddlePreconditioner& P, int dim) {
    if (dim > 600) {
        throw std::invalid_argument("spectrum_check: dense oracle guarded to dim <= 600");
    }
    Eigen::MatrixXd BA(dim, dim);
    Vector e = Vector::Zero(dim);
    for (int i = 0; i < dim; ++i) {
        e[i] = 1.0;
        BA.col(i) = P.apply_stacked(apply_A(e));
        e[i] = 0.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(BA, false);
    const auto re = es.eigenvalues().real();
    return {re.minCoeff(), re.maxCoeff()};
}

}  // namespace gradstate
