#include "gradstate/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace gradstate {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

using Triplet = Eigen::Triplet<double>;

void append_block(std::vector<Triplet>& out, const SpMat& A, int row0, int col0,
                  double scale, bool transpose = false) {
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            const int r = transpose ? static_cast<int>(it.col()) : static_cast<int>(it.row());
            const int c = transpose ? static_cast<int>(it.row()) : static_cast<int>(it.col());
            out.emplace_back(row0 + r, col0 + c, scale * it.value());
        }
    }
}

void append_identity(std::vector<Triplet>& out, int n, int row0, int col0,
                     double scale) {
    for (int i = 0; i < n; ++i) out.emplace_back(row0 + i, col0 + i, scale);
}

struct ProblemData {
    Vector yd, f;
    EllipsoidSet C;
    BoxSet S;
};

ProblemData make_data(const ProblemSpec& problem, const FemSystem& sys) {
    return {interpolate_on_system(problem.y_d, sys),
            interpolate_on_system(problem.f, sys),
            EllipsoidSet(sys.D, problem.delta), problem.box};
}

}  // namespace

Vector interpolate_on_system(const ScalarField& func, const FemSystem& sys) {
    Vector v(sys.dofs());
    for (int i = 0; i < sys.dofs(); ++i) {
        const double value = func(sys.interior_coords(i, 0), sys.interior_coords(i, 1));
        if (!std::isfinite(value)) {
            throw std::runtime_error("interpolate_on_system: non-finite value");
        }
        v[i] = value;
    }
    return v;
}

PSubproblemResult solve_p_subproblem(const FemSystem& sys, const Vector& lambda_k,
                                     const Vector& mu_k, double alpha,
                                     const Vector& f_vec, const Vector& yd_vec,
                                     double tol, const SaddlePreconditioner& P,
                                     int restart, int max_iter) {
    const int n = sys.dofs();
    Vector rhs(2 * n);
    rhs.head(n) = mu_k - alpha * (sys.M * f_vec);
    rhs.tail(n) = sys.M * yd_vec - lambda_k;

    SaddleOperator A{&sys.M, &sys.K, alpha};
    const auto r = gmres(A.as_operator(), P.as_operator(), rhs, tol, max_iter, restart);

    PSubproblemResult out;
    out.p_tilde = r.x.head(n);
    out.y_tilde = r.x.tail(n);
    out.relres = r.relres;
    out.iters = r.iters;
    out.converged = r.converged;
    return out;
}

Vector update_lambda(const FemSystem& sys, const Vector& p_tilde,
                     const Vector& lambda_k, const EllipsoidSet& C,
                     const SpdFactor& M_factor, const Vector& yd_vec,
                     double projection_tol, Vector* z_hat, int* proj_iters,
                     double* certificate) {
    const double sigma = sys.sigma;
    const Vector rhs = (sys.M * yd_vec) / sigma + sys.M * lambda_k -
                       (sys.K.transpose() * p_tilde + lambda_k) / sigma;
    const Vector d = M_factor.solve(rhs);
    if (certificate) *certificate = (sys.M * d - rhs).norm();

    const auto proj = project_ellipsoid(sigma * d, C, projection_tol);
    if (z_hat) *z_hat = proj.x;
    if (proj_iters) *proj_iters = proj.newton_iters;
    return d - proj.x / sigma;
}

Vector update_mu(const FemSystem& sys, const Vector& p_tilde, const Vector& mu_k,
                 const BoxSet& S, double alpha, const SpdFactor& M_factor,
                 Vector* u_hat, double* certificate) {
    if (!(alpha > 0.0)) throw std::invalid_argument("update_mu: alpha must be positive");
    const Vector s = M_factor.solve(mu_k);
    if (certificate) *certificate = (sys.M * s - mu_k).norm();

    const Vector q = p_tilde + sys.c_n * mu_k.cwiseQuotient(sys.W_diag) - s;
    const Vector proj = project_box(q / alpha, S);
    if (u_hat) *u_hat = proj;
    return sys.W_diag.cwiseProduct(q - alpha * proj) / sys.c_n;
}

Vector recover_control(const FemSystem& sys, const Vector& p, const Vector& mu,
                       double alpha, const SpdFactor& M_factor) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("recover_control: alpha must be positive");
    }
    (void)sys;
    return (p - M_factor.solve(mu)) / alpha;
}

double compute_dual_objective(const FemSystem& sys, const Vector& p,
                              const Vector& lambda, const Vector& mu, double alpha,
                              const Vector& yd_vec, const Vector& f_vec,
                              const EllipsoidSet& C, const BoxSet& S,
                              const SpdFactor& M_factor) {
    const Vector Myd = sys.M * yd_vec;
    const Vector v1 = sys.K.transpose() * p + lambda - Myd;
    const Vector v2 = sys.M * p - mu;
    double F = 0.5 * v1.dot(M_factor.solve(v1));
    F += v2.dot(M_factor.solve(v2)) / (2.0 * alpha);
    F += support_function_ellipsoid(lambda, C);
    F += support_function_box(mu, S);
    F += (sys.M * f_vec).dot(p);
    F -= 0.5 * yd_vec.dot(Myd);
    return F;
}

EtaResidual residual_eta_d(const FemSystem& sys, const Vector& y, const Vector& u,
                           const Vector& p, const Vector& lambda, const Vector& mu,
                           const Vector& yd_vec, const Vector& f_vec,
                           const EllipsoidSet& C, const BoxSet& S,
                           double projection_tol) {
    const Vector Myd = sys.M * yd_vec;
    const Vector Mf = sys.M * f_vec;
    EtaResidual out;
    out.parts.resize(4);
    out.parts[0] = (sys.M * (y - yd_vec) + sys.K.transpose() * p + lambda).norm() /
                   (1.0 + Myd.norm());
    out.parts[1] = (y - project_ellipsoid(y + lambda, C, projection_tol).x).norm() /
                   (1.0 + y.norm());
    out.parts[2] = (u - project_box(u + mu, S)).norm() / (1.0 + u.norm());
    out.parts[3] = (sys.K * y - sys.M * u - Mf).norm() / (1.0 + Mf.norm());
    out.value = *std::max_element(out.parts.begin(), out.parts.end());
    return out;
}

EtaResidual residual_eta_c(const FemSystem& sys, const Vector& y, const Vector& u,
                           const Vector& p, const Vector& z, const Vector& w,
                           const Vector& lambda, const Vector& mu, double alpha,
                           const Vector& yd_vec, const Vector& f_vec,
                           const EllipsoidSet& C, const BoxSet& S,
                           double projection_tol) {
    const Vector Myd = sys.M * yd_vec;
    const Vector Mf = sys.M * f_vec;
    const Vector Mu = sys.M * u;
    EtaResidual out;
    out.parts.resize(7);
    out.parts[0] = (sys.M * (y - yd_vec) + sys.K.transpose() * p + lambda).norm() /
                   (1.0 + Myd.norm());
    out.parts[1] = (alpha * Mu - sys.M.transpose() * p + mu).norm() / (1.0 + Mu.norm());
    out.parts[2] = (sys.K * y - Mu - Mf).norm() / (1.0 + Mf.norm());
    out.parts[3] = (y - z).norm() / (1.0 + y.norm());
    out.parts[4] = (u - w).norm() / (1.0 + u.norm());
    out.parts[5] = (z - project_ellipsoid(z + lambda, C, projection_tol).x).norm() /
                   (1.0 + z.norm());
    out.parts[6] = (w - project_box(w + mu, S)).norm() / (1.0 + w.norm());
    out.value = *std::max_element(out.parts.begin(), out.parts.end());
    return out;
}

EtaResidual residual_eta_h(const FemSystem& sys, const Vector& y, const Vector& u,
                           const Vector& p, const Vector& z, const Vector& w,
                           const Vector& lambda, const Vector& mu, double alpha,
                           const Vector& yd_vec, const Vector& f_vec,
                           const EllipsoidSet& C, const BoxSet& S,
                           double projection_tol) {
    const Vector Myd = sys.M * yd_vec;
    const Vector Mf = sys.M * f_vec;
    const Vector Mu = sys.M * u;
    EtaResidual out;
    out.parts.resize(7);
    out.parts[0] = (sys.M * (y - yd_vec) + sys.K.transpose() * p + sys.M * lambda).norm() /
                   (1.0 + Myd.norm());
    out.parts[1] =
        (alpha * Mu - sys.M.transpose() * p + sys.M * mu).norm() / (1.0 + Mu.norm());
    out.parts[2] = (sys.K * y - Mu - Mf).norm() / (1.0 + Mf.norm());
    out.parts[3] = (sys.M * (y - z)).norm() / (1.0 + y.norm());
    out.parts[4] = (sys.M * (u - w)).norm() / (1.0 + u.norm());
    out.parts[5] =
        (z - project_ellipsoid(z + sys.M * lambda, C, projection_tol).x).norm() /
        (1.0 + z.norm());
    out.parts[6] =
        (w - project_box(w + sys.M * mu, S)).norm() / (1.0 + w.norm());
    out.value = *std::max_element(out.parts.begin(), out.parts.end());
    return out;
}

SolverReport fe_dabcd(const ProblemSpec& problem, const FemSystem& sys,
                      const SolverConfig& config) {
    const auto t0 = Clock::now();
    const int n = sys.dofs();
    const double alpha = config.alpha;
    const ProblemData data = make_data(problem, sys);

    const SpdFactor M_factor(sys.M);
    const SaddlePreconditioner P(sys.M, sys.K, alpha);

    SolverReport rep;
    rep.algorithm = "dabcd";
    rep.alpha = alpha;

    DualIterate it;
    it.p = Vector::Zero(n);
    it.lambda = Vector::Zero(n);
    it.mu = Vector::Zero(n);
    it.p_tilde_prev = Vector::Zero(n);
    it.lambda_tilde_prev = Vector::Zero(n);
    it.mu_tilde_prev = Vector::Zero(n);
    it.t = 1.0;

    Vector z_hat = Vector::Zero(n), u_hat = Vector::Zero(n);
    Vector p_tilde, lambda_tilde, mu_tilde;
    Vector u_eval = Vector::Zero(n);

    for (int k = 1; k <= config.max_iter; ++k) {
        const double eps_k = inexact_eps(k);

        Vector rhs_head = it.mu - alpha * (sys.M * data.f);
        Vector rhs_tail = sys.M * data.yd - it.lambda;
        const double rhs_norm =
            std::sqrt(rhs_head.squaredNorm() + rhs_tail.squaredNorm());
        const double gmres_tol =
            std::max(eps_k / (1.0 + rhs_norm), config.gmres_tol_floor);

        const auto ps =
            solve_p_subproblem(sys, it.lambda, it.mu, alpha, data.f, data.yd,
                               gmres_tol, P, config.gmres_restart,
                               config.gmres_max_iter);
        p_tilde = ps.p_tilde;
        it.y_aux = ps.y_tilde;
        rep.inner_gmres_iters.push_back(ps.iters);
        rep.delta_p.push_back(ps.relres * rhs_norm);

        // control consistent with the saddle solve (same multiplier block)
        u_eval = recover_control(sys, p_tilde, it.mu, alpha, M_factor);

        int proj_iters = 0;
        double cert_lambda = 0.0, cert_mu = 0.0;
        lambda_tilde = update_lambda(sys, p_tilde, it.lambda, data.C, M_factor,
                                     data.yd, config.projection_tol, &z_hat,
                                     &proj_iters, &cert_lambda);
        rep.newton_iters.push_back(proj_iters);
        mu_tilde = update_mu(sys, p_tilde, it.mu, data.S, alpha, M_factor, &u_hat,
                             &cert_mu);
        rep.delta_lambda.push_back(cert_lambda);
        rep.delta_mu.push_back(cert_mu);

        const auto eta = residual_eta_d(sys, ps.y_tilde, u_eval, p_tilde,
                                        lambda_tilde, mu_tilde, data.yd, data.f,
                                        data.C, data.S, config.projection_tol);
        rep.residual_history.push_back(eta.value);
        if (config.record_objective) {
            rep.objective_history.push_back(
                compute_dual_objective(sys, p_tilde, lambda_tilde, mu_tilde, alpha,
                                       data.yd, data.f, data.C, data.S, M_factor));
        }
        rep.iterations = k;
        if (eta.value < config.tol) {
            rep.converged = true;
            break;
        }

        const double t_next = momentum_next_t(it.t);
        const double beta = momentum_beta(it.t, t_next);
        it.p = p_tilde + beta * (p_tilde - it.p_tilde_prev);
        it.lambda = lambda_tilde + beta * (lambda_tilde - it.lambda_tilde_prev);
        it.mu = mu_tilde + beta * (mu_tilde - it.mu_tilde_prev);
        it.p_tilde_prev = p_tilde;
        it.lambda_tilde_prev = lambda_tilde;
        it.mu_tilde_prev = mu_tilde;
        it.t = t_next;
    }

    rep.final_y = z_hat;
    rep.final_u = u_hat;
    rep.final_p = p_tilde;
    rep.final_lambda = lambda_tilde;
    rep.final_mu = mu_tilde;
    rep.eval_y = it.y_aux;
    rep.eval_u = u_eval;
    rep.wall_time_seconds = seconds_since(t0);
    return rep;
}

SolverReport admm(const ProblemSpec& problem, const FemSystem& sys,
                  const SolverConfig& config) {
    if (!(config.admm_sigma > 0.0)) {
        throw std::invalid_argument("admm: penalty sigma must be positive");
    }
    const auto t0 = Clock::now();
    const int n = sys.dofs();
    const double alpha = config.alpha;
    const double sigma = config.admm_sigma;
    const ProblemData data = make_data(problem, sys);

    // [[M + sigma I, 0, K'], [0, alpha M + sigma I, -M], [K, -M, 0]]
    std::vector<Triplet> trips;
    append_block(trips, sys.M, 0, 0, 1.0);
    append_identity(trips, n, 0, 0, sigma);
    append_block(trips, sys.K, 0, 2 * n, 1.0, /*transpose=*/true);
    append_block(trips, sys.M, n, n, alpha);
    append_identity(trips, n, n, n, sigma);
    append_block(trips, sys.M, n, 2 * n, -1.0);
    append_block(trips, sys.K, 2 * n, 0, 1.0);
    append_block(trips, sys.M, 2 * n, n, -1.0);
    SpMat block(3 * n, 3 * n);
    block.setFromTriplets(trips.begin(), trips.end());
    block.makeCompressed();
    Eigen::SparseLU<SpMat> lu(block);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("admm: block system factorization failed");
    }

    SolverReport rep;
    rep.algorithm = "admm";
    rep.alpha = alpha;

    PrimalIterate st;
    st.z = Vector::Zero(n);
    st.w = Vector::Zero(n);
    st.lambda = Vector::Zero(n);
    st.mu = Vector::Zero(n);

    const Vector Myd = sys.M * data.yd;
    const Vector Mf = sys.M * data.f;

    for (int k = 1; k <= config.max_iter; ++k) {
        Vector rhs(3 * n);
        rhs.head(n) = Myd - st.lambda + sigma * st.z;
        rhs.segment(n, n) = sigma * st.w - st.mu;
        rhs.tail(n) = Mf;
        const Vector sol = lu.solve(rhs);
        st.y = sol.head(n);
        st.u = sol.segment(n, n);
        st.p = sol.tail(n);

        const auto proj = project_ellipsoid(st.y + st.lambda / sigma, data.C,
                                            config.projection_tol);
        st.z = proj.x;
        rep.newton_iters.push_back(proj.newton_iters);
        st.w = project_box(st.u + st.mu / sigma, data.S);

        st.lambda += sigma * (st.y - st.z);
        st.mu += sigma * (st.u - st.w);

        const auto eta =
            residual_eta_c(sys, st.y, st.u, st.p, st.z, st.w, st.lambda, st.mu,
                           alpha, data.yd, data.f, data.C, data.S,
                           config.projection_tol);
        rep.residual_history.push_back(eta.value);
        if (config.record_objective) {
            const Vector dy = st.y - data.yd;
            rep.objective_history.push_back(0.5 * dy.dot(sys.M * dy) +
                                            0.5 * alpha * st.u.dot(sys.M * st.u));
        }
        rep.iterations = k;
        if (eta.value < config.tol) {
            rep.converged = true;
            break;
        }
    }

    rep.final_y = st.z;
    rep.final_u = st.w;
    rep.final_p = st.p;
    rep.final_lambda = st.lambda;
    rep.final_mu = st.mu;
    rep.eval_y = st.y;
    rep.eval_u = st.u;
    rep.wall_time_seconds = seconds_since(t0);
    return rep;
}

SolverReport ihadmm(const ProblemSpec& problem, const FemSystem& sys,
                    const SolverConfig& config) {
    if (!(config.admm_sigma > 0.0)) {
        throw std::invalid_argument("ihadmm: penalty sigma must be positive");
    }
    const auto t0 = Clock::now();
    const int n = sys.dofs();
    const double alpha = config.alpha;
    const double sigma = config.admm_sigma;
    const ProblemData data = make_data(problem, sys);

    // [[(1 + sigma) M, K'], [K, -1/(alpha + sigma) M]]
    std::vector<Triplet> trips;
    append_block(trips, sys.M, 0, 0, 1.0 + sigma);
    append_block(trips, sys.K, 0, n, 1.0, /*transpose=*/true);
    append_block(trips, sys.K, n, 0, 1.0);
    append_block(trips, sys.M, n, n, -1.0 / (alpha + sigma));
    SpMat block(2 * n, 2 * n);
    block.setFromTriplets(trips.begin(), trips.end());
    block.makeCompressed();
    Eigen::SparseLU<SpMat> lu(block);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("ihadmm: block system factorization failed");
    }

    SolverReport rep;
    rep.algorithm = "ihadmm";
    rep.alpha = alpha;

    PrimalIterate st;
    st.z = Vector::Zero(n);
    st.w = Vector::Zero(n);
    st.lambda = Vector::Zero(n);
    st.mu = Vector::Zero(n);

    const Vector Mf = sys.M * data.f;

    for (int k = 1; k <= config.max_iter; ++k) {
        Vector rhs(2 * n);
        rhs.head(n) = sys.M * (data.yd - st.lambda + sigma * st.z);
        rhs.tail(n) = sys.M * (sigma * st.w - st.mu) / (alpha + sigma) + Mf;
        const Vector sol = lu.solve(rhs);
        st.y = sol.head(n);
        st.p = sol.tail(n);
        st.u = (st.p + sigma * st.w - st.mu) / (sigma + alpha);

        const Vector Wl = (sys.M * st.lambda).cwiseQuotient(sys.W_diag);
        const Vector Wm = (sys.M * st.mu).cwiseQuotient(sys.W_diag);
        const auto proj =
            project_ellipsoid(st.y + Wl / sigma, data.C, config.projection_tol);
        st.z = proj.x;
        rep.newton_iters.push_back(proj.newton_iters);
        st.w = project_box(st.u + Wm / sigma, data.S);

        st.lambda += sigma * (st.y - st.z);
        st.mu += sigma * (st.u - st.w);

        const auto eta =
            residual_eta_h(sys, st.y, st.u, st.p, st.z, st.w, st.lambda, st.mu,
                           alpha, data.yd, data.f, data.C, data.S,
                           config.projection_tol);
        rep.residual_history.push_back(eta.value);
        if (config.record_objective) {
            const Vector dy = st.y - data.yd;
            rep.objective_history.push_back(0.5 * dy.dot(sys.M * dy) +
                                            0.5 * alpha * st.u.dot(sys.M * st.u));
        }
        rep.iterations = k;
        if (eta.value < config.tol) {
            rep.converged = true;
            break;
        }
    }

    rep.final_y = st.z;
    rep.final_u = st.w;
    rep.final_p = st.p;
    rep.final_lambda = st.lambda;
    rep.final_mu = st.mu;
    rep.eval_y = st.y;
    rep.eval_u = st.u;
    rep.wall_time_seconds = seconds_since(t0);
    return rep;
}

}  // namespace gradstate
