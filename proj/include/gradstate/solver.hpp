#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gradstate/fem.hpp"
#include "gradstate/problems.hpp"
#include "gradstate/projection.hpp"

namespace gradstate {

struct SolverConfig {
    double tol = 1e-4;       // outer residual target
    int max_iter = 100;      // outer iteration cap k_m
    double alpha = 1.0;
    double admm_sigma = 0.1; // penalty for the ADMM-type baselines
    int gmres_restart = 50;
    int gmres_max_iter = 600;
    double gmres_tol_floor = 1e-12;
    double projection_tol = 1e-10;
    bool record_objective = true;
};

/// Subproblem error-tolerance schedule eps_k = min(1e-3, k^-4); the weighted
/// series sum_k k * eps_k is finite, as the accelerated scheme requires.
inline double inexact_eps(int k) {
    const double kk = static_cast<double>(k);
    return std::min(1e-3, 1.0 / (kk * kk * kk * kk));
}

inline double momentum_next_t(double t) {
    return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
}
inline double momentum_beta(double t, double t_next) { return (t - 1.0) / t_next; }

/// Dual iterate of the accelerated scheme: extrapolated point, previous
/// accepted point and momentum scalar.
struct DualIterate {
    Vector p, lambda, mu;                               // extrapolated points
    Vector p_tilde_prev, lambda_tilde_prev, mu_tilde_prev;
    double t = 1.0;
    Vector y_aux;  // y-block of the last saddle solve
};

/// ADMM / ihADMM state.
struct PrimalIterate {
    Vector y, u, p, z, w, lambda, mu;
};

struct SolverReport {
    std::string algorithm;
    int level = -1;
    double alpha = 1.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;
    std::vector<double> objective_history;
    std::vector<int> inner_gmres_iters;
    std::vector<int> newton_iters;
    std::vector<double> delta_p, delta_lambda, delta_mu;  // inexactness certificates
    double wall_time_seconds = 0.0;
    // final_y / final_u are the feasible primal estimates each method returns;
    // eval_y / eval_u are the iterates the stopping residual was evaluated at.
    Vector final_y, final_u, final_p, final_lambda, final_mu;
    Vector eval_y, eval_u;
};

struct PSubproblemResult {
    Vector p_tilde, y_tilde;
    double relres = 0.0;
    int iters = 0;
    bool converged = false;
};

/// GMRES solve of [[M, -alpha K], [K', M]] [p; y] = [mu - alpha M f; M y_d - lambda]
/// with the saddle preconditioner, to relative residual <= tol.
PSubproblemResult solve_p_subproblem(const FemSystem& sys, const Vector& lambda_k,
                                     const Vector& mu_k, double alpha,
                                     const Vector& f_vec, const Vector& yd_vec,
                                     double tol, const SaddlePreconditioner& P,
                                     int restart = 50, int max_iter = 600);

/// Closed-form prox of the lambda-subproblem: one mass solve for d_k, then
/// d_k - Pi_C(sigma d_k)/sigma. Optional outputs: the feasible state estimate
/// Pi_C(sigma d_k), the projection iteration count and the mass-solve
/// residual certificate.
Vector update_lambda(const FemSystem& sys, const Vector& p_tilde,
                     const Vector& lambda_k, const EllipsoidSet& C,
                     const SpdFactor& M_factor, const Vector& yd_vec,
                     double projection_tol = 1e-10, Vector* z_hat = nullptr,
                     int* proj_iters = nullptr, double* certificate = nullptr);

/// Closed-form prox of the mu-subproblem in the lumped-mass metric: one mass
/// solve for s_k, then W (q_k - alpha Pi_S(q_k / alpha)) / c_n. Optional
/// outputs: the feasible control estimate Pi_S(q_k / alpha) and the
/// mass-solve residual certificate.
Vector update_mu(const FemSystem& sys, const Vector& p_tilde, const Vector& mu_k,
                 const BoxSet& S, double alpha, const SpdFactor& M_factor,
                 Vector* u_hat = nullptr, double* certificate = nullptr);

/// u = (p - M^-1 mu) / alpha.
Vector recover_control(const FemSystem& sys, const Vector& p, const Vector& mu,
                       double alpha, const SpdFactor& M_factor);

/// Dual objective
///   F = 1/2 ||K'p + lambda - M y_d||^2_{M^-1} + 1/(2 alpha) ||M p - mu||^2_{M^-1}
///       + delta*_C(lambda) + delta*_S(mu) + (M f, p) - 1/2 ||y_d||^2_M.
double compute_dual_objective(const FemSystem& sys, const Vector& p,
                              const Vector& lambda, const Vector& mu, double alpha,
                              const Vector& yd_vec, const Vector& f_vec,
                              const EllipsoidSet& C, const BoxSet& S,
                              const SpdFactor& M_factor);

struct EtaResidual {
    std::vector<double> parts;
    double value = 0.0;
};

EtaResidual residual_eta_d(const FemSystem& sys, const Vector& y, const Vector& u,
                           const Vector& p, const Vector& lambda, const Vector& mu,
                           const Vector& yd_vec, const Vector& f_vec,
                           const EllipsoidSet& C, const BoxSet& S,
                           double projection_tol = 1e-10);

EtaResidual residual_eta_c(const FemSystem& sys, const Vector& y, const Vector& u,
                           const Vector& p, const Vector& z, const Vector& w,
                           const Vector& lambda, const Vector& mu, double alpha,
                           const Vector& yd_vec, const Vector& f_vec,
                           const EllipsoidSet& C, const BoxSet& S,
                           double projection_tol = 1e-10);

EtaResidual residual_eta_h(const FemSystem& sys, const Vector& y, const Vector& u,
                           const Vector& p, const Vector& z, const Vector& w,
                           const Vector& lambda, const Vector& mu, double alpha,
                           const Vector& yd_vec, const Vector& f_vec,
                           const EllipsoidSet& C, const BoxSet& S,
                           double projection_tol = 1e-10);

/// Accelerated dual block coordinate descent (the main solver).
SolverReport fe_dabcd(const ProblemSpec& problem, const FemSystem& sys,
                      const SolverConfig& config);

/// Classical ADMM baseline on the primal splitting.
SolverReport admm(const ProblemSpec& problem, const FemSystem& sys,
                  const SolverConfig& config);

/// Inexact heterogeneous ADMM baseline (lumped-mass weighted multipliers).
SolverReport ihadmm(const ProblemSpec& problem, const FemSystem& sys,
                    const SolverConfig& config);

/// Nodal data vectors for a problem on an assembled system.
Vector interpolate_on_system(const ScalarField& func, const FemSystem& sys);

}  // namespace gradstate
