#pragma once

#include <memory>

#include "gradstate/linalg.hpp"

namespace gradstate {

/// The set C = { z : z' D z <= delta } for an SPD gradient metric D.
class EllipsoidSet {
  public:
    EllipsoidSet(SpMat D, double delta);

    const SpMat& D() const { return D_; }
    double delta() const { return delta_; }
    bool contains(const Vector& z) const;
    /// One solve with D (used by the support function).
    Vector solve_D(const Vector& rhs) const;

  private:
    SpMat D_;
    double delta_;
    std::shared_ptr<SpdFactor> d_factor_;
};

struct BoxSet {
    double a = 0.0;
    double b = 0.0;
};

struct EllipsoidProjection {
    Vector x;
    double rho = 0.0;        // multiplier of the active quadratic constraint
    int newton_iters = 0;
    bool used_fallback = false;
};

Vector project_box(const Vector& v, const BoxSet& S);

/// Projection onto C. Feasible inputs are returned unchanged with rho = 0;
/// otherwise Newton's method solves
///   x - g + 2 rho D x = 0,  x' D x = delta
/// from (x, rho) = (g, 0), with steps damped so rho stays nonnegative. If
/// Newton does not reach `tol` within its iteration cap, a monotone bisection
/// on rho (each evaluation one SPD solve with I + 2 rho D) takes over.
EllipsoidProjection project_ellipsoid(const Vector& g, const EllipsoidSet& C,
                                      double tol = 1e-10);

/// Dense eigen-decomposition reference for project_ellipsoid: solves the
/// scalar secular equation sum_i lambda_i ghat_i^2 / (1 + 2 rho lambda_i)^2 =
/// delta by bisection. Guarded to dim <= 600.
std::pair<Vector, double> secular_projection_oracle(const Vector& g,
                                                    const EllipsoidSet& C,
                                                    double tol = 1e-12);

/// prox of the support function of C scaled by 1/sigma:
/// d - (1/sigma) * Pi_C(sigma d).
Vector prox_support_ellipsoid(const Vector& d, double sigma, const EllipsoidSet& C);

/// sqrt(delta) * sqrt(lambda' D^-1 lambda).
double support_function_ellipsoid(const Vector& lambda, const EllipsoidSet& C);

/// sum_i [ b max(mu_i, 0) + a min(mu_i, 0) ].
double support_function_box(const Vector& mu, const BoxSet& S);

}  // namespace gradstate
