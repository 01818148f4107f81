#include "gradstate/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gradstate {

EllipsoidSet::EllipsoidSet(SpMat D, double delta) : D_(std::move(D)), delta_(delta) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("EllipsoidSet: delta must be positive");
    }
    d_factor_ = std::make_shared<SpdFactor>(D_);
}

bool EllipsoidSet::contains(const Vector& z) const {
    return z.dot(D_ * z) <= delta_ * (1.0 + 1e-10);
}

Vector EllipsoidSet::solve_D(const Vector& rhs) const { return d_factor_->solve(rhs); }

Vector project_box(const Vector& v, const BoxSet& S) {
    if (S.a > S.b) throw std::invalid_argument("project_box: requires a <= b");
    return v.cwiseMax(S.a).cwiseMin(S.b);
}

namespace {

// x(rho) = (I + 2 rho D)^-1 g and phi(rho) = x' D x - delta, monotone
// decreasing on rho >= 0.
Vector shifted_solve(const SpMat& D, double rho, const Vector& g) {
    SpMat A = 2.0 * rho * D;
    for (int i = 0; i < A.rows(); ++i) A.coeffRef(i, i) += 1.0;
    A.makeCompressed();
    return SpdFactor(A).solve(g);
}

EllipsoidProjection bisection_fallback(const Vector& g, const EllipsoidSet& C,
                                       double tol, int newton_iters) {
    const SpMat& D = C.D();
    double lo = 0.0;
    double hi = 1.0;
    Vector x = shifted_solve(D, hi, g);
    while (x.dot(D * x) > C.delta() && hi < 1e18) {
        hi *= 4.0;
        x = shifted_solve(D, hi, g);
    }
    double rho = hi;
    for (int it = 0; it < 200; ++it) {
        rho = 0.5 * (lo + hi);
        x = shifted_solve(D, rho, g);
        const double phi = x.dot(D * x) - C.delta();
        if (std::abs(phi) <= 0.5 * tol && hi - lo <= 1e-14 * (1.0 + rho)) break;
        (phi > 0.0 ? lo : hi) = rho;
    }
    return {x, rho, newton_iters, true};
}

}  // namespace

EllipsoidProjection project_ellipsoid(const Vector& g, const EllipsoidSet& C,
                                      double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("project_ellipsoid: tol must be positive");
    const SpMat& D = C.D();
    if (g.size() != D.rows()) {
        throw std::invalid_argument("project_ellipsoid: dimension mismatch");
    }
    if (g.dot(D * g) <= C.delta()) {
        return {g, 0.0, 0, false};
    }

    const int max_newton = 50;
    Vector x = g;
    double rho = 0.0;
    for (int it = 1; it <= max_newton; ++it) {
        const Vector Dx = D * x;
        const Vector r1 = x - g + 2.0 * rho * Dx;
        const double r2 = x.dot(Dx) - C.delta();
        const double res = std::sqrt(r1.squaredNorm() + r2 * r2);
        if (res <= tol) {
            return {x, rho, it - 1, false};
        }

        // Block elimination of the bordered Jacobian: two solves with the
        // SPD matrix I + 2 rho D.
        SpMat A = 2.0 * rho * D;
        for (int i = 0; i < A.rows(); ++i) A.coeffRef(i, i) += 1.0;
        A.makeCompressed();
        const SpdFactor Af(A);
        const Vector w = 2.0 * Dx;
        const Vector z1 = Af.solve(r1);
        const Vector z2 = Af.solve(w);
        const double wz2 = w.dot(z2);
        if (!(wz2 > 0.0)) break;  // degenerate direction, use fallback
        const double drho = (r2 - w.dot(z1)) / wz2;
        const Vector dx = -z1 - drho * z2;

        double step = 1.0;
        while (rho + step * drho < 0.0 && step > 1e-12) step *= 0.5;
        if (step <= 1e-12) break;
        x += step * dx;
        rho += step * drho;
    }
    return bisection_fallback(g, C, tol, max_newton);
}

std::pair<Vector, double> secular_projection_oracle(const Vector& g,
                                                    const EllipsoidSet& C,
                                                    double tol) {
    if (g.size() > 600) {
        throw std::invalid_argument("secular_projection_oracle: guarded to dim <= 600");
    }
    const Eigen::MatrixXd Dd = Eigen::MatrixXd(C.D());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Dd);
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::MatrixXd V = es.eigenvectors();
    const Eigen::VectorXd ghat = V.transpose() * g;

    auto phi = [&](double rho) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            const double t = 1.0 + 2.0 * rho * lam[i];
            s += lam[i] * ghat[i] * ghat[i] / (t * t);
        }
        return s - C.delta();
    };

    if (phi(0.0) <= 0.0) {
        return {g, 0.0};
    }
    double lo = 0.0, hi = 1.0;
    while (phi(hi) > 0.0 && hi < 1e18) hi *= 4.0;
    double rho = hi;
    for (int it = 0; it < 400; ++it) {
        rho = 0.5 * (lo + hi);
        const double p = phi(rho);
        if (std::abs(p) <= 0.5 * tol && hi - lo <= 1e-15 * (1.0 + rho)) break;
        (p > 0.0 ? lo : hi) = rho;
    }
    Eigen::VectorXd xhat(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        xhat[i] = ghat[i] / (1.0 + 2.0 * rho * lam[i]);
    }
    return {V * xhat, rho};
}

Vector prox_support_ellipsoid(const Vector& d, double sigma, const EllipsoidSet& C) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("prox_support_ellipsoid: sigma must be positive");
    }
    const auto proj = project_ellipsoid(sigma * d, C);
    return d - proj.x / sigma;
}

double support_function_ellipsoid(const Vector& lambda, const EllipsoidSet& C) {
    const double quad = lambda.dot(C.solve_D(lambda));
    return std::sqrt(C.delta()) * std::sqrt(std::max(quad, 0.0));
}

double support_function_box(const Vector& mu, const BoxSet& S) {
    if (S.a > S.b) throw std::invalid_argument("support_function_box: requires a <= b");
    double s = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        s += S.b * std::max(mu[i], 0.0) + S.a * std::min(mu[i], 0.0);
    }
    return s;
}

}  // namespace gradstate
