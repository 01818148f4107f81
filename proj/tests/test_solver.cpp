#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <random>

#include "gradstate/solver.hpp"
#include "oracles.hpp"

using namespace gradstate;

namespace {

struct Setup {
    Mesh mesh;
    FemSystem sys;
    Vector yd, f;
    Setup(const ProblemSpec& p, int level)
        : mesh(build_disk_mesh(p.radius, level)),
          sys(assemble(mesh)),
          yd(interpolate_on_system(p.y_d, sys)),
          f(interpolate_on_system(p.f, sys)) {}
};

ProblemSpec zero_problem(double radius, double delta, double a, double b,
                         double alpha) {
    ProblemSpec p;
    p.name = "zero";
    p.radius = radius;
    p.alpha = alpha;
    p.box = {a, b};
    p.delta = delta;
    p.y_d = [](double, double) { return 0.0; };
    p.f = [](double, double) { return 0.0; };
    return p;
}

// Equality-only KKT solve: stationarity + state equation, both constraint
// multipliers absent.
std::pair<Vector, Vector> unconstrained_kkt(const FemSystem& sys, double alpha,
                                            const Vector& yd, const Vector& f) {
    const int n = sys.dofs();
    std::vector<Eigen::Triplet<double>> trips;
    auto add = [&](const SpMat& A, int r0, int c0, double s, bool tr) {
        for (int k = 0; k < A.outerSize(); ++k) {
            for (SpMat::InnerIterator it(A, k); it; ++it) {
                trips.emplace_back(r0 + (tr ? it.col() : it.row()),
                                   c0 + (tr ? it.row() : it.col()),
                                   s * it.value());
            }
        }
    };
    add(sys.M, 0, 0, 1.0, false);
    add(sys.K, 0, 2 * n, 1.0, true);
    add(sys.M, n, n, alpha, false);
    add(sys.M, n, 2 * n, -1.0, false);
    add(sys.K, 2 * n, 0, 1.0, false);
    add(sys.M, 2 * n, n, -1.0, false);
    SpMat KKT(3 * n, 3 * n);
    KKT.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<SpMat> lu(KKT);
    Vector rhs(3 * n);
    rhs.head(n) = sys.M * yd;
    rhs.segment(n, n).setZero();
    rhs.tail(n) = sys.M * f;
    const Vector sol = lu.solve(rhs);
    return {sol.head(n), sol.segment(n, n)};  // (y, u)
}

}  // namespace

TEST_CASE("momentum sequence starts with a no-op extrapolation") {
    const double t1 = 1.0;
    const double t2 = momentum_next_t(t1);
    CHECK(t2 == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
    CHECK(momentum_beta(t1, t2) == 0.0);
    const double t3 = momentum_next_t(t2);
    CHECK(momentum_beta(t2, t3) > 0.0);
    CHECK(momentum_beta(t2, t3) < 1.0);
}

TEST_CASE("error schedule is summable against k") {
    double weighted_sum = 0.0;
    double prev = 0.0;
    for (int k = 1; k <= 200000; ++k) {
        weighted_sum += k * inexact_eps(k);
        CHECK(weighted_sum >= prev);
        prev = weighted_sum;
    }
    CHECK(weighted_sum < 0.05);
    CHECK(inexact_eps(1) == 1e-3);
    CHECK(inexact_eps(100) == doctest::Approx(1e-8).epsilon(1e-12));
}

TEST_CASE("p-subproblem: zero right-hand sides give zero") {
    const auto p1 = example1();
    Setup s(p1, 2);
    const SaddlePreconditioner P(s.sys.M, s.sys.K, p1.alpha);

    // lambda = M yd, mu = alpha M f zeroes the right-hand side
    const Vector lam = s.sys.M * s.yd;
    const Vector mu = p1.alpha * (s.sys.M * s.f);
    const auto r = solve_p_subproblem(s.sys, lam, mu, p1.alpha, s.f, s.yd, 1e-12, P);
    CHECK(r.p_tilde.norm() == 0.0);
    CHECK(r.y_tilde.norm() == 0.0);

    const Vector zero = Vector::Zero(s.sys.dofs());
    const auto r2 = solve_p_subproblem(s.sys, zero, zero, p1.alpha, zero, zero,
                                       1e-12, P);
    CHECK(r2.p_tilde.norm() == 0.0);
    CHECK(r2.y_tilde.norm() == 0.0);
}

TEST_CASE("p-subproblem: blocks satisfy the saddle equations") {
    std::mt19937 rng(101);
    const auto p1 = example1();
    Setup s(p1, 2);
    const int n = s.sys.dofs();
    const double alpha = 0.37;
    const SaddlePreconditioner P(s.sys.M, s.sys.K, alpha);
    const Vector lam = oracles::random_vector(n, rng);
    const Vector mu = oracles::random_vector(n, rng);
    const double tol = 1e-9;
    const auto r = solve_p_subproblem(s.sys, lam, mu, alpha, s.f, s.yd, tol, P);
    REQUIRE(r.converged);
    const Vector rhs1 = mu - alpha * (s.sys.M * s.f);
    const Vector rhs2 = s.sys.M * s.yd - lam;
    const Vector res1 = s.sys.M * r.p_tilde - alpha * (s.sys.K * r.y_tilde) - rhs1;
    const Vector res2 =
        s.sys.K.transpose() * r.p_tilde + s.sys.M * r.y_tilde - rhs2;
    const double rhs_norm = std::sqrt(rhs1.squaredNorm() + rhs2.squaredNorm());
    CHECK(std::sqrt(res1.squaredNorm() + res2.squaredNorm()) <= tol * rhs_norm);
}

TEST_CASE("lambda update: zero data stays zero") {
    const auto p0 = zero_problem(1.0, 1.0, -1.0, 1.0, 1.0);
    Setup s(p0, 1);
    const int n = s.sys.dofs();
    const SpdFactor Mfac(s.sys.M);
    const EllipsoidSet C(s.sys.D, 1.0);
    const Vector lt = update_lambda(s.sys, Vector::Zero(n), Vector::Zero(n), C,
                                    Mfac, Vector::Zero(n));
    CHECK(lt.norm() == 0.0);
}

TEST_CASE("lambda update vanishes when the scaled point is feasible") {
    // huge budget makes sigma*d fall inside C for moderate data
    const auto p1 = example1();
    Setup s(p1, 1);
    const SpdFactor Mfac(s.sys.M);
    const EllipsoidSet C(s.sys.D, 1e9);
    std::mt19937 rng(7);
    const Vector pt = oracles::random_vector(s.sys.dofs(), rng, 0.01);
    const Vector lt = update_lambda(s.sys, pt, Vector::Zero(s.sys.dofs()), C,
                                    Mfac, s.yd);
    CHECK(lt.norm() <= 1e-12);
}

TEST_CASE("lambda update matches the slow subgradient oracle") {
    std::mt19937 rng(2025);
    const auto p1 = example1();
    Setup s(p1, 1);  // 7 interior dofs
    const int n = s.sys.dofs();
    const SpdFactor Mfac(s.sys.M);
    const Eigen::MatrixXd Md(s.sys.M), Dd(s.sys.D);
    for (int trial = 0; trial < 10; ++trial) {
        const double delta = 0.05 + 0.4 * (trial % 4);
        const EllipsoidSet C(s.sys.D, delta);
        const Vector pt = oracles::random_vector(n, rng, 0.5);
        const Vector lam_k = oracles::random_vector(n, rng, 0.3);
        const Vector yd = oracles::random_vector(n, rng, 0.5);
        const Vector lt = update_lambda(s.sys, pt, lam_k, C, Mfac, yd, 1e-12);
        const Vector g = Md * yd - s.sys.K.transpose() * pt;
        const Vector ref = oracles::slow_lambda_argmin(Md, Dd, delta,
                                                       s.sys.sigma, g, lam_k);
        CHECK((lt - ref).norm() <= 1e-5 * (1.0 + ref.norm()));
    }
}

TEST_CASE("mu update: zero data stays zero when the box contains zero") {
    const auto p0 = zero_problem(1.0, 1.0, -1.0, 1.0, 1.0);
    Setup s(p0, 1);
    const int n = s.sys.dofs();
    const SpdFactor Mfac(s.sys.M);
    const Vector mt = update_mu(s.sys, Vector::Zero(n), Vector::Zero(n),
                                BoxSet{-1.0, 1.0}, 1.0, Mfac);
    CHECK(mt.norm() == 0.0);
}

TEST_CASE("mu update vanishes when q/alpha is inside the box") {
    const auto p1 = example1();
    Setup s(p1, 1);
    const int n = s.sys.dofs();
    const SpdFactor Mfac(s.sys.M);
    std::mt19937 rng(8);
    const Vector pt = oracles::random_vector(n, rng, 0.01);
    // mu_k = 0 makes q = p_tilde, tiny against the wide box
    const Vector mt =
        update_mu(s.sys, pt, Vector::Zero(n), BoxSet{-5.0, 5.0}, 1.0, Mfac);
    CHECK(mt.norm() <= 1e-14);
}

TEST_CASE("mu update matches the slow proximal-gradient oracle") {
    std::mt19937 rng(2026);
    const auto p1 = example1();
    Setup s(p1, 1);
    const int n = s.sys.dofs();
    const SpdFactor Mfac(s.sys.M);
    const Eigen::MatrixXd Md(s.sys.M);
    for (int trial = 0; trial < 10; ++trial) {
        const double alpha = trial % 2 == 0 ? 1.0 : 1e-2;
        const BoxSet S{-0.4, 0.7};
        const Vector pt = oracles::random_vector(n, rng, 1.0);
        const Vector mu_k = oracles::random_vector(n, rng, 0.2);
        const Vector mt = update_mu(s.sys, pt, mu_k, S, alpha, Mfac);
        const Vector ref = oracles::slow_mu_argmin(Md, s.sys.W_diag, s.sys.c_n,
                                                   alpha, S.a, S.b, Md * pt, mu_k);
        CHECK((mt - ref).norm() <= 1e-5 * (1.0 + ref.norm()));
    }
}

TEST_CASE("recover_control basics") {
    const auto p1 = example1();
    Setup s(p1, 1);
    const int n = s.sys.dofs();
    const SpdFactor Mfac(s.sys.M);
    std::mt19937 rng(3);
    const Vector p = oracles::random_vector(n, rng);
    const double alpha = 0.5;
    const Vector u = recover_control(s.sys, p, Vector::Zero(n), alpha, Mfac);
    CHECK((u - p / alpha).norm() <= 1e-14 * p.norm());
    CHECK(recover_control(s.sys, Vector::Zero(n), Vector::Zero(n), alpha, Mfac)
              .norm() == 0.0);
}

TEST_CASE("dual objective: cancellation at the origin") {
    const auto p1 = example1();
    Setup s(p1, 2);
    const int n = s.sys.dofs();
    const SpdFactor Mfac(s.sys.M);
    const EllipsoidSet C(s.sys.D, p1.delta);
    const Vector zero = Vector::Zero(n);
    // p = lambda = mu = 0, f = 0: the two y_d terms cancel exactly
    const double F = compute_dual_objective(s.sys, zero, zero, zero, p1.alpha,
                                            s.yd, zero, C, p1.box, Mfac);
    CHECK(std::abs(F) <= 1e-10);
    // all-zero data
    const double F0 = compute_dual_objective(s.sys, zero, zero, zero, p1.alpha,
                                             zero, zero, C, p1.box, Mfac);
    CHECK(F0 == 0.0);
}

TEST_CASE("strong duality against the box-active primal oracle") {
    // example2 at level 1: the budget is slack there and the box saturates
    const auto p2 = example2();
    Setup s(p2, 1);
    const auto primal = oracles::primal_box_qp_oracle(
        s.sys.M, s.sys.K, s.sys.D, p2.alpha, p2.box.a, p2.box.b, p2.delta, s.yd,
        s.f);
    REQUIRE(primal.ellipsoid_slack);

    SolverConfig cfg;
    cfg.tol = 1e-9;
    cfg.max_iter = 3000;
    cfg.alpha = p2.alpha;
    const auto rep = fe_dabcd(p2, s.sys, cfg);
    REQUIRE(rep.converged);
    const SpdFactor Mfac(s.sys.M);
    const EllipsoidSet C(s.sys.D, p2.delta);
    const double F = compute_dual_objective(s.sys, rep.final_p, rep.final_lambda,
                                            rep.final_mu, p2.alpha, s.yd, s.f, C,
                                            p2.box, Mfac);
    CHECK(F == doctest::Approx(-primal.objective).epsilon(1e-6));
    // the primal oracle agrees with the returned control
    const Vector du = rep.final_u - primal.u;
    CHECK(std::sqrt(du.dot(s.sys.M * du)) <= 1e-6);
}

TEST_CASE("strong duality against the budget-active primal oracle") {
    // example1 data at level 1: the gradient budget binds, box stays slack
    const auto p1 = example1();
    Setup s(p1, 1);
    const auto primal = oracles::primal_ellipsoid_qp_oracle(
        s.sys.M, s.sys.K, s.sys.D, p1.alpha, p1.box.a, p1.box.b, p1.delta, s.yd,
        s.f);
    REQUIRE(!primal.ellipsoid_slack);
    REQUIRE(primal.box_slack);

    SolverConfig cfg;
    cfg.tol = 1e-10;
    cfg.max_iter = 6000;
    cfg.alpha = p1.alpha;
    const auto rep = fe_dabcd(p1, s.sys, cfg);
    REQUIRE(rep.converged);
    const SpdFactor Mfac(s.sys.M);
    const EllipsoidSet C(s.sys.D, p1.delta);
    const double F = compute_dual_objective(s.sys, rep.final_p, rep.final_lambda,
                                            rep.final_mu, p1.alpha, s.yd, s.f, C,
                                            p1.box, Mfac);
    CHECK(F == doctest::Approx(-primal.objective).epsilon(1e-6));
    const Vector du = rep.final_u - primal.u;
    CHECK(std::sqrt(du.dot(s.sys.M * du)) <= 1e-5);
}

TEST_CASE("fe_dabcd: zero data converges immediately") {
    const auto p0 = zero_problem(1.0, 0.5, -1.0, 1.0, 1.0);
    Setup s(p0, 2);
    SolverConfig cfg;
    cfg.alpha = 1.0;
    const auto rep = fe_dabcd(p0, s.sys, cfg);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.residual_history.back() == 0.0);
    CHECK(rep.final_u.norm() == 0.0);
    CHECK(rep.final_y.norm() == 0.0);
}

TEST_CASE("fe_dabcd matches the direct KKT solve when nothing binds") {
    auto p = example1();
    p.delta = 1e6;        // budget never active
    p.box = {-1e6, 1e6};  // box never active
    Setup s(p, 2);
    SolverConfig cfg;
    cfg.tol = 1e-9;
    cfg.max_iter = 500;
    cfg.alpha = p.alpha;
    const auto rep = fe_dabcd(p, s.sys, cfg);
    REQUIRE(rep.converged);
    const auto [y_kkt, u_kkt] = unconstrained_kkt(s.sys, p.alpha, s.yd, s.f);
    const Vector du = rep.final_u - u_kkt;
    const Vector dy = rep.final_y - y_kkt;
    CHECK(std::sqrt(du.dot(s.sys.M * du)) <= 1e-6);
    CHECK(std::sqrt(dy.dot(s.sys.M * dy)) <= 1e-6);
}

TEST_CASE("eta_d vanishes at an exact KKT point and flags perturbations") {
    auto p = example1();
    p.delta = 1e6;
    p.box = {-1e6, 1e6};
    Setup s(p, 2);
    const EllipsoidSet C(s.sys.D, p.delta);
    const auto [y, u] = unconstrained_kkt(s.sys, p.alpha, s.yd, s.f);
    // with both multipliers zero, p solves K'p = -M(y - yd)
    const SpdFactor Kfac(s.sys.K);
    const Vector padj = Kfac.solve(-(s.sys.M * (y - s.yd)));
    const Vector zero = Vector::Zero(s.sys.dofs());
    const auto eta =
        residual_eta_d(s.sys, y, u, padj, zero, zero, s.yd, s.f, C, p.box);
    CHECK(eta.value <= 1e-10);

    // r1 contribution drops out when y = yd and p = lambda = 0
    const auto eta2 =
        residual_eta_d(s.sys, s.yd, u, zero, zero, zero, s.yd, s.f, C, p.box);
    CHECK(eta2.parts[0] <= 1e-14);

    // a 1e-3 perturbation lands in a sane residual band
    std::mt19937 rng(4);
    Vector ypert = y + 1e-3 * oracles::random_vector(s.sys.dofs(), rng);
    const auto eta3 =
        residual_eta_d(s.sys, ypert, u, padj, zero, zero, s.yd, s.f, C, p.box);
    CHECK(eta3.value >= 1e-5);
    CHECK(eta3.value <= 1e-1);
}

TEST_CASE("eta_c and eta_h vanish at exact KKT points") {
    auto p = example1();
    p.delta = 1e6;
    p.box = {-1e6, 1e6};
    Setup s(p, 2);
    const EllipsoidSet C(s.sys.D, p.delta);
    const auto [y, u] = unconstrained_kkt(s.sys, p.alpha, s.yd, s.f);
    const SpdFactor Kfac(s.sys.K);
    const Vector padj = Kfac.solve(-(s.sys.M * (y - s.yd)));
    const Vector zero = Vector::Zero(s.sys.dofs());

    const auto ec = residual_eta_c(s.sys, y, u, padj, y, u, zero, zero, p.alpha,
                                   s.yd, s.f, C, p.box);
    CHECK(ec.value <= 1e-9);
    CHECK(ec.parts[3] == 0.0);  // z = y
    CHECK(ec.parts[4] == 0.0);  // w = u
    const auto eh = residual_eta_h(s.sys, y, u, padj, y, u, zero, zero, p.alpha,
                                   s.yd, s.f, C, p.box);
    CHECK(eh.value <= 1e-9);

    std::mt19937 rng(5);
    Vector upert = u + 1e-3 * oracles::random_vector(s.sys.dofs(), rng);
    const auto ec2 = residual_eta_c(s.sys, y, upert, padj, y, upert, zero, zero,
                                    p.alpha, s.yd, s.f, C, p.box);
    CHECK(ec2.value >= 1e-6);
    CHECK(ec2.value <= 1e-1);
}

TEST_CASE("admm and ihadmm: zero data converges at the first iteration") {
    const auto p0 = zero_problem(1.0, 0.5, 0.0, 1.0, 1.0);
    Setup s(p0, 2);
    SolverConfig cfg;
    cfg.alpha = 1.0;
    const auto rep = admm(p0, s.sys, cfg);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    const auto rep2 = ihadmm(p0, s.sys, cfg);
    CHECK(rep2.converged);
    CHECK(rep2.iterations == 1);
}

TEST_CASE("admm takes more iterations than fe_dabcd on coarse example1") {
    const auto p1 = example1();
    Setup s(p1, 2);
    SolverConfig cfg;
    cfg.tol = 1e-4;
    cfg.max_iter = 400;
    cfg.alpha = p1.alpha;
    cfg.record_objective = false;
    const auto rd = fe_dabcd(p1, s.sys, cfg);
    const auto ra = admm(p1, s.sys, cfg);
    REQUIRE(rd.converged);
    REQUIRE(ra.converged);
    CHECK(ra.iterations > rd.iterations);
}

TEST_CASE("admm output also satisfies the dual residual metric") {
    const auto p2 = example2();
    Setup s(p2, 2);
    SolverConfig cfg;
    cfg.tol = 1e-5;
    cfg.max_iter = 2000;
    cfg.alpha = p2.alpha;
    cfg.record_objective = false;
    const auto ra = admm(p2, s.sys, cfg);
    REQUIRE(ra.converged);
    const EllipsoidSet C(s.sys.D, p2.delta);
    const auto eta = residual_eta_d(s.sys, ra.eval_y, ra.eval_u, ra.final_p,
                                    ra.final_lambda, ra.final_mu, s.yd, s.f, C,
                                    p2.box);
    CHECK(eta.value <= 10.0 * cfg.tol);
}

TEST_CASE("ihadmm and fe_dabcd agree on example2 controls") {
    const auto p2 = example2();
    Setup s(p2, 2);
    SolverConfig cfg;
    cfg.tol = 1e-5;
    cfg.max_iter = 2000;
    cfg.alpha = p2.alpha;
    cfg.record_objective = false;
    const auto rh = ihadmm(p2, s.sys, cfg);
    const auto rd = fe_dabcd(p2, s.sys, cfg);
    REQUIRE(rh.converged);
    REQUIRE(rd.converged);
    const Vector du = rh.final_u - rd.final_u;
    CHECK(std::sqrt(du.dot(s.sys.M * du)) <= 10.0 * cfg.tol);
}

TEST_CASE("subproblem error certificates respect the schedule") {
    const auto p2 = example2();
    Setup s(p2, 2);
    SolverConfig cfg;
    cfg.tol = 1e-5;
    cfg.max_iter = 200;
    cfg.alpha = p2.alpha;
    const auto rep = fe_dabcd(p2, s.sys, cfg);
    REQUIRE(rep.converged);
    for (int k = 1; k <= rep.iterations; ++k) {
        const double cap = inexact_eps(k);
        CHECK(rep.delta_p[k - 1] <= cap);
        CHECK(rep.delta_lambda[k - 1] <= cap);
        CHECK(rep.delta_mu[k - 1] <= cap);
    }
}

TEST_CASE("objective decay satisfies an O(1/k^2) certificate") {
    const auto p2 = example2();
    Setup s(p2, 2);
    SolverConfig cfg;
    cfg.tol = 1e-9;
    cfg.max_iter = 4000;
    cfg.alpha = p2.alpha;
    const auto rep = fe_dabcd(p2, s.sys, cfg);
    REQUIRE(rep.converged);
    const double F_best = *std::min_element(rep.objective_history.begin(),
                                            rep.objective_history.end());
    const double c1 = (rep.objective_history[0] - F_best) * 4.0;
    for (size_t k = 1; k <= rep.objective_history.size(); ++k) {
        const double bound = (rep.objective_history[k - 1] - F_best) *
                             static_cast<double>(k + 1) * static_cast<double>(k + 1);
        CHECK(bound <= 10.0 * c1 + 1e-12);
    }
}

TEST_CASE("majorization gap operator is positive semidefinite on a small mesh") {
    const auto p1 = example1();
    Setup s(p1, 1);
    const int n = s.sys.dofs();
    const Eigen::MatrixXd Minv =
        Eigen::MatrixXd(s.sys.M).llt().solve(Eigen::MatrixXd::Identity(n, n));
    for (const double alpha : {1.0, 1e-2}) {
        Eigen::MatrixXd D2 = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        D2.topLeftCorner(n, n) =
            s.sys.sigma * Eigen::MatrixXd::Identity(n, n) - Minv;
        D2.bottomRightCorner(n, n) =
            (Eigen::MatrixXd(
                 (s.sys.c_n * s.sys.W_diag.cwiseInverse()).asDiagonal()) -
             Minv) /
            alpha;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D2);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("solvers report feasible primal estimates") {
    const auto p2 = example2();
    Setup s(p2, 2);
    SolverConfig cfg;
    cfg.tol = 1e-4;
    cfg.max_iter = 300;
    cfg.alpha = p2.alpha;
    for (const auto* algo : {"dabcd", "admm", "ihadmm"}) {
        SolverReport rep;
        if (std::string(algo) == "dabcd") rep = fe_dabcd(p2, s.sys, cfg);
        if (std::string(algo) == "admm") rep = admm(p2, s.sys, cfg);
        if (std::string(algo) == "ihadmm") rep = ihadmm(p2, s.sys, cfg);
        REQUIRE(rep.converged);
        CHECK(rep.final_u.minCoeff() >= p2.box.a - 1e-8);
        CHECK(rep.final_u.maxCoeff() <= p2.box.b + 1e-8);
        CHECK(gradient_seminorm_sq(rep.final_y, s.sys) <=
              p2.delta * (1.0 + 1e-6));
    }
}
