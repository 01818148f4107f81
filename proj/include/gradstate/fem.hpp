#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "gradstate/mesh.hpp"

namespace gradstate {

using SpMat = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Constant-coefficient bilinear form a(y,v) = int (grad y)' A (grad v) + c0 y v.
/// Defaults to the negative Laplacian.
struct BilinearForm {
    Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
    double c0 = 0.0;
};

/// Discrete operators on interior (Dirichlet-eliminated) dofs: mass M,
/// stiffness K, row-sum lumped mass W (diagonal), per-axis gradient metrics
/// D_axes and their sum D, plus the lumping constants used by the prox steps.
struct FemSystem {
    SpMat M;
    SpMat K;
    Vector W_diag;
    std::vector<SpMat> D_axes;
    SpMat D;
    std::vector<int> interior_map;  // interior dof -> mesh node
    Eigen::Matrix<double, Eigen::Dynamic, 2> interior_coords;
    int n_dim = 2;
    double c_n = 4.0;     // lumping constant, 4 in 2D (5 in 3D)
    double omega_m = 0.0; // 1 / min_i W_ii
    double sigma = 0.0;   // c_n * omega_m

    int dofs() const { return static_cast<int>(M.rows()); }
};

/// Element-wise P1 assembly with exact quadrature; boundary rows/columns
/// eliminated. Throws on degenerate (non-positive-area) triangles.
FemSystem assemble(const Mesh& mesh, const BilinearForm& form = {});

/// Nodal values of `func` at interior nodes, in interior_map order.
/// Throws on non-finite values.
Vector interpolate_nodal(const std::function<double(double, double)>& func,
                         const Mesh& mesh);

/// y' D y = ||grad y_h||^2 over the mesh.
double gradient_seminorm_sq(const Vector& y, const FemSystem& sys);

}  // namespace gradstate
