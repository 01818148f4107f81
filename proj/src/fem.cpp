#include "gradstate/fem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gradstate {

namespace {

using Triplet = Eigen::Triplet<double>;

// Node-indexed full vectors/triplets are assembled first, then restricted to
// interior dofs. `dof_of[node]` is -1 for boundary nodes.
struct DofMap {
    std::vector<int> dof_of;
    std::vector<int> node_of;
};

DofMap make_dof_map(const Mesh& mesh) {
    DofMap map;
    map.dof_of.assign(mesh.node_count(), -1);
    map.node_of = interior_nodes(mesh);
    for (int d = 0; d < static_cast<int>(map.node_of.size()); ++d) {
        map.dof_of[map.node_of[d]] = d;
    }
    return map;
}

}  // namespace

FemSystem assemble(const Mesh& mesh, const BilinearForm& form) {
    const DofMap map = make_dof_map(mesh);
    const int n = static_cast<int>(map.node_of.size());

    std::vector<Triplet> tm, tk, td0, td1;
    Vector w_full = Vector::Zero(mesh.node_count());

    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto& p0 = mesh.nodes[tri[0]];
        const auto& p1 = mesh.nodes[tri[1]];
        const auto& p2 = mesh.nodes[tri[2]];
        const double area = triangle_signed_area(p0, p1, p2);
        if (!(area > 1e-14 * mesh.radius * mesh.radius)) {
            throw std::runtime_error("assemble: degenerate triangle " +
                                     std::to_string(t) + " (area " +
                                     std::to_string(area) + ")");
        }

        // P1 barycentric gradients: grad phi_i = (b_i, c_i) / (2 area).
        const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
        const double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};

        for (int i = 0; i < 3; ++i) {
            w_full[tri[i]] += area / 3.0;  // row-sum lumping
            const int di = map.dof_of[tri[i]];
            if (di < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int dj = map.dof_of[tri[j]];
                if (dj < 0) continue;
                const double mass = (i == j ? 2.0 : 1.0) * area / 12.0;
                const double gx_i = b[i] / (2.0 * area), gy_i = c[i] / (2.0 * area);
                const double gx_j = b[j] / (2.0 * area), gy_j = c[j] / (2.0 * area);
                const Eigen::Vector2d gi(gx_i, gy_i), gj(gx_j, gy_j);
                const double stiff = gi.dot(form.a * gj) * area + form.c0 * mass;
                tm.emplace_back(di, dj, mass);
                tk.emplace_back(di, dj, stiff);
                td0.emplace_back(di, dj, gx_i * gx_j * area);
                td1.emplace_back(di, dj, gy_i * gy_j * area);
            }
        }
    }

    FemSystem sys;
    sys.M.resize(n, n);
    sys.K.resize(n, n);
    sys.M.setFromTriplets(tm.begin(), tm.end());
    sys.K.setFromTriplets(tk.begin(), tk.end());
    sys.D_axes.resize(2);
    sys.D_axes[0].resize(n, n);
    sys.D_axes[1].resize(n, n);
    sys.D_axes[0].setFromTriplets(td0.begin(), td0.end());
    sys.D_axes[1].setFromTriplets(td1.begin(), td1.end());
    sys.D = sys.D_axes[0] + sys.D_axes[1];
    sys.M.makeCompressed();
    sys.K.makeCompressed();
    sys.D.makeCompressed();

    sys.interior_map = map.node_of;
    sys.W_diag.resize(n);
    sys.interior_coords.resize(n, 2);
    for (int d = 0; d < n; ++d) {
        sys.W_diag[d] = w_full[map.node_of[d]];
        sys.interior_coords(d, 0) = mesh.nodes[map.node_of[d]][0];
        sys.interior_coords(d, 1) = mesh.nodes[map.node_of[d]][1];
    }
    sys.n_dim = 2;
    sys.c_n = 4.0;
    sys.omega_m = 1.0 / sys.W_diag.minCoeff();
    sys.sigma = sys.c_n * sys.omega_m;
    return sys;
}

Vector interpolate_nodal(const std::function<double(double, double)>& func,
                         const Mesh& mesh) {
    const auto idx = interior_nodes(mesh);
    Vector v(idx.size());
    for (size_t d = 0; d < idx.size(); ++d) {
        const auto& p = mesh.nodes[idx[d]];
        const double value = func(p[0], p[1]);
        if (!std::isfinite(value)) {
            throw std::runtime_error("interpolate_nodal: non-finite value at node " +
                                     std::to_string(idx[d]));
        }
        v[d] = value;
    }
    return v;
}

double gradient_seminorm_sq(const Vector& y, const FemSystem& sys) {
    if (y.size() != sys.D.rows()) {
        throw std::invalid_argument("gradient_seminorm_sq: dimension mismatch");
    }
    return y.dot(sys.D * y);
}

}  // namespace gradstate
