#include "gradstate/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace gradstate {

namespace {
std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << std::setprecision(17);
    return out;
}
}  // namespace

void write_mesh_text(const Mesh& mesh, const std::string& path) {
    auto out = open_out(path);
    out << mesh.node_count() << " " << mesh.triangle_count() << "\n";
    for (int i = 0; i < mesh.node_count(); ++i) {
        out << mesh.nodes[i][0] << " " << mesh.nodes[i][1] << " "
            << (mesh.boundary_mask[i] ? 1 : 0) << "\n";
    }
    for (const auto& tri : mesh.triangles) {
        out << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    }
}

Mesh read_mesh_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    int n = 0, m = 0;
    in >> n >> m;
    if (!in || n <= 0 || m <= 0) throw std::runtime_error("bad mesh header in " + path);
    Mesh mesh;
    mesh.nodes.resize(n);
    mesh.boundary_mask.resize(n);
    mesh.triangles.resize(m);
    double max_r = 0.0;
    for (int i = 0; i < n; ++i) {
        int b = 0;
        in >> mesh.nodes[i][0] >> mesh.nodes[i][1] >> b;
        mesh.boundary_mask[i] = b != 0;
        if (b) max_r = std::max(max_r, std::hypot(mesh.nodes[i][0], mesh.nodes[i][1]));
    }
    for (int t = 0; t < m; ++t) {
        in >> mesh.triangles[t][0] >> mesh.triangles[t][1] >> mesh.triangles[t][2];
    }
    if (!in) throw std::runtime_error("truncated mesh file " + path);
    mesh.radius = max_r > 0.0 ? max_r : 1.0;
    return mesh;
}

void write_matrix_coo(const SpMat& A, const std::string& path) {
    auto out = open_out(path);
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            out << it.row() << " " << it.col() << " " << it.value() << "\n";
        }
    }
}

SpMat read_matrix_coo(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<Eigen::Triplet<double>> trips;
    int i = 0, j = 0;
    double v = 0.0;
    int max_dim = 0;
    while (in >> i >> j >> v) {
        trips.emplace_back(i, j, v);
        max_dim = std::max({max_dim, i + 1, j + 1});
    }
    SpMat A(max_dim, max_dim);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return A;
}

Vector expand_to_nodes(const Vector& interior, const FemSystem& sys, int node_count) {
    Vector full = Vector::Zero(node_count);
    for (int d = 0; d < sys.dofs(); ++d) full[sys.interior_map[d]] = interior[d];
    return full;
}

void write_vtk(const Mesh& mesh, const std::map<std::string, Vector>& node_fields,
               const std::string& path) {
    auto out = open_out(path);
    out << "# vtk DataFile Version 3.0\n";
    out << "gradstate fields\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.node_count() << " double\n";
    for (const auto& p : mesh.nodes) {
        out << p[0] << " " << p[1] << " 0\n";
    }
    out << "CELLS " << mesh.triangle_count() << " " << 4 * mesh.triangle_count()
        << "\n";
    for (const auto& tri : mesh.triangles) {
        out << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    }
    out << "CELL_TYPES " << mesh.triangle_count() << "\n";
    for (int t = 0; t < mesh.triangle_count(); ++t) out << "5\n";
    out << "POINT_DATA " << mesh.node_count() << "\n";
    for (const auto& [name, values] : node_fields) {
        if (values.size() != mesh.node_count()) {
            throw std::invalid_argument("write_vtk: field " + name +
                                        " has wrong length");
        }
        out << "SCALARS " << name << " double 1\n";
        out << "LOOKUP_TABLE default\n";
        for (Eigen::Index i = 0; i < values.size(); ++i) out << values[i] << "\n";
    }
}

}  // namespace gradstate
