#pragma once

#include <map>
#include <string>

#include "gradstate/fem.hpp"
#include "gradstate/mesh.hpp"

namespace gradstate {

/// Plain-text mesh format: header "N M", then N lines "x y b", then M lines
/// "i j k" (0-based).
void write_mesh_text(const Mesh& mesh, const std::string& path);
Mesh read_mesh_text(const std::string& path);

/// Coordinate-format text dump, one "i j value" triplet per line in
/// column-major sorted order.
void write_matrix_coo(const SpMat& A, const std::string& path);
SpMat read_matrix_coo(const std::string& path);

/// Scatters an interior-dof vector to all mesh nodes, zero on the boundary.
Vector expand_to_nodes(const Vector& interior, const FemSystem& sys, int node_count);

/// Legacy-VTK export of nodal scalar fields for plotting.
void write_vtk(const Mesh& mesh, const std::map<std::string, Vector>& node_fields,
               const std::string& path);

}  // namespace gradstate
