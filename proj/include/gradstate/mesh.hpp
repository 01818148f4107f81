#pragma once

#include <array>
#include <string>
#include <vector>

namespace gradstate {

/// Conforming P1 triangulation of a disk B_r(0), built by uniform refinement
/// of a hexagon fan with new boundary midpoints projected onto the circle.
struct Mesh {
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<int, 3>> triangles;  // CCW node indices
    std::vector<bool> boundary_mask;            // true = node on the circle
    int level = 0;
    double radius = 1.0;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
};

inline double triangle_signed_area(const std::array<double, 2>& a,
                                   const std::array<double, 2>& b,
                                   const std::array<double, 2>& c) {
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

/// Hexagon fan (7 nodes, 6 triangles) refined `level` times. Throws
/// std::invalid_argument for radius <= 0 or level outside [0, max_refine_level].
Mesh build_disk_mesh(double radius, int level);

/// One uniform 4-way refinement with boundary midpoints pushed to the circle.
/// Node ordering: parent nodes first, then edge midpoints in sorted
/// parent-edge order.
Mesh refine(const Mesh& mesh);

/// Longest edge over all triangles.
double mesh_size(const Mesh& mesh);

/// Unique undirected edges as (low, high) index pairs, lexicographically sorted.
std::vector<std::array<int, 2>> mesh_edges(const Mesh& mesh);

/// Smallest interior angle over all triangles, in degrees.
double min_triangle_angle_deg(const Mesh& mesh);

double total_area(const Mesh& mesh);

/// Indices of non-boundary nodes in increasing node order. This is the
/// interior-dof numbering used by the assembled operators.
std::vector<int> interior_nodes(const Mesh& mesh);

inline constexpr int max_refine_level = 10;

}  // namespace gradstate
