#include "gradstate/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace gradstate {

namespace {

Mesh hexagon_fan(double radius) {
    Mesh m;
    m.radius = radius;
    m.level = 0;
    m.nodes.push_back({0.0, 0.0});
    for (int k = 0; k < 6; ++k) {
        const double angle = M_PI / 3.0 * k;
        m.nodes.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    }
    for (int k = 0; k < 6; ++k) {
        m.triangles.push_back({0, 1 + k, 1 + (k + 1) % 6});
    }
    m.boundary_mask.assign(7, true);
    m.boundary_mask[0] = false;
    return m;
}

struct EdgeInfo {
    int midpoint = -1;
    int use_count = 0;
};

}  // namespace

Mesh build_disk_mesh(double radius, int level) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("build_disk_mesh: radius must be positive");
    }
    if (level < 0 || level > max_refine_level) {
        throw std::invalid_argument("build_disk_mesh: level must be in [0, " +
                                    std::to_string(max_refine_level) + "]");
    }
    Mesh m = hexagon_fan(radius);
    for (int l = 0; l < level; ++l) {
        m = refine(m);
    }
    return m;
}

Mesh refine(const Mesh& mesh) {
    if (mesh.level + 1 > max_refine_level) {
        throw std::invalid_argument("refine: level cap exceeded");
    }
    Mesh out;
    out.radius = mesh.radius;
    out.level = mesh.level + 1;
    out.nodes = mesh.nodes;
    out.boundary_mask = mesh.boundary_mask;

    // std::map keeps edges in sorted parent-edge order, which fixes the
    // numbering of the new midpoint nodes.
    std::map<std::array<int, 2>, EdgeInfo> edges;
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e];
            int b = tri[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            edges[{a, b}].use_count += 1;
        }
    }
    for (auto& [key, info] : edges) {
        const auto& pa = mesh.nodes[key[0]];
        const auto& pb = mesh.nodes[key[1]];
        std::array<double, 2> mid = {0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])};
        const bool on_boundary = info.use_count == 1;
        if (on_boundary) {
            const double r = std::hypot(mid[0], mid[1]);
            mid[0] *= mesh.radius / r;
            mid[1] *= mesh.radius / r;
        }
        info.midpoint = out.node_count();
        out.nodes.push_back(mid);
        out.boundary_mask.push_back(on_boundary);
    }

    auto mid_of = [&edges](int a, int b) {
        if (a > b) std::swap(a, b);
        return edges.at({a, b}).midpoint;
    };
    out.triangles.reserve(4 * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        const int m01 = mid_of(tri[0], tri[1]);
        const int m12 = mid_of(tri[1], tri[2]);
        const int m20 = mid_of(tri[2], tri[0]);
        out.triangles.push_back({tri[0], m01, m20});
        out.triangles.push_back({m01, tri[1], m12});
        out.triangles.push_back({m20, m12, tri[2]});
        out.triangles.push_back({m01, m12, m20});
    }
    return out;
}

double mesh_size(const Mesh& mesh) {
    double h = 0.0;
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const auto& a = mesh.nodes[tri[e]];
            const auto& b = mesh.nodes[tri[(e + 1) % 3]];
            h = std::max(h, std::hypot(b[0] - a[0], b[1] - a[1]));
        }
    }
    return h;
}

std::vector<std::array<int, 2>> mesh_edges(const Mesh& mesh) {
    std::vector<std::array<int, 2>> edges;
    edges.reserve(3 * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e];
            int b = tri[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            edges.push_back({a, b});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

double min_triangle_angle_deg(const Mesh& mesh) {
    double min_angle = 180.0;
    for (const auto& tri : mesh.triangles) {
        for (int v = 0; v < 3; ++v) {
            const auto& p = mesh.nodes[tri[v]];
            const auto& q = mesh.nodes[tri[(v + 1) % 3]];
            const auto& r = mesh.nodes[tri[(v + 2) % 3]];
            const double ux = q[0] - p[0], uy = q[1] - p[1];
            const double vx = r[0] - p[0], vy = r[1] - p[1];
            const double dot = ux * vx + uy * vy;
            const double nu = std::hypot(ux, uy), nv = std::hypot(vx, vy);
            const double c = std::clamp(dot / (nu * nv), -1.0, 1.0);
            min_angle = std::min(min_angle, std::acos(c) * 180.0 / M_PI);
        }
    }
    return min_angle;
}

double total_area(const Mesh& mesh) {
    double area = 0.0;
    for (const auto& tri : mesh.triangles) {
        area += triangle_signed_area(mesh.nodes[tri[0]], mesh.nodes[tri[1]],
                                     mesh.nodes[tri[2]]);
    }
    return area;
}

std::vector<int> interior_nodes(const Mesh& mesh) {
    std::vector<int> idx;
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (!mesh.boundary_mask[i]) idx.push_back(i);
    }
    return idx;
}

}  // namespace gradstate
