// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace stresseq {

enum class BoundaryLabel : std::uint8_t { None = 0, Dirichlet = 1, Neumann = 2 };

/// Oriented edge of the triangulation.
///
/// The unit normal of an interior edge is the +90-degree rotation of the
/// direction from the lower to the higher vertex index; tri_plus is the
/// triangle the normal points into and tri_minus the other one. Boundary
/// edges carry the outward normal, tri_minus is the (unique) adjacent
/// triangle and tri_plus is -1. The arc-length parameter s runs from
/// vertex lo() (s=0) to hi() (s=1) in both cases.
struct Edge {
    int v0 = -1, v1 = -1;          // v0 < v1
    int tri_minus = -1, tri_plus = -1;
    Vec2 normal = Vec2::Zero();
    Vec2 tangent = Vec2::Zero();   // unit, from v0 to v1
    double length = 0.0;
    BoundaryLabel label = BoundaryLabel::None;

    int lo() const { return v0; }
    int hi() const { return v1; }
    bool on_boundary() const { return tri_plus < 0; }
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles; // counterclockwise
    std::vector<Edge> edges;

    // triangle -> its three edges; edge i is opposite local vertex i.
    std::vector<std::array<int, 3>> tri_edges;

    int refinement_level = 0;
    std::vector<int> parent_triangle; // empty on a base mesh

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }

    double signed_area(int tri) const;
    double area(int tri) const { return signed_area(tri); }
    Vec2 centroid(int tri) const;
    double diameter(int tri) const;

    /// Physical point from barycentric coordinates (b0,b1,b2).
    Vec2 point(int tri, double b0, double b1, double b2) const;

    /// Constant gradients of the three barycentric hat functions on tri.
    std::array<Vec2, 3> hat_gradients(int tri) const;

    /// True if the vertex is an endpoint of some edge with the given label.
    bool vertex_touches(int v, BoundaryLabel label) const;

    /// Vertex lies on Gamma_N: touches a Neumann edge and no Dirichlet edge.
    /// Corner vertices between the two boundary parts count as Dirichlet.
    bool vertex_on_neumann(int v) const {
        return vertex_touches(v, BoundaryLabel::Neumann) &&
               !vertex_touches(v, BoundaryLabel::Dirichlet);
    }

    std::uint64_t content_hash() const;

private:
    mutable std::vector<std::uint8_t> vertex_label_cache_;
    void build_vertex_label_cache() const;
};

/// Build a mesh from raw arrays; derives edges, normals and adjacency and
/// validates the invariants (orientation, boundary coverage, disjoint
/// Dirichlet/Neumann parts, Gamma_N connectivity).
Mesh make_mesh(std::vector<Vec2> vertices,
               std::vector<std::array<int, 3>> triangles,
               const std::vector<std::pair<std::array<int, 2>, BoundaryLabel>>& boundary_labels);

/// Cook's membrane at the given uniform refinement level. The quadrilateral
/// (0,0), (0.48,0.44), (0.48,0.6), (0,0.44) is fanned into four base
/// triangles around its centroid; the left segment is Dirichlet, the rest
/// Neumann. Every Gamma_N vertex keeps an interior edge under refinement.
Mesh build_cook_mesh(int refinement_level);

/// Red refinement: each triangle is split into four by its edge midpoints;
/// boundary labels are inherited.
Mesh refine_uniform(const Mesh& mesh);

/// Throws Error("MESH_INVALID", ...) if any structural invariant fails.
void validate_mesh(const Mesh& mesh);

} // namespace stresseq
