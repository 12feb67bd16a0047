// SPDX-License-Identifier: Apache-2.0
#include "stresseq/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

namespace stresseq {

double Mesh::signed_area(int tri) const {
    const auto& t = triangles[tri];
    const Vec2& a = vertices[t[0]];
    const Vec2& b = vertices[t[1]];
    const Vec2& c = vertices[t[2]];
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

Vec2 Mesh::centroid(int tri) const {
    const auto& t = triangles[tri];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

double Mesh::diameter(int tri) const {
    const auto& t = triangles[tri];
    double d01 = (vertices[t[0]] - vertices[t[1]]).norm();
    double d12 = (vertices[t[1]] - vertices[t[2]]).norm();
    double d20 = (vertices[t[2]] - vertices[t[0]]).norm();
    return std::max({d01, d12, d20});
}

Vec2 Mesh::point(int tri, double b0, double b1, double b2) const {
    const auto& t = triangles[tri];
    return b0 * vertices[t[0]] + b1 * vertices[t[1]] + b2 * vertices[t[2]];
}

std::array<Vec2, 3> Mesh::hat_gradients(int tri) const {
    const auto& t = triangles[tri];
    const Vec2& a = vertices[t[0]];
    const Vec2& b = vertices[t[1]];
    const Vec2& c = vertices[t[2]];
    double two_area = 2.0 * signed_area(tri);
    // grad lambda_i = perp(opposite edge) / (2A), oriented inward.
    auto perp = [](const Vec2& v) { return Vec2(-v.y(), v.x()); };
    return {perp(c - b) / two_area, perp(a - c) / two_area, perp(b - a) / two_area};
}

void Mesh::build_vertex_label_cache() const {
    vertex_label_cache_.assign(vertices.size(), 0);
    for (const Edge& e : edges) {
        if (e.label == BoundaryLabel::None) continue;
        std::uint8_t bit = (e.label == BoundaryLabel::Dirichlet) ? 1 : 2;
        vertex_label_cache_[e.v0] |= bit;
        vertex_label_cache_[e.v1] |= bit;
    }
}

bool Mesh::vertex_touches(int v, BoundaryLabel label) const {
    if (vertex_label_cache_.size() != vertices.size()) build_vertex_label_cache();
    std::uint8_t bit = (label == BoundaryLabel::Dirichlet) ? 1 : 2;
    return (vertex_label_cache_[v] & bit) != 0;
}

std::uint64_t Mesh::content_hash() const {
    // FNV-1a over coordinates, connectivity and labels.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    for (const Vec2& v : vertices) {
        double xy[2] = {v.x(), v.y()};
        mix(xy, sizeof xy);
    }
    for (const auto& t : triangles) mix(t.data(), sizeof(int) * 3);
    for (const Edge& e : edges) {
        int ends[2] = {e.v0, e.v1};
        mix(ends, sizeof ends);
        auto label = static_cast<std::uint8_t>(e.label);
        mix(&label, 1);
    }
    return h;
}

namespace {

void build_edges(Mesh& mesh,
                 const std::vector<std::pair<std::array<int, 2>, BoundaryLabel>>& boundary_labels) {
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            int a = tri[(i + 1) % 3];
            int b = tri[(i + 2) % 3];
            edge_tris[{std::min(a, b), std::max(a, b)}].push_back(t);
        }
    }

    std::map<std::pair<int, int>, BoundaryLabel> labels;
    for (const auto& [verts, label] : boundary_labels) {
        labels[{std::min(verts[0], verts[1]), std::max(verts[0], verts[1])}] = label;
    }

    mesh.edges.clear();
    mesh.edges.reserve(edge_tris.size());
    std::map<std::pair<int, int>, int> edge_index;
    for (const auto& [key, tris] : edge_tris) {
        Edge e;
        e.v0 = key.first;
        e.v1 = key.second;
        Vec2 d = mesh.vertices[e.v1] - mesh.vertices[e.v0];
        e.length = d.norm();
        e.tangent = d / e.length;
        e.normal = Vec2(-e.tangent.y(), e.tangent.x());

        if (tris.size() == 1) {
            e.tri_minus = tris[0];
            e.tri_plus = -1;
            // Outward normal for boundary edges.
            Vec2 to_centroid = mesh.centroid(tris[0]) - mesh.vertices[e.v0];
            if (e.normal.dot(to_centroid) > 0.0) e.normal = -e.normal;
            auto it = labels.find(key);
            e.label = (it != labels.end()) ? it->second : BoundaryLabel::None;
        } else if (tris.size() == 2) {
            // n points into tri_plus.
            Vec2 mid = 0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]);
            if (e.normal.dot(mesh.centroid(tris[0]) - mid) > 0.0) {
                e.tri_plus = tris[0];
                e.tri_minus = tris[1];
            } else {
                e.tri_plus = tris[1];
                e.tri_minus = tris[0];
            }
        } else {
            throw Error("MESH_INVALID", "edge shared by more than two triangles");
        }
        edge_index[key] = static_cast<int>(mesh.edges.size());
        mesh.edges.push_back(e);
    }

    mesh.tri_edges.assign(mesh.num_triangles(), {-1, -1, -1});
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            int a = tri[(i + 1) % 3];
            int b = tri[(i + 2) % 3];
            mesh.tri_edges[t][i] = edge_index.at({std::min(a, b), std::max(a, b)});
        }
    }
}

} // namespace

void validate_mesh(const Mesh& mesh) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.signed_area(t) <= 0.0)
            throw Error("MESH_INVALID", "triangle " + std::to_string(t) + " not counterclockwise");
    }
    bool has_dirichlet = false, has_neumann = false;
    for (const Edge& e : mesh.edges) {
        if (e.on_boundary()) {
            if (e.label == BoundaryLabel::None)
                throw Error("MESH_INVALID", "boundary edge without label");
            if (e.label == BoundaryLabel::Dirichlet) has_dirichlet = true;
            if (e.label == BoundaryLabel::Neumann) has_neumann = true;
            Vec2 mid = 0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]);
            if (e.normal.dot(mesh.centroid(e.tri_minus) - mid) >= 0.0)
                throw Error("MESH_INVALID", "boundary normal not outward");
        } else {
            if (e.label != BoundaryLabel::None)
                throw Error("MESH_INVALID", "interior edge carries a boundary label");
            if (e.normal.dot(mesh.centroid(e.tri_plus) - mesh.centroid(e.tri_minus)) <= 0.0)
                throw Error("MESH_INVALID", "interior edge normal does not point into tri_plus");
        }
    }
    if (!has_dirichlet || !has_neumann)
        throw Error("MESH_INVALID", "boundary must contain both Dirichlet and Neumann parts");

    // Each Gamma_N vertex must be connected by an edge to a non-Gamma_N vertex.
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!mesh.vertex_on_neumann(v)) continue;
        bool ok = false;
        for (const Edge& e : mesh.edges) {
            int other = (e.v0 == v) ? e.v1 : (e.v1 == v) ? e.v0 : -1;
            if (other >= 0 && !mesh.vertex_on_neumann(other)) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw Error("NO_INTERIOR_NEIGHBOR",
                        "Gamma_N vertex " + std::to_string(v) + " has no eligible adopter");
    }
}

Mesh make_mesh(std::vector<Vec2> vertices,
               std::vector<std::array<int, 3>> triangles,
               const std::vector<std::pair<std::array<int, 2>, BoundaryLabel>>& boundary_labels) {
    Mesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.triangles = std::move(triangles);
    build_edges(mesh, boundary_labels);
    validate_mesh(mesh);
    return mesh;
}

Mesh build_cook_mesh(int refinement_level) {
    if (refinement_level < 0) throw Error("BAD_ARGUMENT", "refinement level must be >= 0");

    const Vec2 c0(0.0, 0.0), c1(0.48, 0.44), c2(0.48, 0.6), c3(0.0, 0.44);
    const Vec2 center = 0.25 * (c0 + c1 + c2 + c3);

    // Four-triangle fan around the centroid: every corner where two Neumann
    // segments meet keeps an interior edge under red refinement, which the
    // partition-of-unity construction requires.
    std::vector<Vec2> verts = {c0, c1, c2, c3, center};
    std::vector<std::array<int, 3>> tris = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
    std::vector<std::pair<std::array<int, 2>, BoundaryLabel>> labels = {
        {{3, 0}, BoundaryLabel::Dirichlet}, // left segment
        {{0, 1}, BoundaryLabel::Neumann},   // bottom
        {{1, 2}, BoundaryLabel::Neumann},   // right
        {{2, 3}, BoundaryLabel::Neumann},   // top
    };

    Mesh mesh = make_mesh(std::move(verts), std::move(tris), labels);
    for (int l = 0; l < refinement_level; ++l) mesh = refine_uniform(mesh);
    return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
    Mesh fine;
    fine.refinement_level = mesh.refinement_level + 1;
    fine.vertices = mesh.vertices;
    fine.vertices.reserve(mesh.num_vertices() + mesh.num_edges());

    // New vertex per edge: index = old vertex count + edge index.
    int nv = mesh.num_vertices();
    for (const Edge& e : mesh.edges) {
        fine.vertices.push_back(0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]));
    }

    std::vector<std::pair<std::array<int, 2>, BoundaryLabel>> labels;
    for (int ei = 0; ei < mesh.num_edges(); ++ei) {
        const Edge& e = mesh.edges[ei];
        if (e.label == BoundaryLabel::None) continue;
        int m = nv + ei;
        labels.push_back({{e.v0, m}, e.label});
        labels.push_back({{m, e.v1}, e.label});
    }

    fine.triangles.reserve(4 * mesh.num_triangles());
    fine.parent_triangle.reserve(4 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        // Midpoint opposite local vertex i.
        int m0 = nv + mesh.tri_edges[t][0];
        int m1 = nv + mesh.tri_edges[t][1];
        int m2 = nv + mesh.tri_edges[t][2];
        fine.triangles.push_back({tri[0], m2, m1});
        fine.triangles.push_back({tri[1], m0, m2});
        fine.triangles.push_back({tri[2], m1, m0});
        fine.triangles.push_back({m0, m1, m2});
        for (int k = 0; k < 4; ++k) fine.parent_triangle.push_back(t);
    }

    build_edges(fine, labels);
    validate_mesh(fine);
    return fine;
}

} // namespace stresseq
