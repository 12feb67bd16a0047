// SPDX-License-Identifier: Apache-2.0
#include "stresseq/patches.hpp"

#include <algorithm>
#include <set>

namespace stresseq {

bool VertexPatch::contains_element(int tri) const {
    return std::binary_search(elements.begin(), elements.end(), tri);
}

std::array<double, 3> VertexPatch::phi_nodal(const Mesh& mesh, int tri) const {
    const auto& t = mesh.triangles[tri];
    std::array<double, 3> vals = {0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        int v = t[i];
        if (v == center || std::binary_search(adopted.begin(), adopted.end(), v)) vals[i] = 1.0;
    }
    return vals;
}

double VertexPatch::phi(const Mesh& mesh, int tri, double b0, double b1, double b2) const {
    if (!contains_element(tri)) return 0.0;
    auto vals = phi_nodal(mesh, tri);
    return vals[0] * b0 + vals[1] * b1 + vals[2] * b2;
}

Vec2 VertexPatch::phi_gradient(const Mesh& mesh, int tri) const {
    if (!contains_element(tri)) return Vec2::Zero();
    auto vals = phi_nodal(mesh, tri);
    auto grads = mesh.hat_gradients(tri);
    return vals[0] * grads[0] + vals[1] * grads[1] + vals[2] * grads[2];
}

PatchSet build_patches(const Mesh& mesh) {
    const int nv = mesh.num_vertices();

    std::vector<std::vector<int>> vertex_tris(nv);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (int v : mesh.triangles[t]) vertex_tris[v].push_back(t);
    }
    std::vector<std::vector<int>> neighbors(nv);
    for (const Edge& e : mesh.edges) {
        neighbors[e.v0].push_back(e.v1);
        neighbors[e.v1].push_back(e.v0);
    }

    PatchSet set;
    set.patch_of_center.assign(nv, -1);
    set.adopter_of.assign(nv, -1);

    for (int v = 0; v < nv; ++v) {
        if (!mesh.vertex_on_neumann(v)) continue;
        int adopter = -1;
        for (int w : neighbors[v]) {
            if (!mesh.vertex_on_neumann(w) && (adopter < 0 || w < adopter)) adopter = w;
        }
        if (adopter < 0)
            throw Error("NO_INTERIOR_NEIGHBOR",
                        "Gamma_N vertex " + std::to_string(v) + " has no eligible adopter");
        set.adopter_of[v] = adopter;
    }

    for (int z = 0; z < nv; ++z) {
        if (mesh.vertex_on_neumann(z)) continue;
        VertexPatch patch;
        patch.center = z;
        for (int v = 0; v < nv; ++v) {
            if (set.adopter_of[v] == z) patch.adopted.push_back(v);
        }

        std::set<int> elems(vertex_tris[z].begin(), vertex_tris[z].end());
        for (int v : patch.adopted) elems.insert(vertex_tris[v].begin(), vertex_tris[v].end());
        patch.elements.assign(elems.begin(), elems.end());

        std::set<int> nodes;
        for (int t : patch.elements) {
            for (int v : mesh.triangles[t]) nodes.insert(v);
        }
        patch.nodes.assign(nodes.begin(), nodes.end());

        patch.kind = PatchKind::Interior;
        for (int ei = 0; ei < mesh.num_edges(); ++ei) {
            const Edge& e = mesh.edges[ei];
            bool in_minus = elems.count(e.tri_minus) > 0;
            bool in_plus = e.tri_plus >= 0 && elems.count(e.tri_plus) > 0;
            if (!in_minus && !in_plus) continue;
            if (e.on_boundary()) {
                if (e.label == BoundaryLabel::Dirichlet) {
                    patch.dirichlet_sides.push_back(ei);
                    patch.kind = PatchKind::Dirichlet;
                } else {
                    patch.constraint_sides.push_back(ei);
                }
            } else if (in_minus && in_plus) {
                patch.constraint_sides.push_back(ei);
            } else {
                patch.zero_sides.push_back(ei);
            }
        }

        set.patch_of_center[z] = static_cast<int>(set.patches.size());
        set.patches.push_back(std::move(patch));
    }

    set.patches_on_element.assign(mesh.num_triangles(), {});
    for (int p = 0; p < static_cast<int>(set.patches.size()); ++p) {
        for (int t : set.patches[p].elements) set.patches_on_element[t].push_back(p);
    }
    return set;
}

} // namespace stresseq
