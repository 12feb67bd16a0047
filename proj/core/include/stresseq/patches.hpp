// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/mesh.hpp"

#include <vector>

namespace stresseq {

enum class PatchKind { Interior, Dirichlet };

/// Vertex patch of the modified partition of unity.
///
/// The hat function phi_z is piecewise linear with nodal value 1 at the
/// center and at every adopted Gamma_N vertex, 0 elsewhere; its support
/// omega_z is the union of the stars of those vertices.
struct VertexPatch {
    int center = -1;
    std::vector<int> adopted;        // Gamma_N vertices owned by this patch
    std::vector<int> elements;       // triangles of omega_z, ascending
    std::vector<int> nodes;          // vertices of closure(omega_z), ascending
    PatchKind kind = PatchKind::Interior;

    // Edge sets relative to the patch:
    std::vector<int> constraint_sides; // S_{h,z}: interior-to-patch + Gamma_N sides
    std::vector<int> zero_sides;       // on boundary(omega_z) \ boundary(Omega): q.n = 0
    std::vector<int> dirichlet_sides;  // on Gamma_D: free normal trace

    bool contains_element(int tri) const;

    /// phi_z at a barycentric point of element tri (0 if tri outside omega_z).
    double phi(const Mesh& mesh, int tri, double b0, double b1, double b2) const;

    /// Constant gradient of phi_z on element tri.
    Vec2 phi_gradient(const Mesh& mesh, int tri) const;

    /// Nodal values (0 or 1) of phi_z on the three vertices of tri.
    std::array<double, 3> phi_nodal(const Mesh& mesh, int tri) const;
};

struct PatchSet {
    std::vector<VertexPatch> patches;                 // ordered by center index
    std::vector<int> patch_of_center;                 // vertex -> patch index or -1
    std::vector<int> adopter_of;                      // Gamma_N vertex -> center, else -1
    std::vector<std::vector<int>> patches_on_element; // triangle -> patch indices

    const VertexPatch& patch_for_center(int vertex) const {
        return patches[patch_of_center[vertex]];
    }
};

/// One patch per vertex not on Gamma_N; each Gamma_N vertex is adopted by its
/// edge-connected non-Gamma_N neighbor of smallest index.
PatchSet build_patches(const Mesh& mesh);

} // namespace stresseq
