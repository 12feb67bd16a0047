// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace stresseq {

/// Values of the six P2 shape functions at a barycentric point.
/// Local nodes 0..2 are the triangle vertices, 3..5 the edge midpoints,
/// midpoint i opposite vertex i.
std::array<double, 6> p2_values(double b0, double b1, double b2);

/// Physical-space gradients of the six P2 shape functions on a triangle.
std::array<Vec2, 6> p2_gradients(const Mesh& mesh, int tri, double b0, double b1, double b2);

inline std::array<double, 3> p1_values(double b0, double b1, double b2) {
    return {b0, b1, b2};
}

/// Taylor-Hood pair: continuous vector P2 displacement with the homogeneous
/// condition on Gamma_D, continuous scalar P1 pressure.
///
/// P2 node numbering: vertices first, then one node per edge (midpoints).
/// Displacement dof = 2*node + component; pressure dofs follow the
/// displacement block, one per vertex.
class TaylorHoodSpace {
public:
    explicit TaylorHoodSpace(const Mesh& mesh);

    const Mesh& mesh() const { return *mesh_; }

    int num_p2_nodes() const { return n_p2_nodes_; }
    int num_displacement_dofs() const { return 2 * n_p2_nodes_; }
    int num_pressure_dofs() const { return mesh_->num_vertices(); }
    int num_dofs() const { return num_displacement_dofs() + num_pressure_dofs(); }

    int p2_node(int tri, int local) const; // local in [0,6)
    int displacement_dof(int node, int comp) const { return 2 * node + comp; }
    int pressure_dof(int vertex) const { return num_displacement_dofs() + vertex; }

    bool node_on_dirichlet(int node) const { return dirichlet_node_[node] != 0; }
    const std::vector<int>& dirichlet_dofs() const { return dirichlet_dofs_; }

    Vec2 node_position(int node) const;

private:
    const Mesh* mesh_;
    int n_p2_nodes_;
    std::vector<std::uint8_t> dirichlet_node_;
    std::vector<int> dirichlet_dofs_;
};

/// Coefficients of a displacement-pressure iterate on a TaylorHoodSpace.
struct DisplacementPressureField {
    const TaylorHoodSpace* space = nullptr;
    Eigen::VectorXd u; // size 2 * num_p2_nodes
    Eigen::VectorXd p; // size num_vertices

    static DisplacementPressureField zero(const TaylorHoodSpace& space);

    Vec2 displacement(int tri, double b0, double b1, double b2) const;
    Mat2 displacement_gradient(int tri, double b0, double b1, double b2) const;
    double pressure(int tri, double b0, double b1, double b2) const;

    /// F = I + grad(u) at a barycentric point.
    Mat2 deformation_gradient(int tri, double b0, double b1, double b2) const;
};

} // namespace stresseq
