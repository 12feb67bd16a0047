// SPDX-License-Identifier: Apache-2.0
#include "stresseq/taylor_hood.hpp"

namespace stresseq {

std::array<double, 6> p2_values(double b0, double b1, double b2) {
    return {
        b0 * (2.0 * b0 - 1.0),
        b1 * (2.0 * b1 - 1.0),
        b2 * (2.0 * b2 - 1.0),
        4.0 * b1 * b2,
        4.0 * b2 * b0,
        4.0 * b0 * b1,
    };
}

std::array<Vec2, 6> p2_gradients(const Mesh& mesh, int tri, double b0, double b1, double b2) {
    auto g = mesh.hat_gradients(tri);
    return {
        (4.0 * b0 - 1.0) * g[0],
        (4.0 * b1 - 1.0) * g[1],
        (4.0 * b2 - 1.0) * g[2],
        4.0 * (b2 * g[1] + b1 * g[2]),
        4.0 * (b0 * g[2] + b2 * g[0]),
        4.0 * (b1 * g[0] + b0 * g[1]),
    };
}

TaylorHoodSpace::TaylorHoodSpace(const Mesh& mesh)
    : mesh_(&mesh), n_p2_nodes_(mesh.num_vertices() + mesh.num_edges()) {
    dirichlet_node_.assign(n_p2_nodes_, 0);
    for (int ei = 0; ei < mesh.num_edges(); ++ei) {
        const Edge& e = mesh.edges[ei];
        if (e.label != BoundaryLabel::Dirichlet) continue;
        dirichlet_node_[e.v0] = 1;
        dirichlet_node_[e.v1] = 1;
        dirichlet_node_[mesh.num_vertices() + ei] = 1;
    }
    for (int n = 0; n < n_p2_nodes_; ++n) {
        if (dirichlet_node_[n]) {
            dirichlet_dofs_.push_back(2 * n);
            dirichlet_dofs_.push_back(2 * n + 1);
        }
    }
}

int TaylorHoodSpace::p2_node(int tri, int local) const {
    if (local < 3) return mesh_->triangles[tri][local];
    return mesh_->num_vertices() + mesh_->tri_edges[tri][local - 3];
}

Vec2 TaylorHoodSpace::node_position(int node) const {
    if (node < mesh_->num_vertices()) return mesh_->vertices[node];
    const Edge& e = mesh_->edges[node - mesh_->num_vertices()];
    return 0.5 * (mesh_->vertices[e.v0] + mesh_->vertices[e.v1]);
}

DisplacementPressureField DisplacementPressureField::zero(const TaylorHoodSpace& space) {
    DisplacementPressureField f;
    f.space = &space;
    f.u = Eigen::VectorXd::Zero(space.num_displacement_dofs());
    f.p = Eigen::VectorXd::Zero(space.num_pressure_dofs());
    return f;
}

Vec2 DisplacementPressureField::displacement(int tri, double b0, double b1, double b2) const {
    auto vals = p2_values(b0, b1, b2);
    Vec2 out = Vec2::Zero();
    for (int i = 0; i < 6; ++i) {
        int node = space->p2_node(tri, i);
        out.x() += vals[i] * u[2 * node];
        out.y() += vals[i] * u[2 * node + 1];
    }
    return out;
}

Mat2 DisplacementPressureField::displacement_gradient(int tri, double b0, double b1,
                                                      double b2) const {
    auto grads = p2_gradients(space->mesh(), tri, b0, b1, b2);
    Mat2 h = Mat2::Zero();
    for (int i = 0; i < 6; ++i) {
        int node = space->p2_node(tri, i);
        h.row(0) += u[2 * node] * grads[i].transpose();
        h.row(1) += u[2 * node + 1] * grads[i].transpose();
    }
    return h;
}

double DisplacementPressureField::pressure(int tri, double b0, double b1, double b2) const {
    const auto& t = space->mesh().triangles[tri];
    return b0 * p[t[0]] + b1 * p[t[1]] + b2 * p[t[2]];
}

Mat2 DisplacementPressureField::deformation_gradient(int tri, double b0, double b1,
                                                     double b2) const {
    return Mat2::Identity() + displacement_gradient(tri, b0, b1, b2);
}

} // namespace stresseq
