// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/min_norm.hpp"
#include "stresseq/projection.hpp"

namespace stresseq {

/// Test-space flavor of the patch problems. Deformed replaces the rigid
/// modes of the element and side test spaces by their current-configuration
/// counterparts (the production choice); Undeformed keeps plain piecewise
/// P1 test spaces (the diagnostic baseline).
enum class TestSpaceVariant { Deformed, Undeformed };

/// Assembled constraint system of one vertex-patch problem.
///
/// Rows: per element the six element tests, then per constraint side the
/// four side tests, then one weak-symmetry row per P1 node of the patch.
/// Columns: the broken RT dofs of the patch elements minus the normal-trace
/// dofs pinned to zero on boundary(omega_z) \ boundary(Omega).
struct LocalSystem {
    const VertexPatch* patch = nullptr;
    TestSpaceVariant variant = TestSpaceVariant::Deformed;

    struct Column {
        int tri;
        int row;
        int dof;
    };
    std::vector<Column> columns;
    std::vector<std::array<std::array<int, 8>, 2>> column_of; // [elem idx][row][dof] -> col or -1

    Eigen::MatrixXd C;
    Eigen::VectorXd b;
    Eigen::MatrixXd M;       // objective mass (patch L2 norm of the correction)
    Eigen::MatrixXd x_gram;  // L2 Gram of the weak-symmetry multiplier space

    int n_element_rows = 0;
    int n_side_rows = 0;
    int n_sym_rows = 0;
    int rows() const { return n_element_rows + n_side_rows + n_sym_rows; }
    int cols() const { return static_cast<int>(columns.size()); }

    int element_row(int elem_idx, int test) const { return 6 * elem_idx + test; }
    int side_row(int side_idx, int test) const { return n_element_rows + 4 * side_idx + test; }
    int sym_row(int node_idx) const { return n_element_rows + n_side_rows + node_idx; }
};

/// Values of the six element test functions at a barycentric point:
/// translations, the (deformed) rotation, and three centered symmetric-
/// gradient complement modes.
std::array<Vec2, 6> element_test_values(const PipelineInputs& in, TestSpaceVariant variant,
                                        int tri, double b0, double b1, double b2);

/// Values of the four side test functions at edge parameter s: translations,
/// the (deformed) rotation, and the (deformed) position mode.
std::array<Vec2, 4> side_test_values(const PipelineInputs& in, TestSpaceVariant variant,
                                     int edge_id, double s);

LocalSystem build_local_system(const PipelineInputs& in, const VertexPatch& patch,
                               const ProjectedStressField& stress, const ProjectedLoadField& load,
                               const SurfaceLoad& g,
                               TestSpaceVariant variant = TestSpaceVariant::Deformed);

/// Exact null vectors of the adjoint predicted by the rigid-mode
/// characterization, one column per mode; empty for Dirichlet patches.
Eigen::MatrixXd predicted_adjoint_null(const PipelineInputs& in, const LocalSystem& system);

/// Max over the predicted null modes of |y^T b| / (||y|| (1 + ||b||));
/// 0 by convention for Dirichlet patches.
double check_compatibility(const PipelineInputs& in, const LocalSystem& system);

struct PatchSolution {
    ConstrainedMinNorm solution;
    double constraint_residual = 0.0; // ||C x - b|| / (1 + ||b||)
};

/// Minimum-norm patch solve; throws INCOMPATIBLE_RHS when b is farther from
/// range(C) than 1e-9 relative (unless allow_incompatible), and
/// NULLSPACE_MISMATCH when the computed rank disagrees with the rigid-mode
/// prediction.
PatchSolution solve_patch(const LocalSystem& system, bool allow_incompatible = false);

/// Discrete inf-sup constant of the weak-symmetry coupling restricted to the
/// divergence- and jump-free subspace: the smallest nonzero singular value in
/// the natural norms.
double numerical_infsup(const LocalSystem& system);

/// Scatter a patch solution into a global broken RT correction field.
void accumulate_correction(const LocalSystem& system, const Eigen::VectorXd& x,
                           BrokenRTStress& correction);

} // namespace stresseq
