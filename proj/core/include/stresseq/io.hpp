// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/diagnostics.hpp"
#include "stresseq/verification.hpp"

#include <string>

namespace stresseq {

/// Plain-text mesh export. Column order:
///   vertices:  id x y
///   triangles: id v0 v1 v2
///   boundary:  id v0 v1 label   (label D or N)
void write_mesh_text(const Mesh& mesh, const std::string& path);

/// Legacy-VTK ASCII export; when a field is given, the deformed positions
/// are written as point data (VECTORS displacement).
void write_mesh_vtk(const Mesh& mesh, const std::string& path,
                    const DisplacementPressureField* field = nullptr);

/// Checkpoint: header (mesh hash, polynomial degree, mu, lambda, gamma)
/// followed by the displacement and pressure coefficient arrays, printed
/// with round-trip-exact precision.
void write_checkpoint(const DisplacementPressureField& field, const MaterialParams& params,
                      double gamma, const std::string& path);

struct Checkpoint {
    std::uint64_t mesh_hash = 0;
    int degree = 1;
    MaterialParams params;
    double gamma = 0.0;
    Eigen::VectorXd u, p;
};
Checkpoint read_checkpoint(const std::string& path);

/// Attach checkpoint coefficients to a space (validates sizes and mesh hash).
DisplacementPressureField restore_field(const Checkpoint& chk, const TaylorHoodSpace& space);

/// Per-element RT coefficient table: tri row dof value, plus an
/// evaluation dump (centroid values) for plotting.
void write_stress_coefficients(const BrokenRTStress& stress, const std::string& path);

void write_profile_csv(const TractionProfile& naive, const TractionProfile& reconstructed,
                       const std::string& path);

void write_verification_csv(const std::vector<NullSpaceReport>& reports, const std::string& path);

void write_audit_csv(const AuditReport& audit, const std::string& path);

} // namespace stresseq
