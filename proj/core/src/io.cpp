// SPDX-License-Identifier: Apache-2.0
#include "stresseq/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <memory>

namespace stresseq {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_write(const std::string& path) {
    File f(std::fopen(path.c_str(), "w"));
    if (!f) throw Error("IO_ERROR", "cannot open " + path + " for writing");
    return f;
}

File open_read(const std::string& path) {
    File f(std::fopen(path.c_str(), "r"));
    if (!f) throw Error("IO_ERROR", "cannot open " + path);
    return f;
}

} // namespace

void write_mesh_text(const Mesh& mesh, const std::string& path) {
    File f = open_write(path);
    std::fprintf(f.get(), "# vertices %d\n", mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        std::fprintf(f.get(), "%d %.17g %.17g\n", v, mesh.vertices[v].x(), mesh.vertices[v].y());
    }
    std::fprintf(f.get(), "# triangles %d\n", mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        std::fprintf(f.get(), "%d %d %d %d\n", t, tr[0], tr[1], tr[2]);
    }
    int nb = 0;
    for (const Edge& e : mesh.edges) nb += e.on_boundary();
    std::fprintf(f.get(), "# boundary %d\n", nb);
    int id = 0;
    for (const Edge& e : mesh.edges) {
        if (!e.on_boundary()) continue;
        std::fprintf(f.get(), "%d %d %d %c\n", id++, e.v0, e.v1,
                     e.label == BoundaryLabel::Dirichlet ? 'D' : 'N');
    }
}

void write_mesh_vtk(const Mesh& mesh, const std::string& path,
                    const DisplacementPressureField* field) {
    File f = open_write(path);
    std::fprintf(f.get(), "# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    std::fprintf(f.get(), "POINTS %d double\n", mesh.num_vertices());
    for (const Vec2& v : mesh.vertices) {
        std::fprintf(f.get(), "%.17g %.17g 0\n", v.x(), v.y());
    }
    std::fprintf(f.get(), "CELLS %d %d\n", mesh.num_triangles(), 4 * mesh.num_triangles());
    for (const auto& t : mesh.triangles) {
        std::fprintf(f.get(), "3 %d %d %d\n", t[0], t[1], t[2]);
    }
    std::fprintf(f.get(), "CELL_TYPES %d\n", mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) std::fprintf(f.get(), "5\n");
    if (field) {
        std::fprintf(f.get(), "POINT_DATA %d\nVECTORS displacement double\n", mesh.num_vertices());
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            std::fprintf(f.get(), "%.17g %.17g 0\n", field->u[2 * v], field->u[2 * v + 1]);
        }
        std::fprintf(f.get(), "SCALARS pressure double 1\nLOOKUP_TABLE default\n");
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            std::fprintf(f.get(), "%.17g\n", field->p[v]);
        }
    }
}

void write_checkpoint(const DisplacementPressureField& field, const MaterialParams& params,
                      double gamma, const std::string& path) {
    File f = open_write(path);
    std::fprintf(f.get(), "stresseq-checkpoint 1\n");
    std::fprintf(f.get(), "mesh_hash %" PRIu64 "\n", field.space->mesh().content_hash());
    std::fprintf(f.get(), "degree 1\n");
    std::fprintf(f.get(), "mu %.17g\n", params.mu);
    if (params.incompressible()) {
        std::fprintf(f.get(), "lambda inf\n");
    } else {
        std::fprintf(f.get(), "lambda %.17g\n", params.lambda);
    }
    std::fprintf(f.get(), "gamma %.17g\n", gamma);
    std::fprintf(f.get(), "u %d\n", static_cast<int>(field.u.size()));
    for (int i = 0; i < field.u.size(); ++i) std::fprintf(f.get(), "%.17g\n", field.u[i]);
    std::fprintf(f.get(), "p %d\n", static_cast<int>(field.p.size()));
    for (int i = 0; i < field.p.size(); ++i) std::fprintf(f.get(), "%.17g\n", field.p[i]);
}

Checkpoint read_checkpoint(const std::string& path) {
    File f = open_read(path);
    Checkpoint chk;
    char tag[64];
    int version = 0;
    if (std::fscanf(f.get(), "%63s %d", tag, &version) != 2 ||
        std::string(tag) != "stresseq-checkpoint" || version != 1)
        throw Error("IO_ERROR", "not a checkpoint file: " + path);

    auto expect_key = [&](const char* key) {
        if (std::fscanf(f.get(), "%63s", tag) != 1 || std::string(tag) != key)
            throw Error("IO_ERROR", std::string("expected key ") + key + " in " + path);
    };
    expect_key("mesh_hash");
    if (std::fscanf(f.get(), "%" SCNu64, &chk.mesh_hash) != 1)
        throw Error("IO_ERROR", "bad mesh hash");
    expect_key("degree");
    if (std::fscanf(f.get(), "%d", &chk.degree) != 1) throw Error("IO_ERROR", "bad degree");
    expect_key("mu");
    if (std::fscanf(f.get(), "%lf", &chk.params.mu) != 1) throw Error("IO_ERROR", "bad mu");
    expect_key("lambda");
    if (std::fscanf(f.get(), "%63s", tag) != 1) throw Error("IO_ERROR", "bad lambda");
    if (std::string(tag) == "inf") {
        chk.params.lambda = std::numeric_limits<double>::infinity();
    } else {
        chk.params.lambda = std::stod(tag);
    }
    expect_key("gamma");
    if (std::fscanf(f.get(), "%lf", &chk.gamma) != 1) throw Error("IO_ERROR", "bad gamma");

    auto read_array = [&](const char* key, Eigen::VectorXd& out) {
        expect_key(key);
        int n = 0;
        if (std::fscanf(f.get(), "%d", &n) != 1 || n < 0)
            throw Error("IO_ERROR", std::string("bad array size for ") + key);
        out.resize(n);
        for (int i = 0; i < n; ++i) {
            if (std::fscanf(f.get(), "%lf", &out[i]) != 1)
                throw Error("IO_ERROR", std::string("bad array entry in ") + key);
        }
    };
    read_array("u", chk.u);
    read_array("p", chk.p);
    return chk;
}

DisplacementPressureField restore_field(const Checkpoint& chk, const TaylorHoodSpace& space) {
    if (chk.mesh_hash != space.mesh().content_hash())
        throw Error("IO_ERROR", "checkpoint mesh hash does not match the mesh");
    if (chk.u.size() != space.num_displacement_dofs() ||
        chk.p.size() != space.num_pressure_dofs())
        throw Error("IO_ERROR", "checkpoint coefficient sizes do not match the space");
    DisplacementPressureField field;
    field.space = &space;
    field.u = chk.u;
    field.p = chk.p;
    return field;
}

void write_stress_coefficients(const BrokenRTStress& stress, const std::string& path) {
    File f = open_write(path);
    const Mesh& mesh = stress.table->mesh();
    std::fprintf(f.get(), "# broken RT1 coefficients: tri row dof value\n");
    std::fprintf(f.get(), "# dofs 0..5: edge (mean, linear) per local edge; 6..7: means\n");
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (int r = 0; r < 2; ++r) {
            for (int k = 0; k < 8; ++k) {
                std::fprintf(f.get(), "%d %d %d %.17g\n", t, r, k, stress.dof(t, r, k));
            }
        }
    }
    std::fprintf(f.get(), "# centroid values: tri x y P00 P01 P10 P11\n");
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        Vec2 c = mesh.centroid(t);
        Mat2 P = stress.value(t, c);
        std::fprintf(f.get(), "%d %.17g %.17g %.17g %.17g %.17g %.17g\n", t, c.x(), c.y(),
                     P(0, 0), P(0, 1), P(1, 0), P(1, 1));
    }
}

void write_profile_csv(const TractionProfile& naive, const TractionProfile& reconstructed,
                       const std::string& path) {
    File f = open_write(path);
    std::fprintf(f.get(), "arclength,naive_nn,equilibrated_nn\n");
    size_t n = std::min(naive.samples.size(), reconstructed.samples.size());
    for (size_t i = 0; i < n; ++i) {
        std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", naive.samples[i].arclength,
                     naive.samples[i].value, reconstructed.samples[i].value);
    }
}

void write_verification_csv(const std::vector<NullSpaceReport>& reports,
                            const std::string& path) {
    File f = open_write(path);
    std::fprintf(f.get(),
                 "patch_id,kind,dim_computed,dim_predicted,principal_angle,"
                 "incompat_naive,incompat_compatible\n");
    for (const NullSpaceReport& r : reports) {
        std::fprintf(f.get(), "%d,%s,%d,%d,%.17g,%.17g,%.17g\n", r.center,
                     r.kind == PatchKind::Interior ? "interior" : "dirichlet", r.dim_computed,
                     r.dim_predicted, r.principal_angle, r.incompat_naive, r.incompat_compatible);
    }
}

void write_audit_csv(const AuditReport& audit, const std::string& path) {
    File f = open_write(path);
    std::fprintf(f.get(), "family,relative_residual\n");
    std::fprintf(f.get(), "element_divergence,%.17g\n", audit.element_divergence);
    std::fprintf(f.get(), "side_jumps,%.17g\n", audit.side_jumps);
    std::fprintf(f.get(), "neumann_trace,%.17g\n", audit.neumann_trace);
    std::fprintf(f.get(), "weak_symmetry,%.17g\n", audit.weak_symmetry);
    std::fprintf(f.get(), "scale,%.17g\n", audit.scale);
}

} // namespace stresseq
