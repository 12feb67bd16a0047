// SPDX-License-Identifier: Apache-2.0
#include "stresseq/io.hpp"
#include "stresseq/newton.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stresseq;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / "stresseq_io_test";
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("checkpoint round-trips bit-exactly") {
    Mesh mesh = build_cook_mesh(1);
    TaylorHoodSpace space(mesh);
    MaterialParams params{1.0};
    DisplacementPressureField field = solve_newton(space, params, 0.1);

    TempDir tmp;
    std::string path = tmp.file("checkpoint.txt");
    write_checkpoint(field, params, 0.1, path);
    Checkpoint chk = read_checkpoint(path);
    DisplacementPressureField restored = restore_field(chk, space);

    CHECK(chk.gamma == 0.1);
    CHECK(chk.params.incompressible());
    CHECK((restored.u - field.u).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((restored.p - field.p).lpNorm<Eigen::Infinity>() == 0.0);

    // Writing the restored field reproduces the same bytes.
    std::string path2 = tmp.file("checkpoint2.txt");
    write_checkpoint(restored, chk.params, chk.gamma, path2);
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("checkpoint rejects a mismatched mesh") {
    Mesh mesh = build_cook_mesh(1);
    TaylorHoodSpace space(mesh);
    MaterialParams params{1.0};
    DisplacementPressureField field = DisplacementPressureField::zero(space);

    TempDir tmp;
    std::string path = tmp.file("checkpoint.txt");
    write_checkpoint(field, params, 0.0, path);
    Checkpoint chk = read_checkpoint(path);

    Mesh other = build_cook_mesh(2);
    TaylorHoodSpace other_space(other);
    CHECK_THROWS_WITH_AS(restore_field(chk, other_space), doctest::Contains("IO_ERROR"), Error);
}

TEST_CASE("solver reruns are bit-identical") {
    Mesh mesh = build_cook_mesh(1);
    TaylorHoodSpace space(mesh);
    MaterialParams params{1.0};
    DisplacementPressureField a = solve_newton(space, params, 0.2);
    DisplacementPressureField b = solve_newton(space, params, 0.2);
    CHECK((a.u - b.u).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((a.p - b.p).lpNorm<Eigen::Infinity>() == 0.0);

    TempDir tmp;
    write_checkpoint(a, params, 0.2, tmp.file("a.txt"));
    write_checkpoint(b, params, 0.2, tmp.file("b.txt"));
    CHECK(slurp(tmp.file("a.txt")) == slurp(tmp.file("b.txt")));
}

TEST_CASE("mesh exports are readable and complete") {
    Mesh mesh = build_cook_mesh(1);
    TempDir tmp;
    write_mesh_text(mesh, tmp.file("mesh.txt"));
    std::string text = slurp(tmp.file("mesh.txt"));
    CHECK(text.find("# vertices 13") != std::string::npos);
    CHECK(text.find("# triangles 16") != std::string::npos);

    TaylorHoodSpace space(mesh);
    DisplacementPressureField field = DisplacementPressureField::zero(space);
    write_mesh_vtk(mesh, tmp.file("mesh.vtk"), &field);
    std::string vtk = slurp(tmp.file("mesh.vtk"));
    CHECK(vtk.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
    CHECK(vtk.find("VECTORS displacement double") != std::string::npos);

    RTBasisTable rt(mesh);
    BrokenRTStress stress = BrokenRTStress::zero(rt);
    write_stress_coefficients(stress, tmp.file("stress.txt"));
    CHECK(slurp(tmp.file("stress.txt")).find("broken RT1 coefficients") != std::string::npos);
}
