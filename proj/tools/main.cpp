// SPDX-License-Identifier: Apache-2.0
//
// Batch driver for the Cook's-membrane experiment: solve the incompressible
// Neo-Hookean problem, reconstruct an H(div)-conforming stress, verify the
// patch null-space structure, and emit the result tables and profiles.

#include "stresseq/io.hpp"
#include "stresseq/newton.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

using namespace stresseq;

namespace {

struct RunConfig {
    double gamma = 0.2;
    std::vector<int> levels = {3};
    double mu = 1.0;
    double lambda = std::numeric_limits<double>::infinity(); // "inf"
    int load_steps = 4;
    ProjectionMode mode = ProjectionMode::Compatible;
    std::string out = "out";
    bool strict = false;
    unsigned seed = 0; // randomized property tests only; kept for reproducibility

    MaterialParams material() const { return MaterialParams{mu, lambda}; }
};

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> levels;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) levels.push_back(std::stoi(item));
    }
    return levels;
}

double parse_lambda(const std::string& text) {
    if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
    return std::stod(text);
}

// Flat key-value config file; unknown keys are an error. Command-line flags
// override file values.
void apply_config_file(const std::string& path, RunConfig& cfg,
                       const std::map<std::string, bool>& overridden) {
    std::ifstream in(path);
    if (!in) throw Error("IO_ERROR", "cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("BAD_CONFIG", "line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto is_set = [&](const char* k) {
            auto it = overridden.find(k);
            return it != overridden.end() && it->second;
        };
        if (key == "gamma") {
            if (!is_set("gamma")) cfg.gamma = std::stod(value);
        } else if (key == "levels") {
            if (!is_set("levels")) cfg.levels = parse_levels(value);
        } else if (key == "mu") {
            if (!is_set("mu")) cfg.mu = std::stod(value);
        } else if (key == "lambda") {
            if (!is_set("lambda")) cfg.lambda = parse_lambda(value);
        } else if (key == "load_steps") {
            if (!is_set("load_steps")) cfg.load_steps = std::stoi(value);
        } else if (key == "mode") {
            if (!is_set("mode"))
                cfg.mode = (value == "naive") ? ProjectionMode::Naive : ProjectionMode::Compatible;
        } else if (key == "out") {
            if (!is_set("out")) cfg.out = value;
        } else if (key == "strict") {
            if (!is_set("strict")) cfg.strict = (value == "1" || value == "true");
        } else if (key == "seed") {
            if (!is_set("seed")) cfg.seed = static_cast<unsigned>(std::stoul(value));
        } else {
            throw Error("BAD_CONFIG", "unknown key " + key);
        }
    }
}

std::string checkpoint_path(const RunConfig& cfg, int level) {
    std::ostringstream ss;
    ss << cfg.out << "/solution_L" << level << "_gamma" << cfg.gamma << ".chk";
    return ss.str();
}

struct LevelContext {
    Mesh mesh;
    TaylorHoodSpace space;
    PatchSet patches;
    RTBasisTable rt;
    DisplacementPressureField field;

    explicit LevelContext(int level)
        : mesh(build_cook_mesh(level)),
          space(mesh),
          patches(build_patches(mesh)),
          rt(mesh),
          field(DisplacementPressureField::zero(space)) {}

    PipelineInputs inputs(const RunConfig& cfg) {
        return PipelineInputs{&mesh, &patches, &rt, &field, cfg.material()};
    }
};

DisplacementPressureField solve_level(const TaylorHoodSpace& space, const RunConfig& cfg,
                                      NewtonLog* log = nullptr) {
    NewtonOptions options;
    options.load_steps = cfg.load_steps;
    return solve_newton(space, cfg.material(), cfg.gamma, options, log);
}

void ensure_outdir(const RunConfig& cfg) { std::filesystem::create_directories(cfg.out); }

int cmd_solve(const RunConfig& cfg) {
    ensure_outdir(cfg);
    for (int level : cfg.levels) {
        LevelContext ctx(level);
        NewtonLog log;
        ctx.field = solve_level(ctx.space, cfg, &log);
        write_checkpoint(ctx.field, cfg.material(), cfg.gamma, checkpoint_path(cfg, level));

        std::string logpath = cfg.out + "/newton_L" + std::to_string(level) + ".log";
        std::ofstream lf(logpath);
        for (const auto& step : log.steps) {
            lf << "load " << step.load << " iterations " << step.iterations
               << " residual " << step.final_residual << "\n";
        }
        write_mesh_text(ctx.mesh, cfg.out + "/mesh_L" + std::to_string(level) + ".txt");
        write_mesh_vtk(ctx.mesh, cfg.out + "/deformed_L" + std::to_string(level) + ".vtk",
                       &ctx.field);
        std::printf("solved level %d: gamma %.17g, dofs %d\n", level, cfg.gamma,
                    ctx.space.num_dofs());
    }
    return 0;
}

int cmd_equilibrate(const RunConfig& cfg, const std::string& checkpoint_override) {
    ensure_outdir(cfg);
    for (int level : cfg.levels) {
        LevelContext ctx(level);
        std::string chk_path =
            checkpoint_override.empty() ? checkpoint_path(cfg, level) : checkpoint_override;
        Checkpoint chk = read_checkpoint(chk_path);
        ctx.field = restore_field(chk, ctx.space);

        PipelineInputs in = ctx.inputs(cfg);
        EquilibrationOptions options;
        options.mode = cfg.mode;
        options.allow_incompatible = (cfg.mode == ProjectionMode::Naive) && !cfg.strict;
        SurfaceLoad g = cook_surface_load(chk.gamma);
        EquilibrationResult eq = equilibrate(in, g, zero_volume_load(), options);

        write_stress_coefficients(eq.reconstruction,
                                  cfg.out + "/stress_L" + std::to_string(level) + ".txt");
        AuditReport audit = momentum_and_symmetry_audit(in, eq, g);
        write_audit_csv(audit, cfg.out + "/audit_L" + std::to_string(level) + ".csv");
        std::printf("equilibrated level %d: %d patches, audit worst %.3e\n", level,
                    eq.patches_solved, audit.worst());
        if (cfg.strict && !audit.pass(1e-9)) {
            std::string violated;
            if (audit.element_divergence > 1e-9) violated += " element_divergence";
            if (audit.side_jumps > 1e-9) violated += " side_jumps";
            if (audit.neumann_trace > 1e-9) violated += " neumann_trace";
            if (audit.weak_symmetry > 1e-9) violated += " weak_symmetry";
            std::fprintf(stderr,
                         "audit failure at level %d: worst residual %.3e > 1e-9; violated:%s\n",
                         level, audit.worst(), violated.c_str());
            return 3;
        }
    }
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    ensure_outdir(cfg);
    for (int level : cfg.levels) {
        LevelContext ctx(level);
        std::string chk_path = checkpoint_path(cfg, level);
        if (std::filesystem::exists(chk_path)) {
            ctx.field = restore_field(read_checkpoint(chk_path), ctx.space);
        } else {
            ctx.field = solve_level(ctx.space, cfg);
        }
        PipelineInputs in = ctx.inputs(cfg);
        std::vector<NullSpaceReport> reports =
            verify_patches(in, cook_surface_load(cfg.gamma), zero_volume_load());
        write_verification_csv(reports, cfg.out + "/verify_L" + std::to_string(level) + ".csv");

        int mismatches = 0;
        double worst_angle = 0.0;
        for (const NullSpaceReport& r : reports) {
            if (r.dim_computed != r.dim_predicted) ++mismatches;
            worst_angle = std::max(worst_angle, r.principal_angle);
        }
        std::printf("verified level %d: %zu patches, %d dimension mismatches, "
                    "max principal angle %.3e\n",
                    level, reports.size(), mismatches, worst_angle);
        if (cfg.strict && mismatches > 0) return 3;
    }
    return 0;
}

int cmd_report(const RunConfig& cfg, const std::vector<double>& gammas_in) {
    if (cfg.levels.empty()) {
        std::fprintf(stderr, "report: empty level list\n");
        return 2;
    }
    ensure_outdir(cfg);
    std::vector<double> gammas = gammas_in.empty() ? std::vector<double>{cfg.gamma} : gammas_in;

    struct Solved {
        std::unique_ptr<LevelContext> ctx;
        EquilibrationResult eq;
    };
    std::map<std::pair<double, int>, Solved> cache;
    auto get = [&](double gamma, int level) -> Solved& {
        auto key = std::make_pair(gamma, level);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        RunConfig local = cfg;
        local.gamma = gamma;
        Solved s{std::make_unique<LevelContext>(level), {}};
        s.ctx->field = solve_level(s.ctx->space, local);
        PipelineInputs in = s.ctx->inputs(local);
        s.eq = equilibrate(in, cook_surface_load(gamma), zero_volume_load());
        return cache.emplace(key, std::move(s)).first->second;
    };

    auto write_table = [&](const std::string& name, bool equilibrated) {
        std::ofstream f(cfg.out + "/" + name);
        f << "# mu=" << cfg.mu << " lambda="
          << (cfg.material().incompressible() ? std::string("inf") : std::to_string(cfg.lambda))
          << "\nlevel";
        for (double g : gammas) f << ",gamma=" << g;
        f << "\n";
        for (int level : cfg.levels) {
            f << level;
            for (double g : gammas) {
                Solved& s = get(g, level);
                RunConfig local = cfg;
                local.gamma = g;
                PipelineInputs in = s.ctx->inputs(local);
                double value = equilibrated
                                   ? resultant_normal_traction(s.eq.reconstruction)
                                   : resultant_normal_traction_projected(
                                         in, project_stress(in, ProjectionMode::Naive, cook_surface_load(g)));
                char buf[32];
                std::snprintf(buf, sizeof buf, ",%.6e", value);
                f << buf;
            }
            f << "\n";
        }
    };
    write_table("table1.csv", /*equilibrated=*/false);
    write_table("table2.csv", /*equilibrated=*/true);

    // Convergence surrogate across the level list at the configured gamma.
    if (cfg.levels.size() >= 2) {
        std::ofstream f(cfg.out + "/table3.csv");
        f << "# gamma=" << cfg.gamma << "\nquantity";
        for (size_t i = 1; i < cfg.levels.size(); ++i) f << ",T" << cfg.levels[i];
        f << "\n";
        std::vector<double> eq_norm, raw_norm;
        for (size_t i = 1; i < cfg.levels.size(); ++i) {
            Solved& fine = get(cfg.gamma, cfg.levels[i]);
            Solved& coarse = get(cfg.gamma, cfg.levels[i - 1]);
            RunConfig local = cfg;
            PipelineInputs fin = fine.ctx->inputs(local);
            PipelineInputs cin = coarse.ctx->inputs(local);
            eq_norm.push_back(hminus_half_norm(
                fine.ctx->space, traction_difference_reconstructed(fine.eq.reconstruction,
                                                                   coarse.eq.reconstruction)));
            raw_norm.push_back(
                hminus_half_norm(fine.ctx->space, traction_difference_material(fin, cin)));
        }
        auto emit = [&](const char* label, const std::vector<double>& values) {
            f << label;
            for (double v : values) {
                char buf[32];
                std::snprintf(buf, sizeof buf, ",%.6e", v);
                f << buf;
            }
            f << "\n" << label << "_rate";
            for (size_t i = 0; i < values.size(); ++i) {
                if (i == 0) {
                    f << ",";
                } else {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, ",%.4f", std::log2(values[i - 1] / values[i]));
                    f << buf;
                }
            }
            f << "\n";
        };
        emit("equilibrated", eq_norm);
        emit("raw", raw_norm);
    }

    // Traction profile on the finest requested level.
    {
        int level = cfg.levels.back();
        Solved& s = get(cfg.gamma, level);
        RunConfig local = cfg;
        PipelineInputs in = s.ctx->inputs(local);
        TractionProfile naive =
            traction_profile_projected(
                in, project_stress(in, ProjectionMode::Naive, cook_surface_load(cfg.gamma)));
        TractionProfile rec = traction_profile(s.eq.reconstruction);
        write_profile_csv(naive, rec, cfg.out + "/profile.csv");
    }
    std::printf("report written to %s\n", cfg.out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incompressible hyperelasticity solver with weakly symmetric "
                 "H(div) stress reconstruction (Cook's membrane benchmark)"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_file;
    std::string levels_text;
    std::string lambda_text;
    std::string mode_text;
    std::string checkpoint_override;
    std::vector<double> report_gammas;

    app.add_option("--config", config_file, "flat key=value config file");
    app.add_option("--gamma", cfg.gamma, "load magnitude");
    app.add_option("--levels", levels_text, "comma-separated refinement levels");
    app.add_option("--mu", cfg.mu, "shear modulus");
    app.add_option("--lambda", lambda_text, "first Lame-type parameter or 'inf'");
    app.add_option("--load-steps", cfg.load_steps, "number of load increments");
    app.add_option("--mode", mode_text, "projection mode: naive|compatible");
    app.add_option("--out", cfg.out, "output directory");
    app.add_flag("--strict", cfg.strict, "fail on audit or verification violations");
    app.add_option("--seed", cfg.seed, "random seed (reproducibility metadata)");

    CLI::App* solve = app.add_subcommand("solve", "solve and write checkpoints");
    CLI::App* equilibrate_cmd =
        app.add_subcommand("equilibrate", "reconstruct the stress from a checkpoint");
    equilibrate_cmd->add_option("--checkpoint", checkpoint_override,
                                "checkpoint file (default: derived from --out)");
    CLI::App* verify = app.add_subcommand("verify", "run the patch null-space oracle");
    CLI::App* report = app.add_subcommand("report", "emit tables 1-3 and the traction profile");
    report->add_option("--gammas", report_gammas, "gamma values for the tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::map<std::string, bool> overridden = {
            {"gamma", app.count("--gamma") > 0},   {"levels", app.count("--levels") > 0},
            {"mu", app.count("--mu") > 0},         {"lambda", app.count("--lambda") > 0},
            {"load_steps", app.count("--load-steps") > 0},
            {"mode", app.count("--mode") > 0},     {"out", app.count("--out") > 0},
            {"strict", app.count("--strict") > 0}, {"seed", app.count("--seed") > 0},
        };
        if (app.count("--levels") > 0) {
            cfg.levels = parse_levels(levels_text);
            if (cfg.levels.empty()) {
                std::fprintf(stderr, "empty level list\n");
                return 2;
            }
        }
        if (!lambda_text.empty()) cfg.lambda = parse_lambda(lambda_text);
        if (!mode_text.empty()) {
            if (mode_text != "naive" && mode_text != "compatible") {
                std::fprintf(stderr, "unknown mode '%s'\n", mode_text.c_str());
                return 2;
            }
            cfg.mode = (mode_text == "naive") ? ProjectionMode::Naive : ProjectionMode::Compatible;
        }
        if (!config_file.empty()) apply_config_file(config_file, cfg, overridden);

        if (cfg.gamma < 0.0 || cfg.levels.empty() ||
            !std::is_sorted(cfg.levels.begin(), cfg.levels.end())) {
            std::fprintf(stderr, "invalid config: gamma >= 0 and ascending nonempty levels\n");
            return 2;
        }

        if (solve->parsed()) return cmd_solve(cfg);
        if (equilibrate_cmd->parsed()) return cmd_equilibrate(cfg, checkpoint_override);
        if (verify->parsed()) return cmd_verify(cfg);
        if (report->parsed()) return cmd_report(cfg, report_gammas);
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        if (e.code() == "INCOMPATIBLE_RHS" || e.code() == "NULLSPACE_MISMATCH") return 3;
        if (e.code() == "BAD_CONFIG" || e.code() == "BAD_ARGUMENT") return 2;
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
