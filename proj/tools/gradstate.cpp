// Benchmark CLI for the disk optimal-control solvers. Subcommands:
//   solve       one run, JSON report (optional VTK field export)
//   bench       (level x algorithm) sweep, CSV
//   alpha-sweep regularization sweep at a fixed level, CSV
//   mesh-info   mesh statistics (optional plain-text export)
// Exit codes: 0 success, 1 usage/data error, 2 non-convergence.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <sstream>

#include "gradstate/bench.hpp"
#include "gradstate/io.hpp"
#include "gradstate/problems.hpp"
#include "gradstate/report.hpp"

namespace {

struct CommonOpts {
    std::string problem = "example1";
    int level = 3;
    double alpha = -1.0;  // <= 0 keeps the problem default
    double tol = 1e-4;
    int max_iter = 100;
    double admm_sigma = 0.1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_level = true) {
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--config", "Flat key=value config file; flags override it")
        ->expected(1);
    cmd->add_option("--problem", o.problem, "Problem name (example1|example2)");
    if (with_level) cmd->add_option("--level", o.level, "Mesh refinement level");
    cmd->add_option("--alpha", o.alpha, "Override the regularization weight");
    cmd->add_option("--tol", o.tol, "Outer residual tolerance");
    cmd->add_option("--max-iter", o.max_iter, "Outer iteration cap");
    cmd->add_option("--admm-sigma", o.admm_sigma, "Penalty for admm/ihadmm");
}

std::string trim_ws(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Flat key=value config, '#' comments. Keys map to long options (underscores
// become dashes). The returned tokens are injected before the command-line
// flags, so explicit flags win.
std::vector<std::string> load_config_args(int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) path = argv[i + 1];
        if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    }
    std::vector<std::string> args;
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim_ws(line.substr(0, eq));
        const std::string value = trim_ws(line.substr(eq + 1));
        if (key.empty() || value.empty()) continue;
        for (auto& c : key) {
            if (c == '_') c = '-';
        }
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

gradstate::ProblemSpec resolve_problem(const CommonOpts& o) {
    auto p = gradstate::problem_by_name(o.problem);
    if (o.alpha > 0.0) p.alpha = o.alpha;
    return p;
}

gradstate::SolverConfig resolve_config(const CommonOpts& o) {
    gradstate::SolverConfig cfg;
    cfg.tol = o.tol;
    cfg.max_iter = o.max_iter;
    cfg.admm_sigma = o.admm_sigma;
    return cfg;
}

std::vector<int> parse_levels(const std::string& text) {
    const auto pos = text.find("..");
    std::vector<int> levels;
    if (pos == std::string::npos) {
        levels.push_back(std::stoi(text));
        return levels;
    }
    const int lo = std::stoi(text.substr(0, pos));
    const int hi = std::stoi(text.substr(pos + 2));
    if (hi < lo) throw CLI::ValidationError("--levels", "range must be ascending");
    for (int l = lo; l <= hi; ++l) levels.push_back(l);
    return levels;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elliptic optimal-control benchmark (gradient-constrained state, box-constrained control)"};
    app.require_subcommand(1);

    CommonOpts solve_opts, bench_opts, sweep_opts;

    auto* solve_cmd = app.add_subcommand("solve", "Run one solver and write a JSON report");
    std::string solve_algo = "dabcd";
    std::string solve_out, solve_vtk;
    add_common(solve_cmd, solve_opts);
    solve_cmd->add_option("--algo", solve_algo, "dabcd | admm | ihadmm");
    solve_cmd->add_option("--out", solve_out, "JSON report path");
    solve_cmd->add_option("--export-vtk", solve_vtk, "Write y,u,p nodal fields (legacy VTK)");

    auto* bench_cmd = app.add_subcommand("bench", "Sweep levels x algorithms, write CSV");
    std::string bench_levels = "2..4";
    std::string bench_algos = "dabcd,ihadmm,admm";
    std::string bench_out;
    add_common(bench_cmd, bench_opts, /*with_level=*/false);
    bench_cmd->add_option("--levels", bench_levels, "Level range, e.g. 2..5 or a single level");
    bench_cmd->add_option("--algos", bench_algos, "Comma-separated algorithm list");
    bench_cmd->add_option("--out", bench_out, "CSV output path");

    auto* sweep_cmd = app.add_subcommand("alpha-sweep", "Sweep alpha at one level, write CSV");
    std::string sweep_alphas = "1e-2,5e-3,1e-3,5e-4,1e-4,5e-5,1e-5";
    std::string sweep_algo = "dabcd";
    std::string sweep_out;
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--alphas", sweep_alphas, "Comma-separated alpha list");
    sweep_cmd->add_option("--algo", sweep_algo, "dabcd | admm | ihadmm");
    sweep_cmd->add_option("--out", sweep_out, "CSV output path");

    auto* info_cmd = app.add_subcommand("mesh-info", "Print mesh statistics");
    std::string info_problem = "example1";
    int info_level = 3;
    double info_radius = -1.0;
    std::string info_out;
    info_cmd->add_option("--problem", info_problem, "Problem whose domain radius to use");
    info_cmd->add_option("--level", info_level, "Mesh refinement level");
    info_cmd->add_option("--radius", info_radius, "Explicit radius (overrides --problem)");
    info_cmd->add_option("--out", info_out, "Plain-text mesh export path");

    try {
        std::vector<std::string> args;
        args.reserve(argc + 8);
        for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
        const auto config_args = load_config_args(argc, argv);
        if (!config_args.empty() && !args.empty()) {
            args.insert(args.begin() + 1, config_args.begin(), config_args.end());
        }
        // CLI11 consumes the vector in reverse order
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (solve_cmd->parsed()) {
            const auto problem = resolve_problem(solve_opts);
            const auto run = gradstate::run_single(problem, solve_opts.level,
                                                   solve_algo,
                                                   resolve_config(solve_opts));
            if (!solve_out.empty()) {
                gradstate::write_report_json(run.report, solve_out);
            } else {
                std::cout << gradstate::report_to_json(run.report) << "\n";
            }
            if (!solve_vtk.empty()) {
                const int nn = run.mesh.node_count();
                std::map<std::string, gradstate::Vector> fields;
                fields["y"] = gradstate::expand_to_nodes(run.report.final_y, run.sys, nn);
                fields["u"] = gradstate::expand_to_nodes(run.report.final_u, run.sys, nn);
                fields["p"] = gradstate::expand_to_nodes(run.report.final_p, run.sys, nn);
                gradstate::write_vtk(run.mesh, fields, solve_vtk);
            }
            std::cerr << "algorithm=" << solve_algo << " level=" << solve_opts.level
                      << " iterations=" << run.report.iterations << " residual="
                      << (run.report.residual_history.empty()
                              ? 0.0
                              : run.report.residual_history.back())
                      << " time=" << run.report.wall_time_seconds << "s\n";
            return run.report.converged ? 0 : 2;
        }

        if (bench_cmd->parsed()) {
            const auto problem = resolve_problem(bench_opts);
            const auto levels = parse_levels(bench_levels);
            std::vector<std::string> algos;
            {
                std::istringstream is(bench_algos);
                for (std::string item; std::getline(is, item, ',');) {
                    if (!item.empty()) algos.push_back(item);
                }
            }
            const auto rows =
                gradstate::run_bench(problem, levels, algos, resolve_config(bench_opts));
            const std::string csv = gradstate::bench_csv(rows);
            if (!bench_out.empty()) {
                write_text(bench_out, csv);
            } else {
                std::cout << csv;
            }
            bool all_ok = true;
            for (const auto& r : rows) {
                if (r.iterations >= bench_opts.max_iter && r.residual >= bench_opts.tol) {
                    all_ok = false;
                }
            }
            return all_ok ? 0 : 2;
        }

        if (sweep_cmd->parsed()) {
            const auto problem = resolve_problem(sweep_opts);
            std::vector<double> alphas;
            std::istringstream is(sweep_alphas);
            for (std::string item; std::getline(is, item, ',');) {
                if (!item.empty()) alphas.push_back(std::stod(item));
            }
            const auto rows = gradstate::run_alpha_sweep(
                problem, sweep_opts.level, alphas, resolve_config(sweep_opts), sweep_algo);
            const std::string csv = gradstate::alpha_sweep_csv(rows);
            if (!sweep_out.empty()) {
                write_text(sweep_out, csv);
            } else {
                std::cout << csv;
            }
            bool all_ok = true;
            for (const auto& r : rows) {
                if (r.iterations >= sweep_opts.max_iter && r.residual >= sweep_opts.tol) {
                    all_ok = false;
                }
            }
            return all_ok ? 0 : 2;
        }

        if (info_cmd->parsed()) {
            double radius = info_radius;
            if (radius <= 0.0) {
                radius = gradstate::problem_by_name(info_problem).radius;
            }
            const auto mesh = gradstate::build_disk_mesh(radius, info_level);
            const auto interior = gradstate::interior_nodes(mesh);
            std::cout << "radius " << mesh.radius << "\n"
                      << "level " << mesh.level << "\n"
                      << "nodes " << mesh.node_count() << "\n"
                      << "triangles " << mesh.triangle_count() << "\n"
                      << "interior_dofs " << interior.size() << "\n"
                      << "mesh_size " << gradstate::mesh_size(mesh) << "\n"
                      << "min_angle_deg " << gradstate::min_triangle_angle_deg(mesh)
                      << "\n"
                      << "total_area " << gradstate::total_area(mesh) << "\n";
            if (!info_out.empty()) gradstate::write_mesh_text(mesh, info_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
