#pragma once

#include <string>
#include <vector>

#include "gradstate/report.hpp"
#include "gradstate/solver.hpp"

namespace gradstate {

struct BenchRow {
    std::string h_label;
    int dofs = 0;
    std::string algorithm;
    int iterations = 0;
    double residual = 0.0;
    double wall_time_seconds = 0.0;
};

struct SingleRun {
    SolverReport report;
    Mesh mesh;
    FemSystem sys;
    std::string h_label;
};

/// Dyadic size label for a mesh ("1/2^k" when the longest edge is within 15%
/// of 2^-k, otherwise the decimal value).
std::string h_label_for(const Mesh& mesh);

/// Builds the mesh, assembles, and dispatches on algorithm name
/// ("dabcd" | "admm" | "ihadmm"). Throws on unknown names.
SingleRun run_single(const ProblemSpec& problem, int level,
                     const std::string& algorithm, const SolverConfig& config);

/// Level-major sweep over (level, algorithm); failed entries are kept with
/// iterations = max_iter. Parallelism is capped by the GRADSTATE_THREADS
/// environment variable.
std::vector<BenchRow> run_bench(const ProblemSpec& problem,
                                const std::vector<int>& levels,
                                const std::vector<std::string>& algorithms,
                                const SolverConfig& config);

std::string bench_csv(const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_bench_csv(const std::string& csv);

struct AlphaSweepRow {
    double alpha = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

std::vector<AlphaSweepRow> run_alpha_sweep(const ProblemSpec& base, int level,
                                           const std::vector<double>& alphas,
                                           const SolverConfig& config,
                                           const std::string& algorithm = "dabcd");

std::string alpha_sweep_csv(const std::vector<AlphaSweepRow>& rows);

/// Worker cap from GRADSTATE_THREADS (defaults to the hardware count).
int sweep_thread_cap();

}  // namespace gradstate
