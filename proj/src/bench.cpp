#include "gradstate/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gradstate {

std::string h_label_for(const Mesh& mesh) {
    // The coarse fan has edge length equal to the radius, so each refinement
    // level sits on the dyadic ladder radius / 2^level.
    const double exponent = mesh.level - std::log2(mesh.radius);
    if (std::abs(exponent - std::lround(exponent)) < 1e-9) {
        return "1/2^" + std::to_string(std::lround(exponent));
    }
    std::ostringstream os;
    os << mesh_size(mesh);
    return os.str();
}

SingleRun run_single(const ProblemSpec& problem, int level,
                     const std::string& algorithm, const SolverConfig& config) {
    SingleRun out;
    out.mesh = build_disk_mesh(problem.radius, level);
    out.sys = assemble(out.mesh);
    out.h_label = h_label_for(out.mesh);

    SolverConfig cfg = config;
    cfg.alpha = problem.alpha;
    if (algorithm == "dabcd") {
        out.report = fe_dabcd(problem, out.sys, cfg);
    } else if (algorithm == "admm") {
        out.report = admm(problem, out.sys, cfg);
    } else if (algorithm == "ihadmm") {
        out.report = ihadmm(problem, out.sys, cfg);
    } else {
        throw std::invalid_argument("unknown algorithm: " + algorithm);
    }
    out.report.level = level;
    return out;
}

int sweep_thread_cap() {
    int cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap <= 0) cap = 1;
    if (const char* env = std::getenv("GRADSTATE_THREADS")) {
        const int requested = std::atoi(env);
        if (requested >= 1) cap = std::min(cap, requested);
    }
    return cap;
}

std::vector<BenchRow> run_bench(const ProblemSpec& problem,
                                const std::vector<int>& levels,
                                const std::vector<std::string>& algorithms,
                                const SolverConfig& config) {
    struct Job {
        int level;
        std::string algorithm;
    };
    std::vector<Job> jobs;
    for (int level : levels) {
        for (const auto& algo : algorithms) jobs.push_back({level, algo});
    }

    std::vector<BenchRow> rows(jobs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1)) {
            const auto run = run_single(problem, jobs[j].level, jobs[j].algorithm,
                                        config);
            rows[j] = {run.h_label,
                       run.sys.dofs(),
                       jobs[j].algorithm,
                       run.report.iterations,
                       run.report.residual_history.empty()
                           ? 0.0
                           : run.report.residual_history.back(),
                       run.report.wall_time_seconds};
        }
    };

    const int threads = std::min<int>(sweep_thread_cap(), static_cast<int>(jobs.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;  // jobs were enumerated level-major, so rows already are
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "h_label,dofs,algorithm,iterations,residual,wall_time_seconds\n";
    for (const auto& r : rows) {
        os << r.h_label << "," << r.dofs << "," << r.algorithm << ","
           << r.iterations << "," << r.residual << "," << r.wall_time_seconds
           << "\n";
    }
    return os.str();
}

std::vector<BenchRow> parse_bench_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
    if (line != "h_label,dofs,algorithm,iterations,residual,wall_time_seconds") {
        throw std::runtime_error("unexpected CSV header: " + line);
    }
    std::vector<BenchRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        BenchRow r;
        std::string field;
        std::getline(ls, r.h_label, ',');
        std::getline(ls, field, ',');
        r.dofs = std::stoi(field);
        std::getline(ls, r.algorithm, ',');
        std::getline(ls, field, ',');
        r.iterations = std::stoi(field);
        std::getline(ls, field, ',');
        r.residual = std::stod(field);
        std::getline(ls, field, ',');
        r.wall_time_seconds = std::stod(field);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<AlphaSweepRow> run_alpha_sweep(const ProblemSpec& base, int level,
                                           const std::vector<double>& alphas,
                                           const SolverConfig& config,
                                           const std::string& algorithm) {
    const auto specs = alpha_sweep_spec(base, alphas);
    const Mesh mesh = build_disk_mesh(base.radius, level);
    const FemSystem sys = assemble(mesh);

    std::vector<AlphaSweepRow> rows(specs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t j = next.fetch_add(1); j < specs.size(); j = next.fetch_add(1)) {
            SolverConfig cfg = config;
            cfg.alpha = specs[j].alpha;
            SolverReport rep;
            if (algorithm == "dabcd") {
                rep = fe_dabcd(specs[j], sys, cfg);
            } else if (algorithm == "admm") {
                rep = admm(specs[j], sys, cfg);
            } else if (algorithm == "ihadmm") {
                rep = ihadmm(specs[j], sys, cfg);
            } else {
                throw std::invalid_argument("unknown algorithm: " + algorithm);
            }
            rows[j] = {specs[j].alpha, rep.iterations,
                       rep.residual_history.empty() ? 0.0
                                                    : rep.residual_history.back()};
        }
    };
    const int threads = std::min<int>(sweep_thread_cap(), static_cast<int>(specs.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

std::string alpha_sweep_csv(const std::vector<AlphaSweepRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "alpha,iterations,residual\n";
    for (const auto& r : rows) {
        os << r.alpha << "," << r.iterations << "," << r.residual << "\n";
    }
    return os.str();
}

}  // namespace gradstate
