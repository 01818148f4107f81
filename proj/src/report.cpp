#include "gradstate/report.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace gradstate {

namespace {

using nlohmann::json;

json vec_to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vector vec_from_json(const json& a) {
    Vector v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

}  // namespace

std::string report_to_json(const SolverReport& r) {
    json j;
    j["algorithm"] = r.algorithm;
    j["level"] = r.level;
    j["alpha"] = r.alpha;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["residual_history"] = r.residual_history;
    j["objective_history"] = r.objective_history;
    j["inner_gmres_iters"] = r.inner_gmres_iters;
    j["newton_iters"] = r.newton_iters;
    j["wall_time_seconds"] = r.wall_time_seconds;
    j["final_y"] = vec_to_json(r.final_y);
    j["final_u"] = vec_to_json(r.final_u);
    j["final_p"] = vec_to_json(r.final_p);
    j["final_lambda"] = vec_to_json(r.final_lambda);
    j["final_mu"] = vec_to_json(r.final_mu);
    if (r.eval_y.size() > 0) j["eval_y"] = vec_to_json(r.eval_y);
    if (r.eval_u.size() > 0) j["eval_u"] = vec_to_json(r.eval_u);
    return j.dump(2);
}

SolverReport report_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    SolverReport r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.level = j.at("level").get<int>();
    r.alpha = j.at("alpha").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.residual_history = j.at("residual_history").get<std::vector<double>>();
    r.objective_history = j.at("objective_history").get<std::vector<double>>();
    r.inner_gmres_iters = j.at("inner_gmres_iters").get<std::vector<int>>();
    r.newton_iters = j.at("newton_iters").get<std::vector<int>>();
    r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    r.final_y = vec_from_json(j.at("final_y"));
    r.final_u = vec_from_json(j.at("final_u"));
    r.final_p = vec_from_json(j.at("final_p"));
    r.final_lambda = vec_from_json(j.at("final_lambda"));
    r.final_mu = vec_from_json(j.at("final_mu"));
    if (j.contains("eval_y")) r.eval_y = vec_from_json(j.at("eval_y"));
    if (j.contains("eval_u")) r.eval_u = vec_from_json(j.at("eval_u"));
    return r;
}

void write_report_json(const SolverReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << report_to_json(report) << "\n";
}

SolverReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return report_from_json(text);
}

}  // namespace gradstate
