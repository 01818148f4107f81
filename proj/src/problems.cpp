#include "gradstate/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace gradstate {

namespace {
constexpr double kHalfLog2 = 0.34657359027997264;  // log(2)/2
}

ProblemSpec example1() {
    ProblemSpec p;
    p.name = "example1";
    p.radius = 2.0;
    p.alpha = 1.0;
    p.box = {-2.0, 2.0};
    p.delta = 2.0;
    p.y_d = [](double x0, double x1) {
        const double r2 = x0 * x0 + x1 * x1;
        if (r2 <= 1.0) return 0.25 + kHalfLog2 - 0.25 * r2;
        return kHalfLog2 - 0.25 * std::log(r2);
    };
    p.f = [](double x0, double x1) {
        const double r2 = x0 * x0 + x1 * x1;
        if (r2 <= 1.0) return 1.25 + kHalfLog2 - 0.25 * r2;
        return kHalfLog2 - 0.25 * std::log(r2);
    };
    p.exact_u = [](double x0, double x1) {
        const double r2 = x0 * x0 + x1 * x1;
        if (r2 <= 1.0) return -0.25 - kHalfLog2 + 0.25 * r2;
        return -kHalfLog2 + 0.25 * std::log(r2);
    };
    p.exact_y = p.y_d;
    return p;
}

ProblemSpec example2() {
    ProblemSpec p;
    p.name = "example2";
    p.radius = 1.0;
    p.alpha = 1e-2;
    p.box = {0.0, 0.5};
    p.delta = 0.5;
    p.y_d = [](double x0, double x1) { return x0 * x0 + x1 * x1; };
    p.f = [](double, double) { return 0.0; };
    return p;
}

std::vector<ProblemSpec> alpha_sweep_spec(const ProblemSpec& base,
                                          const std::vector<double>& alphas) {
    if (alphas.empty()) {
        throw std::invalid_argument("alpha_sweep_spec: alphas must be nonempty");
    }
    for (double a : alphas) {
        if (!(a > 0.0)) {
            throw std::invalid_argument("alpha_sweep_spec: alphas must be positive");
        }
    }
    std::vector<ProblemSpec> specs;
    specs.reserve(alphas.size());
    for (double a : alphas) {
        ProblemSpec s = base;
        s.alpha = a;
        if (base.name == "example1") {
            s.box = {-0.5, 0.5};
            s.delta = 1.0;
            s.exact_u = nullptr;
            s.exact_y = nullptr;
        }
        specs.push_back(std::move(s));
    }
    return specs;
}

ProblemSpec problem_by_name(const std::string& name) {
    if (name == "example1") return example1();
    if (name == "example2") return example2();
    throw std::invalid_argument("unknown problem: " + name);
}

}  // namespace gradstate
