#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gradstate/projection.hpp"

namespace gradstate {

using ScalarField = std::function<double(double, double)>;

/// One benchmark instance: domain, regularization, constraint data and the
/// problem functions, plus the closed-form solution when one is known.
struct ProblemSpec {
    std::string name;
    double radius = 1.0;
    double alpha = 1.0;
    BoxSet box;
    double delta = 1.0;
    ScalarField y_d;
    ScalarField f;
    ScalarField exact_u;  // may be empty
    ScalarField exact_y;  // may be empty
};

/// Disk of radius 2, alpha = 1, box [-2, 2], delta = 2; log-type data with a
/// known control/state pair attached.
ProblemSpec example1();

/// Unit disk, box [0, 1/2], delta = 1/2, y_d = |x|^2, f = 0.
ProblemSpec example2();

/// Clones `base` once per alpha. The example1 sweep additionally tightens the
/// box to [-1/2, 1/2] and sets delta = 1 (the configuration its robustness
/// study uses); attached exact solutions are dropped in that case.
std::vector<ProblemSpec> alpha_sweep_spec(const ProblemSpec& base,
                                          const std::vector<double>& alphas);

/// Lookup by name ("example1" / "example2"); throws on unknown names.
ProblemSpec problem_by_name(const std::string& name);

}  // namespace gradstate
