#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace quls {

/// Objective to maximize; fills `grad` when non-null. May throw for infeasible points.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BfgsOptions {
    int max_iter = 500;
    double grad_tol = 1e-6;
    double param_tol = 1e-10;
    double armijo_c1 = 1e-4;
    double shrink = 0.5;
    int max_backtracks = 60;
};

enum class StopReason { Gradient, ParameterStep, MaxIterations, LineSearchFailure };

std::string to_string(StopReason reason);

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd grad;
    int iterations = 0;
    bool converged = false;
    StopReason reason = StopReason::MaxIterations;
};

/**
 * Quasi-Newton ascent with the BFGS inverse-Hessian update and a backtracking
 * Armijo line search. A trial point is accepted only if the objective does not
 * decrease; when the Armijo gain is below floating-point resolution a
 * non-decreasing step that shrinks the gradient is accepted instead.
 *
 * `on_iteration`, when set, sees (iteration, previous value, accepted value).
 */
BfgsResult maximize_bfgs(const Objective& objective, const Eigen::VectorXd& x0,
                         const BfgsOptions& options,
                         const std::function<void(int, double, double)>& on_iteration = {});

}  // namespace quls
