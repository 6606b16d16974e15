#include "quls/optimize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace quls {

namespace {

struct Trial {
    bool ok = false;
    double value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd grad;
};

Trial evaluate(const Objective& f, const Eigen::VectorXd& x) {
    Trial t;
    try {
        t.value = f(x, &t.grad);
        t.ok = std::isfinite(t.value) && t.grad.allFinite();
    } catch (const std::exception&) {
        t.ok = false;
    }
    return t;
}

double sup_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::Gradient:
            return "gradient";
        case StopReason::ParameterStep:
            return "parameter-step";
        case StopReason::MaxIterations:
            return "max-iterations";
        case StopReason::LineSearchFailure:
            return "line-search-failure";
    }
    return "unknown";
}

BfgsResult maximize_bfgs(const Objective& objective, const Eigen::VectorXd& x0,
                         const BfgsOptions& options,
                         const std::function<void(int, double, double)>& on_iteration) {
    const Eigen::Index n = x0.size();
    BfgsResult res;
    res.x = x0;
    Trial cur = evaluate(objective, x0);
    if (!cur.ok) throw std::domain_error("objective is not finite at the starting point");
    res.value = cur.value;
    res.grad = cur.grad;

    const auto initial_inverse = [&](const Eigen::VectorXd& g) {
        const double gmax = sup_norm(g);
        return Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n) * (gmax > 1.0 ? 1.0 / gmax : 1.0));
    };
    Eigen::MatrixXd inv_h = initial_inverse(cur.grad);
    bool fresh = true;

    for (int iter = 0; iter < options.max_iter; ++iter) {
        if (sup_norm(cur.grad) <= options.grad_tol) {
            res.converged = true;
            res.reason = StopReason::Gradient;
            res.iterations = iter;
            return res;
        }
        Eigen::VectorXd dir = inv_h * cur.grad;
        double slope = cur.grad.dot(dir);
        if (!(slope > 0.0)) {
            inv_h = initial_inverse(cur.grad);
            dir = inv_h * cur.grad;
            slope = cur.grad.dot(dir);
            fresh = true;
        }

        double step = 1.0;
        Trial next;
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int b = 0; b < options.max_backtracks; ++b, step *= options.shrink) {
            x_new = res.x + step * dir;
            next = evaluate(objective, x_new);
            if (!next.ok) continue;
            const bool armijo = next.value >= cur.value + options.armijo_c1 * step * slope;
            const bool flat_progress =
                next.value >= cur.value && sup_norm(next.grad) < sup_norm(cur.grad);
            if (armijo || flat_progress) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!fresh) {
                inv_h = initial_inverse(cur.grad);
                fresh = true;
                continue;
            }
            res.reason = StopReason::LineSearchFailure;
            res.iterations = iter;
            return res;
        }

        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd y = cur.grad - next.grad;  // gradient change of the minimized -f
        if (on_iteration) on_iteration(iter + 1, cur.value, next.value);
        res.x = x_new;
        cur = std::move(next);
        res.value = cur.value;
        res.grad = cur.grad;
        res.iterations = iter + 1;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh) {
                inv_h = Eigen::MatrixXd::Identity(n, n) * (sy / y.squaredNorm());
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
            inv_h = left * inv_h * left.transpose() + rho * s * s.transpose();
            fresh = false;
        }

        if (sup_norm(cur.grad) <= options.grad_tol) {
            res.converged = true;
            res.reason = StopReason::Gradient;
            return res;
        }
        if (sup_norm(s) <= options.param_tol * (1.0 + sup_norm(res.x))) {
            res.converged = true;
            res.reason = StopReason::ParameterStep;
            return res;
        }
    }
    res.reason = StopReason::MaxIterations;
    return res;
}

}  // namespace quls
