#pragma once

#include "quls/kernel.hpp"
#include "quls/link.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace quls {

/// Orders and fixed ingredients of a QULS-ARMA(p, q) model with k covariates.
struct ModelSpec {
    int p = 0;
    int q = 0;
    int k = 0;
    LinkFunction link = LinkFunction::Logit;
    SymmetricKernel kernel = SymmetricKernel::normal();
    double tau = 0.5;

    [[nodiscard]] int m() const noexcept { return p > q ? p : q; }
    /// alpha, beta[k], phi[p], theta[q], sigma.
    [[nodiscard]] int dim() const noexcept { return k + p + q + 2; }
    [[nodiscard]] int alpha_index() const noexcept { return 0; }
    [[nodiscard]] int beta_index(int l) const noexcept { return 1 + l; }
    [[nodiscard]] int phi_index(int i) const noexcept { return 1 + k + i; }
    [[nodiscard]] int theta_index(int j) const noexcept { return 1 + k + p + j; }
    [[nodiscard]] int sigma_index() const noexcept { return k + p + q + 1; }

    /// Throws DomainError on negative orders, an empty model, or tau outside (0,1).
    void validate() const;
};

struct ParamVector {
    double alpha = 0.0;
    std::vector<double> beta;
    std::vector<double> phi;
    std::vector<double> theta;
    double sigma = 1.0;

    /// Flattened in ModelSpec index order.
    [[nodiscard]] Eigen::VectorXd pack() const;
    static ParamVector unpack(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& v);
    static std::vector<std::string> names(const ModelSpec& spec);

    /// Throws DomainError if sizes disagree with spec, sigma <= 0, or any entry is non-finite.
    void validate(const ModelSpec& spec) const;
};

/// Observations in (0,1) with an aligned n x k covariate matrix.
struct BoundedSeries {
    std::vector<double> y;
    Eigen::MatrixXd x;
    std::vector<std::string> labels;

    [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
    [[nodiscard]] int covariate_count() const noexcept { return static_cast<int>(x.cols()); }

    /// Throws DomainError if any y is outside (0,1) and InputError if x is misaligned.
    void validate() const;
};

/// Linked quantiles, quantiles and link-scale innovations for every t.
struct RecursionState {
    std::vector<double> eta;
    std::vector<double> q_tau;
    std::vector<double> r;
};

/**
 * Linked conditional quantile at (0-based) index t:
 *   alpha + x_t'beta + sum_i phi_i [g(y_{t-i}) - x_{t-i}'beta] + sum_j theta_j r_{t-j}.
 * The simulator and the likelihood recursion both evaluate eta through this
 * function so that shared inputs give identical paths.
 */
double linked_quantile_at(const ModelSpec& spec, const ParamVector& params,
                          std::span<const double> link_y, const Eigen::MatrixXd& x,
                          std::span<const double> r, std::size_t t);

RecursionState run_recursion(const ModelSpec& spec, const ParamVector& params,
                             const BoundedSeries& data);

double log_likelihood(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data);

/// w_t for t = m+1..n (length n - m).
std::vector<double> w_values(const ModelSpec& spec, const ParamVector& params,
                             const BoundedSeries& data);

enum class ScoreMode {
    /// Exact gradient of the conditional log-likelihood, with the MA terms
    /// differentiated recursively through r_{t-j}.
    Exact,
    /// Alternative quantile derivatives:
    /// dq/dalpha carries (1 - sum phi), dq/dtheta_v = theta_v r_{t-v} / g'(q),
    /// and r_{t-j} is treated as parameter-free. Kept for comparison only.
    FixedInnovation,
};

Eigen::VectorXd score(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data,
                      ScoreMode mode = ScoreMode::Exact);

struct LikelihoodEvaluation {
    double loglik = 0.0;
    Eigen::VectorXd score;
};

/// Log-likelihood and exact score in one pass.
LikelihoodEvaluation evaluate_likelihood(const ModelSpec& spec, const ParamVector& params,
                                         const BoundedSeries& data);

/// Central differences of the exact score, symmetrized.
Eigen::MatrixXd hessian(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data);

/// Closed-form second derivatives; available only for q = 0.
Eigen::MatrixXd hessian_analytic(const ModelSpec& spec, const ParamVector& params,
                                 const BoundedSeries& data);

}  // namespace quls
