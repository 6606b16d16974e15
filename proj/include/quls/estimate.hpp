#pragma once

#include "quls/model.hpp"
#include "quls/optimize.hpp"

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace quls {

struct FitConfig {
    int max_iter = 500;
    double grad_tol = 1e-6;
    double param_tol = 1e-10;
    std::vector<double> nu_grid{3, 4, 5, 6, 7, 8, 10, 12, 15, 20, 30};
    std::optional<ParamVector> start_override;
    bool use_analytic_score = true;
    /// Gradient supplied to the optimizer when use_analytic_score is set.
    ScoreMode score_mode = ScoreMode::Exact;
    bool compute_std_errors = true;
    /// Threads for the nu grid; 0 uses the hardware concurrency.
    int workers = 0;

    void validate() const;
};

struct InformationCriteria {
    double aic = 0.0;
    double bic = 0.0;
    double caic = 0.0;
    double hqic = 0.0;
};

/// Throws InsufficientDataError when n_eff <= dim.
InformationCriteria information_criteria(double loglik, int dim, int n_eff);

struct FitResult {
    ModelSpec spec;
    ParamVector params;
    std::vector<double> std_errors;
    std::vector<double> z_values;
    std::vector<double> p_values;
    bool std_errors_available = false;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    double caic = 0.0;
    double hqic = 0.0;
    int n_eff = 0;
    bool converged = false;
    int iterations = 0;
    StopReason stop_reason = StopReason::MaxIterations;
    double grad_sup_norm = 0.0;  // on the optimization (log sigma) scale
    std::optional<double> selected_nu;
    RecursionState residual_state;
    /// Roots of 1 - phi_1 z - ... - phi_p z^p.
    std::vector<std::complex<double>> ar_roots;
    /// Accepted log-likelihood after each iteration, starting value first.
    std::vector<double> loglik_trace;
    /// (nu, loglik) for each grid fit that succeeded.
    std::vector<std::pair<double, double>> nu_profile;

    [[nodiscard]] InformationCriteria criteria() const { return {aic, bic, caic, hqic}; }
};

/// Raised by fit_student_t when no grid value produced a fit.
class GridFitError : public std::runtime_error {
public:
    GridFitError(const std::string& what, std::vector<std::string> outcomes)
        : std::runtime_error(what), outcomes_(std::move(outcomes)) {}
    [[nodiscard]] const std::vector<std::string>& outcomes() const noexcept { return outcomes_; }

private:
    std::vector<std::string> outcomes_;
};

/// Least-squares starting values; throws SingularDesignError on rank-deficient covariates.
ParamVector initial_values(const ModelSpec& spec, const BoundedSeries& data);

/// Conditional ML fit with the kernel fixed as given in spec.
FitResult fit(const ModelSpec& spec, const BoundedSeries& data, const FitConfig& config = {});

/// Fits every nu in config.nu_grid and keeps the highest log-likelihood.
FitResult fit_student_t(const ModelSpec& spec, const BoundedSeries& data, const FitConfig& config = {});

/// fit for a normal kernel, fit_student_t for a Student-t kernel.
FitResult fit_auto(const ModelSpec& spec, const BoundedSeries& data, const FitConfig& config = {});

std::vector<std::complex<double>> ar_polynomial_roots(const std::vector<double>& phi);

}  // namespace quls
