#pragma once

#include "quls/estimate.hpp"
#include "quls/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace quls {

enum class Scenario { S1, S2, S3, S4, Custom };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

struct ScenarioConfig {
    Scenario name = Scenario::Custom;
    ModelSpec spec;
    ParamVector true_params;
    int burn_in = 50;
    int n = 400;
    std::uint64_t seed = 1;
    int period = 12;

    /// Monte Carlo designs with harmonic covariates, logit link and normal kernel.
    static ScenarioConfig preset(Scenario name, double tau, int n, std::uint64_t seed);
    void validate() const;
};

/// Row t (1-based) is (cos(2 pi t / period), sin(2 pi t / period)).
Eigen::MatrixXd harmonic_covariates(int n_total, int period = 12, int first_index = 1);

struct SimulatedPath {
    BoundedSeries data;
    std::vector<double> eta;    // linked conditional quantiles of the retained window
    std::vector<double> q_tau;  // conditional quantiles of the retained window
};

/// Full generated path including latent quantiles (retained window only).
SimulatedPath generate_path(const ScenarioConfig& cfg);
BoundedSeries generate_series(const ScenarioConfig& cfg);

struct ParameterSummary {
    std::string name;
    double true_value = 0.0;
    double mean = 0.0;
    double rb = 0.0;
    double arb = 0.0;
    double rmse = 0.0;
};

struct McSummary {
    std::vector<ParameterSummary> parameters;
    int replications_used = 0;
    int failures = 0;
    std::vector<Eigen::VectorXd> estimates;  // one per successful replication, in replication order
};

/// Estimator hook: returns the estimate, or nullopt for a failed replication.
using Estimator = std::function<std::optional<ParamVector>(const BoundedSeries&, const ScenarioConfig&)>;

/// Seed used for replication r (0-based).
std::uint64_t replication_seed(std::uint64_t seed, int replication) noexcept;

McSummary run_monte_carlo(const ScenarioConfig& cfg, int replications, const FitConfig& fit_config,
                          int workers = 0);
McSummary run_monte_carlo(const ScenarioConfig& cfg, int replications, const Estimator& estimator,
                          int workers = 0);

/// RB, ARB and RMSE of each coordinate against the truth.
std::vector<ParameterSummary> summarize_estimates(const ModelSpec& spec, const ParamVector& truth,
                                                  const std::vector<Eigen::VectorXd>& estimates);

}  // namespace quls
