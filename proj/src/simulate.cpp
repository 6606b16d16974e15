#include "quls/simulate.hpp"

#include "quls/error.hpp"
#include "quls/rng.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace quls {

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::S1:
            return "S1";
        case Scenario::S2:
            return "S2";
        case Scenario::S3:
            return "S3";
        case Scenario::S4:
            return "S4";
        case Scenario::Custom:
            return "custom";
    }
    return "custom";
}

Scenario parse_scenario(const std::string& name) {
    if (name == "S1" || name == "s1") return Scenario::S1;
    if (name == "S2" || name == "s2") return Scenario::S2;
    if (name == "S3" || name == "s3") return Scenario::S3;
    if (name == "S4" || name == "s4") return Scenario::S4;
    if (name == "custom") return Scenario::Custom;
    throw InputError("unknown scenario '" + name + "' (expected S1, S2, S3, S4 or custom)");
}

ScenarioConfig ScenarioConfig::preset(Scenario name, double tau, int n, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.n = n;
    cfg.seed = seed;
    cfg.spec.k = 2;
    cfg.spec.tau = tau;
    cfg.spec.link = LinkFunction::Logit;
    cfg.spec.kernel = SymmetricKernel::normal();
    ParamVector& tp = cfg.true_params;
    tp.beta = {0.5, 0.2};
    switch (name) {
        case Scenario::S1:
        case Scenario::S2:
            cfg.spec.p = 2;
            cfg.spec.q = 0;
            tp.phi = {1.2, -0.3};
            tp.alpha = name == Scenario::S1 ? 0.5 : 0.1;
            tp.sigma = name == Scenario::S1 ? 0.1 : 0.2;
            break;
        case Scenario::S3:
        case Scenario::S4:
            cfg.spec.p = 1;
            cfg.spec.q = 1;
            tp.phi = {0.85};
            tp.theta = {0.2};
            tp.alpha = name == Scenario::S3 ? 0.4 : 0.9;
            tp.sigma = name == Scenario::S3 ? 0.1 : 0.2;
            break;
        case Scenario::Custom:
            throw DomainError("the custom scenario has no preset parameters");
    }
    cfg.validate();
    return cfg;
}

void ScenarioConfig::validate() const {
    spec.validate();
    true_params.validate(spec);
    if (spec.k != 0 && spec.k != 2) {
        throw DomainError("simulated designs use either no covariates or one harmonic pair");
    }
    if (burn_in < spec.m()) throw DomainError("burn-in must be at least max(p, q)");
    if (n < 30) throw DomainError("simulated series length must be at least 30");
    if (period <= 0) throw DomainError("harmonic period must be positive");
}

Eigen::MatrixXd harmonic_covariates(int n_total, int period, int first_index) {
    if (n_total < 1) throw DomainError("harmonic covariates need at least one row");
    if (period <= 0) throw DomainError("harmonic period must be positive");
    Eigen::MatrixXd x(n_total, 2);
    for (int i = 0; i < n_total; ++i) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(first_index + i) / period;
        x(i, 0) = std::cos(angle);
        x(i, 1) = std::sin(angle);
    }
    return x;
}

SimulatedPath generate_path(const ScenarioConfig& cfg) {
    cfg.validate();
    const ModelSpec& spec = cfg.spec;
    const ParamVector& par = cfg.true_params;
    const auto total = static_cast<std::size_t>(cfg.n + cfg.burn_in);
    const auto m = static_cast<std::size_t>(spec.m());

    const Eigen::MatrixXd x = spec.k == 2 ? harmonic_covariates(static_cast<int>(total), cfg.period)
                                          : Eigen::MatrixXd(static_cast<Eigen::Index>(total), 0);
    CounterRng rng(cfg.seed);
    const double qz = quantile(spec.kernel, spec.tau);

    std::vector<double> y(total), s(total), r(total, 0.0), eta(total), qt(total);
    for (std::size_t t = 0; t < m; ++t) {
        y[t] = rng.uniform(0.3, 0.7);
        s[t] = g(spec.link, y[t]);
        eta[t] = s[t];
        qt[t] = y[t];
    }
    for (std::size_t t = m; t < total; ++t) {
        const double e = linked_quantile_at(spec, par, s, x, r, t);
        if (!std::isfinite(e) || std::abs(e) > 1e12) {
            throw NumericError("simulated linked quantile overflowed at t=" + std::to_string(t + 1));
        }
        eta[t] = e;
        qt[t] = g_inv(spec.link, e);
        const double z = rng.draw(spec.kernel);
        // Innovation on the logit scale, so y has the QULS law for any link.
        y[t] = g_inv(LinkFunction::Logit, logit_of_inverse(spec.link, e) + par.sigma * (z - qz));
        s[t] = g(spec.link, y[t]);
        r[t] = s[t] - e;
    }

    SimulatedPath out;
    const auto b = static_cast<std::size_t>(cfg.burn_in);
    out.data.y.assign(y.begin() + static_cast<std::ptrdiff_t>(b), y.end());
    out.data.x = x.bottomRows(cfg.n);
    out.eta.assign(eta.begin() + static_cast<std::ptrdiff_t>(b), eta.end());
    out.q_tau.assign(qt.begin() + static_cast<std::ptrdiff_t>(b), qt.end());
    return out;
}

BoundedSeries generate_series(const ScenarioConfig& cfg) { return generate_path(cfg).data; }

std::uint64_t replication_seed(std::uint64_t seed, int replication) noexcept {
    return seed ^ static_cast<std::uint64_t>(replication);
}

std::vector<ParameterSummary> summarize_estimates(const ModelSpec& spec, const ParamVector& truth,
                                                  const std::vector<Eigen::VectorXd>& estimates) {
    const Eigen::VectorXd t0 = truth.pack();
    const auto names = ParamVector::names(spec);
    std::vector<ParameterSummary> out;
    const double count = static_cast<double>(estimates.size());
    for (Eigen::Index i = 0; i < t0.size(); ++i) {
        ParameterSummary ps;
        ps.name = names[static_cast<std::size_t>(i)];
        ps.true_value = t0(i);
        double sum = 0.0, abs_sum = 0.0, sq_sum = 0.0;
        for (const auto& est : estimates) {
            const double dev = est(i) - t0(i);
            sum += dev;
            abs_sum += std::abs(dev);
            sq_sum += dev * dev;
        }
        ps.mean = t0(i) + sum / count;
        ps.rb = sum / count / t0(i);
        ps.arb = abs_sum / count / std::abs(t0(i));
        ps.rmse = std::sqrt(sq_sum / count);
        out.push_back(ps);
    }
    return out;
}

McSummary run_monte_carlo(const ScenarioConfig& cfg, int replications, const Estimator& estimator,
                          int workers) {
    cfg.validate();
    if (replications < 2) throw DomainError("Monte Carlo needs at least two replications");
    const auto reps = static_cast<std::size_t>(replications);
    std::vector<std::optional<Eigen::VectorXd>> results(reps);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t r = next++; r < reps; r = next++) {
            ScenarioConfig rc = cfg;
            rc.seed = replication_seed(cfg.seed, static_cast<int>(r));
            try {
                const BoundedSeries data = generate_series(rc);
                if (auto est = estimator(data, rc)) results[r] = est->pack();
            } catch (const std::exception&) {
                // counted as a failure below
            }
        }
    };
    unsigned nthreads = workers > 0 ? static_cast<unsigned>(workers) : std::thread::hardware_concurrency();
    if (nthreads == 0) nthreads = 1;
    if (nthreads > reps) nthreads = static_cast<unsigned>(reps);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    McSummary out;
    for (auto& r : results) {
        if (r && r->allFinite()) {
            out.estimates.push_back(std::move(*r));
        } else {
            ++out.failures;
        }
    }
    out.replications_used = static_cast<int>(out.estimates.size());
    if (out.estimates.empty()) throw NumericError("every Monte Carlo replication failed");
    out.parameters = summarize_estimates(cfg.spec, cfg.true_params, out.estimates);
    return out;
}

McSummary run_monte_carlo(const ScenarioConfig& cfg, int replications, const FitConfig& fit_config,
                          int workers) {
    FitConfig fc = fit_config;
    fc.compute_std_errors = false;
    const Estimator est = [fc](const BoundedSeries& data, const ScenarioConfig& rc) -> std::optional<ParamVector> {
        const FitResult res = fit(rc.spec, data, fc);
        if (!res.converged) return std::nullopt;
        return res.params;
    };
    return run_monte_carlo(cfg, replications, est, workers);
}

}  // namespace quls
