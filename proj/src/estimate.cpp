#include "quls/estimate.hpp"

#include "quls/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace quls {

namespace {

struct Regression {
    Eigen::VectorXd coef;
    Eigen::VectorXd resid;
};

Regression ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
        throw SingularDesignError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                                  " of " + std::to_string(design.cols()) + ")");
    }
    Regression out;
    out.coef = qr.solve(response);
    out.resid = response - design * out.coef;
    return out;
}

double sample_sd(const Eigen::VectorXd& v) {
    if (v.size() < 2) return 0.0;
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

void check_data(const ModelSpec& spec, const BoundedSeries& data) {
    spec.validate();
    data.validate();
    if (data.covariate_count() != spec.k) {
        throw InputError("model expects " + std::to_string(spec.k) + " covariates, data has " +
                         std::to_string(data.covariate_count()));
    }
    const auto needed = static_cast<std::size_t>(spec.m() + spec.k + spec.p + spec.q);
    if (data.size() <= needed) {
        throw InsufficientDataError("series length " + std::to_string(data.size()) +
                                    " must exceed m + k + p + q = " + std::to_string(needed));
    }
}

// Optimization coordinates: sigma replaced by log sigma.
Eigen::VectorXd to_free(const ModelSpec& spec, const ParamVector& params) {
    Eigen::VectorXd v = params.pack();
    v(spec.sigma_index()) = std::log(params.sigma);
    return v;
}

ParamVector from_free(const ModelSpec& spec, const Eigen::VectorXd& z) {
    Eigen::VectorXd v = z;
    v(spec.sigma_index()) = std::exp(z(spec.sigma_index()));
    return ParamVector::unpack(spec, v);
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

unsigned resolve_workers(int workers, std::size_t jobs) {
    unsigned w = workers > 0 ? static_cast<unsigned>(workers) : std::thread::hardware_concurrency();
    if (w == 0) w = 1;
    return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

void FitConfig::validate() const {
    if (max_iter <= 0) throw DomainError("max_iter must be positive");
    if (!(grad_tol > 0.0) || !(param_tol > 0.0)) throw DomainError("tolerances must be positive");
    for (double nu : nu_grid) {
        if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("nu grid entries must be positive");
    }
}

InformationCriteria information_criteria(double loglik, int dim, int n_eff) {
    if (dim <= 0) throw DomainError("model dimension must be positive");
    if (n_eff <= dim) {
        throw InsufficientDataError("effective sample size " + std::to_string(n_eff) +
                                    " does not exceed the parameter count " + std::to_string(dim));
    }
    const double d = dim;
    const double ln = std::log(static_cast<double>(n_eff));
    InformationCriteria ic;
    ic.aic = -2.0 * loglik + 2.0 * d;
    ic.bic = -2.0 * loglik + d * ln;
    ic.caic = -2.0 * loglik + d * (ln + 1.0);
    ic.hqic = -2.0 * loglik + 2.0 * d * std::log(ln);
    return ic;
}

std::vector<std::complex<double>> ar_polynomial_roots(const std::vector<double>& phi) {
    std::size_t p = phi.size();
    while (p > 0 && phi[p - 1] == 0.0) --p;
    if (p == 0) return {};
    // Eigenvalues of the companion matrix are the inverse roots.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) companion(0, static_cast<Eigen::Index>(i)) = phi[i];
    for (std::size_t i = 1; i < p; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    std::vector<std::complex<double>> roots;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) roots.push_back(1.0 / es.eigenvalues()(i));
    std::sort(roots.begin(), roots.end(),
              [](const auto& a, const auto& b) { return std::abs(a) < std::abs(b); });
    return roots;
}

ParamVector initial_values(const ModelSpec& spec, const BoundedSeries& data) {
    check_data(spec, data);
    const auto n = static_cast<Eigen::Index>(data.size());
    const int p = spec.p;
    const int q = spec.q;

    Eigen::VectorXd s(n);
    for (Eigen::Index t = 0; t < n; ++t) s(t) = g(spec.link, data.y[static_cast<std::size_t>(t)]);

    Eigen::MatrixXd design(n, spec.k + 1);
    design.col(0).setOnes();
    if (spec.k > 0) design.rightCols(spec.k) = data.x;
    const Regression reg = ols(design, s);

    ParamVector out;
    out.beta.assign(reg.coef.data() + 1, reg.coef.data() + reg.coef.size());
    Eigen::VectorXd u = s;
    if (spec.k > 0) u -= data.x * reg.coef.tail(spec.k);

    // Long autoregression residuals stand in for the unobserved innovations.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    Eigen::Index long_order = 0;
    bool use_ma = q > 0;
    if (use_ma) {
        long_order = std::max<Eigen::Index>(p + q, std::min<Eigen::Index>(10, (n - 1) / 5));
        const Eigen::Index rows = n - long_order;
        const Eigen::Index start = std::max<Eigen::Index>(p, long_order + q);
        if (rows <= long_order + 1 || n - start <= 1 + p + q) {
            use_ma = false;
        } else {
            Eigen::MatrixXd la(rows, long_order + 1);
            la.col(0).setOnes();
            for (Eigen::Index t = long_order; t < n; ++t) {
                for (Eigen::Index i = 1; i <= long_order; ++i) la(t - long_order, i) = u(t - i);
            }
            try {
                const Regression lr = ols(la, u.tail(rows));
                e.tail(rows) = lr.resid;
            } catch (const SingularDesignError&) {
                use_ma = false;
            }
        }
    }

    const Eigen::Index start = use_ma ? std::max<Eigen::Index>(p, long_order + q) : p;
    const int cols = 1 + p + (use_ma ? q : 0);
    const Eigen::Index rows = n - start;
    Eigen::MatrixXd arma(rows, cols);
    for (Eigen::Index t = start; t < n; ++t) {
        const Eigen::Index row = t - start;
        arma(row, 0) = 1.0;
        for (int i = 1; i <= p; ++i) arma(row, i) = u(t - i);
        if (use_ma) {
            for (int j = 1; j <= q; ++j) arma(row, p + j) = e(t - j);
        }
    }
    Regression ar;
    try {
        ar = ols(arma, u.tail(rows));
    } catch (const SingularDesignError&) {
        // Degenerate lag structure (e.g. a constant series): fall back to the mean.
        ar.coef = Eigen::VectorXd::Zero(cols);
        ar.coef(0) = u.tail(rows).mean();
        ar.resid = u.tail(rows).array() - ar.coef(0);
    }

    out.phi.resize(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) out.phi[static_cast<std::size_t>(i)] = ar.coef(1 + i);
    out.theta.assign(static_cast<std::size_t>(q), 0.0);
    double theta_sum = 0.0;
    if (use_ma) {
        for (int j = 0; j < q; ++j) {
            out.theta[static_cast<std::size_t>(j)] = ar.coef(1 + p + j);
            theta_sum += ar.coef(1 + p + j);
        }
    }

    double sigma = sample_sd(ar.resid);
    if (!(sigma > 1e-8) || !std::isfinite(sigma)) sigma = 1e-2;
    out.sigma = sigma;
    // Innovations on the link scale have mean -sigma Q(tau) under the logit link.
    out.alpha = ar.coef(0) + sigma * quantile(spec.kernel, spec.tau) * (1.0 + theta_sum);

    out.validate(spec);
    return out;
}

FitResult fit(const ModelSpec& spec, const BoundedSeries& data, const FitConfig& config) {
    config.validate();
    check_data(spec, data);
    const int n_eff = static_cast<int>(data.size()) - spec.m();
    if (n_eff <= spec.dim()) {
        throw InsufficientDataError("effective sample size " + std::to_string(n_eff) +
                                    " does not exceed the parameter count " + std::to_string(spec.dim()));
    }

    ParamVector start = config.start_override ? *config.start_override : initial_values(spec, data);
    start.validate(spec);

    const int si = spec.sigma_index();
    Objective objective;
    if (config.use_analytic_score) {
        objective = [&](const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
            const ParamVector pv = from_free(spec, z);
            LikelihoodEvaluation ev = evaluate_likelihood(spec, pv, data);
            if (grad) {
                *grad = config.score_mode == ScoreMode::Exact ? ev.score
                                                              : score(spec, pv, data, config.score_mode);
                (*grad)(si) *= pv.sigma;
            }
            return ev.loglik;
        };
    } else {
        objective = [&](const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
            const double value = log_likelihood(spec, from_free(spec, z), data);
            if (grad) {
                grad->resize(z.size());
                const double base = std::cbrt(std::numeric_limits<double>::epsilon());
                for (Eigen::Index i = 0; i < z.size(); ++i) {
                    const double h = base * std::max(1.0, std::abs(z(i)));
                    Eigen::VectorXd zp = z;
                    Eigen::VectorXd zm = z;
                    zp(i) += h;
                    zm(i) -= h;
                    (*grad)(i) = (log_likelihood(spec, from_free(spec, zp), data) -
                                  log_likelihood(spec, from_free(spec, zm), data)) /
                                 (2.0 * h);
                }
            }
            return value;
        };
    }

    BfgsOptions opts;
    opts.max_iter = config.max_iter;
    opts.grad_tol = config.grad_tol;
    opts.param_tol = config.param_tol;

    FitResult res;
    res.spec = spec;
    const Eigen::VectorXd z0 = to_free(spec, start);
    res.loglik_trace.push_back(log_likelihood(spec, start, data));
    const BfgsResult opt = maximize_bfgs(objective, z0, opts, [&](int, double, double accepted) {
        res.loglik_trace.push_back(accepted);
    });

    res.params = from_free(spec, opt.x);
    res.loglik = opt.value;
    res.converged = opt.converged;
    res.iterations = opt.iterations;
    res.stop_reason = opt.reason;
    res.grad_sup_norm = opt.grad.size() ? opt.grad.cwiseAbs().maxCoeff() : 0.0;
    res.n_eff = n_eff;
    const InformationCriteria ic = information_criteria(res.loglik, spec.dim(), n_eff);
    res.aic = ic.aic;
    res.bic = ic.bic;
    res.caic = ic.caic;
    res.hqic = ic.hqic;
    res.residual_state = run_recursion(spec, res.params, data);
    res.ar_roots = ar_polynomial_roots(res.params.phi);

    const auto d = static_cast<std::size_t>(spec.dim());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    res.std_errors.assign(d, nan);
    res.z_values.assign(d, nan);
    res.p_values.assign(d, nan);
    if (config.compute_std_errors) {
        try {
            const Eigen::MatrixXd info = -hessian(spec, res.params, data);
            Eigen::LLT<Eigen::MatrixXd> llt(info);
            if (llt.info() == Eigen::Success) {
                const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
                const Eigen::VectorXd est = res.params.pack();
                bool ok = true;
                for (std::size_t i = 0; i < d; ++i) {
                    const double var = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
                    if (!(var > 0.0) || !std::isfinite(var)) {
                        ok = false;
                        break;
                    }
                    res.std_errors[i] = std::sqrt(var);
                    res.z_values[i] = est(static_cast<Eigen::Index>(i)) / res.std_errors[i];
                    res.p_values[i] = normal_two_sided_p(res.z_values[i]);
                }
                res.std_errors_available = ok;
                if (!ok) {
                    res.std_errors.assign(d, nan);
                    res.z_values.assign(d, nan);
                    res.p_values.assign(d, nan);
                }
            }
        } catch (const NumericError&) {
            res.std_errors_available = false;
        }
    }
    return res;
}

FitResult fit_student_t(const ModelSpec& spec, const BoundedSeries& data, const FitConfig& config) {
    if (spec.kernel.kind() != SymmetricKernel::Kind::StudentT) {
        throw DomainError("fit_student_t requires a Student-t kernel");
    }
    config.validate();
    if (config.nu_grid.empty()) throw DomainError("nu grid must not be empty");

    const std::size_t jobs = config.nu_grid.size();
    std::vector<std::optional<FitResult>> fits(jobs);
    std::vector<std::string> outcomes(jobs);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < jobs; i = next++) {
            const double nu = config.nu_grid[i];
            std::ostringstream msg;
            msg << "nu=" << nu << ": ";
            try {
                ModelSpec s = spec;
                s.kernel = SymmetricKernel::student_t(nu);
                FitResult r = fit(s, data, config);
                r.selected_nu = nu;
                msg << "loglik=" << r.loglik << (r.converged ? "" : " (not converged)");
                fits[i] = std::move(r);
            } catch (const std::exception& ex) {
                msg << "failed: " << ex.what();
            }
            outcomes[i] = msg.str();
        }
    };
    const unsigned nthreads = resolve_workers(config.workers, jobs);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::optional<std::size_t> best;
    std::vector<std::pair<double, double>> profile;
    for (std::size_t i = 0; i < jobs; ++i) {
        if (!fits[i]) continue;
        profile.emplace_back(config.nu_grid[i], fits[i]->loglik);
        if (!best || fits[i]->loglik > fits[*best]->loglik) best = i;
    }
    if (!best) {
        std::string what = "all nu grid fits failed:";
        for (const auto& o : outcomes) what += " [" + o + "]";
        throw GridFitError(what, outcomes);
    }
    FitResult out = std::move(*fits[*best]);
    out.nu_profile = std::move(profile);
    return out;
}

FitResult fit_auto(const ModelSpec& spec, const BoundedSeries& data, const FitConfig& config) {
    if (spec.kernel.kind() == SymmetricKernel::Kind::StudentT && !config.nu_grid.empty()) {
        return fit_student_t(spec, data, config);
    }
    return fit(spec, data, config);
}

}  // namespace quls
