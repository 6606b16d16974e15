#include "quls/model.hpp"

#include "quls/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace quls {

namespace {

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            carry_ += (sum_ - t) + v;
        } else {
            carry_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

double logit(double u) { return std::log(u) - std::log1p(-u); }

double xbeta(const Eigen::MatrixXd& x, const std::vector<double>& beta, std::size_t t) {
    double s = 0.0;
    for (std::size_t l = 0; l < beta.size(); ++l) s += x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(l)) * beta[l];
    return s;
}

void check_inputs(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data) {
    spec.validate();
    params.validate(spec);
    data.validate();
    if (data.covariate_count() != spec.k) {
        throw InputError("model expects " + std::to_string(spec.k) + " covariates, data has " +
                         std::to_string(data.covariate_count()));
    }
    if (data.size() <= static_cast<std::size_t>(spec.m())) {
        throw InsufficientDataError("series length " + std::to_string(data.size()) +
                                    " does not exceed max(p, q) = " + std::to_string(spec.m()));
    }
}

std::vector<double> link_values(LinkFunction link, const std::vector<double>& y) {
    std::vector<double> s(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) s[t] = g(link, y[t]);
    return s;
}

// Shared pass over the recursion. When `jac` is non-null it receives
// d eta_t / d vartheta for the non-sigma coordinates.
RecursionState recursion_pass(const ModelSpec& spec, const ParamVector& params,
                              const BoundedSeries& data, const std::vector<double>& s,
                              Eigen::MatrixXd* jac, ScoreMode mode) {
    const std::size_t n = data.size();
    const std::size_t m = static_cast<std::size_t>(spec.m());
    RecursionState st;
    st.eta.resize(n);
    st.q_tau.resize(n);
    st.r.assign(n, 0.0);
    const int d = spec.dim() - 1;
    Eigen::MatrixXd dr;
    if (jac) {
        jac->setZero(static_cast<Eigen::Index>(n), d);
        dr.setZero(static_cast<Eigen::Index>(n), d);
    }
    double phi_sum = 0.0;
    for (double v : params.phi) phi_sum += v;

    for (std::size_t t = 0; t < n; ++t) {
        if (t < m) {
            st.eta[t] = s[t];
            st.q_tau[t] = g_inv(spec.link, s[t]);
            continue;
        }
        const double eta = linked_quantile_at(spec, params, s, data.x, st.r, t);
        if (!std::isfinite(eta)) {
            throw NumericError("recursion overflow at t=" + std::to_string(t + 1));
        }
        st.eta[t] = eta;
        st.q_tau[t] = g_inv(spec.link, eta);
        st.r[t] = s[t] - eta;

        if (!jac) continue;
        const auto ti = static_cast<Eigen::Index>(t);
        auto row = jac->row(ti);
        row(spec.alpha_index()) = mode == ScoreMode::Exact ? 1.0 : 1.0 - phi_sum;
        for (int l = 0; l < spec.k; ++l) {
            double v = data.x(ti, l);
            for (int i = 0; i < spec.p; ++i) v -= params.phi[i] * data.x(ti - 1 - i, l);
            row(spec.beta_index(l)) = v;
        }
        for (int u = 0; u < spec.p; ++u) {
            const std::size_t lag = t - 1 - static_cast<std::size_t>(u);
            row(spec.phi_index(u)) = s[lag] - xbeta(data.x, params.beta, lag);
        }
        for (int v = 0; v < spec.q; ++v) {
            const double r_lag = st.r[t - 1 - static_cast<std::size_t>(v)];
            row(spec.theta_index(v)) = mode == ScoreMode::Exact ? r_lag : params.theta[v] * r_lag;
        }
        if (mode == ScoreMode::Exact) {
            for (int j = 0; j < spec.q; ++j) {
                row += params.theta[j] * dr.row(ti - 1 - j);
            }
            dr.row(ti) = -row;
        }
    }
    return st;
}

struct Pass {
    double loglik;
    Eigen::VectorXd score;
};

Pass likelihood_pass(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data,
                     bool want_score, ScoreMode mode) {
    check_inputs(spec, params, data);
    const std::size_t n = data.size();
    const std::size_t m = static_cast<std::size_t>(spec.m());
    const auto s = link_values(spec.link, data.y);
    Eigen::MatrixXd jac;
    const RecursionState st =
        recursion_pass(spec, params, data, s, want_score ? &jac : nullptr, mode);

    const double sigma = params.sigma;
    const double qz = quantile(spec.kernel, spec.tau);
    const double log_sigma = std::log(sigma);
    CompensatedSum ll;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(spec.dim());
    const int d = spec.dim() - 1;
    double sigma_term = 0.0;

    for (std::size_t t = m; t < n; ++t) {
        const double y = data.y[t];
        const double lg = logit(y) - logit_of_inverse(spec.link, st.eta[t]);
        const double w = lg / sigma + qz;
        const double contrib =
            -log_sigma - (std::log(y) + std::log1p(-y)) + log_pdf(spec.kernel, w);
        if (!std::isfinite(contrib)) {
            throw NumericError("non-finite log-likelihood contribution at t=" + std::to_string(t + 1));
        }
        ll.add(contrib);
        if (!want_score) continue;
        const double psi = log_pdf_deriv1(spec.kernel, w);
        const double dw_deta = -logit_of_inverse_deriv1(spec.link, st.eta[t]) / sigma;
        grad.head(d) += (psi * dw_deta) * jac.row(static_cast<Eigen::Index>(t)).transpose();
        sigma_term += psi * (-lg / (sigma * sigma));
    }
    grad(spec.sigma_index()) = -static_cast<double>(n - m) / sigma + sigma_term;
    return {ll.value(), std::move(grad)};
}

}  // namespace

void ModelSpec::validate() const {
    if (p < 0 || q < 0 || k < 0) throw DomainError("model orders must be non-negative");
    if (p + q < 1 && k < 1) throw DomainError("model needs p + q >= 1 or at least one covariate");
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
}

Eigen::VectorXd ParamVector::pack() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(beta.size() + phi.size() + theta.size() + 2));
    Eigen::Index i = 0;
    v(i++) = alpha;
    for (double b : beta) v(i++) = b;
    for (double f : phi) v(i++) = f;
    for (double th : theta) v(i++) = th;
    v(i) = sigma;
    return v;
}

ParamVector ParamVector::unpack(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() != spec.dim()) throw DomainError("parameter vector has wrong dimension");
    ParamVector out;
    out.alpha = v(spec.alpha_index());
    for (int l = 0; l < spec.k; ++l) out.beta.push_back(v(spec.beta_index(l)));
    for (int i = 0; i < spec.p; ++i) out.phi.push_back(v(spec.phi_index(i)));
    for (int j = 0; j < spec.q; ++j) out.theta.push_back(v(spec.theta_index(j)));
    out.sigma = v(spec.sigma_index());
    return out;
}

std::vector<std::string> ParamVector::names(const ModelSpec& spec) {
    std::vector<std::string> out{"alpha"};
    for (int l = 1; l <= spec.k; ++l) out.push_back("beta" + std::to_string(l));
    for (int i = 1; i <= spec.p; ++i) out.push_back("phi" + std::to_string(i));
    for (int j = 1; j <= spec.q; ++j) out.push_back("theta" + std::to_string(j));
    out.emplace_back("sigma");
    return out;
}

void ParamVector::validate(const ModelSpec& spec) const {
    if (beta.size() != static_cast<std::size_t>(spec.k) ||
        phi.size() != static_cast<std::size_t>(spec.p) ||
        theta.size() != static_cast<std::size_t>(spec.q)) {
        throw DomainError("parameter vector sizes do not match the model orders");
    }
    if (!(std::isfinite(sigma) && sigma > 0.0)) throw DomainError("sigma must be positive and finite");
    const Eigen::VectorXd v = pack();
    if (!v.allFinite()) throw DomainError("parameters must be finite");
}

void BoundedSeries::validate() const {
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (!(y[t] > 0.0 && y[t] < 1.0)) {
            throw DomainError("observation " + std::to_string(t + 1) + " is outside (0, 1)");
        }
    }
    if (static_cast<std::size_t>(x.rows()) != y.size() && !(x.size() == 0 && x.cols() == 0)) {
        throw InputError("covariate matrix has " + std::to_string(x.rows()) + " rows for " +
                         std::to_string(y.size()) + " observations");
    }
    if (!labels.empty() && labels.size() != y.size()) {
        throw InputError("label count does not match observation count");
    }
}

double linked_quantile_at(const ModelSpec& spec, const ParamVector& params,
                          std::span<const double> link_y, const Eigen::MatrixXd& x,
                          std::span<const double> r, std::size_t t) {
    double eta = params.alpha + xbeta(x, params.beta, t);
    for (int i = 0; i < spec.p; ++i) {
        const std::size_t lag = t - 1 - static_cast<std::size_t>(i);
        eta += params.phi[i] * (link_y[lag] - xbeta(x, params.beta, lag));
    }
    for (int j = 0; j < spec.q; ++j) {
        eta += params.theta[j] * r[t - 1 - static_cast<std::size_t>(j)];
    }
    return eta;
}

RecursionState run_recursion(const ModelSpec& spec, const ParamVector& params,
                             const BoundedSeries& data) {
    check_inputs(spec, params, data);
    const auto s = link_values(spec.link, data.y);
    return recursion_pass(spec, params, data, s, nullptr, ScoreMode::Exact);
}

double log_likelihood(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data) {
    return likelihood_pass(spec, params, data, false, ScoreMode::Exact).loglik;
}

std::vector<double> w_values(const ModelSpec& spec, const ParamVector& params,
                             const BoundedSeries& data) {
    const RecursionState st = run_recursion(spec, params, data);
    const double qz = quantile(spec.kernel, spec.tau);
    std::vector<double> w;
    w.reserve(data.size() - static_cast<std::size_t>(spec.m()));
    for (std::size_t t = static_cast<std::size_t>(spec.m()); t < data.size(); ++t) {
        w.push_back((logit(data.y[t]) - logit_of_inverse(spec.link, st.eta[t])) / params.sigma + qz);
    }
    return w;
}

Eigen::VectorXd score(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data,
                      ScoreMode mode) {
    return likelihood_pass(spec, params, data, true, mode).score;
}

LikelihoodEvaluation evaluate_likelihood(const ModelSpec& spec, const ParamVector& params,
                                         const BoundedSeries& data) {
    auto pass = likelihood_pass(spec, params, data, true, ScoreMode::Exact);
    return {pass.loglik, std::move(pass.score)};
}

Eigen::MatrixXd hessian(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data) {
    const Eigen::VectorXd theta0 = params.pack();
    const int d = spec.dim();
    Eigen::MatrixXd h(d, d);
    const double base_step = std::cbrt(std::numeric_limits<double>::epsilon());
    for (int j = 0; j < d; ++j) {
        double step = base_step * std::max(1.0, std::abs(theta0(j)));
        if (j == spec.sigma_index()) step = std::min(step, 0.5 * theta0(j));
        Eigen::VectorXd plus = theta0;
        Eigen::VectorXd minus = theta0;
        plus(j) += step;
        minus(j) -= step;
        const Eigen::VectorXd sp = score(spec, ParamVector::unpack(spec, plus), data);
        const Eigen::VectorXd sm = score(spec, ParamVector::unpack(spec, minus), data);
        h.col(j) = (sp - sm) / (plus(j) - minus(j));
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= 1e-3 * scale)) {
        throw NumericError("finite-difference Hessian is not symmetric (asymmetry " +
                           std::to_string(asym) + ")");
    }
    return 0.5 * (h + h.transpose());
}

Eigen::MatrixXd hessian_analytic(const ModelSpec& spec, const ParamVector& params,
                                 const BoundedSeries& data) {
    if (spec.q != 0) throw DomainError("analytic Hessian is available only for pure AR models");
    check_inputs(spec, params, data);
    const std::size_t n = data.size();
    const std::size_t m = static_cast<std::size_t>(spec.m());
    const auto s = link_values(spec.link, data.y);
    Eigen::MatrixXd jac;
    const RecursionState st = recursion_pass(spec, params, data, s, &jac, ScoreMode::Exact);

    const int d = spec.dim() - 1;
    const int is = spec.sigma_index();
    const double sigma = params.sigma;
    const double qz = quantile(spec.kernel, spec.tau);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(spec.dim(), spec.dim());
    h(is, is) = static_cast<double>(n - m) / (sigma * sigma);

    for (std::size_t t = m; t < n; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        const double eta = st.eta[t];
        const double lg = logit(data.y[t]) - logit_of_inverse(spec.link, eta);
        const double w = lg / sigma + qz;
        const double psi = log_pdf_deriv1(spec.kernel, w);
        const double dpsi = log_pdf_deriv2(spec.kernel, w);
        const double h1 = logit_of_inverse_deriv1(spec.link, eta);
        const double h2 = logit_of_inverse_deriv2(spec.link, eta);
        const Eigen::VectorXd deta = jac.row(ti).transpose();

        // w_a = -h1 eta_a / sigma, w_sigma = -lg / sigma^2.
        Eigen::VectorXd dw(spec.dim());
        dw.head(d) = (-h1 / sigma) * deta;
        dw(is) = -lg / (sigma * sigma);

        Eigen::MatrixXd d2w = Eigen::MatrixXd::Zero(spec.dim(), spec.dim());
        d2w.topLeftCorner(d, d) = (-h2 / sigma) * deta * deta.transpose();
        // eta_{beta_l, phi_u} = -x_{t-u, l}; all other second derivatives of eta vanish.
        for (int l = 0; l < spec.k; ++l) {
            for (int u = 0; u < spec.p; ++u) {
                const double v = (-h1 / sigma) * -data.x(ti - 1 - u, l);
                d2w(spec.beta_index(l), spec.phi_index(u)) += v;
                d2w(spec.phi_index(u), spec.beta_index(l)) += v;
            }
        }
        d2w.block(0, is, d, 1) = (h1 / (sigma * sigma)) * deta;
        d2w.block(is, 0, 1, d) = d2w.block(0, is, d, 1).transpose();
        d2w(is, is) = 2.0 * lg / (sigma * sigma * sigma);

        h += dpsi * dw * dw.transpose() + psi * d2w;
    }
    return h;
}

}  // namespace quls
