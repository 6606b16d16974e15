#include "quls/uls.hpp"

#include "quls/error.hpp"
#include "quls/link.hpp"
#include "quls/rng.hpp"

#include <cmath>
#include <string>

namespace quls {

namespace {

void require_unit(double v, const char* what) {
    if (!(v > 0.0 && v < 1.0)) {
        throw DomainError(std::string(what) + " must lie in (0, 1)");
    }
}

void require_positive(double v, const char* what) {
    if (!(std::isfinite(v) && v > 0.0)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

double logit(double u) { return std::log(u) - std::log1p(-u); }

double uls_argument(const UlsParams& params, double y) {
    require_positive(params.eta, "uls: eta");
    require_positive(params.sigma, "uls: sigma");
    require_unit(y, "uls: y");
    return (logit(y) - std::log(params.eta)) / params.sigma;
}

void validate(const QulsParams& params) {
    require_unit(params.q_tau, "quls: q_tau");
    require_unit(params.tau, "quls: tau");
    require_positive(params.sigma, "quls: sigma");
}

}  // namespace

double uls_pdf(const UlsParams& params, double y) {
    const double z = uls_argument(params, y);
    return pdf(params.kernel, z) / (params.sigma * y * (1.0 - y));
}

double uls_cdf(const UlsParams& params, double y) {
    return cdf(params.kernel, uls_argument(params, y));
}

double uls_quantile(const UlsParams& params, double tau) {
    require_positive(params.eta, "uls: eta");
    require_positive(params.sigma, "uls: sigma");
    require_unit(tau, "uls: tau");
    // eta e^{s} / (1 + eta e^{s}) as a logistic of log(eta) + s.
    const double a = std::log(params.eta) + params.sigma * quantile(params.kernel, tau);
    return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
}

double eta_from_quantile(double q_tau, double sigma, double tau, const SymmetricKernel& kernel) {
    require_unit(q_tau, "eta_from_quantile: q_tau");
    require_unit(tau, "eta_from_quantile: tau");
    require_positive(sigma, "eta_from_quantile: sigma");
    return std::exp(logit(q_tau) - sigma * quantile(kernel, tau));
}

double quls_standardized(const QulsParams& params, double y) {
    validate(params);
    require_unit(y, "quls: y");
    return (logit(y) - logit(params.q_tau)) / params.sigma + quantile(params.kernel, params.tau);
}

double quls_log_pdf(const QulsParams& params, double y) {
    const double w = quls_standardized(params, y);
    return log_pdf(params.kernel, w) - std::log(params.sigma * y * (1.0 - y));
}

double quls_pdf(const QulsParams& params, double y) {
    const double w = quls_standardized(params, y);
    return pdf(params.kernel, w) / (params.sigma * y * (1.0 - y));
}

double quls_cdf(const QulsParams& params, double y) {
    return cdf(params.kernel, quls_standardized(params, y));
}

std::vector<double> quls_sample(const QulsParams& params, std::size_t count,
                                const std::function<double()>& kernel_draw) {
    validate(params);
    const double center = g(LinkFunction::Logit, params.q_tau);
    const double shift = quantile(params.kernel, params.tau);
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(g_inv(LinkFunction::Logit, center + params.sigma * (kernel_draw() - shift)));
    }
    return out;
}

std::vector<double> quls_sample(const QulsParams& params, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw DomainError("quls_sample: count must be positive");
    CounterRng rng(seed);
    return quls_sample(params, count, [&rng, &params] { return rng.draw(params.kernel); });
}

}  // namespace quls
