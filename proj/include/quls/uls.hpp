#pragma once

#include "quls/kernel.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace quls {

/// ULS(eta, sigma) in its original location/dispersion form.
struct UlsParams {
    double eta = 1.0;
    double sigma = 1.0;
    SymmetricKernel kernel = SymmetricKernel::normal();
};

/// ULS in the quantile parameterization: q_tau is the tau-th quantile of Y.
struct QulsParams {
    double q_tau = 0.5;
    double sigma = 1.0;
    double tau = 0.5;
    SymmetricKernel kernel = SymmetricKernel::normal();
};

double uls_pdf(const UlsParams& params, double y);
double uls_cdf(const UlsParams& params, double y);
double uls_quantile(const UlsParams& params, double tau);

/// eta = q/(1-q) * exp(-sigma * Q_Z(tau)).
double eta_from_quantile(double q_tau, double sigma, double tau, const SymmetricKernel& kernel);

double quls_pdf(const QulsParams& params, double y);
double quls_log_pdf(const QulsParams& params, double y);
double quls_cdf(const QulsParams& params, double y);

/// Standardized kernel argument (1/sigma) log[y(1-q) exp(sigma Q_Z(tau)) / (q(1-y))].
double quls_standardized(const QulsParams& params, double y);

/// Draws g_inv(g(q_tau) + sigma (Z - Q_Z(tau))) with logit g and Z from the kernel.
std::vector<double> quls_sample(const QulsParams& params, std::size_t count, std::uint64_t seed);

/// Same representation with a caller-supplied source of kernel draws.
std::vector<double> quls_sample(const QulsParams& params, std::size_t count,
                                const std::function<double()>& kernel_draw);

}  // namespace quls
