#include "quls/kernel.hpp"

#include "quls/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace quls {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5 * log(2*pi)

void require_finite(double z, const char* op) {
    if (!std::isfinite(z)) {
        throw DomainError(std::string(op) + ": argument must be finite");
    }
}

double t_log_norm_const(double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
           0.5 * std::log(nu * std::numbers::pi);
}

// Lower tail P(T <= z) for z <= 0 via I_x(nu/2, 1/2), x = nu / (nu + z^2).
double t_lower_tail(double nu, double z) {
    if (std::isinf(z)) return 0.0;
    const double x = nu / (nu + z * z);
    return 0.5 * boost::math::ibeta(0.5 * nu, 0.5, x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Acklam's rational approximation; relative error about 1.15e-9 before refinement.
double normal_quantile_rational(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double t_quantile_upper(double nu, double tau) {
    // tau > 0.5; solve P(T > z) = 1 - tau on z > 0 using the lower tail of -z.
    const double target = 1.0 - tau;
    const auto upper_tail = [nu](double z) { return t_lower_tail(nu, -z); };

    double lo = 0.0;
    double hi = 1.0;
    while (upper_tail(hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
    }
    // Bisection narrows the bracket; Newton finishes to machine precision.
    for (int i = 0; i < 40 && hi - lo > 1e-6 * (1.0 + lo); ++i) {
        const double mid = 0.5 * (lo + hi);
        (upper_tail(mid) > target ? lo : hi) = mid;
    }
    const auto kernel = SymmetricKernel::student_t(nu);
    double z = 0.5 * (lo + hi);
    for (int i = 0; i < 30; ++i) {
        const double resid = upper_tail(z) - target;
        if (resid == 0.0) return z;
        (resid > 0.0 ? lo : hi) = z;
        double next = z + resid / pdf(kernel, z);
        if (next < lo || next > hi) next = 0.5 * (lo + hi);
        if (std::abs(next - z) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(z)) {
            return next;
        }
        z = next;
    }
    return z;
}

}  // namespace

SymmetricKernel SymmetricKernel::student_t(double dof) {
    if (!(std::isfinite(dof) && dof > 0.0)) {
        throw DomainError("student_t: degrees of freedom must be positive and finite");
    }
    return SymmetricKernel(Kind::StudentT, dof);
}

std::string SymmetricKernel::name() const {
    if (kind_ == Kind::Normal) return "normal";
    std::string s = std::to_string(dof_);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return "t(" + s + ")";
}

double log_pdf(const SymmetricKernel& kernel, double z) {
    require_finite(z, "log_pdf");
    if (kernel.kind() == SymmetricKernel::Kind::Normal) {
        return -0.5 * z * z - kLogSqrt2Pi;
    }
    const double nu = *kernel.dof();
    return t_log_norm_const(nu) - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
}

double pdf(const SymmetricKernel& kernel, double z) {
    require_finite(z, "pdf");
    return std::exp(log_pdf(kernel, z));
}

double log_pdf_deriv1(const SymmetricKernel& kernel, double z) {
    require_finite(z, "log_pdf_deriv1");
    if (kernel.kind() == SymmetricKernel::Kind::Normal) return -z;
    const double nu = *kernel.dof();
    return -(nu + 1.0) * z / (nu + z * z);
}

double log_pdf_deriv2(const SymmetricKernel& kernel, double z) {
    require_finite(z, "log_pdf_deriv2");
    if (kernel.kind() == SymmetricKernel::Kind::Normal) return -1.0;
    const double nu = *kernel.dof();
    const double den = nu + z * z;
    return -(nu + 1.0) * (nu - z * z) / (den * den);
}

double pdf_deriv1(const SymmetricKernel& kernel, double z) {
    return pdf(kernel, z) * log_pdf_deriv1(kernel, z);
}

double pdf_deriv2(const SymmetricKernel& kernel, double z) {
    const double psi = log_pdf_deriv1(kernel, z);
    return pdf(kernel, z) * (psi * psi + log_pdf_deriv2(kernel, z));
}

double cdf(const SymmetricKernel& kernel, double z) {
    if (std::isnan(z)) throw DomainError("cdf: argument is NaN");
    if (kernel.kind() == SymmetricKernel::Kind::Normal) return normal_cdf(z);
    const double nu = *kernel.dof();
    if (z <= 0.0) return t_lower_tail(nu, z);
    return 1.0 - t_lower_tail(nu, -z);
}

double ccdf(const SymmetricKernel& kernel, double z) {
    if (std::isnan(z)) throw DomainError("ccdf: argument is NaN");
    return cdf(kernel, -z);
}

double quantile(const SymmetricKernel& kernel, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw DomainError("quantile: tau must lie in (0, 1)");
    }
    if (tau == 0.5) return 0.0;
    if (kernel.kind() == SymmetricKernel::Kind::Normal) return detail::normal_quantile(tau);
    const double nu = *kernel.dof();
    // The likelihood and residual code query the same (nu, tau) repeatedly.
    thread_local double last_nu = 0.0;
    thread_local double last_tau = 0.0;
    thread_local double last_value = 0.0;
    if (nu == last_nu && tau == last_tau) return last_value;
    const double value = tau > 0.5 ? t_quantile_upper(nu, tau) : -t_quantile_upper(nu, 1.0 - tau);
    last_nu = nu;
    last_tau = tau;
    last_value = value;
    return value;
}

namespace detail {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal_quantile: probability must lie in (0, 1)");
    }
    if (p == 0.5) return 0.0;
    // Work in the lower tail so the residual is computed without cancellation.
    const bool upper = p > 0.5;
    const double tail = upper ? 1.0 - p : p;
    double z = normal_quantile_rational(tail);
    // One Halley step on the CDF residual.
    const double e = normal_cdf(z) - tail;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
    z -= u / (1.0 + 0.5 * z * u);
    return upper ? -z : z;
}

}  // namespace detail

}  // namespace quls
