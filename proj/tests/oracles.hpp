#pragma once

// Independent reference computations used by the test suites. Nothing here
// calls into the library's numerical routines.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, tol);
}

/**
 * Integral over (0,1) of a density whose mirror image 1 - Y has density
 * `reflected_pdf`. Each half is integrated near zero, where doubles are dense
 * enough to resolve mass at log-odds far below -36; tanh-sinh clusters nodes
 * at that endpoint.
 */
inline double integrate_unit(const std::function<double(double)>& pdf,
                             const std::function<double(double)>& reflected_pdf) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const auto guard = [](const std::function<double(double)>& f) {
        return [&f](double y) { return y > 0.0 ? f(y) : 0.0; };
    };
    return ts.integrate(guard(pdf), 0.0, 0.5) + ts.integrate(guard(reflected_pdf), 0.0, 0.5);
}

/// Central difference with one Richardson extrapolation step (error O(h^4)).
inline double derivative(const std::function<double(double)>& f, double x, double h) {
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     int iterations = 200) {
    double flo = f(lo);
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section search for the maximizer of a unimodal f on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-12) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double t_pdf(double z, double nu) {
    const double c = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                     std::sqrt(nu * std::numbers::pi);
    return c * std::pow(1.0 + z * z / nu, -0.5 * (nu + 1.0));
}

/// Student-t CDF by quadrature of the closed-form density.
inline double t_cdf(double z, double nu) {
    const double half = integrate([nu](double u) { return t_pdf(u, nu); }, 0.0, std::abs(z), 1e-14);
    return z >= 0.0 ? 0.5 + half : 0.5 - half;
}

/// One-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace oracle
