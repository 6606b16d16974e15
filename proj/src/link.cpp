#include "quls/link.hpp"

#include "quls/error.hpp"
#include "quls/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace quls {

namespace {

void require_unit(double u, const char* op) {
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError(std::string(op) + ": argument must lie in (0, 1)");
    }
}

double clamp_unit(double u) { return std::clamp(u, kLinkEpsilon, 1.0 - kLinkEpsilon); }

double std_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double g(LinkFunction link, double u) {
    require_unit(u, "g");
    switch (link) {
        case LinkFunction::Logit:
            return std::log(u) - std::log1p(-u);
        case LinkFunction::Probit:
            return detail::normal_quantile(u);
        case LinkFunction::Cloglog:
            return std::log(-std::log1p(-u));
    }
    return 0.0;
}

double g_inv(LinkFunction link, double eta) {
    if (!std::isfinite(eta)) throw DomainError("g_inv: argument must be finite");
    switch (link) {
        case LinkFunction::Logit:
            return clamp_unit(eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta))
                                         : std::exp(eta) / (1.0 + std::exp(eta)));
        case LinkFunction::Probit:
            return clamp_unit(0.5 * std::erfc(-eta / std::numbers::sqrt2));
        case LinkFunction::Cloglog:
            return clamp_unit(-std::expm1(-std::exp(eta)));
    }
    return 0.5;
}

double g_deriv(LinkFunction link, double u) {
    require_unit(u, "g_deriv");
    switch (link) {
        case LinkFunction::Logit:
            return 1.0 / (u * (1.0 - u));
        case LinkFunction::Probit:
            return 1.0 / std_normal_pdf(detail::normal_quantile(u));
        case LinkFunction::Cloglog: {
            const double v = 1.0 - u;
            return 1.0 / (v * -std::log1p(-u));
        }
    }
    return 0.0;
}

double g_deriv2(LinkFunction link, double u) {
    require_unit(u, "g_deriv2");
    switch (link) {
        case LinkFunction::Logit: {
            const double w = u * (1.0 - u);
            return (2.0 * u - 1.0) / (w * w);
        }
        case LinkFunction::Probit: {
            const double z = detail::normal_quantile(u);
            const double phi = std_normal_pdf(z);
            return z / (phi * phi);
        }
        case LinkFunction::Cloglog: {
            const double v = 1.0 - u;
            const double l = -std::log1p(-u);
            return (l - 1.0) / (v * v * l * l);
        }
    }
    return 0.0;
}

double logit_of_inverse(LinkFunction link, double eta) {
    if (!std::isfinite(eta)) throw DomainError("logit_of_inverse: argument must be finite");
    constexpr double kMax = 36.04365338911715;  // logit(1 - kLinkEpsilon)
    switch (link) {
        case LinkFunction::Logit:
            return std::clamp(eta, -kMax, kMax);
        case LinkFunction::Probit: {
            // log Phi(eta) - log Phi(-eta)
            const double lo = std::log(0.5 * std::erfc(-eta / std::numbers::sqrt2));
            const double hi = std::log(0.5 * std::erfc(eta / std::numbers::sqrt2));
            return std::clamp(lo - hi, -kMax, kMax);
        }
        case LinkFunction::Cloglog: {
            // q = 1 - exp(-e^eta): log q - log(1 - q) = log(-expm1(-e^eta)) + e^eta
            const double e = std::exp(eta);
            return std::clamp(std::log(-std::expm1(-e)) + e, -kMax, kMax);
        }
    }
    return 0.0;
}

namespace {

// Inverse Mills ratios phi(eta)/Phi(eta) and phi(eta)/Phi(-eta).
std::pair<double, double> mills_pair(double eta) {
    const double phi = std_normal_pdf(eta);
    return {phi / (0.5 * std::erfc(-eta / std::numbers::sqrt2)),
            phi / (0.5 * std::erfc(eta / std::numbers::sqrt2))};
}

}  // namespace

double logit_of_inverse_deriv1(LinkFunction link, double eta) {
    switch (link) {
        case LinkFunction::Logit:
            return 1.0;
        case LinkFunction::Probit: {
            const auto [a, b] = mills_pair(eta);
            return a + b;
        }
        case LinkFunction::Cloglog: {
            const double e = std::exp(eta);
            return e / -std::expm1(-e);
        }
    }
    return 0.0;
}

double logit_of_inverse_deriv2(LinkFunction link, double eta) {
    switch (link) {
        case LinkFunction::Logit:
            return 0.0;
        case LinkFunction::Probit: {
            const auto [a, b] = mills_pair(eta);
            return -eta * (a + b) - a * a + b * b;
        }
        case LinkFunction::Cloglog: {
            const double e = std::exp(eta);
            const double d = -std::expm1(-e);
            return e * (d - e * std::exp(-e)) / (d * d);
        }
    }
    return 0.0;
}

std::string to_string(LinkFunction link) {
    switch (link) {
        case LinkFunction::Logit:
            return "logit";
        case LinkFunction::Probit:
            return "probit";
        case LinkFunction::Cloglog:
            return "cloglog";
    }
    return "unknown";
}

LinkFunction parse_link(std::string_view name) {
    if (name == "logit") return LinkFunction::Logit;
    if (name == "probit") return LinkFunction::Probit;
    if (name == "cloglog") return LinkFunction::Cloglog;
    throw InputError("unknown link '" + std::string(name) + "' (expected logit|probit|cloglog)");
}

}  // namespace quls
