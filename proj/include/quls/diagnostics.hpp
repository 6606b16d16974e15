#pragma once

#include "quls/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace quls {

/// Residuals for t = m+1..n of a fitted model.
struct ResidualSet {
    std::vector<double> gcs;         // generalized Cox-Snell, -log(1 - F)
    std::vector<double> rq;          // quantile residuals, Phi^{-1}(F)
    std::vector<double> fitted_cdf;  // F_t(y_t), clamped to (1e-12, 1 - 1e-12)
};

inline constexpr double kCdfClamp = 1e-12;

/// The ULS law is continuous, so the quantile residual needs no randomization.
ResidualSet residuals(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data);

enum class QqReference { Exp1, StdNormal };

/// (theoretical, empirical) pairs at plotting positions (i - 0.5)/n.
std::vector<std::pair<double, double>> qq_data(std::vector<double> values, QqReference reference);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against N(0,1) (asymptotic law with
/// Stephens' small-sample correction).
KsResult ks_test_normal(std::vector<double> values);

/// Distribution function of the Kolmogorov limit law, P(K <= x).
double kolmogorov_cdf(double x);

/// Standalone SVG scatter of QQ pairs with the identity line.
std::string qq_svg(const std::vector<std::pair<double, double>>& pairs, const std::string& title);

}  // namespace quls
