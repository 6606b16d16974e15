#pragma once

#include "quls/model.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace quls {

struct ForecastResult {
    int horizon = 0;
    std::vector<double> y_hat;
    std::vector<double> eta_hat;
};

/**
 * Iterated h-step forecasts from the end of `data`: future link-scale
 * observations are replaced by their forecasts and future innovations by zero.
 * `future_x` must have h rows and k columns when k > 0.
 */
ForecastResult forecast(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data,
                        int h, const Eigen::MatrixXd& future_x = Eigen::MatrixXd());

struct ForecastErrors {
    double mse = 0.0;
    double mape = 0.0;  // percent
};

ForecastErrors forecast_errors(std::span<const double> actual, std::span<const double> predicted);

/// Harmonic rows for the h periods following `observed` in-sample rows.
Eigen::MatrixXd future_harmonics(int observed, int h, int period = 12, int first_index = 1);

}  // namespace quls
