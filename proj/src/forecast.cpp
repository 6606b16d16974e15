#include "quls/forecast.hpp"

#include "quls/error.hpp"
#include "quls/simulate.hpp"

#include <cmath>

namespace quls {

ForecastResult forecast(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data,
                        int h, const Eigen::MatrixXd& future_x) {
    if (h < 1) throw DomainError("forecast horizon must be positive");
    if (spec.k > 0) {
        if (future_x.rows() != h || future_x.cols() != spec.k) {
            throw InputError("forecasting " + std::to_string(h) + " steps needs a " + std::to_string(h) +
                             " x " + std::to_string(spec.k) + " matrix of future covariates");
        }
        if (!future_x.allFinite()) throw InputError("future covariates must be finite");
    } else if (future_x.size() != 0 && future_x.cols() != 0) {
        throw InputError("model has no covariates but future covariates were supplied");
    }

    const RecursionState st = run_recursion(spec, params, data);
    const std::size_t n = data.size();
    const std::size_t total = n + static_cast<std::size_t>(h);

    std::vector<double> s(total), r(total, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        s[t] = g(spec.link, data.y[t]);
        r[t] = st.r[t];
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(total), spec.k);
    if (spec.k > 0) {
        x.topRows(static_cast<Eigen::Index>(n)) = data.x;
        x.bottomRows(h) = future_x;
    }

    ForecastResult out;
    out.horizon = h;
    for (std::size_t t = n; t < total; ++t) {
        const double eta = linked_quantile_at(spec, params, s, x, r, t);
        if (!std::isfinite(eta)) throw NumericError("forecast overflowed at step " + std::to_string(t - n + 1));
        const double y = g_inv(spec.link, eta);
        out.eta_hat.push_back(eta);
        out.y_hat.push_back(y);
        s[t] = g(spec.link, y);
    }
    return out;
}

ForecastErrors forecast_errors(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw InputError("actual and predicted lengths differ");
    if (actual.empty()) throw InputError("no forecasts to evaluate");
    ForecastErrors e;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) throw DomainError("MAPE is undefined for a zero actual value");
        const double d = actual[i] - predicted[i];
        e.mse += d * d;
        e.mape += std::abs(d) / std::abs(actual[i]);
    }
    const double n = static_cast<double>(actual.size());
    e.mse /= n;
    e.mape *= 100.0 / n;
    return e;
}

Eigen::MatrixXd future_harmonics(int observed, int h, int period, int first_index) {
    return harmonic_covariates(h, period, first_index + observed);
}

}  // namespace quls
