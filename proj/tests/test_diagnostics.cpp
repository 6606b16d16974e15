#include "doctest.h"
#include "oracles.hpp"

#include "quls/diagnostics.hpp"
#include "quls/error.hpp"
#include "quls/estimate.hpp"
#include "quls/simulate.hpp"

#include <cmath>

using namespace quls;

TEST_CASE("residuals at the fitted median") {
    ModelSpec spec;
    spec.p = 1;
    ParamVector par;
    par.phi = {0.5};
    par.sigma = 0.4;
    BoundedSeries data;
    data.y = {0.35, 0.62};
    data.x = Eigen::MatrixXd(2, 0);
    par.alpha = g(LinkFunction::Logit, 0.62) - 0.5 * g(LinkFunction::Logit, 0.35);
    const ResidualSet r = residuals(spec, par, data);
    REQUIRE(r.fitted_cdf.size() == 1);
    CHECK(r.fitted_cdf[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(r.gcs[0] == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK(std::abs(r.rq[0]) < 1e-13);
}

TEST_CASE("residual identities and monotonicity") {
    auto cfg = ScenarioConfig::preset(Scenario::S4, 0.3, 200, 10);
    cfg.spec.kernel = SymmetricKernel::student_t(4.0);
    const BoundedSeries data = generate_series(cfg);
    const ResidualSet r = residuals(cfg.spec, cfg.true_params, data);
    REQUIRE(r.gcs.size() == 199);
    for (std::size_t i = 0; i < r.gcs.size(); ++i) {
        CHECK(r.gcs[i] >= 0.0);
        CHECK(r.gcs[i] == doctest::Approx(-std::log(1.0 - r.fitted_cdf[i])).epsilon(1e-12));
        CHECK(oracle::normal_cdf(r.rq[i]) == doctest::Approx(r.fitted_cdf[i]).epsilon(1e-10));
    }
    // Raising the final observation leaves earlier quantiles alone and raises its residuals.
    BoundedSeries bumped = data;
    bumped.y.back() = std::min(0.999, bumped.y.back() + 0.05);
    const ResidualSet rb = residuals(cfg.spec, cfg.true_params, bumped);
    CHECK(rb.fitted_cdf.back() > r.fitted_cdf.back());
    CHECK(rb.gcs.back() > r.gcs.back());
    CHECK(rb.rq.back() > r.rq.back());
}

TEST_CASE("clamping keeps residuals finite") {
    ModelSpec spec;
    spec.p = 1;
    ParamVector par;
    par.phi = {0.0};
    par.alpha = -5.0;
    par.sigma = 0.01;
    BoundedSeries data;
    data.y = {0.5, 0.99};
    data.x = Eigen::MatrixXd(2, 0);
    const ResidualSet r = residuals(spec, par, data);
    CHECK(r.fitted_cdf[0] == 1.0 - kCdfClamp);
    CHECK(std::isfinite(r.gcs[0]));
    CHECK(std::isfinite(r.rq[0]));
}

TEST_CASE("qq_data") {
    const auto exp_pairs = qq_data({0.3, 0.1, 2.0}, QqReference::Exp1);
    REQUIRE(exp_pairs.size() == 3);
    const double probs[] = {1.0 / 6.0, 0.5, 5.0 / 6.0};
    for (int i = 0; i < 3; ++i) CHECK(exp_pairs[static_cast<std::size_t>(i)].first == doctest::Approx(-std::log(1.0 - probs[i])).epsilon(1e-14));
    CHECK(exp_pairs[0].second == 0.1);
    CHECK(exp_pairs[2].second == 2.0);
    const auto single = qq_data({0.7}, QqReference::StdNormal);
    CHECK(std::abs(single[0].first) < 1e-15);
    CHECK(single[0].second == 0.7);
    CHECK_THROWS_AS(qq_data({}, QqReference::Exp1), InputError);

    // Exact reference quantiles as input collapse onto the diagonal.
    std::vector<double> v;
    for (int i = 0; i < 500; ++i) v.push_back(-std::log(1.0 - (i + 0.5) / 500.0));
    for (const auto& [a, b] : qq_data(v, QqReference::Exp1)) CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("Kolmogorov-Smirnov") {
    CHECK(kolmogorov_cdf(0.3) == doctest::Approx(9.305801334513752e-06).epsilon(1e-9));
    CHECK(kolmogorov_cdf(0.5) == doctest::Approx(0.03605475633512489).epsilon(1e-10));
    CHECK(kolmogorov_cdf(1.0) == doctest::Approx(0.7300003283226455).epsilon(1e-12));
    CHECK(kolmogorov_cdf(1.36) == doctest::Approx(0.9505141232446221).epsilon(1e-12));
    CHECK(kolmogorov_cdf(2.0) == doctest::Approx(0.9993290747442203).epsilon(1e-12));
    const std::vector<double> v{-1.2, 0.3, 0.5, -0.1, 2.2, 0.9, -0.7, 0.05};
    const KsResult ks = ks_test_normal(v);
    CHECK(ks.statistic == doctest::Approx(0.210172162722971).epsilon(1e-12));
    CHECK(ks.statistic == doctest::Approx(oracle::ks_statistic(v, oracle::normal_cdf)).epsilon(1e-12));
    const double sn = std::sqrt(8.0);
    CHECK(ks.p_value == doctest::Approx(1.0 - kolmogorov_cdf((sn + 0.12 + 0.11 / sn) * ks.statistic)));
    CHECK_THROWS_AS(ks_test_normal({}), InputError);
}

TEST_CASE("residuals of a correctly specified fit are calibrated") {
    auto cfg = ScenarioConfig::preset(Scenario::S1, 0.5, 1000, 2024);
    const BoundedSeries data = generate_series(cfg);
    const FitResult fitres = fit(cfg.spec, data);
    REQUIRE(fitres.converged);
    const ResidualSet r = residuals(cfg.spec, fitres.params, data);
    CHECK(std::abs(oracle::mean(r.gcs) - 1.0) < 0.1);
    CHECK(std::abs(oracle::variance(r.rq) - 1.0) < 0.15);
    CHECK(ks_test_normal(r.rq).p_value > 0.01);
}

TEST_CASE("qq_svg") {
    const std::string svg = qq_svg(qq_data({0.1, 0.5, 1.5}, QqReference::Exp1), "GCS");
    CHECK(svg.rfind("<svg", 0) == 0);
    std::size_t circles = 0;
    for (std::size_t pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
    CHECK(circles == 3);
}
