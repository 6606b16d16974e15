#include "doctest.h"
#include "oracles.hpp"

#include "quls/error.hpp"
#include "quls/link.hpp"

#include <cmath>

using namespace quls;

namespace {
constexpr LinkFunction kAll[] = {LinkFunction::Logit, LinkFunction::Probit, LinkFunction::Cloglog};
}

TEST_CASE("g reference values") {
    CHECK(g(LinkFunction::Logit, 0.5) == 0.0);
    CHECK(g(LinkFunction::Logit, 0.5368) == doctest::Approx(std::log(0.5368 / 0.4632)).epsilon(1e-15));
    CHECK(g(LinkFunction::Logit, 0.5368) == doctest::Approx(0.14746665939868658).epsilon(1e-13));
    CHECK(g(LinkFunction::Probit, 0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    for (auto link : kAll) {
        CHECK_THROWS_AS(g(link, 0.0), DomainError);
        CHECK_THROWS_AS(g(link, 1.0), DomainError);
        CHECK_THROWS_AS(g_deriv(link, 1.5), DomainError);
    }
}

TEST_CASE("g_inv reference values and saturation") {
    CHECK(g_inv(LinkFunction::Logit, 0.0) == 0.5);
    CHECK(g_inv(LinkFunction::Logit, 0.14746665939868658) == doctest::Approx(0.5368).epsilon(1e-14));
    CHECK(g_inv(LinkFunction::Cloglog, 0.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    for (auto link : kAll) {
        for (double eta : {-1e4, -800.0, 800.0, 1e4}) {
            const double u = g_inv(link, eta);
            CHECK(u > 0.0);
            CHECK(u < 1.0);
            CHECK(std::isfinite(std::log(u * (1.0 - u))));
        }
        CHECK_THROWS_AS(g_inv(link, std::nan("")), DomainError);
    }
}

TEST_CASE("g_deriv reference values") {
    CHECK(g_deriv(LinkFunction::Logit, 0.5) == 4.0);
    CHECK(g_deriv(LinkFunction::Logit, 0.25) == doctest::Approx(16.0 / 3.0).epsilon(1e-15));
    CHECK(g_deriv(LinkFunction::Probit, 0.5) == doctest::Approx(2.5066282746310002).epsilon(1e-14));
}

TEST_CASE("roundtrip and monotonicity") {
    for (auto link : kAll) {
        for (double u = 1e-9; u < 1.0 - 1e-9; u = u < 0.01 ? u * 3.0 : (u > 0.99 ? 1.0 - (1.0 - u) / 3.0 : u + 0.01)) {
            CHECK(std::abs(g_inv(link, g(link, u)) - u) < 1e-10);
        }
        double prev = -INFINITY;
        for (int i = 1; i < 10000; ++i) {
            const double u = i / 10000.0;
            const double v = g(link, u);
            CHECK(v > prev);
            CHECK(g_deriv(link, u) > 0.0);
            prev = v;
        }
    }
}

TEST_CASE("derivatives match finite differences") {
    for (auto link : kAll) {
        for (double u : {0.01, 0.2, 0.5, 0.77, 0.97}) {
            const double h = 1e-4 * std::min(u, 1.0 - u);
            const double d1 = oracle::derivative([&](double v) { return g(link, v); }, u, h);
            const double d2 = oracle::derivative([&](double v) { return g_deriv(link, v); }, u, h);
            CHECK(std::abs(g_deriv(link, u) - d1) <= 1e-7 * std::abs(d1));
            CHECK(std::abs(g_deriv2(link, u) - d2) <= 1e-6 * std::max(std::abs(d2), 1.0));
        }
        for (double eta : {-2.5, -0.4, 0.0, 0.9, 2.0}) {
            const auto f = [&](double e) { return logit_of_inverse(link, e); };
            const auto f1 = [&](double e) { return logit_of_inverse_deriv1(link, e); };
            const double u = g_inv(link, eta);
            CHECK(logit_of_inverse(link, eta) == doctest::Approx(std::log(u / (1.0 - u))).epsilon(1e-12));
            CHECK(logit_of_inverse_deriv1(link, eta) ==
                  doctest::Approx(oracle::derivative(f, eta, 1e-3)).epsilon(1e-8));
            CHECK(logit_of_inverse_deriv2(link, eta) ==
                  doctest::Approx(oracle::derivative(f1, eta, 1e-3)).epsilon(1e-7));
        }
    }
}

TEST_CASE("parse_link") {
    CHECK(parse_link("logit") == LinkFunction::Logit);
    CHECK(parse_link("probit") == LinkFunction::Probit);
    CHECK(parse_link("cloglog") == LinkFunction::Cloglog);
    CHECK(to_string(LinkFunction::Cloglog) == "cloglog");
    CHECK_THROWS_AS(parse_link("identity"), InputError);
}
