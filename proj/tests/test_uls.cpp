#include "doctest.h"
#include "oracles.hpp"

#include "quls/error.hpp"
#include "quls/rng.hpp"
#include "quls/uls.hpp"

#include <cmath>

using namespace quls;

namespace {
const SymmetricKernel kNormal = SymmetricKernel::normal();
const SymmetricKernel kT3 = SymmetricKernel::student_t(3.0);
}  // namespace

TEST_CASE("uls_pdf") {
    CHECK(uls_pdf({1.0, 0.1, kNormal}, 0.5) == doctest::Approx(15.957691216057308).epsilon(1e-13));
    for (double y : {0.05, 0.3, 0.61, 0.9}) {
        CHECK(uls_pdf({1.0, 1.0, kNormal}, y) == doctest::Approx(uls_pdf({1.0, 1.0, kNormal}, 1.0 - y)).epsilon(1e-13));
    }
    // Direct substitution into the closed form with an independent t density.
    const double z = (std::log(0.7 / 0.3) - std::log(2.0)) / 0.5;
    const double expected = oracle::t_pdf(z, 3.0) / (0.5 * 0.7 * 0.3);
    CHECK(std::abs(uls_pdf({2.0, 0.5, kT3}, 0.7) - expected) < 1e-10);
    CHECK_THROWS_AS(uls_pdf({1.0, 0.1, kNormal}, 1.0), DomainError);
    CHECK_THROWS_AS(uls_pdf({-1.0, 0.1, kNormal}, 0.5), DomainError);
}

TEST_CASE("uls_cdf and uls_quantile") {
    for (double s : {0.05, 0.7, 3.0}) CHECK(uls_cdf({1.0, s, kNormal}, 0.5) == 0.5);
    const UlsParams p{2.0, 0.5, kNormal};
    CHECK(uls_cdf(p, uls_quantile(p, 0.3)) == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(uls_cdf({1.0, 0.1, kNormal}, 0.6) == doctest::Approx(oracle::normal_cdf(std::log(1.5) / 0.1)).epsilon(1e-13));
    CHECK(uls_cdf({1.0, 0.1, kNormal}, 0.6) == doctest::Approx(0.9999748954044255).epsilon(1e-12));

    CHECK(uls_quantile({1.0, 0.5, kNormal}, 0.5) == 0.5);
    CHECK(uls_quantile({2.0, 1.0, kNormal}, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(uls_quantile({1.0, 1.0, kNormal}, 0.75) == doctest::Approx(0.6625077592515092).epsilon(1e-12));
    CHECK_THROWS_AS(uls_quantile(p, 1.2), DomainError);
}

TEST_CASE("eta_from_quantile") {
    CHECK(eta_from_quantile(0.5, 0.3, 0.5, kNormal) == 1.0);
    const double q = uls_quantile({3.0, 0.2, kNormal}, 0.25);
    CHECK(eta_from_quantile(q, 0.2, 0.25, kNormal) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(eta_from_quantile(0.6625077592515092, 1.0, 0.75, kNormal) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(eta_from_quantile(0.0, 1.0, 0.5, kNormal), DomainError);
    CHECK_THROWS_AS(eta_from_quantile(0.4, 0.0, 0.5, kNormal), DomainError);
}

TEST_CASE("quantile form agrees with the (eta, sigma) form") {
    CHECK(quls_pdf({0.5, 0.1, 0.5, kNormal}, 0.5) == doctest::Approx(15.957691216057308).epsilon(1e-13));
    CHECK(std::abs(quls_cdf({0.3, 0.2, 0.25, kT3}, 0.3) - 0.25) < 1e-10);
    CounterRng rng(7);
    for (int i = 0; i < 20; ++i) {
        const QulsParams p{rng.uniform(0.02, 0.98), rng.uniform(0.05, 2.0), rng.uniform(0.02, 0.98),
                           i % 2 ? kT3 : kNormal};
        CHECK(std::abs(quls_cdf(p, p.q_tau) - p.tau) < 1e-12);
        const UlsParams u{eta_from_quantile(p.q_tau, p.sigma, p.tau, p.kernel), p.sigma, p.kernel};
        for (double y : {0.03, 0.25, 0.5, 0.8, 0.96}) {
            CHECK(quls_pdf(p, y) == doctest::Approx(uls_pdf(u, y)).epsilon(1e-12));
            CHECK(std::abs(quls_cdf(p, y) - uls_cdf(u, y)) < 1e-12);
            if (quls_pdf(p, y) > 1e-300) {
                CHECK(quls_log_pdf(p, y) == doctest::Approx(std::log(quls_pdf(p, y))).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("quls_pdf integrates to one") {
    for (double q : {0.2, 0.5, 0.8}) {
        for (double sigma : {0.1, 0.5, 1.5}) {
            for (const auto& kernel : {kNormal, kT3}) {
                // 1 - Y is QULS(1 - q, sigma, 1 - tau) for a symmetric kernel.
                const QulsParams p{q, sigma, 0.3, kernel};
                const QulsParams mirror{1.0 - q, sigma, 0.7, kernel};
                const double total = oracle::integrate_unit([&](double y) { return quls_pdf(p, y); },
                                                            [&](double y) { return quls_pdf(mirror, y); });
                CHECK(std::abs(total - 1.0) < 1e-6);
            }
        }
    }
}

TEST_CASE("quls_sample") {
    const QulsParams stub{0.37, 0.4, 0.8, kNormal};
    const double qz = quantile(kNormal, 0.8);
    for (double y : quls_sample(stub, 50, [qz] { return qz; })) {
        CHECK(y == doctest::Approx(0.37).epsilon(1e-14));
    }

    const QulsParams p{0.4, 0.3, 0.5, kNormal};
    const auto draws = quls_sample(p, 100000, 2024);
    double below = 0.0;
    for (double y : draws) {
        CHECK(y > 0.0);
        CHECK(y < 1.0);
        below += y <= 0.4 ? 1.0 : 0.0;
    }
    CHECK(std::abs(below / draws.size() - 0.5) < 0.005);
    CHECK(oracle::ks_statistic(draws, [&](double y) { return quls_cdf(p, y); }) < 0.01);

    const QulsParams pt{0.3, 0.6, 0.25, kT3};
    const auto tdraws = quls_sample(pt, 100000, 99);
    CHECK(oracle::ks_statistic(tdraws, [&](double y) { return quls_cdf(pt, y); }) < 0.01);

    CHECK(quls_sample(p, 10, 5) == quls_sample(p, 10, 5));
    CHECK(quls_sample(p, 10, 5) != quls_sample(p, 10, 6));
    CHECK_THROWS_AS(quls_sample(p, 0, 5), DomainError);
}

TEST_CASE("mirror identity") {
    const QulsParams p{0.27, 0.6, 0.35, kT3};
    const QulsParams mirror{0.73, 0.6, 0.65, kT3};
    for (double y : {0.01, 0.2, 0.5, 0.9}) {
        CHECK(quls_pdf(p, y) == doctest::Approx(quls_pdf(mirror, 1.0 - y)).epsilon(1e-12));
        CHECK(quls_cdf(p, y) == doctest::Approx(1.0 - quls_cdf(mirror, 1.0 - y)).epsilon(1e-12));
    }
}

TEST_CASE("sampling KS distance shrinks with n") {
    const QulsParams p{0.6, 0.8, 0.4, kT3};
    const auto cdf = [&](double y) { return quls_cdf(p, y); };
    const double small = oracle::ks_statistic(quls_sample(p, 1000, 3), cdf);
    const double large = oracle::ks_statistic(quls_sample(p, 64000, 3), cdf);
    CHECK(small * std::sqrt(1000.0) < 2.0);
    CHECK(large * std::sqrt(64000.0) < 2.0);
    CHECK(large < small);
}
