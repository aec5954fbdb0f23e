#include "doctest.h"

#include "swelab/gaussian.hpp"

#include <cmath>

using namespace swelab;

TEST_CASE("standard normal survival: values, symmetry, tail bound") {
    CHECK(gaussian_survival(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gaussian_survival(1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-12));
    for (double x : {0.3, 1.0, 2.5}) {
        CHECK(gaussian_survival(x) + gaussian_survival(-x) ==
              doctest::Approx(1.0).epsilon(1e-14));
        // standard lower bound x/(1+x^2) * density <= survival
        const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        CHECK(gaussian_survival(x) >= x / (1.0 + x * x) * density);
        CHECK(gaussian_survival(x) <= density / x);
    }
}

TEST_CASE("bivariate orthant probability: independence, closed form, symmetry") {
    CHECK(std::abs(bivariate_upper_orthant(0.7, 1.1, 0.0) -
                   gaussian_survival(0.7) * gaussian_survival(1.1)) < 1e-12);
    for (double r : {-0.8, -0.3, 0.0, 0.3, 0.8}) {
        CHECK(std::abs(bivariate_upper_orthant(0.0, 0.0, r) - orthant_zero_closed_form(r)) <
              1e-10);
    }
    CHECK(std::abs(bivariate_upper_orthant(0.4, 1.2, 0.35) -
                   bivariate_upper_orthant(1.2, 0.4, 0.35)) < 1e-10);
}

TEST_CASE("orthant probability increases with correlation (comparison direction)") {
    for (double g : {0.0, 0.8}) {
        double prev = -1.0;
        for (double r : {-0.6, -0.2, 0.2, 0.6}) {
            const double p = bivariate_upper_orthant(g, g, r);
            CHECK(p > prev);
            prev = p;
        }
    }
}

TEST_CASE("mean-value identity behind the comparison lemma") {
    for (double g1 : {0.5, 1.5}) {
        for (double g2 : {1.0, 2.0}) {
            for (double r : {0.2, 0.5}) {
                const auto rep = slepian_identity_check(g1, g2, r);
                CAPTURE(g1);
                CAPTURE(g2);
                CAPTURE(r);
                CHECK(rep.fd_deviation < 1e-5);
                CHECK(rep.bracket_found);
                CHECK(rep.residual < 1e-9);
                CHECK(rep.r_star >= 0.0);
                CHECK(rep.r_star <= r);
                // secant identity: p(r) - p(0) = r * g(g1, g2; r_star)
                CHECK(std::abs((rep.p_r - rep.p_zero) -
                               r * bivariate_density(g1, g2, rep.r_star)) < 1e-9);
            }
        }
    }
}

TEST_CASE("large-deviation probe matches the exact tail rate for one Gaussian") {
    CovMatrix m;
    m.entries = Eigen::MatrixXd::Identity(1, 1);
    factorize(m, 1e-6);
    const std::size_t n = 200000;
    const auto report = large_deviation_rate_probe(m, {2.0, 3.0}, 31, n);
    REQUIRE(report.points.size() == 2);
    CHECK(report.rate_limit == doctest::Approx(-0.5).epsilon(1e-12));
    for (const auto& pt : report.points) {
        REQUIRE(!pt.degenerate);
        const double exact =
            std::log(2.0 * gaussian_survival(pt.gamma)) / (pt.gamma * pt.gamma);
        CAPTURE(pt.gamma);
        CHECK(std::abs(pt.rate_estimate - exact) < 0.05);
        // the finite-level rate always undershoots the limit
        CHECK(pt.rate_estimate < report.rate_limit);
    }
}

TEST_CASE("large-deviation probe flags unreachable levels as degenerate") {
    CovMatrix m;
    m.entries = Eigen::MatrixXd::Identity(1, 1) * 0.01;
    factorize(m, 1e-6);
    const auto report = large_deviation_rate_probe(m, {5.0}, 33, 1000);
    REQUIRE(report.points.size() == 1);
    CHECK(report.points[0].degenerate);
    CHECK(report.points[0].exceed_count == 0);
}
