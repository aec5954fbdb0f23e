#include "doctest.h"

#include "swelab/covariance.hpp"
#include "swelab/oracles.hpp"
#include "swelab/special.hpp"

#include <cmath>
#include <random>

using namespace swelab;

namespace {

double rel(double got, double want) {
    return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1e-300});
}

} // namespace

TEST_CASE("spectral constant closed forms agree across the beta range") {
    for (double beta = 0.1; beta < 0.95; beta += 0.1) {
        const double form_a = std::sqrt(M_PI) * std::pow(2.0, 1.0 - beta) *
                              gamma_fn((1.0 - beta) / 2.0) / gamma_fn(beta / 2.0);
        const double form_b =
            2.0 * gamma_fn(2.0 - beta) * std::sin(M_PI * beta / 2.0) / (1.0 - beta);
        CAPTURE(beta);
        CHECK(rel(form_a, form_b) < 1e-12);
        CHECK(rel(make_params(beta).c_beta, form_a) < 1e-12);
    }
}

TEST_CASE("make_params rejects beta outside (0, 1)") {
    CHECK_THROWS(make_params(0.0));
    CHECK_THROWS(make_params(1.0));
    CHECK_THROWS(make_params(-0.3));
}

TEST_CASE("segment cross energy matches the quadrature oracle") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unif(0.0, 3.0);
    for (double beta : {0.3, 0.5, 0.8}) {
        const auto p = make_params(beta);
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            const double a = unif(gen), b = a + unif(gen);
            const double c = unif(gen) - 1.5, d = c + unif(gen);
            worst = std::max(worst, rel(segment_cross_energy(p, {a, b}, {c, d}),
                                        oracle_segment_cross_energy(p, {a, b}, {c, d})));
        }
        CAPTURE(beta);
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("segment cross energy is symmetric and vanishes on degenerate segments") {
    const auto p = make_params(0.5);
    CHECK(segment_cross_energy(p, {0.0, 1.0}, {2.0, 3.5}) ==
          doctest::Approx(segment_cross_energy(p, {2.0, 3.5}, {0.0, 1.0})).epsilon(1e-15));
    CHECK(segment_cross_energy(p, {1.0, 1.0}, {0.0, 2.0}) == doctest::Approx(0.0));
    CHECK(segment_cross_energy(p, {0.0, 2.0}, {1.5, 1.5}) == doctest::Approx(0.0));
}

TEST_CASE("field covariance: apex variance closed form and quadrature oracle") {
    for (double beta : {0.2, 0.5, 0.8}) {
        const auto p = make_params(beta);
        const LightCone cone(PlanePoint::from_tx(1.0, 0.0));
        const double closed =
            std::pow(2.0, 1.0 - beta) / ((1.0 - beta) * (2.0 - beta) * (3.0 - beta));
        CAPTURE(beta);
        CHECK(rel(field_covariance(p, cone, cone), closed) < 1e-12);
        CHECK(rel(field_covariance(p, cone, cone), oracle_field_covariance(p, cone, cone)) <
              1e-8);
    }
}

TEST_CASE("field covariance of disjoint time bands is exactly zero") {
    const auto p = make_params(0.5);
    const LightCone early(PlanePoint::from_tx(1.2, 0.3), TimeBand::upto(0.4));
    const LightCone late(PlanePoint::from_tx(1.2, 0.3), TimeBand::from(0.4));
    CHECK(field_covariance(p, early, late) == 0.0);
}

TEST_CASE("banded covariances add up to the unbanded covariance") {
    const auto p = make_params(0.4);
    const LightCone a(PlanePoint::from_tx(1.5, 0.2));
    const LightCone b(PlanePoint::from_tx(1.1, -0.4));
    const double cut = 0.6;
    const LightCone a_lo(a.apex, TimeBand::upto(cut)), a_hi(a.apex, TimeBand::from(cut));
    const double total = field_covariance(p, a_lo, b) + field_covariance(p, a_hi, b);
    CHECK(rel(total, field_covariance(p, a, b)) < 1e-13);
}

TEST_CASE("increment variance equals the three-term covariance combination") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unif(0.05, 2.5);
    for (double beta : {0.3, 0.5, 0.8}) {
        const auto p = make_params(beta);
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            const double tau = unif(gen), lambda = unif(gen), h = unif(gen);
            const double combo =
                utilde_covariance(p, tau, lambda + h, tau, lambda + h) -
                2.0 * utilde_covariance(p, tau, lambda + h, tau, lambda) +
                utilde_covariance(p, tau, lambda, tau, lambda);
            worst = std::max(worst, std::abs(increment_variance(p, tau, lambda, h) - combo));
        }
        CAPTURE(beta);
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("rectangle increment variance: four-point route and lambda invariance") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> unif(0.05, 2.0);
    const auto p = make_params(0.5);
    for (int i = 0; i < 30; ++i) {
        const double tau = unif(gen);
        const double tau2 = tau + 0.2 + unif(gen);
        const double lambda = unif(gen);
        std::uniform_real_distribution<double> hu(1e-3, tau2 - tau);
        const double h = hu(gen);
        const double direct = rectangle_increment_variance(p, tau, tau2, lambda, h);
        const double combo = rectangle_increment_variance_4pt(p, tau, tau2, lambda, h);
        CHECK(std::abs(direct - combo) < 1e-9);
        CHECK(std::abs(combo - rectangle_increment_variance_4pt(p, tau, tau2, lambda + 4.0,
                                                                h)) < 1e-10);
    }
}

TEST_CASE("rectangle increment variance enforces its regime precondition") {
    const auto p = make_params(0.5);
    CHECK_THROWS(rectangle_increment_variance(p, 1.0, 1.2, 0.5, 0.5));
}

TEST_CASE("dyadic increment correlation: unit diagonal, range, decay") {
    for (double beta : {0.3, 0.5, 0.8}) {
        const auto p = make_params(beta);
        CAPTURE(beta);
        CHECK(dyadic_increment_correlation(p, 1.0, 1.0, 2.0, 4, 4) == doctest::Approx(1.0));
        for (double q : {2.0, 4.0}) {
            for (int j = 1; j <= 4; ++j) {
                double prev = 2.0;
                for (int k = j + 2; k <= 12; ++k) {
                    const double r = dyadic_increment_correlation(p, 1.0, 1.0, q, j, k);
                    CHECK(r >= -1e-12);
                    CHECK(r <= 1.0 + 1e-12);
                    CHECK(r < prev);
                    prev = r;
                }
            }
        }
    }
}

TEST_CASE("v1 cross-section covariance: closed form vs banded cones") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> unif(0.1, 2.5);
    for (double beta : {0.3, 0.5, 0.8}) {
        const auto p = make_params(beta);
        CAPTURE(beta);
        for (int i = 0; i < 8; ++i) {
            const double l1 = unif(gen), l2 = unif(gen);
            CHECK(std::abs(v1_crosssection_covariance(p, 1.0, l1, l2) -
                           v1_crosssection_covariance_via_cones(p, 1.0, l1, l2)) < 1e-9);
        }
    }
}

TEST_CASE("v1 scaling constant turns the cross-section into a standard fBm") {
    for (double beta : {0.3, 0.5, 0.8}) {
        const auto p = make_params(beta);
        const double c0 = v1_fbm_scale_constant(p, 1.3);
        const double hurst2 = 2.0 - beta; // twice the Hurst exponent
        for (double l1 : {0.4, 1.1}) {
            for (double l2 : {0.7, 2.3}) {
                const double fbm_cov = 0.5 * (std::pow(l1, hurst2) + std::pow(l2, hurst2) -
                                              std::pow(std::abs(l1 - l2), hurst2));
                CAPTURE(beta);
                CHECK(rel(c0 * c0 * v1_crosssection_covariance(p, 1.3, l1, l2), fbm_cov) <
                      1e-12);
            }
        }
    }
}

TEST_CASE("shift invariance residual is negligible on mixed grids") {
    std::vector<std::vector<std::pair<double, double>>> grids = {
        {{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}},
        {{0.2, 1.7}, {0.9, 0.1}, {1.4, 2.2}, {0.6, 0.6}},
        {{0.0, 2.0}, {1.0, 0.0}, {2.0, 1.0}},
    };
    for (double beta : {0.3, 0.5, 0.8}) {
        const auto p = make_params(beta);
        for (const auto& g : grids) {
            CAPTURE(beta);
            CHECK(shift_invariance_residual(p, 1.0, g) < 1e-10);
        }
    }
}

TEST_CASE("canonical metric: symmetry, zero at coincidence, Hoelder window") {
    const auto p = make_params(0.5);
    CHECK(canonical_metric(p, 1.0, 0.2, 1.0, 0.2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(canonical_metric(p, 1.0, 0.2, 1.5, -0.3) ==
          doctest::Approx(canonical_metric(p, 1.5, -0.3, 1.0, 0.2)).epsilon(1e-14));
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> ut(1.0, 2.0), ux(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double t1 = ut(gen), x1 = ux(gen), t2 = ut(gen), x2 = ux(gen);
        const double dist = std::abs(t1 - t2) + std::abs(x1 - x2);
        if (dist < 1e-6) continue;
        const double ratio =
            canonical_metric(p, t1, x1, t2, x2) / std::pow(dist, (2.0 - p.beta) / 2.0);
        CHECK(ratio > 0.0);
        CHECK(ratio < 10.0);
    }
}
