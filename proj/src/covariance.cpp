#include "swelab/covariance.hpp"

#include <algorithm>
#include <cmath>

namespace swelab {

namespace {

double pow_abs(double u, double e) { return std::pow(std::abs(u), e); }

// Antiderivative used for the s-linear energy terms:
// d/du [ sign(u) |u|^{p+1} / (p+1) ] = |u|^p, valid across u = 0.
double signed_power_primitive(double u, double p) {
    return std::copysign(std::pow(std::abs(u), p + 1.0), u) / (p + 1.0);
}

} // namespace

double segment_cross_energy(const ModelParams& p, const Segment& s1, const Segment& s2) {
    const double e = 2.0 - p.beta;
    const double k = 1.0 / ((2.0 - p.beta) * (1.0 - p.beta));
    const double a = s1.a, b = s1.b, c = s2.a, d = s2.b;
    return k * (pow_abs(c - b, e) + pow_abs(d - a, e) - pow_abs(c - a, e) -
                pow_abs(d - b, e));
}

double field_covariance(const ModelParams& p, const LightCone& a, const LightCone& b) {
    const double ta = a.apex.t, xa = a.apex.x;
    const double tb = b.apex.t, xb = b.apex.x;

    double s0 = 0.0;
    double s1 = std::min(ta, tb);
    if (a.band) {
        s0 = std::max(s0, a.band->s_lo);
        s1 = std::min(s1, a.band->s_hi);
    }
    if (b.band) {
        s0 = std::max(s0, b.band->s_lo);
        s1 = std::min(s1, b.band->s_hi);
    }
    if (!(s0 < s1)) return 0.0;

    const double e = 2.0 - p.beta;
    const double k = 1.0 / ((2.0 - p.beta) * (1.0 - p.beta));

    // Slice endpoints: A(s) = [xa-(ta-s), xa+(ta-s)], B(s) likewise. The
    // four energy terms are
    //   u1(s) = (xb - tb) - (xa + ta) + 2s      (slope +2)
    //   u2(s) = (xb + tb) - (xa - ta) - 2s      (slope -2)
    //   u3    = (xb - tb) - (xa - ta)           (constant)
    //   u4    = (xb + tb) - (xa + ta)           (constant)
    const double c1 = (xb - tb) - (xa + ta);
    const double c2 = (xb + tb) - (xa - ta);
    const double u3 = (xb - tb) - (xa - ta);
    const double u4 = (xb + tb) - (xa + ta);

    const double i1 =
        (signed_power_primitive(c1 + 2.0 * s1, e) - signed_power_primitive(c1 + 2.0 * s0, e)) /
        2.0;
    const double i2 =
        (signed_power_primitive(c2 - 2.0 * s1, e) - signed_power_primitive(c2 - 2.0 * s0, e)) /
        (-2.0);
    const double i34 = (s1 - s0) * (pow_abs(u3, e) + pow_abs(u4, e));

    return 0.25 * k * (i1 + i2 - i34);
}

double utilde_covariance(const ModelParams& p, double tau1, double lambda1, double tau2,
                         double lambda2, const std::optional<TimeBand>& band) {
    const LightCone a(PlanePoint::from_rotated(tau1, lambda1), band);
    const LightCone b(PlanePoint::from_rotated(tau2, lambda2), band);
    return field_covariance(p, a, b);
}

double increment_variance(const ModelParams& p, double tau, double lambda, double h) {
    if (tau < 0.0 || lambda < 0.0 || h < 0.0) {
        throw std::domain_error("increment_variance: tau, lambda, h must be >= 0");
    }
    if (h == 0.0) return 0.0;
    const double k2 = p.k_beta * p.k_beta;
    return 0.5 * k2 *
           ((tau + lambda) * std::pow(h, 2.0 - p.beta) +
            std::pow(h, 3.0 - p.beta) / (3.0 - p.beta));
}

double rectangle_increment_variance(const ModelParams& p, double tau, double tau2,
                                    double lambda, double h) {
    if (!(0.0 <= tau && tau < tau2) || !(lambda > 0.0) || h < 0.0) {
        throw std::domain_error(
            "rectangle_increment_variance: need 0 <= tau < tau2, lambda > 0, h >= 0");
    }
    if (h == 0.0) return 0.0;
    if (h > tau2 - tau) {
        throw std::domain_error(
            "rectangle_increment_variance: formula requires h <= tau2 - tau; use the "
            "four-point combination outside this regime");
    }
    const double k2 = p.k_beta * p.k_beta;
    return 0.5 * k2 * std::pow(h, 2.0 - p.beta) *
           ((tau2 - tau) - (1.0 - p.beta) / (3.0 - p.beta) * h);
}

double rectangle_increment_variance_4pt(const ModelParams& p, double tau, double tau2,
                                        double lambda, double h) {
    // Delta = u~(t2,l+h) - u~(t,l+h) - u~(t2,l) + u~(t,l)
    const double pts[4][2] = {
        {tau2, lambda + h}, {tau, lambda + h}, {tau2, lambda}, {tau, lambda}};
    const double sgn[4] = {1.0, -1.0, -1.0, 1.0};
    double var = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            var += sgn[i] * sgn[j] *
                   utilde_covariance(p, pts[i][0], pts[i][1], pts[j][0], pts[j][1]);
        }
    }
    return var;
}

double dyadic_increment_correlation(const ModelParams& p, double tau, double lambda,
                                    double q, int j, int k) {
    if (!(q > 1.0) || j < 1 || k < 1) {
        throw std::domain_error("dyadic_increment_correlation: need q > 1 and j, k >= 1");
    }
    if (j == k) return 1.0;
    if (j > k) std::swap(j, k);

    const double e = 2.0 - p.beta;
    const double kseg = 1.0 / ((2.0 - p.beta) * (1.0 - p.beta));
    const double hj = std::pow(q, -j), hj1 = std::pow(q, -j - 1);
    const double hk = std::pow(q, -k), hk1 = std::pow(q, -k - 1);

    // Covariance of the raw increments from the sliced closed form: the
    // inner-cone range [0, t_{k+1}] has s-independent slice differences,
    // the ring range maps to sigma in [q^{-k-1}, q^{-k}].
    const double t_k1 = (tau + lambda + hk1) / std::sqrt(2.0);
    const double scale = 0.25 * kseg * std::pow(2.0, 0.5 * e);

    const double bracket1 = std::pow(hj1 - hk, e) + std::pow(hj - hk1, e) -
                            std::pow(hj1 - hk1, e) - std::pow(hj - hk, e);
    const double j1 = scale * t_k1 * bracket1;

    const double ring_const = (hk - hk1) * (std::pow(hj1 - hk, e) - std::pow(hj - hk, e));
    const double ring_power =
        (std::pow(hj - hk1, e + 1.0) - std::pow(hj - hk, e + 1.0) -
         std::pow(hj1 - hk1, e + 1.0) + std::pow(hj1 - hk, e + 1.0)) /
        (e + 1.0);
    const double j2 = scale / std::sqrt(2.0) * (ring_const + ring_power);

    const double cov = j1 + j2;
    const double sd_j = std::sqrt(increment_variance(p, tau, lambda + hj1, hj - hj1));
    const double sd_k = std::sqrt(increment_variance(p, tau, lambda + hk1, hk - hk1));
    return cov / (sd_j * sd_k);
}

double v1_crosssection_covariance(const ModelParams& p, double tau0, double lambda,
                                  double lambda2) {
    if (!(tau0 > 0.0) || lambda < 0.0 || lambda2 < 0.0) {
        throw std::domain_error(
            "v1_crosssection_covariance: need tau0 > 0 and lambda, lambda2 >= 0");
    }
    const double e = 2.0 - p.beta;
    const double coef =
        std::pow(2.0, -0.5 * (3.0 + p.beta)) * tau0 / ((2.0 - p.beta) * (1.0 - p.beta));
    return coef *
           (std::pow(lambda, e) + std::pow(lambda2, e) - pow_abs(lambda - lambda2, e));
}

double v1_crosssection_covariance_via_cones(const ModelParams& p, double tau0,
                                            double lambda, double lambda2) {
    const std::optional<TimeBand> band = TimeBand::upto(tau0 / std::sqrt(2.0));
    const double c_ll = utilde_covariance(p, tau0, lambda, tau0, lambda2, band);
    const double c_l0 = utilde_covariance(p, tau0, lambda, tau0, 0.0, band);
    const double c_0l = utilde_covariance(p, tau0, 0.0, tau0, lambda2, band);
    const double c_00 = utilde_covariance(p, tau0, 0.0, tau0, 0.0, band);
    return c_ll - c_l0 - c_0l + c_00;
}

double v1_fbm_scale_constant(const ModelParams& p, double tau0) {
    const double coef =
        std::pow(2.0, -0.5 * (3.0 + p.beta)) * tau0 / ((2.0 - p.beta) * (1.0 - p.beta));
    return 1.0 / std::sqrt(2.0 * coef);
}

double shift_invariance_residual(const ModelParams& p, double tau0,
                                 const std::vector<std::pair<double, double>>& grid) {
    if (!(tau0 > 0.0)) {
        throw std::domain_error("shift_invariance_residual: need tau0 > 0");
    }
    const std::optional<TimeBand> band = TimeBand::from(tau0 / std::sqrt(2.0));
    double residual = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i; j < grid.size(); ++j) {
            const auto [ti, li] = grid[i];
            const auto [tj, lj] = grid[j];
            const double shifted =
                utilde_covariance(p, tau0 + ti, li, tau0 + tj, lj, band);
            const double plain = utilde_covariance(p, ti, li, tj, lj);
            residual = std::max(residual, std::abs(shifted - plain));
        }
    }
    return residual;
}

double canonical_metric(const ModelParams& p, double t1, double x1, double t2, double x2) {
    const LightCone a(PlanePoint::from_tx(t1, x1));
    const LightCone b(PlanePoint::from_tx(t2, x2));
    const double var = field_covariance(p, a, a) + field_covariance(p, b, b) -
                       2.0 * field_covariance(p, a, b);
    return std::sqrt(std::max(var, 0.0));
}

} // namespace swelab
