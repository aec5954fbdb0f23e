#include "swelab/gaussian.hpp"

#include "swelab/parallel.hpp"
#include "swelab/quadrature.hpp"
#include "swelab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>

namespace swelab {

double gaussian_survival(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double bivariate_density(double x, double y, double r) {
    const double d = 1.0 - r * r;
    return std::exp(-(x * x + y * y - 2.0 * r * x * y) / (2.0 * d)) /
           (2.0 * M_PI * std::sqrt(d));
}

double bivariate_upper_orthant(double g1, double g2, double r) {
    if (!(std::abs(r) < 1.0)) {
        throw std::domain_error("bivariate_upper_orthant: need |r| < 1");
    }
    if (r == 0.0) return gaussian_survival(g1) * gaussian_survival(g2);
    const double s = std::sqrt(1.0 - r * r);
    auto integrand = [&](double x) {
        const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        return phi * gaussian_survival((g2 - r * x) / s);
    };
    // truncate where the marginal density is below 1e-18
    const double upper = std::max(g1, 0.0) + 10.0;
    AdaptiveIntegrator quad(1e-12, 40000);
    return quad.integrate(integrand, g1, upper) + gaussian_survival(upper);
}

double orthant_zero_closed_form(double r) { return 0.25 + std::asin(r) / (2.0 * M_PI); }

SlepianReport slepian_identity_check(double g1, double g2, double r) {
    if (!(std::abs(r) < 0.99) || !(g1 > 0.0) || !(g2 > 0.0)) {
        throw std::domain_error(
            "slepian_identity_check: need |r| < 0.99 and g1, g2 > 0");
    }
    SlepianReport rep;
    rep.g1 = g1;
    rep.g2 = g2;
    rep.r = r;
    rep.p_r = bivariate_upper_orthant(g1, g2, r);
    rep.p_zero = gaussian_survival(g1) * gaussian_survival(g2);
    rep.density_at_r = bivariate_density(g1, g2, r);

    const double step = 1e-4;
    rep.dp_dr_fd = (bivariate_upper_orthant(g1, g2, r + step) -
                    bivariate_upper_orthant(g1, g2, r - step)) /
                   (2.0 * step);
    rep.fd_deviation = std::abs(rep.dp_dr_fd - rep.density_at_r);

    if (r == 0.0) {
        rep.r_star = 0.0;
        rep.residual = std::abs(rep.p_r - rep.p_zero);
        rep.bracket_found = true;
        return rep;
    }

    // bracket the root of psi(s) = r * g(g1, g2; s) - (p(r) - p(0)) on the
    // closed interval between 0 and r, then bisect
    const double target = rep.p_r - rep.p_zero;
    auto psi = [&](double s) { return r * bivariate_density(g1, g2, s) - target; };
    const double lo0 = std::min(0.0, r), hi0 = std::max(0.0, r);
    const int scan = 256;
    double lo = lo0, hi = hi0;
    bool found = false;
    double prev_s = lo0, prev_v = psi(lo0);
    for (int i = 1; i <= scan; ++i) {
        const double s = lo0 + (hi0 - lo0) * i / scan;
        const double v = psi(s);
        if (prev_v == 0.0 || (prev_v < 0.0) != (v < 0.0)) {
            lo = prev_s;
            hi = s;
            found = true;
            break;
        }
        prev_s = s;
        prev_v = v;
    }
    rep.bracket_found = found;
    if (found) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((psi(lo) < 0.0) != (psi(mid) < 0.0)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        rep.r_star = 0.5 * (lo + hi);
        rep.residual = std::abs(r * bivariate_density(g1, g2, rep.r_star) - target);
    } else {
        rep.r_star = std::numeric_limits<double>::quiet_NaN();
        rep.residual = std::numeric_limits<double>::infinity();
    }
    return rep;
}

LargeDeviationReport large_deviation_rate_probe(const CovMatrix& m,
                                                const std::vector<double>& gammas,
                                                std::uint64_t seed, std::size_t n_reps,
                                                unsigned threads) {
    if (!m.factor) {
        throw std::invalid_argument("large_deviation_rate_probe: matrix must be factorized");
    }
    for (std::size_t i = 1; i < gammas.size(); ++i) {
        if (!(gammas[i] > gammas[i - 1])) {
            throw std::invalid_argument("large_deviation_rate_probe: gammas must increase");
        }
    }
    const Eigen::Index n = m.dim();
    const double max_var = m.entries.diagonal().maxCoeff();

    std::vector<std::atomic<std::uint64_t>> counts(gammas.size());
    for (auto& c : counts) c.store(0);

    parallel_chunks(n_reps, threads, [&](std::size_t lo, std::size_t hi, unsigned) {
        Eigen::VectorXd z(n);
        std::vector<std::uint64_t> local(gammas.size(), 0);
        for (std::size_t r = lo; r < hi; ++r) {
            NormalStream stream(seed, r);
            for (Eigen::Index i = 0; i < n; ++i) {
                z(i) = stream(static_cast<std::uint64_t>(i));
            }
            const double sup = ((*m.factor) * z).cwiseAbs().maxCoeff();
            for (std::size_t g = 0; g < gammas.size(); ++g) {
                if (sup > gammas[g]) ++local[g];
            }
        }
        for (std::size_t g = 0; g < gammas.size(); ++g) {
            counts[g].fetch_add(local[g]);
        }
    });

    LargeDeviationReport rep;
    rep.rate_limit = -1.0 / (2.0 * max_var);
    rep.n_reps = n_reps;
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        LargeDeviationPoint pt;
        pt.gamma = gammas[g];
        pt.exceed_count = counts[g].load();
        if (pt.exceed_count == 0) {
            pt.degenerate = true;
            pt.rate_estimate = std::numeric_limits<double>::quiet_NaN();
        } else {
            const double p_hat =
                static_cast<double>(pt.exceed_count) / static_cast<double>(n_reps);
            pt.rate_estimate = std::log(p_hat) / (pt.gamma * pt.gamma);
        }
        rep.points.push_back(pt);
    }
    return rep;
}

} // namespace swelab
