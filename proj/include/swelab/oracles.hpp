#pragma once

#include "swelab/covariance.hpp"
#include "swelab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace swelab {

/// Quadrature oracle for the segment cross energy. Fubini reduction to one
/// dimension: with z = y - y' the double integral equals
///   int |z|^{-beta} * overlap(z) dz,
/// where overlap(z) is the length of [a,b] meeting [c+z, d+z]. The interval
/// is split at z = 0 so the adaptive rule grades into the singularity.
inline double oracle_segment_cross_energy(const ModelParams& p, const Segment& s1,
                                          const Segment& s2, double tol = 1e-11) {
    auto overlap = [&](double z) {
        return std::max(0.0, std::min(s1.b, s2.b + z) - std::max(s1.a, s2.a + z));
    };
    auto f = [&](double z) { return std::pow(std::abs(z), -p.beta) * overlap(z); };
    const double lo = s1.a - s2.b;
    const double hi = s1.b - s2.a;
    if (lo >= hi) return 0.0;
    // split at the kinks of overlap(z) and at the singularity z = 0, so
    // each piece is smooth and the embedded error estimate is honest
    std::vector<double> cuts{lo, s1.a - s2.a, s1.b - s2.b, 0.0, hi};
    std::sort(cuts.begin(), cuts.end());
    AdaptiveIntegrator quad(tol, 100000);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = std::max(lo, cuts[i]);
        const double b = std::min(hi, cuts[i + 1]);
        if (a < b) total += quad.integrate(f, a, b);
    }
    return total;
}

/// Genuinely two-dimensional oracle: nested adaptive quadrature of
/// |y - y'|^{-beta} with the inner integral split at the singular point.
/// Budgets are capped (accuracy around 1e-5 relative); used for spot
/// checks only, the Fubini reduction above is the precision oracle.
inline double oracle_segment_cross_energy_2d(const ModelParams& p, const Segment& s1,
                                             const Segment& s2) {
    AdaptiveIntegrator inner(1e-9, 800);
    AdaptiveIntegrator outer(1e-6, 100);
    auto f_inner = [&](double y) {
        auto kernel = [&](double yp) {
            const double d = std::abs(y - yp);
            // the kernel is integrable; a node landing exactly on the
            // singular point must not inject an infinity
            return d > 0.0 ? std::pow(d, -p.beta) : 0.0;
        };
        if (y > s2.a && y < s2.b) {
            return inner.integrate(kernel, s2.a, y) + inner.integrate(kernel, y, s2.b);
        }
        return inner.integrate(kernel, s2.a, s2.b);
    };
    return outer.integrate(f_inner, s1.a, s1.b);
}

/// Quadrature oracle for the field covariance: adaptive integral over s of
/// the closed-form slice energies (the slice energies are oracled
/// separately). Splits at the band endpoints so the integrand is smooth on
/// each piece.
inline double oracle_field_covariance(const ModelParams& p, const LightCone& a,
                                      const LightCone& b, double tol = 1e-11) {
    double lo = 0.0;
    double hi = std::min(a.apex.t, b.apex.t);
    for (const auto& band : {a.band, b.band}) {
        if (band) {
            lo = std::max(lo, band->s_lo);
            hi = std::min(hi, band->s_hi);
        }
    }
    if (!(lo < hi)) return 0.0;
    auto f = [&](double s) {
        const auto sa = a.slice(s);
        const auto sb = b.slice(s);
        if (!sa || !sb) return 0.0;
        return segment_cross_energy(p, *sa, *sb);
    };
    AdaptiveIntegrator quad(tol, 100000);
    return 0.25 * quad.integrate(f, lo, hi);
}

} // namespace swelab
