#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace swelab {

/// Model parameters for the wave equation driven by noise with spatial
/// covariance |x-y|^{-beta}, together with the derived constants.
///
/// c_beta is the spectral constant of the Riesz kernel; it has two
/// independent closed forms which are cross-checked at construction:
///   sqrt(pi) * 2^{1-beta} * Gamma((1-beta)/2) / Gamma(beta/2)
///   2 * Gamma(2-beta) * sin(pi*beta/2) / (1-beta)
/// k_beta is the constant appearing in the law of the iterated logarithm,
///   k_beta^2 = 2^{(1-beta)/2} / ((2-beta)(1-beta)).
struct ModelParams {
    double beta;
    double c_beta;
    double k_beta;
};

ModelParams make_params(double beta);

/// A point of the (t, x) plane carried in both coordinate systems.
/// The rotated coordinates are (tau, lambda) = ((t-x)/sqrt(2), (t+x)/sqrt(2)).
struct PlanePoint {
    double t;
    double x;
    double tau;
    double lambda;

    static PlanePoint from_tx(double t, double x);
    static PlanePoint from_rotated(double tau, double lambda);
};

/// Closed interval [a, b] on the spatial axis. Degenerate (a == b) allowed.
struct Segment {
    double a;
    double b;

    Segment(double a_, double b_) : a(a_), b(b_) {
        if (!(a <= b)) {
            throw std::invalid_argument("Segment: endpoints must satisfy a <= b");
        }
    }
    double length() const { return b - a; }
};

/// Half-open restriction [s_lo, s_hi) on the time axis.
struct TimeBand {
    double s_lo;
    double s_hi; // may be +infinity

    TimeBand(double lo, double hi) : s_lo(lo), s_hi(hi) {
        if (!(0.0 <= lo && lo < hi)) {
            throw std::invalid_argument("TimeBand: need 0 <= s_lo < s_hi");
        }
    }
    static TimeBand upto(double hi) { return TimeBand(0.0, hi); }
    static TimeBand from(double lo) {
        return TimeBand(lo, std::numeric_limits<double>::infinity());
    }
};

/// The backward light cone of an apex point, optionally restricted to a
/// time band. Its slice at time s in [0, t] is the segment
/// [x - (t - s), x + (t - s)]; the slice is empty for s > t.
struct LightCone {
    PlanePoint apex;
    std::optional<TimeBand> band;

    explicit LightCone(PlanePoint p, std::optional<TimeBand> b = std::nullopt)
        : apex(p), band(std::move(b)) {
        if (!(apex.t >= 0.0)) {
            throw std::invalid_argument("LightCone: apex must have t >= 0");
        }
    }

    std::optional<Segment> slice(double s) const {
        if (s < 0.0 || s > apex.t) return std::nullopt;
        if (band && (s < band->s_lo || s >= band->s_hi)) return std::nullopt;
        return Segment(apex.x - (apex.t - s), apex.x + (apex.t - s));
    }
};

} // namespace swelab
