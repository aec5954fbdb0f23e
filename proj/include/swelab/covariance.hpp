#pragma once

#include "swelab/model.hpp"

#include <utility>
#include <vector>

namespace swelab {

/// Riesz cross-energy of two segments,
///   int_{s1} int_{s2} |y - y'|^{-beta} dy dy'
/// in the closed form
///   ( |c-b|^p + |d-a|^p - |c-a|^p - |d-b|^p ) / ((2-beta)(1-beta)),  p = 2-beta,
/// for s1 = [a,b], s2 = [c,d]. Symmetric in its segment arguments.
double segment_cross_energy(const ModelParams& p, const Segment& s1, const Segment& s2);

/// Covariance of the solution field evaluated over two (optionally
/// time-banded) light cones:
///   Cov = 1/4 * int segment_cross_energy(slice_A(s), slice_B(s)) ds
/// over the common time range. Computed in closed form: two of the four
/// energy terms are linear in s (slope +-2) and integrate via the
/// antiderivative sign(u)|u|^{p+1}/((p+1)*slope); the other two are
/// constant in s. Empty time range gives exactly 0.
double field_covariance(const ModelParams& p, const LightCone& a, const LightCone& b);

/// Covariance of the rotated field at two (tau, lambda) points, with an
/// optional shared time band.
double utilde_covariance(const ModelParams& p, double tau1, double lambda1, double tau2,
                         double lambda2, const std::optional<TimeBand>& band = std::nullopt);

/// Variance of the lambda-direction increment of the rotated field,
///   1/2 K^2 [ (tau+lambda) h^{2-beta} + h^{3-beta}/(3-beta) ].
double increment_variance(const ModelParams& p, double tau, double lambda, double h);

/// Variance of the rectangle increment of the rotated field over
/// (tau, tau2] x (lambda, lambda+h] in the regime h <= tau2 - tau:
///   1/2 K^2 h^{2-beta} [ (tau2 - tau) - (1-beta)/(3-beta) * h ].
/// Independent of lambda. Throws if h > tau2 - tau.
double rectangle_increment_variance(const ModelParams& p, double tau, double tau2,
                                    double lambda, double h);

/// Same rectangle variance from the four-point covariance combination;
/// valid for any h > 0 (used as the general route and in cross-checks).
double rectangle_increment_variance_4pt(const ModelParams& p, double tau, double tau2,
                                        double lambda, double h);

/// Exact correlation of the normalized dyadic increments
///   Z_n = ( u~(tau, lambda+q^{-n}) - u~(tau, lambda+q^{-n-1}) ) / sd
/// for scales j and k. Returns 1 for j == k. Uses a dedicated closed form
/// (stable at fine scales); value lies in [0, 1].
double dyadic_increment_correlation(const ModelParams& p, double tau, double lambda,
                                    double q, int j, int k);

/// Covariance of the cross-section v1(tau0, .) of the time-truncated
/// component, i.e. a scaled fractional Brownian motion of Hurst (2-beta)/2:
///   2^{-(3+beta)/2} tau0 / ((2-beta)(1-beta)) *
///     ( lambda^{2-beta} + lambda2^{2-beta} - |lambda-lambda2|^{2-beta} ).
double v1_crosssection_covariance(const ModelParams& p, double tau0, double lambda,
                                  double lambda2);

/// Same quantity assembled from banded light-cone covariances (test route).
double v1_crosssection_covariance_via_cones(const ModelParams& p, double tau0,
                                            double lambda, double lambda2);

/// Scaling constant c0 such that c0 * v1(tau0, .) is a standard fractional
/// Brownian motion of Hurst (2-beta)/2.
double v1_fbm_scale_constant(const ModelParams& p, double tau0);

/// Max absolute entrywise difference between the covariance matrix of
/// { u2~(tau0 + tau_i, lambda_i) } (time band [tau0/sqrt(2), inf)) and the
/// covariance matrix of { u~(tau_i, lambda_i) }. Zero for an empty grid.
double shift_invariance_residual(const ModelParams& p, double tau0,
                                 const std::vector<std::pair<double, double>>& grid);

/// Canonical metric sigma[(t,x),(t',x')] = sqrt Var(u(t,x) - u(t',x')).
double canonical_metric(const ModelParams& p, double t1, double x1, double t2, double x2);

} // namespace swelab
