#pragma once

#include "swelab/sampler.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace swelab {

/// P(Z > x) for a standard normal.
double gaussian_survival(double x);

/// Standard bivariate normal density with correlation r.
double bivariate_density(double x, double y, double r);

/// P(Z1 > g1, Z2 > g2) under correlation r, |r| < 1. Computed by
/// conditioning: a single adaptive integral of density times conditional
/// survival, absolute tolerance 1e-10.
double bivariate_upper_orthant(double g1, double g2, double r);

/// Closed form for the zero-threshold orthant, 1/4 + arcsin(r)/(2*pi).
double orthant_zero_closed_form(double r);

struct SlepianReport {
    double g1 = 0.0, g2 = 0.0, r = 0.0;
    double p_r = 0.0;            // orthant probability at r
    double p_zero = 0.0;         // orthant probability at r = 0
    double dp_dr_fd = 0.0;       // central finite difference, step 1e-4
    double density_at_r = 0.0;   // g(g1, g2; r)
    double fd_deviation = 0.0;   // |dp_dr_fd - density_at_r|
    double r_star = 0.0;         // p(r) - p(0) = r * g(g1, g2; r_star)
    double residual = 0.0;       // |r * g(g1, g2; r_star) - (p(r) - p(0))|
    bool bracket_found = false;
};

/// Checks the mean-value identity behind the bivariate comparison lemma:
/// (a) d/dr of the orthant probability equals the density at the corner,
/// (b) an intermediate correlation r* in [0, r] reproducing the secant.
SlepianReport slepian_identity_check(double g1, double g2, double r);

struct LargeDeviationPoint {
    double gamma = 0.0;
    std::uint64_t exceed_count = 0;
    double rate_estimate = 0.0; // gamma^{-2} log p_hat; NaN when count is 0
    bool degenerate = false;    // zero exceedances at this gamma
};

struct LargeDeviationReport {
    std::vector<LargeDeviationPoint> points;
    double rate_limit = 0.0; // -1 / (2 * max diagonal variance)
    std::size_t n_reps = 0;
};

/// Monte Carlo probe of the large-deviation rate of sup |Z(t)| over the
/// grid of a factorized covariance matrix.
LargeDeviationReport large_deviation_rate_probe(const CovMatrix& m,
                                                const std::vector<double>& gammas,
                                                std::uint64_t seed, std::size_t n_reps,
                                                unsigned threads = 1);

} // namespace swelab
