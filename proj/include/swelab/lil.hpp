#pragma once

#include "swelab/sampler.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace swelab {

struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One normalized oscillation measurement at scale h = q^{-n}:
///   lil_statistic = |incr| / sqrt((tau+lambda) h^{2-beta} loglog(1/h))
///   mod_statistic = |incr| / sqrt(h^{2-beta} log(1/h))
struct OscillationRecord {
    double tau = 0.0;
    double lambda = 0.0;
    int scale_index = 0;
    double h = 0.0;
    double raw_increment = 0.0;
    double lil_statistic = 0.0;
    double mod_statistic = 0.0;
};

/// Scans the lambda-direction increments of one realization at scales
/// q^{-n}, n in [n_min, n_max]. The grid must contain lambda and every
/// lambda + q^{-n}; otherwise a ResolutionError names the required spacing.
/// Scales must satisfy q^{-n} < 1/e so both normalizers are positive.
std::vector<OscillationRecord> oscillation_scan(const FieldSample& sample,
                                                const ModelParams& p, double tau,
                                                double lambda, double q, int n_min,
                                                int n_max);

/// Median over replications of the max-over-scales lil_statistic; the
/// finite-scale proxy for the LIL constant K_beta.
double lil_constant_estimate(const std::vector<FieldSample>& samples, const ModelParams& p,
                             double tau, double lambda, double q, int n_min, int n_max);

/// Lambda grid {lambda} U {lambda + q^{-n}} needed by oscillation_scan.
std::vector<double> oscillation_lambda_grid(double lambda, double q, int n_min, int n_max);

struct SingularityCandidate {
    double lambda_star = 0.0;
    std::size_t lambda_star_index = 0; // index into the sample's lambda grid
    std::vector<std::pair<double, double>> interval_history;
    double final_statistic = 0.0;
    std::string located_from;
    int requested_depth = 0;
    int achieved_depth = 0;
    bool depth_exhausted = false; // grid ran out before requested depth
};

struct LocateResult {
    std::optional<SingularityCandidate> candidate;
    std::string failure_reason; // set when candidate is empty
};

/// Nested-interval search for a singularity candidate of a sampled fBm
/// cross-section. At each level n it selects, among pairs inside the
/// current interval with separation <= 2^{-n+1}, the pair maximizing the
/// phi-normalized oscillation, where
///   phi(h) = threshold_mult * (1/2) c0_hat^{-1} sqrt(2 h^{2-beta} log(1/h)),
/// then refines to [lambda_n, min(lambda_n', lambda_n + 2^{-n})].
LocateResult locate_singularity(const FieldSample& crosssection, const ModelParams& p,
                                double c0_hat, double initial_lo, double initial_hi,
                                int depth, double threshold_mult = 1.0);

struct PropagationConfig {
    std::uint64_t seed = 1;
    std::uint64_t run_id = 0;
    int grid_pow = 12;          // lambda spacing 2^{-grid_pow}
    double margin = 0.75;       // v1 grid covers [0, 2 + margin]; must
                                // exceed the level-1 pair separation
    int depth = 8;
    int min_depth = 6;
    // multiplier on phi; above 1 the locator only accepts genuinely
    // extreme nests, trading a higher skip rate for a cleaner signal
    double threshold_mult = 1.5;
    std::vector<double> taus = {1.0, 1.5, 2.0};
    int n_controls = 3;
    // two-sided dyadic scales entering the u2 envelope statistic; scales
    // coarser than 2^{-5} have loglog weights small enough to let a single
    // draw dominate the max, inflating its spread
    int scale_n_min = 5;
    int scale_n_max = 11;
    // how many of the deepest accepted pairs enter the column statistic;
    // shallow levels carry no selection signal (phi is half the modulus
    // there) and only dilute the comparison
    int stat_levels = 2;
    bool zero_u1 = false;
    double guard_factor = 4.0;
};

struct PropagationColumnStat {
    double tau = 0.0;
    double stat_star = 0.0;
    std::vector<double> control_stats;
    double elevation_ratio = 0.0;
    double u2_stat_star = 0.0;       // lil-normalized, u2 component only
    double envelope_center = 0.0;    // K_beta sqrt(tau - tau0 + lambda*)
    bool within_envelope = false;
};

struct PropagationScaleRecord {
    double tau = 0.0;
    std::string column; // "star" or "control<i>"
    double lambda = 0.0;
    int scale_index = 0;
    double h = 0.0;
    double increment = 0.0;
    double mod_statistic = 0.0;
};

struct PropagationReport {
    bool skipped = false;
    std::string skip_reason;
    double tau0 = 0.0;
    double lambda_star = 0.0;
    int depth_achieved = 0;
    std::vector<double> control_lambdas;
    std::vector<PropagationColumnStat> per_tau;
    std::vector<PropagationScaleRecord> records;
};

/// The propagation experiment: locate a singularity candidate from the
/// early-time component only, then test whether the full field's
/// oscillation statistic stays elevated along that lambda column for
/// every tau in the grid.
PropagationReport propagation_experiment(const ModelParams& p, double tau0,
                                         const PropagationConfig& cfg);

} // namespace swelab
