#pragma once

#include "swelab/covariance.hpp"
#include "swelab/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace swelab {

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Product grid in rotated coordinates, with an optional time band applied
/// to every light cone.
struct GridSpec {
    std::vector<double> tau_values;
    std::vector<double> lambda_values;
    std::optional<TimeBand> band;

    std::size_t size() const { return tau_values.size() * lambda_values.size(); }
    std::size_t flat_index(std::size_t i_tau, std::size_t i_lambda) const {
        return i_tau * lambda_values.size() + i_lambda;
    }
    void validate() const;
};

/// Symmetric covariance matrix with optional Cholesky factor and the
/// jitter that was added to obtain it.
struct CovMatrix {
    Eigen::MatrixXd entries;
    double jitter_used = 0.0;
    std::optional<Eigen::MatrixXd> factor; // lower triangular

    Eigen::Index dim() const { return entries.rows(); }
};

/// One exact realization of the field on a grid. values(i_tau, i_lambda).
struct FieldSample {
    GridSpec grid;
    Eigen::MatrixXd values;
    std::uint64_t seed = 0;
    std::uint64_t replication_id = 0;
};

/// Entry (i, j) is the field covariance of the grid's light cones
/// (with the grid's time band). Throws ResourceError above size_cap.
CovMatrix assemble_covariance(const ModelParams& p, const GridSpec& grid,
                              std::size_t size_cap = 4096);

/// Cholesky factorization with geometric jitter escalation (x10 per attempt,
/// starting from 1e-12) up to max_jitter. An exactly-zero matrix factors to
/// zero with no jitter. Throws ConditioningError on failure, reporting the
/// minimum eigenvalue estimate.
void factorize(CovMatrix& m, double max_jitter);

/// Draw n_reps exact realizations: values = factor * z with z standard
/// normals from the counter stream (seed, rep_offset + r). Bit-identical for
/// identical (seed, replication_id).
std::vector<FieldSample> sample(const CovMatrix& m, const GridSpec& grid,
                                std::uint64_t seed, std::size_t n_reps,
                                std::uint64_t rep_offset = 0);

/// Exact samples of the fBm cross-section v1(tau0, .) at the given sorted
/// lambda values. Uniform grids (all lambdas integer multiples of the
/// smallest spacing) use an exact Toeplitz recursion for the stationary
/// increments, so large dyadic grids avoid a dense factorization; other
/// grids fall back to dense Cholesky of the exact covariance.
std::vector<FieldSample> sample_fbm_crosssection(const ModelParams& p, double tau0,
                                                 const std::vector<double>& lambdas,
                                                 std::uint64_t seed, std::size_t n_reps,
                                                 std::uint64_t rep_offset = 0,
                                                 std::size_t dense_cap = 4096);

} // namespace swelab
