#include "swelab/sampler.hpp"

#include "swelab/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace swelab {

namespace {

void require_sorted_nonneg(const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0.0) {
            throw std::invalid_argument(std::string(name) + " values must be >= 0");
        }
        if (i > 0 && !(v[i] > v[i - 1])) {
            throw std::invalid_argument(std::string(name) +
                                        " values must be strictly increasing");
        }
    }
}

} // namespace

void GridSpec::validate() const {
    if (tau_values.empty() || lambda_values.empty()) {
        throw std::invalid_argument("GridSpec: coordinate lists must be nonempty");
    }
    require_sorted_nonneg(tau_values, "tau");
    require_sorted_nonneg(lambda_values, "lambda");
}

CovMatrix assemble_covariance(const ModelParams& p, const GridSpec& grid,
                              std::size_t size_cap) {
    grid.validate();
    const std::size_t n = grid.size();
    if (n > size_cap) {
        throw ResourceError("assemble_covariance: grid has " + std::to_string(n) +
                            " points, exceeding the cap of " + std::to_string(size_cap));
    }
    std::vector<LightCone> cones;
    cones.reserve(n);
    for (double tau : grid.tau_values) {
        for (double lambda : grid.lambda_values) {
            cones.emplace_back(PlanePoint::from_rotated(tau, lambda), grid.band);
        }
    }
    CovMatrix m;
    m.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double c = field_covariance(p, cones[i], cones[j]);
            m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
            m.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = c;
        }
    }
    return m;
}

void factorize(CovMatrix& m, double max_jitter) {
    const Eigen::Index n = m.dim();
    const double asym = (m.entries - m.entries.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) {
        throw std::invalid_argument("factorize: matrix asymmetry " + std::to_string(asym) +
                                    " exceeds 1e-12");
    }
    if (m.entries.cwiseAbs().maxCoeff() == 0.0) {
        m.factor = Eigen::MatrixXd::Zero(n, n);
        m.jitter_used = 0.0;
        return;
    }
    double jitter = 0.0;
    while (true) {
        Eigen::MatrixXd shifted = m.entries;
        shifted.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success) {
            m.factor = Eigen::MatrixXd(llt.matrixL());
            m.jitter_used = jitter;
            return;
        }
        if (jitter >= max_jitter) break;
        jitter = (jitter == 0.0) ? 1e-12 : jitter * 10.0;
        jitter = std::min(jitter, max_jitter);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.entries,
                                                      Eigen::EigenvaluesOnly);
    throw ConditioningError(
        "factorize: Cholesky failed up to jitter " + std::to_string(max_jitter) +
        "; min eigenvalue estimate " + std::to_string(es.eigenvalues().minCoeff()));
}

std::vector<FieldSample> sample(const CovMatrix& m, const GridSpec& grid,
                                std::uint64_t seed, std::size_t n_reps,
                                std::uint64_t rep_offset) {
    if (!m.factor) {
        throw std::invalid_argument("sample: matrix must be factorized first");
    }
    const std::size_t nt = grid.tau_values.size();
    const std::size_t nl = grid.lambda_values.size();
    if (static_cast<std::size_t>(m.dim()) != nt * nl) {
        throw std::invalid_argument("sample: factor dimension does not match grid");
    }
    std::vector<FieldSample> out;
    out.reserve(n_reps);
    const Eigen::Index n = m.dim();
    for (std::size_t r = 0; r < n_reps; ++r) {
        const std::uint64_t rep = rep_offset + r;
        NormalStream stream(seed, rep);
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            z(i) = stream(static_cast<std::uint64_t>(i));
        }
        const Eigen::VectorXd v = (*m.factor) * z;
        FieldSample s;
        s.grid = grid;
        s.seed = seed;
        s.replication_id = rep;
        s.values.resize(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(nl));
        for (std::size_t it = 0; it < nt; ++it) {
            for (std::size_t il = 0; il < nl; ++il) {
                s.values(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(il)) =
                    v(static_cast<Eigen::Index>(grid.flat_index(it, il)));
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

// Exact sequential simulation of fractional Gaussian noise via the
// Durbin-Levinson recursion on its Toeplitz covariance. O(N^2) time,
// O(N) memory per replication.
void hosking_fgn(double hurst, std::size_t n, const NormalStream& stream,
                 std::vector<double>& out) {
    auto gamma = [hurst](std::size_t k) {
        const double kk = static_cast<double>(k);
        return 0.5 * (std::pow(kk + 1.0, 2.0 * hurst) - 2.0 * std::pow(kk, 2.0 * hurst) +
                      std::pow(std::abs(kk - 1.0), 2.0 * hurst));
    };
    out.resize(n);
    if (n == 0) return;
    out[0] = stream(0);
    std::vector<double> phi, phi_prev;
    double v = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        phi_prev = phi;
        double num = gamma(k);
        for (std::size_t j = 1; j < k; ++j) {
            num -= phi_prev[j - 1] * gamma(k - j);
        }
        const double reflection = num / v;
        phi.assign(k, 0.0);
        phi[k - 1] = reflection;
        for (std::size_t j = 1; j < k; ++j) {
            phi[j - 1] = phi_prev[j - 1] - reflection * phi_prev[k - 1 - j];
        }
        v *= (1.0 - reflection * reflection);
        double mean = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            mean += phi[j - 1] * out[k - j];
        }
        out[k] = mean + std::sqrt(v) * stream(k);
    }
}

double smallest_spacing(const std::vector<double>& lambdas) {
    double delta = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double gap = (i == 0) ? lambdas[0] : lambdas[i] - lambdas[i - 1];
        if (gap > 0.0 && (delta == 0.0 || gap < delta)) delta = gap;
    }
    return delta;
}

// lambdas all (approximately) integer multiples of their smallest spacing?
std::optional<std::pair<double, std::vector<std::size_t>>> uniform_multiples(
    const std::vector<double>& lambdas) {
    const double delta = smallest_spacing(lambdas);
    if (delta == 0.0) return std::nullopt;
    std::vector<std::size_t> indices(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double k = lambdas[i] / delta;
        const double k_round = std::round(k);
        if (std::abs(k - k_round) > 1e-9 * std::max(1.0, k)) return std::nullopt;
        indices[i] = static_cast<std::size_t>(k_round);
    }
    return std::make_pair(delta, indices);
}

} // namespace

std::vector<FieldSample> sample_fbm_crosssection(const ModelParams& p, double tau0,
                                                 const std::vector<double>& lambdas,
                                                 std::uint64_t seed, std::size_t n_reps,
                                                 std::uint64_t rep_offset,
                                                 std::size_t dense_cap) {
    if (!(tau0 > 0.0)) {
        throw std::domain_error("sample_fbm_crosssection: need tau0 > 0");
    }
    require_sorted_nonneg(lambdas, "lambda");
    if (lambdas.empty()) {
        throw std::invalid_argument("sample_fbm_crosssection: empty lambda grid");
    }
    GridSpec grid{{tau0}, lambdas, TimeBand::upto(tau0 / std::sqrt(2.0))};

    const double hurst = 0.5 * (2.0 - p.beta);
    const double amplitude = 1.0 / v1_fbm_scale_constant(p, tau0);

    std::vector<FieldSample> out;
    out.reserve(n_reps);

    if (smallest_spacing(lambdas) == 0.0) {
        // degenerate grid {0}: v1(tau0, 0) == 0
        for (std::size_t r = 0; r < n_reps; ++r) {
            FieldSample s;
            s.grid = grid;
            s.seed = seed;
            s.replication_id = rep_offset + r;
            s.values = Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(lambdas.size()));
            out.push_back(std::move(s));
        }
        return out;
    }

    const auto uniform = uniform_multiples(lambdas);
    if (uniform && uniform->second.back() <= (1u << 21)) {
        const auto& [delta, indices] = *uniform;
        const std::size_t n_incr = indices.back();
        const double step_scale = amplitude * std::pow(delta, hurst);
        std::vector<double> fgn, path(n_incr + 1);
        for (std::size_t r = 0; r < n_reps; ++r) {
            NormalStream stream(seed, rep_offset + r);
            hosking_fgn(hurst, n_incr, stream, fgn);
            path[0] = 0.0;
            for (std::size_t i = 0; i < n_incr; ++i) {
                path[i + 1] = path[i] + step_scale * fgn[i];
            }
            FieldSample s;
            s.grid = grid;
            s.seed = seed;
            s.replication_id = rep_offset + r;
            s.values.resize(1, static_cast<Eigen::Index>(lambdas.size()));
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                s.values(0, static_cast<Eigen::Index>(i)) = path[indices[i]];
            }
            out.push_back(std::move(s));
        }
        return out;
    }

    // dense route: exact covariance + Cholesky
    const std::size_t n = lambdas.size();
    if (n > dense_cap) {
        throw ResourceError("sample_fbm_crosssection: non-uniform grid of " +
                            std::to_string(n) + " points exceeds dense cap " +
                            std::to_string(dense_cap));
    }
    CovMatrix m;
    m.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double c = v1_crosssection_covariance(p, tau0, lambdas[i], lambdas[j]);
            m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
            m.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = c;
        }
    }
    factorize(m, 1e-8);
    return sample(m, grid, seed, n_reps, rep_offset);
}

} // namespace swelab
