#include "swelab/lil.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace swelab {

namespace {

std::size_t find_coordinate(const std::vector<double>& values, double target,
                            const char* what) {
    const double tol = 1e-9 * std::max(1.0, std::abs(target));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i] - target) <= tol) return i;
    }
    throw ResolutionError(std::string("grid does not resolve ") + what + " = " +
                          std::to_string(target) + "; required spacing <= " +
                          std::to_string(tol));
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::vector<double> oscillation_lambda_grid(double lambda, double q, int n_min, int n_max) {
    std::set<double> vals{lambda};
    for (int n = n_min; n <= n_max; ++n) {
        vals.insert(lambda + std::pow(q, -n));
    }
    return {vals.begin(), vals.end()};
}

std::vector<OscillationRecord> oscillation_scan(const FieldSample& sample,
                                                const ModelParams& p, double tau,
                                                double lambda, double q, int n_min,
                                                int n_max) {
    if (!(q > 1.0) || n_min > n_max) {
        throw std::domain_error("oscillation_scan: need q > 1 and n_min <= n_max");
    }
    if (std::pow(q, -n_min) >= 1.0 / M_E) {
        throw std::domain_error(
            "oscillation_scan: coarsest scale q^{-n_min} must be < 1/e so the "
            "loglog normalizer is positive");
    }
    const std::size_t it = find_coordinate(sample.grid.tau_values, tau, "tau");
    const std::size_t il = find_coordinate(sample.grid.lambda_values, lambda, "lambda");
    const double base = sample.values(static_cast<Eigen::Index>(it),
                                      static_cast<Eigen::Index>(il));
    std::vector<OscillationRecord> records;
    records.reserve(static_cast<std::size_t>(n_max - n_min + 1));
    for (int n = n_min; n <= n_max; ++n) {
        const double h = std::pow(q, -n);
        const std::size_t ih =
            find_coordinate(sample.grid.lambda_values, lambda + h, "lambda + q^-n");
        const double incr = sample.values(static_cast<Eigen::Index>(it),
                                          static_cast<Eigen::Index>(ih)) -
                            base;
        const double log_inv = std::log(1.0 / h);
        const double hp = std::pow(h, 2.0 - p.beta);
        OscillationRecord rec;
        rec.tau = tau;
        rec.lambda = lambda;
        rec.scale_index = n;
        rec.h = h;
        rec.raw_increment = incr;
        rec.lil_statistic =
            std::abs(incr) / std::sqrt((tau + lambda) * hp * std::log(log_inv));
        rec.mod_statistic = std::abs(incr) / std::sqrt(hp * log_inv);
        records.push_back(rec);
    }
    return records;
}

double lil_constant_estimate(const std::vector<FieldSample>& samples, const ModelParams& p,
                             double tau, double lambda, double q, int n_min, int n_max) {
    std::vector<double> maxima;
    maxima.reserve(samples.size());
    for (const auto& s : samples) {
        const auto records = oscillation_scan(s, p, tau, lambda, q, n_min, n_max);
        double m = 0.0;
        for (const auto& r : records) m = std::max(m, r.lil_statistic);
        maxima.push_back(m);
    }
    return median_of(std::move(maxima));
}

LocateResult locate_singularity(const FieldSample& crosssection, const ModelParams& p,
                                double c0_hat, double initial_lo, double initial_hi,
                                int depth, double threshold_mult) {
    const auto& lambdas = crosssection.grid.lambda_values;
    if (lambdas.size() < 2) {
        return {std::nullopt, "grid has fewer than two points"};
    }
    const double delta = lambdas[1] - lambdas[0];
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
        if (std::abs((lambdas[i] - lambdas[i - 1]) - delta) > 1e-9 * delta) {
            return {std::nullopt, "lambda grid is not uniform"};
        }
    }
    auto value = [&](std::size_t i) {
        return crosssection.values(0, static_cast<Eigen::Index>(i));
    };
    auto phi = [&](double h) {
        return 0.5 * threshold_mult / c0_hat *
               std::sqrt(2.0 * std::pow(h, 2.0 - p.beta) * std::log(1.0 / h));
    };
    // phi is increasing below h0; pairs are restricted to that regime
    const double h0 = std::exp(-1.0 / (2.0 - p.beta));

    SingularityCandidate cand;
    cand.requested_depth = depth;
    cand.located_from = "v1 cross-section, tau0 band";

    double lo = initial_lo, hi = initial_hi;
    std::size_t best_i_last = 0;
    for (int level = 1; level <= depth; ++level) {
        // one separation per level: the largest power-of-two h <= 2^{-level}
        // (also capped by h0 and the current interval), so successive
        // intervals are strictly nested and every dyadic scale of the nest
        // carries an oscillation exceeding phi
        const double cap =
            std::min({h0 * (1.0 - 1e-12), std::ldexp(1.0, -level), hi - lo});
        if (cap < delta) {
            cand.depth_exhausted = true;
            break;
        }
        std::size_t step = 1;
        while (static_cast<double>(2 * step) * delta <= cap) step *= 2;
        const double h = static_cast<double>(step) * delta;
        const double thr = phi(h);
        double best_score = 0.0;
        std::size_t best_i = 0;
        const std::size_t best_step = step;
        for (std::size_t i = 0; i + step < lambdas.size(); ++i) {
            if (lambdas[i] < lo - 1e-12 || lambdas[i + step] > hi + 1e-12) continue;
            const double osc = std::abs(value(i + step) - value(i));
            if (osc > thr && osc / thr > best_score) {
                best_score = osc / thr;
                best_i = i;
            }
        }
        if (best_score <= 1.0) {
            if (cand.achieved_depth == 0) {
                return {std::nullopt, "no pair exceeded the oscillation threshold at level " +
                                          std::to_string(level)};
            }
            return {std::nullopt,
                    "no pair exceeded the oscillation threshold at level " +
                        std::to_string(level) + " (reached depth " +
                        std::to_string(cand.achieved_depth) + ")"};
        }
        const double l_n = lambdas[best_i];
        const double l_n_prime = lambdas[best_i + best_step];
        cand.interval_history.emplace_back(l_n, l_n_prime);
        cand.achieved_depth = level;
        best_i_last = best_i;
        const double h_acc = l_n_prime - l_n;
        cand.final_statistic =
            (l_n_prime == l_n)
                ? 0.0
                : std::abs(value(best_i + best_step) - value(best_i)) /
                      std::sqrt(std::pow(h_acc, 2.0 - p.beta) * std::log(1.0 / h_acc));
        lo = l_n;
        hi = std::min(l_n_prime, l_n + std::ldexp(1.0, -level));
    }
    cand.lambda_star = lambdas[best_i_last];
    cand.lambda_star_index = best_i_last;
    return {cand, ""};
}

PropagationReport propagation_experiment(const ModelParams& p, double tau0,
                                         const PropagationConfig& cfg) {
    if (!(tau0 > 0.0)) {
        throw std::domain_error("propagation_experiment: need tau0 > 0");
    }
    for (double tau : cfg.taus) {
        if (tau < tau0) {
            throw std::domain_error("propagation_experiment: all taus must be >= tau0");
        }
    }
    PropagationReport rep;
    rep.tau0 = tau0;

    const double delta = std::ldexp(1.0, -cfg.grid_pow);
    const std::size_t n_grid =
        static_cast<std::size_t>(std::ceil((2.0 + cfg.margin) / delta)) + 1;
    std::vector<double> v1_lambdas(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) {
        v1_lambdas[i] = static_cast<double>(i) * delta;
    }

    // step 1: sample the early-time cross-section and locate lambda*
    // using only that data. The accepted nested pairs double as the
    // measurement geometry in step 4: each is stored as (offset from
    // lambda*, separation), both in grid-index units.
    std::vector<double> v1(n_grid, 0.0);
    std::size_t star_index = 0;
    std::vector<std::pair<std::ptrdiff_t, std::size_t>> pairs;
    std::mt19937_64 pick(cfg.seed ^ (0x9E3779B97F4A7C15ull * (cfg.run_id + 1)));
    if (cfg.zero_u1) {
        std::uniform_int_distribution<std::size_t> dist(
            static_cast<std::size_t>(1.0 / delta),
            static_cast<std::size_t>(2.0 / delta));
        star_index = dist(pick);
        rep.depth_achieved = 0;
        for (int n = 1; n <= cfg.depth && n < cfg.grid_pow; ++n) {
            pairs.emplace_back(0, static_cast<std::size_t>(1) << (cfg.grid_pow - n));
        }
    } else {
        auto v1_samples = sample_fbm_crosssection(p, tau0, v1_lambdas, cfg.seed, 1,
                                                  2 * cfg.run_id);
        for (std::size_t i = 0; i < n_grid; ++i) {
            v1[i] = v1_samples[0].values(0, static_cast<Eigen::Index>(i));
        }
        const double c0_hat = v1_fbm_scale_constant(p, tau0);
        auto located = locate_singularity(v1_samples[0], p, c0_hat, 1.0, 2.0, cfg.depth,
                                          cfg.threshold_mult);
        if (!located.candidate || located.candidate->achieved_depth < cfg.min_depth) {
            rep.skipped = true;
            rep.skip_reason = located.candidate
                                  ? "locator depth " +
                                        std::to_string(located.candidate->achieved_depth) +
                                        " below minimum " + std::to_string(cfg.min_depth)
                                  : located.failure_reason;
            return rep;
        }
        star_index = located.candidate->lambda_star_index;
        rep.depth_achieved = located.candidate->achieved_depth;
        for (const auto& [a, b] : located.candidate->interval_history) {
            const auto ia = static_cast<std::ptrdiff_t>(std::llround(a / delta));
            const auto ib = static_cast<std::ptrdiff_t>(std::llround(b / delta));
            pairs.emplace_back(ia - static_cast<std::ptrdiff_t>(star_index),
                               static_cast<std::size_t>(ib - ia));
        }
    }
    rep.lambda_star = v1_lambdas[star_index];

    // step 2: control columns, uniform in [1, 2] outside a guard band
    const double finest_h = std::ldexp(1.0, -cfg.scale_n_max);
    const double guard = cfg.guard_factor * finest_h;
    std::vector<std::size_t> control_indices;
    std::uniform_int_distribution<std::size_t> dist(
        static_cast<std::size_t>(1.0 / delta), static_cast<std::size_t>(2.0 / delta));
    int attempts = 0;
    while (control_indices.size() < static_cast<std::size_t>(cfg.n_controls) &&
           attempts < 10000) {
        ++attempts;
        const std::size_t c = dist(pick);
        if (std::abs(v1_lambdas[c] - rep.lambda_star) < guard) continue;
        if (std::find(control_indices.begin(), control_indices.end(), c) !=
            control_indices.end()) {
            continue;
        }
        control_indices.push_back(c);
    }
    for (std::size_t c : control_indices) rep.control_lambdas.push_back(v1_lambdas[c]);

    // step 3: joint u2 sample on tau grid x (every lambda any column's
    // measurement touches: the pair geometry shifted to each column base,
    // plus the dyadic envelope offsets at lambda*)
    std::vector<std::size_t> columns{star_index};
    columns.insert(columns.end(), control_indices.begin(), control_indices.end());
    std::set<std::size_t> lambda_idx_set;
    for (std::size_t c : columns) {
        lambda_idx_set.insert(c);
        for (const auto& [off, step] : pairs) {
            const auto lo_idx = static_cast<std::ptrdiff_t>(c) + off;
            if (lo_idx < 0 || lo_idx + static_cast<std::ptrdiff_t>(step) >=
                                  static_cast<std::ptrdiff_t>(n_grid)) {
                throw std::logic_error(
                    "propagation_experiment: pair geometry leaves the grid; "
                    "increase margin");
            }
            lambda_idx_set.insert(static_cast<std::size_t>(lo_idx));
            lambda_idx_set.insert(static_cast<std::size_t>(lo_idx) + step);
        }
    }
    for (int n = cfg.scale_n_min; n <= cfg.scale_n_max && n < cfg.grid_pow; ++n) {
        const std::size_t off = static_cast<std::size_t>(1) << (cfg.grid_pow - n);
        lambda_idx_set.insert(star_index + off);
        if (star_index >= off) lambda_idx_set.insert(star_index - off);
    }
    std::vector<std::size_t> lambda_indices(lambda_idx_set.begin(), lambda_idx_set.end());
    GridSpec u2_grid;
    u2_grid.tau_values = cfg.taus;
    for (std::size_t i : lambda_indices) u2_grid.lambda_values.push_back(v1_lambdas[i]);
    u2_grid.band = TimeBand::from(tau0 / std::sqrt(2.0));

    CovMatrix m = assemble_covariance(p, u2_grid);
    factorize(m, 1e-6);
    auto u2_samples = sample(m, u2_grid, cfg.seed, 1, 2 * cfg.run_id + 1);
    const auto& u2 = u2_samples[0];

    auto u2_col = [&](std::size_t i_tau, std::size_t grid_index) {
        const auto pos = std::lower_bound(lambda_indices.begin(), lambda_indices.end(),
                                          grid_index) -
                         lambda_indices.begin();
        return u2.values(static_cast<Eigen::Index>(i_tau), static_cast<Eigen::Index>(pos));
    };

    // step 4: statistics along lambda* and controls. The full field's
    // increments are u2 increments plus the (tau-independent) v1
    // increments; the star column measures the locator's accepted pairs,
    // each control the identical geometry shifted to its own base.
    for (std::size_t i_tau = 0; i_tau < cfg.taus.size(); ++i_tau) {
        const double tau = cfg.taus[i_tau];
        PropagationColumnStat stat;
        stat.tau = tau;
        const std::size_t stat_from =
            pairs.size() > static_cast<std::size_t>(cfg.stat_levels)
                ? pairs.size() - static_cast<std::size_t>(cfg.stat_levels)
                : 0;
        for (std::size_t ci = 0; ci < columns.size(); ++ci) {
            const std::size_t c = columns[ci];
            double sum_mod = 0.0;
            for (std::size_t level = 0; level < pairs.size(); ++level) {
                const auto& [off, step] = pairs[level];
                const auto lo_idx =
                    static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + off);
                const double h = static_cast<double>(step) * delta;
                const double du2 = u2_col(i_tau, lo_idx + step) - u2_col(i_tau, lo_idx);
                const double dv1 =
                    cfg.zero_u1 ? 0.0 : (v1[lo_idx + step] - v1[lo_idx]);
                const double du = du2 + dv1;
                const double hp = std::pow(h, 2.0 - p.beta);
                const double mod = std::abs(du) / std::sqrt(hp * std::log(1.0 / h));
                if (level >= stat_from) sum_mod += mod;
                PropagationScaleRecord r;
                r.tau = tau;
                r.column = (ci == 0) ? "star" : ("control" + std::to_string(ci - 1));
                r.lambda = v1_lambdas[c];
                r.scale_index = static_cast<int>(level + 1);
                r.h = h;
                r.increment = du;
                r.mod_statistic = mod;
                rep.records.push_back(r);
            }
            // mean over the deepest accepted scales, where the phi
            // threshold binds and the selection is informative
            const std::size_t n_stat = pairs.size() - stat_from;
            const double col_stat =
                n_stat == 0 ? 0.0 : sum_mod / static_cast<double>(n_stat);
            if (ci == 0) {
                stat.stat_star = col_stat;
            } else {
                stat.control_stats.push_back(col_stat);
            }
        }
        // Lemma 4.2 envelope for the u2 component only, at two-sided
        // dyadic scales anchored on the lambda* column
        double u2_star_lil = 0.0;
        const double u2_at_star = u2_col(i_tau, star_index);
        for (int n = cfg.scale_n_min; n <= cfg.scale_n_max && n < cfg.grid_pow; ++n) {
            const double h = std::ldexp(1.0, -n);
            if (!(h < 1.0 / M_E)) continue;
            const std::size_t off = static_cast<std::size_t>(1) << (cfg.grid_pow - n);
            const double norm =
                std::sqrt(std::pow(h, 2.0 - p.beta) * std::log(std::log(1.0 / h)));
            u2_star_lil = std::max(
                u2_star_lil, std::abs(u2_col(i_tau, star_index + off) - u2_at_star) / norm);
            if (star_index >= off) {
                u2_star_lil = std::max(
                    u2_star_lil,
                    std::abs(u2_col(i_tau, star_index - off) - u2_at_star) / norm);
            }
        }
        stat.elevation_ratio = stat.stat_star / std::max(median_of(stat.control_stats),
                                                         1e-300);
        stat.u2_stat_star = u2_star_lil;
        stat.envelope_center = p.k_beta * std::sqrt(tau - tau0 + rep.lambda_star);
        stat.within_envelope = (u2_star_lil >= 0.5 * stat.envelope_center) &&
                               (u2_star_lil <= 1.5 * stat.envelope_center);
        rep.per_tau.push_back(stat);
    }
    return rep;
}

} // namespace swelab
