#include "swelab/model.hpp"

#include "swelab/special.hpp"

#include <cmath>
#include <string>

namespace swelab {

ModelParams make_params(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw std::domain_error("make_params: beta must lie in the open interval (0, 1)");
    }
    const double form_a = std::sqrt(M_PI) * std::pow(2.0, 1.0 - beta) *
                          gamma_fn(0.5 * (1.0 - beta)) / gamma_fn(0.5 * beta);
    const double form_b =
        2.0 * gamma_fn(2.0 - beta) * std::sin(0.5 * M_PI * beta) / (1.0 - beta);
    const double rel = std::abs(form_a - form_b) / std::abs(form_b);
    if (rel > 1e-12) {
        throw std::runtime_error(
            "make_params: the two closed forms of C_beta disagree (rel diff " +
            std::to_string(rel) + ")");
    }
    const double k2 = std::pow(2.0, 0.5 * (1.0 - beta)) / ((2.0 - beta) * (1.0 - beta));
    return ModelParams{beta, form_b, std::sqrt(k2)};
}

PlanePoint PlanePoint::from_tx(double t, double x) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return PlanePoint{t, x, (t - x) * inv_sqrt2, (t + x) * inv_sqrt2};
}

PlanePoint PlanePoint::from_rotated(double tau, double lambda) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return PlanePoint{(tau + lambda) * inv_sqrt2, (-tau + lambda) * inv_sqrt2, tau, lambda};
}

} // namespace swelab
