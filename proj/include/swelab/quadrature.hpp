#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

namespace swelab {

/// Adaptive Gauss-Kronrod (7-15) integration with an embedded error
/// estimate. Subdivides the worst interval until the absolute error
/// estimate drops below abs_tol or the interval budget is exhausted.
class AdaptiveIntegrator {
  public:
    explicit AdaptiveIntegrator(double abs_tol = 1e-11, std::size_t max_intervals = 20000)
        : abs_tol_(abs_tol), max_intervals_(max_intervals) {}

    double integrate(const std::function<double(double)>& f, double a, double b) const {
        struct Piece {
            double a, b, value, error;
            bool operator<(const Piece& o) const { return error < o.error; }
        };
        auto eval = [&](double lo, double hi) {
            auto [v, e] = gk15(f, lo, hi);
            return Piece{lo, hi, v, e};
        };
        std::priority_queue<Piece> heap;
        heap.push(eval(a, b));
        double total_value = heap.top().value;
        double total_error = heap.top().error;
        std::size_t n = 1;
        while (total_error > abs_tol_ && n < max_intervals_) {
            Piece worst = heap.top();
            heap.pop();
            const double mid = 0.5 * (worst.a + worst.b);
            if (mid <= worst.a || mid >= worst.b) break; // cannot refine further
            Piece left = eval(worst.a, mid);
            Piece right = eval(mid, worst.b);
            total_value += left.value + right.value - worst.value;
            total_error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            ++n;
        }
        return total_value;
    }

  private:
    double abs_tol_;
    std::size_t max_intervals_;

    static std::pair<double, double> gk15(const std::function<double(double)>& f, double a,
                                          double b) {
        // Kronrod 15-point nodes/weights on [-1, 1] and embedded Gauss-7 weights.
        static const double xk[8] = {
            0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
            0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
        static const double wk[8] = {
            0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
            0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
        static const double wg[4] = {0.417959183673469, 0.381830050505119,
                                     0.279705391489277, 0.129484966168870};

        const double c = 0.5 * (a + b);
        const double hw = 0.5 * (b - a);
        const double f_center = f(c);
        double kron = wk[0] * f_center;
        double gauss = wg[0] * f_center;
        for (int i = 1; i < 8; ++i) {
            const double fp = f(c + hw * xk[i]);
            const double fm = f(c - hw * xk[i]);
            kron += wk[i] * (fp + fm);
            if (i % 2 == 0) gauss += wg[i / 2] * (fp + fm);
        }
        kron *= hw;
        gauss *= hw;
        const double err = std::abs(kron - gauss);
        return {kron, err};
    }
};

} // namespace swelab
