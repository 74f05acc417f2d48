#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace heatframe {

/// Log-spaced nodes with trapezoid weights for integrals of the form
/// \int g(t) dt/t. Every dt/t integral in the project goes through this
/// so that norm comparisons never differ by quadrature scheme.
struct LogGrid {
    std::vector<double> nodes;
    std::vector<double> weights; // weights for dt/t, i.e. trapezoid in log t

    LogGrid() = default;
    LogGrid(double t_lo, double t_hi, int points) {
        if (!(t_lo > 0.0) || !(t_hi > t_lo))
            throw std::invalid_argument("LogGrid: need 0 < t_lo < t_hi");
        if (points < 2)
            throw std::invalid_argument("LogGrid: need at least 2 points");
        nodes.resize(points);
        weights.assign(points, 0.0);
        const double a = std::log(t_lo), b = std::log(t_hi);
        const double dl = (b - a) / (points - 1);
        for (int i = 0; i < points; ++i) nodes[i] = std::exp(a + i * dl);
        for (int i = 0; i < points; ++i)
            weights[i] = (i == 0 || i == points - 1) ? 0.5 * dl : dl;
    }

    int size() const { return static_cast<int>(nodes.size()); }

    /// \int g(t) dt/t over [t_lo, t_hi].
    double integrate(const std::function<double(double)>& g) const {
        double s = 0.0;
        for (int i = 0; i < size(); ++i) s += weights[i] * g(nodes[i]);
        return s;
    }
};

/// Trapezoid-in-log integral of g(t) dt/t with nodes refined until two
/// successive node counts agree to rel_tol. Throws if no convergence.
inline double integrate_log_adaptive(const std::function<double(double)>& g,
                                     double t_lo, double t_hi,
                                     double rel_tol = 1e-12,
                                     int start_points = 129,
                                     int max_points = 600000) {
    double prev = LogGrid(t_lo, t_hi, start_points).integrate(g);
    for (int p = 2 * start_points - 1; p <= max_points; p = 2 * p - 1) {
        double cur = LogGrid(t_lo, t_hi, p).integrate(g);
        if (std::abs(cur - prev) <= rel_tol * std::max(1e-300, std::abs(cur)))
            return cur;
        prev = cur;
    }
    throw std::runtime_error("integrate_log_adaptive: no convergence");
}

} // namespace heatframe
