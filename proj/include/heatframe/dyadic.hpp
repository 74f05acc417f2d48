#pragma once

#include "heatframe/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace heatframe {

struct DyadicParams {
    double delta = 1.2;
    int M = 2;
    int j_min = 0;
    int j_max = 0;

    void validate() const {
        if (!(delta > 1.0 && delta <= 2.0))
            throw std::invalid_argument("DyadicParams: delta must lie in (1, 2]");
        if (M < 1) throw std::invalid_argument("DyadicParams: M must be a positive integer");
        if (j_min > j_max) throw std::invalid_argument("DyadicParams: j_min > j_max");
    }
    double scale_side(int j) const { return std::pow(delta, -static_cast<double>(j + M)); }
    /// Symbol time at scale j: q_j = q(delta^{-2j} L).
    double scale_time(int j) const { return std::pow(delta, -2.0 * j); }
};

/// Half-open axis-aligned cube of the scale-j net, anchored at the origin;
/// the last cube per axis is clipped at the wrap seam and carries its true
/// (clipped) measure.
struct Cube {
    int j = 0;
    int tau = 0;
    std::array<double, 2> lower{0.0, 0.0};
    std::array<double, 2> width{0.0, 0.0};
    std::array<int, 2> center_axis_index{0, 0}; // grid index per axis
    int center_index = 0;                       // flattened grid index of y_Q
    double measure = 0.0;
};

struct ScaleNet {
    int j = 0;
    double nominal_side = 0.0;
    std::array<int, 2> counts{1, 1};
    std::vector<Cube> cubes;
    // interval k on axis a is [k*nominal_side, min((k+1)*nominal_side, side))
    int axis_interval(const GridDomain& dom, int a, double x) const {
        int k = static_cast<int>(std::floor(x / nominal_side));
        k = std::clamp(k, 0, counts[a] - 1);
        while (k > 0 && x < k * nominal_side) --k;
        while (k < counts[a] - 1 && x >= (k + 1) * nominal_side) ++k;
        return k;
    }
};

struct DyadicNet {
    DyadicParams params;
    GridDomain domain;
    std::vector<ScaleNet> scales; // ordered j_min..j_max

    const ScaleNet& scale(int j) const {
        if (j < params.j_min || j > params.j_max)
            throw std::invalid_argument("DyadicNet: scale " + std::to_string(j) + " out of range");
        return scales[static_cast<size_t>(j - params.j_min)];
    }
    int total_cubes() const {
        int n = 0;
        for (const auto& s : scales) n += static_cast<int>(s.cubes.size());
        return n;
    }
};

namespace detail {

inline ScaleNet build_scale(const DyadicParams& p, const GridDomain& dom, int j) {
    const double side = dom.side;
    const double h = dom.spacing();
    const double s_j = p.scale_side(j);
    if (s_j < h * (1.0 - 1e-12))
        throw std::invalid_argument("dyadic net: scale " + std::to_string(j) +
                                    " side below the grid spacing");
    ScaleNet net;
    net.j = j;
    net.nominal_side = s_j;
    int count = s_j >= side ? 1 : static_cast<int>(std::ceil(side / s_j - 1e-12));
    for (int a = 0; a < dom.dim; ++a) net.counts[a] = count;

    // per-axis half-open intervals and their grid points
    std::vector<double> lo(count), w(count);
    std::vector<std::pair<int, int>> pts(count, {dom.n, -1}); // [first, last] axis index
    for (int k = 0; k < count; ++k) {
        lo[k] = k * s_j;
        w[k] = (k == count - 1) ? side - lo[k] : s_j;
    }
    for (int i = 0; i < dom.n; ++i) {
        int k = net.axis_interval(dom, 0, i * h);
        pts[k].first = std::min(pts[k].first, i);
        pts[k].second = std::max(pts[k].second, i);
    }
    // a seam sliver thinner than the grid spacing can miss every grid point;
    // fold it into its neighbour so each cube keeps an interior sample and
    // the measures still tile the torus exactly
    if (count >= 2 && pts[count - 1].second < 0) {
        w[count - 2] += w[count - 1];
        lo.pop_back();
        w.pop_back();
        pts.pop_back();
        --count;
        for (int a = 0; a < dom.dim; ++a) net.counts[a] = count;
    }
    for (int k = 0; k < count; ++k)
        if (pts[k].second < 0)
            throw std::invalid_argument("dyadic net: scale " + std::to_string(j) +
                                        " has a cube empty of grid points");

    auto snap = [&](int k) {
        double c = lo[k] + 0.5 * w[k];
        int i = static_cast<int>(std::lround(c / h));
        return std::clamp(i, pts[k].first, pts[k].second);
    };

    const int count1 = dom.dim == 2 ? count : 1;
    net.cubes.reserve(static_cast<size_t>(count) * count1);
    for (int k1 = 0; k1 < count1; ++k1)
        for (int k0 = 0; k0 < count; ++k0) {
            Cube c;
            c.j = j;
            c.tau = k0 + count * k1;
            c.lower = {lo[k0], dom.dim == 2 ? lo[k1] : 0.0};
            c.width = {w[k0], dom.dim == 2 ? w[k1] : 0.0};
            c.center_axis_index = {snap(k0), dom.dim == 2 ? snap(k1) : 0};
            c.center_index = dom.index(c.center_axis_index[0], c.center_axis_index[1]);
            c.measure = dom.dim == 2 ? w[k0] * w[k1] : w[k0];
            net.cubes.push_back(c);
        }
    // tau order must match the flattened (k0, k1) indexing
    return net;
}

} // namespace detail

inline DyadicNet build_net(const DyadicParams& params, const GridDomain& domain) {
    params.validate();
    DyadicNet net;
    net.params = params;
    net.domain = domain;
    for (int j = params.j_min; j <= params.j_max; ++j)
        net.scales.push_back(detail::build_scale(params, domain, j));
    return net;
}

/// Widest j-range resolvable on the grid: coarsest scale is a single cube,
/// finest runs down to the cell scale (side >= h, so every cube still holds
/// a grid point after seam merging). Stopping coarser leaves scales the sums
/// over j need: modes near the grid's Nyquist edge would keep |I - T| ~ 1
/// and trap aliasing residue that a Neumann inversion can never shed.
inline DyadicParams auto_params(double delta, int M, const GridDomain& domain) {
    DyadicParams p;
    p.delta = delta;
    p.M = M;
    const double ld = std::log(delta);
    p.j_min = static_cast<int>(std::floor(-M - std::log(domain.side) / ld + 1e-9));
    p.j_max = static_cast<int>(
        std::floor(-M + std::log(domain.side / domain.spacing()) / ld + 1e-9));
    if (p.j_max < p.j_min) p.j_max = p.j_min;
    p.validate();
    while (true) {
        try {
            for (int j = p.j_min; j <= p.j_max; ++j) detail::build_scale(p, domain, j);
            return p;
        } catch (const std::invalid_argument&) {
            if (p.j_max == p.j_min) throw;
            --p.j_max;
        }
    }
}

inline int cube_of_point(const DyadicNet& net, int j, const std::array<double, 2>& x) {
    const ScaleNet& s = net.scale(j);
    int k0 = s.axis_interval(net.domain, 0, x[0]);
    int k1 = net.domain.dim == 2 ? s.axis_interval(net.domain, 1, x[1]) : 0;
    return k0 + s.counts[0] * k1;
}

inline int cube_of_grid_index(const DyadicNet& net, int j, int idx) {
    auto c = net.domain.coords(idx);
    const double h = net.domain.spacing();
    return cube_of_point(net, j, {c[0] * h, c[1] * h});
}

/// Numerical counterpart of the two scale-sum identities:
///   int_0^inf min(a/t, t/a) dt/t = 2   and   sum_j min(d^-j/t, t/d^-j) <= 2d/(d-1).
/// Returns {integral, sum-with-tail-bound}.
inline std::pair<double, double> scale_sum_check(double delta, double t) {
    if (!(delta > 1.0 && delta <= 2.0))
        throw std::invalid_argument("scale_sum_check: delta must lie in (1, 2]");
    if (!(t > 0.0)) throw std::invalid_argument("scale_sum_check: t must be positive");

    // integral in x = log(t'/a): trapezoid of e^{-|x|} with a node on the kink
    const double X = 25.0;
    const int half = 650000;
    const double dx = X / half;
    double integral = 0.0;
    for (int i = -half; i <= half; ++i) {
        double wgt = (i == -half || i == half) ? 0.5 : 1.0;
        integral += wgt * std::exp(-std::abs(i * dx));
    }
    integral *= dx;

    // truncated sum with geometric tail bound added
    const double ld = std::log(delta);
    const int j_star = static_cast<int>(std::lround(-std::log(t) / ld));
    auto term = [&](int j) {
        double a = std::pow(delta, -static_cast<double>(j));
        return std::min(a / t, t / a);
    };
    double sum = 0.0;
    double last_lo = 0.0, last_hi = 0.0;
    for (int j = j_star;; ++j) {
        double v = term(j);
        sum += v;
        last_hi = v;
        if (v < 1e-18) break;
    }
    for (int j = j_star - 1;; --j) {
        double v = term(j);
        sum += v;
        last_lo = v;
        if (v < 1e-18) break;
    }
    sum += (last_lo + last_hi) / (delta - 1.0);
    return {integral, sum};
}

} // namespace heatframe
