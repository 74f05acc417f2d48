#pragma once

#include "heatframe/calculus.hpp"
#include "heatframe/frame.hpp"
#include "heatframe/grid.hpp"
#include "heatframe/operators.hpp"
#include "heatframe/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace heatframe {

inline double lp_norm(const GridFunction& f, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) return f.values.cwiseAbs().maxCoeff();
    const double hdim = std::pow(f.domain.spacing(), f.domain.dim);
    double s = 0.0;
    for (int i = 0; i < f.values.size(); ++i) s += std::pow(std::abs(f.values[i]), p);
    return std::pow(s * hdim, 1.0 / p);
}

/// Time nodes (log-trapezoid for dt/t) and an aperture for cone sups.
struct ConeParams {
    std::vector<double> t_nodes;
    std::vector<double> t_weights;
    double aperture = 1.0;

    static ConeParams make(const GridDomain& dom, int points = 48, double aperture = 1.0,
                           double t_lo = 0.0, double t_hi = 0.0) {
        if (t_lo <= 0.0) t_lo = 2.0 * dom.spacing();
        if (t_hi <= 0.0) t_hi = 0.5 * dom.side;
        LogGrid g(t_lo, t_hi, points);
        ConeParams c;
        c.t_nodes = g.nodes;
        c.t_weights = g.weights;
        c.aperture = aperture;
        c.validate(dom);
        return c;
    }
    void validate(const GridDomain& dom) const {
        if (t_nodes.empty()) throw std::invalid_argument("ConeParams: empty t grid");
        if (!std::is_sorted(t_nodes.begin(), t_nodes.end()))
            throw std::invalid_argument("ConeParams: t grid must be increasing");
        if (t_nodes.back() > 0.5 * dom.side * (1.0 + 1e-12))
            throw std::invalid_argument("ConeParams: t_max above side/2");
        if (t_nodes.front() < dom.spacing())
            throw std::invalid_argument("ConeParams: cone unresolved below grid spacing");
        if (aperture <= 0.0) throw std::invalid_argument("ConeParams: aperture must be positive");
    }
};

/// Wrapped-offset table: torus balls are translation invariant, so membership
/// is precomputed once per radius as index offsets.
struct BallOffsets {
    std::vector<std::pair<int, int>> offsets;

    static BallOffsets make(const GridDomain& dom, double radius, bool strict) {
        BallOffsets b;
        const double h = dom.spacing();
        for (int d0 = -dom.n / 2; d0 <= (dom.n - 1) / 2; ++d0) {
            const double x0 = dom.wrapped_diff(d0 * h, 0.0);
            if (dom.dim == 1) {
                double d = std::abs(x0);
                if (strict ? d < radius : d <= radius) b.offsets.emplace_back(d0, 0);
            } else {
                for (int d1 = -dom.n / 2; d1 <= (dom.n - 1) / 2; ++d1) {
                    const double x1 = dom.wrapped_diff(d1 * h, 0.0);
                    double d = std::hypot(x0, x1);
                    if (strict ? d < radius : d <= radius) b.offsets.emplace_back(d0, d1);
                }
            }
        }
        return b;
    }

    template <typename F>
    void for_each(const GridDomain& dom, int idx, F&& fn) const {
        auto c = dom.coords(idx);
        for (auto [d0, d1] : offsets) fn(dom.index(c[0] + d0, c[1] + d1));
    }
};

/// S_L(f)(x) = ( \int \int_{|x-y|<t} |q(t^2 L) f(y)|^2 dy dt / t^{n+1} )^{1/2}
/// on log-uniform t nodes; the measure dy dt/t^{n+1} becomes
/// h^dim * dlog t * t^{-n}.
inline GridFunction square_function_SL(const OperatorModel& op, const AnalyticSymbol& q,
                                       const GridFunction& f, const ConeParams& cone) {
    require_same_domain(op.domain, f.domain, "square_function_SL");
    cone.validate(op.domain);
    const GridDomain& dom = op.domain;
    const int m = dom.total_points();
    const double hdim = std::pow(dom.spacing(), dom.dim);
    RealVec acc = RealVec::Zero(m);
    for (size_t it = 0; it < cone.t_nodes.size(); ++it) {
        const double t = cone.t_nodes[it];
        Vec qf = apply_calculus_spectral(op, q, t * t, f.values);
        BallOffsets ball = BallOffsets::make(dom, cone.aperture * t, /*strict=*/true);
        const double w = cone.t_weights[it] * std::pow(t, -dom.dim) * hdim;
        for (int x = 0; x < m; ++x) {
            double s = 0.0;
            ball.for_each(dom, x, [&](int y) { s += std::norm(qf[y]); });
            acc[x] += w * s;
        }
    }
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = std::sqrt(acc[i]);
    return GridFunction(dom, std::move(out));
}

namespace detail {

inline std::vector<int> point_to_cube(const DyadicNet& net, int j) {
    const int m = net.domain.total_points();
    std::vector<int> map(m);
    for (int i = 0; i < m; ++i) map[i] = cube_of_grid_index(net, j, i);
    return map;
}

} // namespace detail

/// The four discrete Littlewood-Paley g-functions; piecewise constant on
/// cubes at each scale. sub_nodes controls the per-scale t quadrature of
/// g2/g3/g4.
inline GridFunction g_function(int which, const FrameContext& ctx, const GridFunction& f,
                               int sub_nodes = 9) {
    if (which < 1 || which > 4) throw std::invalid_argument("g_function: which must be 1..4");
    require_same_domain(ctx.op.domain, f.domain, "g_function");
    if (which == 4 && !ctx.z_qprime.evaluator)
        throw std::invalid_argument("g_function: missing q' symbol");
    const GridDomain& dom = ctx.op.domain;
    const int m = dom.total_points();
    const double hdim = ctx.hdim();
    RealVec acc = RealVec::Zero(m);
    for (int j = ctx.params.j_min; j <= ctx.params.j_max; ++j) {
        const ScaleNet& sn = ctx.net.scale(j);
        const auto p2c = detail::point_to_cube(ctx.net, j);
        RealVec cube_val = RealVec::Zero(static_cast<int>(sn.cubes.size()));
        if (which == 1) {
            Vec qf = hdim * (ctx.kernel(j) * f.values);
            for (size_t c = 0; c < sn.cubes.size(); ++c)
                cube_val[static_cast<int>(c)] =
                    ctx.log_delta() * std::norm(qf[sn.cubes[c].center_index]);
        } else {
            // \int_{delta^{-j}}^{delta^{-j+1}} ... dt/t on the linear scale t
            const double t_lo = std::pow(ctx.params.delta, -static_cast<double>(j));
            const double t_hi = t_lo * ctx.params.delta;
            LogGrid sub(t_lo, t_hi, sub_nodes);
            std::vector<int> cube_points;
            for (int n = 0; n < sub.size(); ++n) {
                const double t = sub.nodes[n];
                const AnalyticSymbol& sym = (which == 4) ? ctx.z_qprime : ctx.q;
                Vec qf = apply_calculus_spectral(ctx.op, sym, t * t, f.values);
                if (which == 2 || which == 4) {
                    for (size_t c = 0; c < sn.cubes.size(); ++c)
                        cube_val[static_cast<int>(c)] +=
                            sub.weights[n] * std::norm(qf[sn.cubes[c].center_index]);
                } else { // cell average
                    RealVec sums = RealVec::Zero(static_cast<int>(sn.cubes.size()));
                    for (int i = 0; i < m; ++i) sums[p2c[i]] += std::norm(qf[i]) * hdim;
                    for (size_t c = 0; c < sn.cubes.size(); ++c)
                        cube_val[static_cast<int>(c)] +=
                            sub.weights[n] * sums[static_cast<int>(c)] / sn.cubes[c].measure;
                }
            }
        }
        for (int i = 0; i < m; ++i) acc[i] += cube_val[p2c[i]];
    }
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = std::sqrt(acc[i]);
    return GridFunction(dom, std::move(out));
}

/// L^p norm of ( sum_{j,tau} |c_{j,tau}|^2 |Q|^{-1} chi_Q )^{1/2}, integrated
/// exactly over the arrangement of all cube boundaries (the integrand is
/// piecewise constant there), so the p=2 value is the plain l2 coefficient
/// norm with no quadrature error.
inline double coefficient_norm(const FrameCoefficients& coeffs, const DyadicNet& net, double p) {
    if (p < 1.0) throw std::invalid_argument("coefficient_norm: p must be >= 1");
    if (coeffs.params.j_min != net.params.j_min || coeffs.params.j_max != net.params.j_max)
        throw std::invalid_argument("coefficient_norm: keys do not match the net");
    for (int j = net.params.j_min; j <= net.params.j_max; ++j)
        if (coeffs.entries[static_cast<size_t>(j - net.params.j_min)].size() !=
            static_cast<Eigen::Index>(net.scale(j).cubes.size()))
            throw std::invalid_argument("coefficient_norm: keys do not match the net");

    const GridDomain& dom = net.domain;
    // per-axis refinement of all scale boundaries
    std::vector<double> cuts{0.0, dom.side};
    for (const auto& sn : net.scales)
        for (int k = 1; k < sn.counts[0]; ++k) cuts.push_back(k * sn.nominal_side);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const int nseg = static_cast<int>(cuts.size()) - 1;

    std::vector<double> seg_len(nseg), seg_mid(nseg);
    for (int s = 0; s < nseg; ++s) {
        seg_len[s] = cuts[s + 1] - cuts[s];
        seg_mid[s] = 0.5 * (cuts[s] + cuts[s + 1]);
    }
    // segment -> interval index per scale (same on both axes)
    const int nsc = static_cast<int>(net.scales.size());
    std::vector<std::vector<int>> seg_iv(nsc, std::vector<int>(nseg));
    for (int sc = 0; sc < nsc; ++sc)
        for (int s = 0; s < nseg; ++s)
            seg_iv[sc][s] = net.scales[sc].axis_interval(dom, 0, seg_mid[s]);

    auto cell_value = [&](int s0, int s1) {
        double v = 0.0;
        for (int sc = 0; sc < nsc; ++sc) {
            const ScaleNet& sn = net.scales[sc];
            int tau = seg_iv[sc][s0] + (dom.dim == 2 ? sn.counts[0] * seg_iv[sc][s1] : 0);
            v += std::norm(coeffs.entries[sc][tau]) / sn.cubes[tau].measure;
        }
        return v;
    };

    double acc = 0.0;
    double maxv = 0.0;
    if (dom.dim == 1) {
        for (int s = 0; s < nseg; ++s) {
            double v = cell_value(s, 0);
            maxv = std::max(maxv, v);
            if (!std::isinf(p)) acc += std::pow(v, 0.5 * p) * seg_len[s];
        }
    } else {
        for (int s0 = 0; s0 < nseg; ++s0)
            for (int s1 = 0; s1 < nseg; ++s1) {
                double v = cell_value(s0, s1);
                maxv = std::max(maxv, v);
                if (!std::isinf(p)) acc += std::pow(v, 0.5 * p) * seg_len[s0] * seg_len[s1];
            }
    }
    return std::isinf(p) ? std::sqrt(maxv) : std::pow(acc, 1.0 / p);
}

/// f+_h(x) = sup_t |e^{-t^2 L} f(x)| over the sampled t grid.
inline GridFunction radial_maximal(const OperatorModel& op, const GridFunction& f,
                                   const std::vector<double>& t_grid) {
    require_same_domain(op.domain, f.domain, "radial_maximal");
    if (t_grid.empty()) throw std::invalid_argument("radial_maximal: empty t grid");
    const int m = op.domain.total_points();
    RealVec best = RealVec::Zero(m);
    for (double t : t_grid) {
        GridFunction u = heat_semigroup_apply(op, t * t, f);
        for (int i = 0; i < m; ++i) best[i] = std::max(best[i], std::abs(u.values[i]));
    }
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = best[i];
    return GridFunction(op.domain, std::move(out));
}

/// N_h f(x) = sup over t and |x-y| < aperture*t of |e^{-t^2 L} f(y)|.
inline GridFunction nontangential_maximal(const OperatorModel& op, const GridFunction& f,
                                          const ConeParams& cone) {
    require_same_domain(op.domain, f.domain, "nontangential_maximal");
    cone.validate(op.domain);
    const GridDomain& dom = op.domain;
    const int m = dom.total_points();
    RealVec best = RealVec::Zero(m);
    for (double t : cone.t_nodes) {
        GridFunction u = heat_semigroup_apply(op, t * t, f);
        BallOffsets ball = BallOffsets::make(dom, cone.aperture * t, /*strict=*/true);
        for (int x = 0; x < m; ++x) {
            double v = best[x];
            ball.for_each(dom, x, [&](int y) { v = std::max(v, std::abs(u.values[y])); });
            best[x] = v;
        }
    }
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = best[i];
    return GridFunction(dom, std::move(out));
}

/// sup over the aperture-2 cone of t |grad e^{-t^2 L} f(y)| (Euclidean over axes).
inline GridFunction gradient_nt_maximal(const OperatorModel& op, const GridFunction& f,
                                        const ConeParams& cone) {
    require_same_domain(op.domain, f.domain, "gradient_nt_maximal");
    cone.validate(op.domain);
    const GridDomain& dom = op.domain;
    const int m = dom.total_points();
    const double inv_2h = 1.0 / (2.0 * dom.spacing());
    RealVec best = RealVec::Zero(m);
    RealVec gn(m);
    for (double t : cone.t_nodes) {
        GridFunction u = heat_semigroup_apply(op, t * t, f);
        for (int i = 0; i < m; ++i) {
            auto c = dom.coords(i);
            double s = 0.0;
            for (int a = 0; a < dom.dim; ++a) {
                int up = (a == 0) ? dom.index(c[0] + 1, c[1]) : dom.index(c[0], c[1] + 1);
                int dn = (a == 0) ? dom.index(c[0] - 1, c[1]) : dom.index(c[0], c[1] - 1);
                s += std::norm((u.values[up] - u.values[dn]) * inv_2h);
            }
            gn[i] = t * std::sqrt(s);
        }
        BallOffsets ball = BallOffsets::make(dom, cone.aperture * t, /*strict=*/true);
        for (int x = 0; x < m; ++x) {
            double v = best[x];
            ball.for_each(dom, x, [&](int y) { v = std::max(v, gn[y]); });
            best[x] = v;
        }
    }
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = best[i];
    return GridFunction(dom, std::move(out));
}

/// Hardy-Littlewood maximal function over torus balls with dyadic radii
/// h/2, h, 2h, ... up to side/2.
inline GridFunction hl_maximal(const GridFunction& f) {
    const GridDomain& dom = f.domain;
    const int m = dom.total_points();
    RealVec best = RealVec::Zero(m);
    for (double r = 0.5 * dom.spacing(); r <= 0.5 * dom.side * (1.0 + 1e-12); r *= 2.0) {
        BallOffsets ball = BallOffsets::make(dom, r, /*strict=*/false);
        const double inv_count = 1.0 / static_cast<double>(ball.offsets.size());
        for (int x = 0; x < m; ++x) {
            double s = 0.0;
            ball.for_each(dom, x, [&](int y) { s += std::abs(f.values[y]); });
            best[x] = std::max(best[x], s * inv_count);
        }
    }
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = best[i];
    return GridFunction(dom, std::move(out));
}

/// Continuous-in-t g-function (no cube sampling), for cross checks:
/// ( \int |q(t^2 L) f(x)|^2 dt/t )^{1/2} on the given log grid.
inline GridFunction continuous_g(const OperatorModel& op, const AnalyticSymbol& q,
                                 const GridFunction& f, const LogGrid& grid) {
    require_same_domain(op.domain, f.domain, "continuous_g");
    const int m = op.domain.total_points();
    RealVec acc = RealVec::Zero(m);
    for (int n = 0; n < grid.size(); ++n) {
        const double t = grid.nodes[n];
        Vec qf = apply_calculus_spectral(op, q, t * t, f.values);
        for (int i = 0; i < m; ++i) acc[i] += grid.weights[n] * std::norm(qf[i]);
    }
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = std::sqrt(acc[i]);
    return GridFunction(op.domain, std::move(out));
}

} // namespace heatframe
