#pragma once

#include "heatframe/frame.hpp"
#include "heatframe/norms.hpp"
#include "heatframe/operators.hpp"
#include "heatframe/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace heatframe {

/// T_2^1 atom with a constant profile: value c0 on a spatial block around
/// the ball center, times the t-window [r_B/4, r_B/2]. The t-window keeps
/// the dt/t mass finite while the support stays inside the tent of B.
struct TentAtom {
    GridDomain domain;
    std::array<double, 2> center{0.0, 0.0};
    int center_index = 0;
    double radius = 0.0;          // r_B
    std::vector<int> support;     // spatial grid indices
    LogGrid t_grid;               // nodes on [r_B/4, r_B/2]
    double c0 = 0.0;
    double ball_measure = 0.0;    // |B|
    double support_measure = 0.0; // grid measure of the spatial support

    /// sup over the support of |y - center| + t; must not exceed radius.
    double tent_reach() const {
        double worst = 0.0;
        for (int idx : support) {
            double d = 0.0;
            auto c = domain.coords(idx);
            for (int a = 0; a < domain.dim; ++a) {
                double w = domain.wrapped_diff(c[a] * domain.spacing(), center[a]);
                d += w * w;
            }
            worst = std::max(worst, std::sqrt(d));
        }
        return worst + t_grid.nodes.back();
    }

    /// \int\int |a|^2 dx dt/t by the atom's own quadrature.
    double normalization_integral() const {
        double tmass = 0.0;
        for (double w : t_grid.weights) tmass += w;
        return c0 * c0 * support_measure * tmass;
    }
};

inline TentAtom make_tent_atom(const std::array<double, 2>& center, double r_b,
                               const GridDomain& dom, int t_points = 17) {
    const double h = dom.spacing();
    if (r_b < 8.0 * h || r_b > dom.side / 4.0)
        throw std::invalid_argument("make_tent_atom: radius must lie in [8h, side/4]");
    TentAtom a;
    a.domain = dom;
    a.radius = r_b;
    // snap the center to the grid
    std::array<int, 2> ci{0, 0};
    for (int axis = 0; axis < dom.dim; ++axis)
        ci[axis] = dom.wrap(static_cast<int>(std::lround(center[axis] / h)));
    a.center = {ci[0] * h, ci[1] * h};
    a.center_index = dom.index(ci[0], ci[1]);

    const double half = 0.5 * r_b;
    for (int idx = 0; idx < dom.total_points(); ++idx) {
        auto c = dom.coords(idx);
        if (dom.dim == 1) {
            double d = dom.wrapped_diff(c[0] * h, a.center[0]);
            if (d >= -half && d < half) a.support.push_back(idx); // half-open window
        } else {
            double d0 = dom.wrapped_diff(c[0] * h, a.center[0]);
            double d1 = dom.wrapped_diff(c[1] * h, a.center[1]);
            if (std::hypot(d0, d1) <= half) a.support.push_back(idx);
        }
    }
    a.support_measure = static_cast<double>(a.support.size()) * std::pow(h, dom.dim);
    a.ball_measure = dom.dim == 1 ? 2.0 * r_b : M_PI * r_b * r_b;
    a.t_grid = LogGrid(0.25 * r_b, 0.5 * r_b, t_points);
    a.c0 = 1.0 / std::sqrt(a.ball_measure * a.support_measure * std::log(2.0));
    return a;
}

struct Molecule {
    GridFunction values;
    TentAtom source;
};

/// m = \int t^2 L e^{-t^2 L} (a(.,t)) dt/t over the atom's t-window.
inline Molecule synthesize_molecule(const OperatorModel& op, const TentAtom& atom) {
    require_same_domain(op.domain, atom.domain, "synthesize_molecule");
    AnalyticSymbol ze; // z e^{-z}
    ze.alpha = 1.0;
    ze.name = "z*exp(-z)";
    ze.evaluator = [](Complex z) { return z * std::exp(-z); };
    Vec slice = Vec::Zero(op.domain.total_points());
    for (int idx : atom.support) slice[idx] = atom.c0;
    Vec acc = Vec::Zero(op.domain.total_points());
    for (int n = 0; n < atom.t_grid.size(); ++n) {
        const double t = atom.t_grid.nodes[n];
        acc += atom.t_grid.weights[n] * apply_calculus_spectral(op, ze, t * t, slice);
    }
    return Molecule{GridFunction(op.domain, std::move(acc)), atom};
}

struct G1ScanEntry {
    double delta = 0.0;
    double g1_l1 = 0.0;
};
struct G1ScanReport {
    std::vector<G1ScanEntry> entries;
    double max_over_min = 0.0;
};

/// ||g_{1,delta}(m)||_1 across delta with the net rebuilt per delta and M
/// fixed; the interesting output is the spread, which the uniform-constant
/// lemma predicts stays bounded.
inline G1ScanReport molecule_g1_scan(const OperatorModel& op, const AnalyticSymbol& zeta,
                                     const GridFunction& molecule,
                                     const std::vector<double>& delta_list, int m_param,
                                     const FrameOptions& opts = {}) {
    G1ScanReport rep;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double delta : delta_list) {
        DyadicParams p = auto_params(delta, m_param, op.domain);
        FrameContext ctx = build_frame_context(op, zeta, p, opts);
        double v = lp_norm(g_function(1, ctx, molecule), 1.0);
        rep.entries.push_back({delta, v});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    rep.max_over_min = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    return rep;
}

struct GoodLambdaResult {
    bool holds = true;
    std::vector<int> violations;
    double threshold = 0.0; // r^n / 4^n
};

/// Checks {N_h f > s} \cap {grad-max <= s/r} \subseteq {M chi_{f+ > s/2} > r^n/4^n}
/// pointwise on the grid, with all three maximal functions on one shared
/// t sampling.
inline GoodLambdaResult good_lambda_check(const OperatorModel& op, const GridFunction& f, double s,
                                          double r, const ConeParams& base_cone) {
    if (!(s > 0.0)) throw std::invalid_argument("good_lambda_check: s must be positive");
    if (!(r > 0.0 && r <= 1.0))
        throw std::invalid_argument("good_lambda_check: r must lie in (0, 1]");
    ConeParams cone1 = base_cone;
    cone1.aperture = 1.0;
    ConeParams cone2 = base_cone;
    cone2.aperture = 2.0;

    GridFunction nh = nontangential_maximal(op, f, cone1);
    GridFunction gr = gradient_nt_maximal(op, f, cone2);
    GridFunction fp = radial_maximal(op, f, base_cone.t_nodes);

    const int m = op.domain.total_points();
    Vec chi(m);
    for (int i = 0; i < m; ++i) chi[i] = std::abs(fp.values[i]) > 0.5 * s ? 1.0 : 0.0;
    GridFunction mx = hl_maximal(GridFunction(op.domain, std::move(chi)));

    GoodLambdaResult res;
    res.threshold = std::pow(r / 4.0, op.domain.dim);
    for (int i = 0; i < m; ++i) {
        bool in_left = std::abs(nh.values[i]) > s && std::abs(gr.values[i]) <= s / r;
        if (in_left && !(std::abs(mx.values[i]) > res.threshold)) {
            res.holds = false;
            res.violations.push_back(i);
        }
    }
    return res;
}

struct MaximalRecord {
    double radial_l1 = 0.0;
    double nt_l1 = 0.0;
    double grad_l1 = 0.0;
    double nt_over_radial = 0.0;
};
struct MaximalEquivalenceReport {
    std::vector<MaximalRecord> records;
    double max_nt_over_radial = 0.0;
};

inline MaximalEquivalenceReport maximal_equivalence_report(const OperatorModel& op,
                                                           const std::vector<GridFunction>& suite,
                                                           const ConeParams& base_cone) {
    ConeParams cone1 = base_cone;
    cone1.aperture = 1.0;
    ConeParams cone2 = base_cone;
    cone2.aperture = 2.0;
    MaximalEquivalenceReport rep;
    for (const auto& f : suite) {
        MaximalRecord rec;
        rec.radial_l1 = lp_norm(radial_maximal(op, f, base_cone.t_nodes), 1.0);
        rec.nt_l1 = lp_norm(nontangential_maximal(op, f, cone1), 1.0);
        rec.grad_l1 = lp_norm(gradient_nt_maximal(op, f, cone2), 1.0);
        rec.nt_over_radial = rec.radial_l1 > 0.0 ? rec.nt_l1 / rec.radial_l1 : 0.0;
        rep.records.push_back(rec);
        rep.max_nt_over_radial = std::max(rep.max_nt_over_radial, rec.nt_over_radial);
    }
    return rep;
}

} // namespace heatframe
