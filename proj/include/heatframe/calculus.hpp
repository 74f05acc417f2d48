#pragma once

#include "heatframe/bounds.hpp"
#include "heatframe/grid.hpp"
#include "heatframe/operators.hpp"
#include "heatframe/quadrature.hpp"
#include "heatframe/symbols.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

namespace heatframe {

/// Two-ray contour {r e^{+i theta}} u {r e^{-i theta}} traversed clockwise
/// around the spectrum sector. Radial nodes are stored in t-rescaled units:
/// the symbol is sampled at u e^{+-i theta}, the resolvent at (u/t) e^{+-i theta}.
struct ContourQuadrature {
    double theta = 0.25 * M_PI;
    std::vector<double> radial_nodes; // ascending, dimensionless
    std::vector<double> weights;      // log-trapezoid weights for du

    static ContourQuadrature make(int nodes, double theta = 0.25 * M_PI,
                                  double u_lo = 1e-6, double u_hi = 1e6) {
        if (nodes < 16) throw std::invalid_argument("ContourQuadrature: need >= 16 nodes");
        if (!(theta > 0.0 && theta < 0.5 * M_PI))
            throw std::invalid_argument("ContourQuadrature: theta must lie in (0, pi/2)");
        ContourQuadrature q;
        q.theta = theta;
        LogGrid g(u_lo, u_hi, nodes);
        q.radial_nodes = g.nodes;
        q.weights.resize(nodes);
        for (int i = 0; i < nodes; ++i) q.weights[i] = g.weights[i] * g.nodes[i]; // du = u dlog u
        return q;
    }

    ContourQuadrature doubled() const {
        return make(2 * static_cast<int>(radial_nodes.size()), theta,
                    radial_nodes.front(), radial_nodes.back());
    }
};

struct SpectralPath {};
struct ContourPath {
    ContourQuadrature quad;
    bool validate = false;   // node-doubling residual gate
    double tol = 1e-8;
};
using CalculusPath = std::variant<SpectralPath, ContourPath>;

inline Vec apply_calculus_spectral(const OperatorModel& op, const AnalyticSymbol& sym,
                                   double t, const Vec& f) {
    const SpectralData& sd = spectral_decompose(op);
    Vec coeffs = sd.eigenvectors.transpose() * f;
    for (int i = 0; i < coeffs.size(); ++i) coeffs[i] *= sym.eval_real(t * sd.eigenvalues[i]);
    return sd.eigenvectors * coeffs;
}

namespace detail {

inline void check_finite(const Vec& v, const char* where) {
    if (!v.allFinite()) throw std::runtime_error(std::string(where) + ": singular resolvent");
}

inline Vec contour_accumulate(const OperatorModel& op, const AnalyticSymbol& sym, double t,
                              const Vec& f, const ContourQuadrature& quad) {
    const int m = op.domain.total_points();
    const Complex eip(std::cos(quad.theta), std::sin(quad.theta));
    const Complex eim = std::conj(eip);
    Vec acc = Vec::Zero(m);
    Mat shifted(m, m);
    for (size_t k = 0; k < quad.radial_nodes.size(); ++k) {
        const double u = quad.radial_nodes[k];
        const double w = quad.weights[k];
        for (Complex dir : {eip, eim}) {
            const Complex lam = (u / t) * dir;
            const Complex psi = sym.eval(u * dir);
            if (std::abs(psi) == 0.0) continue;
            shifted = op.matrix.cast<Complex>();
            shifted.diagonal().array() -= lam;
            Vec x = Eigen::PartialPivLU<Mat>(shifted).solve(f);
            check_finite(x, "apply_calculus_contour");
            const double sign = (dir == eip) ? 1.0 : -1.0;
            acc += sign * w * psi * dir * x;
        }
    }
    // d lambda = dir * dr with r = u/t; prefactor 1/(2 pi i)
    return acc / (t * Complex(0.0, 2.0 * M_PI));
}

} // namespace detail

inline Vec apply_calculus_contour(const OperatorModel& op, const AnalyticSymbol& sym, double t,
                                  const Vec& f, const ContourPath& path) {
    Vec out = detail::contour_accumulate(op, sym, t, f, path.quad);
    if (path.validate) {
        Vec fine = detail::contour_accumulate(op, sym, t, f, path.quad.doubled());
        double denom = std::max(fine.norm(), 1e-300);
        if ((fine - out).norm() > path.tol * denom)
            throw std::runtime_error("apply_calculus_contour: quadrature under-resolved");
        out = fine;
    }
    return out;
}

inline GridFunction apply_calculus(const OperatorModel& op, const AnalyticSymbol& sym, double t,
                                   const GridFunction& f, const CalculusPath& path = SpectralPath{}) {
    require_same_domain(op.domain, f.domain, "apply_calculus");
    if (t <= 0.0) throw std::invalid_argument("apply_calculus: t must be positive");
    if (std::holds_alternative<SpectralPath>(path))
        return GridFunction(op.domain, apply_calculus_spectral(op, sym, t, f.values));
    return GridFunction(op.domain,
                        apply_calculus_contour(op, sym, t, f.values, std::get<ContourPath>(path)));
}

inline KernelMatrix calculus_kernel_matrix(const OperatorModel& op, const AnalyticSymbol& sym,
                                           double t, const CalculusPath& path = SpectralPath{}) {
    if (t <= 0.0) throw std::invalid_argument("calculus_kernel_matrix: t must be positive");
    const GridDomain& dom = op.domain;
    const int m = dom.total_points();
    const double hdim = std::pow(dom.spacing(), dom.dim);
    Mat k(m, m);
    if (std::holds_alternative<SpectralPath>(path)) {
        const SpectralData& sd = spectral_decompose(op);
        Vec diag(m);
        for (int i = 0; i < m; ++i) diag[i] = sym.eval_real(t * sd.eigenvalues[i]);
        Mat vc = sd.eigenvectors.cast<Complex>();
        k = vc * diag.asDiagonal() * vc.transpose();
    } else {
        const auto& cp = std::get<ContourPath>(path);
        k.setZero();
        Mat rhs = Mat::Identity(m, m);
        const Complex eip(std::cos(cp.quad.theta), std::sin(cp.quad.theta));
        const Complex eim = std::conj(eip);
        Mat shifted(m, m);
        for (size_t n = 0; n < cp.quad.radial_nodes.size(); ++n) {
            const double u = cp.quad.radial_nodes[n];
            const double w = cp.quad.weights[n];
            for (Complex dir : {eip, eim}) {
                const Complex lam = (u / t) * dir;
                const Complex psi = sym.eval(u * dir);
                if (std::abs(psi) == 0.0) continue;
                shifted = op.matrix.cast<Complex>();
                shifted.diagonal().array() -= lam;
                const double sign = (dir == eip) ? 1.0 : -1.0;
                k += sign * w * psi * dir * Eigen::PartialPivLU<Mat>(shifted).solve(rhs);
            }
        }
        k /= t * Complex(0.0, 2.0 * M_PI);
    }
    return KernelMatrix{dom, k / hdim, hdim};
}

/// c = 1/2 * int_0^inf q(t)^2 dt/t. The value is checked by widening the
/// range and doubling the resolution; a visible drift means the requested
/// window does not capture the mass.
inline double calderon_constant(const AnalyticSymbol& q, double t_lo = 1e-8, double t_hi = 1e4,
                                int points = 600, double rel_tol = 1e-10) {
    auto integral = [&](double lo, double hi, int p) {
        LogGrid g(lo, hi, p);
        double s = 0.0;
        for (int i = 0; i < g.size(); ++i) {
            Complex v = q.eval_real(g.nodes[i]);
            s += g.weights[i] * (v * v).real();
        }
        return 0.5 * s;
    };
    double base = integral(t_lo, t_hi, points);
    double wide = integral(t_lo / 16.0, t_hi * 16.0, 2 * points);
    if (!(base > 0.0) || !std::isfinite(base))
        throw std::runtime_error("calderon_constant: nonpositive estimate");
    if (std::abs(wide - base) > rel_tol * std::abs(wide))
        throw std::runtime_error("calderon_constant: quadrature window too narrow");
    return wide;
}

/// Quantiles of the Calderon mass G(u) = q(u)^2 du/u; used to decide which
/// spectral window a truncated scale range actually resolves.
inline std::pair<double, double> symbol_mass_quantiles(const AnalyticSymbol& q, double tail,
                                                       double t_lo = 1e-8, double t_hi = 1e4,
                                                       int points = 4000) {
    LogGrid g(t_lo, t_hi, points);
    std::vector<double> cum(g.size());
    double total = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        Complex v = q.eval_real(g.nodes[i]);
        total += g.weights[i] * std::norm(v);
        cum[i] = total;
    }
    if (!(total > 0.0)) throw std::runtime_error("symbol_mass_quantiles: zero mass");
    double lo = g.nodes.front(), hi = g.nodes.back();
    for (int i = 0; i < g.size(); ++i)
        if (cum[i] >= tail * total) { lo = g.nodes[i]; break; }
    for (int i = g.size() - 1; i >= 0; --i)
        if (total - cum[i] >= tail * total) { hi = g.nodes[i]; break; }
    return {lo, hi};
}

/// Almost-orthogonality probe: kernels of q(t^2 L) q(s^2 L) and of
/// (t^2 L q'(t^2 L)) q(s^2 L), fitted against
///   min(t/s, s/t) (t+s)^alpha / (t+s+|x-y|)^{n+alpha}.
inline BoundReport verify_almost_orthogonality(const OperatorModel& op, const AnalyticSymbol& zeta,
                                               double t, double s) {
    if (t <= 0.0 || s <= 0.0)
        throw std::invalid_argument("verify_almost_orthogonality: t, s must be positive");
    const GridDomain& dom = op.domain;
    const double t_cap = dom.side * dom.side / 16.0;
    if (t * t > t_cap || s * s > t_cap)
        throw std::invalid_argument("verify_almost_orthogonality: scales outside the small-t regime");
    const SpectralData& sd = spectral_decompose(op);
    const double hdim = std::pow(dom.spacing(), dom.dim);
    const AnalyticSymbol q = derived_q(zeta);
    const AnalyticSymbol zqp = derived_z_qprime(zeta);
    const double alpha = zeta.alpha;
    const double minr = std::min(t / s, s / t);

    auto composed_kernel = [&](const AnalyticSymbol& left) {
        Vec d(sd.eigenvalues.size());
        for (int i = 0; i < d.size(); ++i)
            d[i] = left.eval_real(t * t * sd.eigenvalues[i]) *
                   q.eval_real(s * s * sd.eigenvalues[i]);
        Mat vc = sd.eigenvectors.cast<Complex>();
        Mat k = vc * d.asDiagonal() * vc.transpose() / hdim;
        return k;
    };

    BoundReport rep;
    rep.what = "almost_orthogonality[" + zeta.name + "]";
    for (const AnalyticSymbol* left : {&q, &zqp}) {
        Mat k = composed_kernel(*left);
        BoundProbe probe;
        probe.t = t;
        probe.s = s;
        for (int i = 0; i < k.rows(); ++i)
            for (int j = 0; j < k.cols(); ++j) {
                double d = dom.distance(i, j);
                double shape = minr * std::pow(t + s, alpha) /
                               std::pow(t + s + d, dom.dim + alpha);
                double ratio = std::abs(k(i, j)) / shape;
                if (ratio > probe.fitted_c) {
                    probe.fitted_c = ratio;
                    probe.worst_row = i;
                    probe.worst_col = j;
                }
            }
        rep.probes.push_back(probe);
    }
    rep.finish();
    return rep;
}

/// sup |K(x,y)| of the kernel of q(t^2 L) q(s^2 L); slope diagnostics.
inline double composed_kernel_sup(const OperatorModel& op, const AnalyticSymbol& zeta,
                                  double t, double s) {
    const SpectralData& sd = spectral_decompose(op);
    const double hdim = std::pow(op.domain.spacing(), op.domain.dim);
    const AnalyticSymbol q = derived_q(zeta);
    Vec d(sd.eigenvalues.size());
    for (int i = 0; i < d.size(); ++i)
        d[i] = q.eval_real(t * t * sd.eigenvalues[i]) * q.eval_real(s * s * sd.eigenvalues[i]);
    Mat vc = sd.eigenvectors.cast<Complex>();
    Mat k = vc * d.asDiagonal() * vc.transpose() / hdim;
    return k.cwiseAbs().maxCoeff();
}

/// Holder regularity fit for the kernel of psi(tL): smallest C with
///   |K(x+h,y) - K(x,y)| <= C (|h|/(sqrt t + |x-y|))^gamma t^alpha / (t+|x-y|^2)^{n/2+alpha}
/// over one-grid-step h and admissible 2|h| <= sqrt t + |x-y|.
inline BoundReport verify_kernel_holder(const OperatorModel& op, const AnalyticSymbol& psi,
                                        double t, double gamma = 1.0) {
    if (t <= 0.0) throw std::invalid_argument("verify_kernel_holder: t must be positive");
    const GridDomain& dom = op.domain;
    const double h = dom.spacing();
    if (std::sqrt(t) < h)
        throw std::invalid_argument("verify_kernel_holder: grid too coarse for given t");
    KernelMatrix km = calculus_kernel_matrix(op, psi, t);
    const double alpha = psi.alpha;
    BoundProbe probe;
    probe.t = t;
    long admissible = 0;
    for (int i = 0; i < km.values.rows(); ++i) {
        auto c = dom.coords(i);
        for (int a = 0; a < dom.dim; ++a) {
            int ip = (a == 0) ? dom.index(c[0] + 1, c[1]) : dom.index(c[0], c[1] + 1);
            for (int j = 0; j < km.values.cols(); ++j) {
                double d = dom.distance(i, j);
                if (2.0 * h > std::sqrt(t) + d) continue;
                ++admissible;
                double num = std::abs(km.values(ip, j) - km.values(i, j));
                double shape = std::pow(h / (std::sqrt(t) + d), gamma) * std::pow(t, alpha) /
                               std::pow(t + d * d, 0.5 * dom.dim + alpha);
                double ratio = num / shape;
                if (ratio > probe.fitted_c) {
                    probe.fitted_c = ratio;
                    probe.worst_row = i;
                    probe.worst_col = j;
                }
            }
        }
    }
    if (admissible == 0)
        throw std::invalid_argument("verify_kernel_holder: no admissible triples");
    BoundReport rep;
    rep.what = "kernel_holder[" + psi.name + "]";
    rep.probes.push_back(probe);
    rep.finish();
    return rep;
}

} // namespace heatframe
