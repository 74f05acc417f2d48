#pragma once

#include "heatframe/calculus.hpp"
#include "heatframe/dyadic.hpp"
#include "heatframe/grid.hpp"
#include "heatframe/operators.hpp"
#include "heatframe/symbols.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace heatframe {

/// Coefficients indexed by (j, tau); storage is per-scale and aligned with
/// the net's cube lists, so the key set is exactly the cube set.
struct FrameCoefficients {
    DyadicParams params;
    std::vector<Vec> entries; // entries[j - j_min][tau]

    Complex& at(int j, int tau) { return entries[static_cast<size_t>(j - params.j_min)][tau]; }
    Complex at(int j, int tau) const { return entries[static_cast<size_t>(j - params.j_min)][tau]; }

    double l2_norm() const {
        double s = 0.0;
        for (const auto& v : entries) s += v.squaredNorm();
        return std::sqrt(s);
    }
};

struct FrameOptions {
    double band_tail = 0.02;   // mass tolerance defining the resolvable band
    bool use_contour = false;  // kernel assembly path for non-symmetric models
    ContourQuadrature contour = ContourQuadrature::make(200);
};

/// Everything needed to run the frame machinery for one (operator, symbol,
/// delta, M) choice: the nets, the per-scale kernels of q(delta^{-2j} L)
/// (with q rescaled so the Calderon constant is 1), the assembled T_delta,
/// and the spectral window the truncated scale range can resolve.
struct FrameContext {
    OperatorModel op;
    AnalyticSymbol zeta;
    AnalyticSymbol q;           // Calderon-normalized
    AnalyticSymbol z_qprime;    // z q'(z), same normalization (g4)
    double calderon = 0.0;      // constant of the raw q
    DyadicParams params;
    DyadicNet net;
    std::vector<Mat> kernels;   // kernel density per scale, j_min..j_max
    Mat T;
    std::optional<double> r_norm;

    // resolvable spectral window (symmetric models; empty band otherwise)
    double u_lo = 0.0, u_hi = 0.0;
    double lambda_lo = 0.0, lambda_hi = 0.0;
    std::vector<int> band;
    Mat band_basis; // eigenvector columns spanning the band

    double log_delta() const { return std::log(params.delta); }
    const Mat& kernel(int j) const {
        return kernels[static_cast<size_t>(j - params.j_min)];
    }
    double hdim() const { return std::pow(op.domain.spacing(), op.domain.dim); }
};

inline FrameContext build_frame_context(const OperatorModel& op, const AnalyticSymbol& zeta,
                                        const DyadicParams& params,
                                        const FrameOptions& opts = {}) {
    params.validate();
    FrameContext ctx;
    ctx.op = op;
    ctx.zeta = zeta;
    ctx.params = params;
    AnalyticSymbol q_raw = derived_q(zeta);
    ctx.calderon = calderon_constant(q_raw);
    const double scale = 1.0 / std::sqrt(ctx.calderon);
    ctx.q = q_raw.scaled(scale);
    ctx.q.name = "qhat[" + zeta.name + "]";
    ctx.z_qprime = derived_z_qprime(zeta).scaled(scale);
    ctx.net = build_net(params, op.domain);

    CalculusPath path;
    if (opts.use_contour || !op.is_symmetric())
        path = ContourPath{opts.contour};
    else
        path = SpectralPath{};
    for (int j = params.j_min; j <= params.j_max; ++j)
        ctx.kernels.push_back(calculus_kernel_matrix(op, ctx.q, params.scale_time(j), path).values);

    // T = ln(delta) sum_j sum_tau |Q| K_j(:, y_Q) K_j(y_Q, :) h^dim
    const int m = op.domain.total_points();
    ctx.T = Mat::Zero(m, m);
    const double ld = ctx.log_delta();
    for (int j = params.j_min; j <= params.j_max; ++j) {
        const ScaleNet& sn = ctx.net.scale(j);
        const Mat& k = ctx.kernel(j);
        const int nc = static_cast<int>(sn.cubes.size());
        Mat cols(m, nc);
        Mat rows(nc, m);
        RealVec w(nc);
        for (int c = 0; c < nc; ++c) {
            cols.col(c) = k.col(sn.cubes[c].center_index);
            rows.row(c) = k.row(sn.cubes[c].center_index);
            w[c] = sn.cubes[c].measure;
        }
        ctx.T.noalias() += ld * ctx.hdim() * (cols * w.asDiagonal() * rows);
    }

    if (op.is_symmetric()) {
        auto [ulo, uhi] = symbol_mass_quantiles(ctx.q, opts.band_tail);
        ctx.u_lo = ulo;
        ctx.u_hi = uhi;
        ctx.lambda_lo = uhi * std::pow(params.delta, 2.0 * params.j_min);
        ctx.lambda_hi = ulo * std::pow(params.delta, 2.0 * params.j_max);
        const SpectralData& sd = spectral_decompose(op);
        for (int i = 0; i < sd.eigenvalues.size(); ++i) {
            double lam = sd.eigenvalues[i];
            if (lam > 0.0 && lam >= ctx.lambda_lo && lam <= ctx.lambda_hi)
                ctx.band.push_back(i);
        }
        ctx.band_basis.resize(m, static_cast<Eigen::Index>(ctx.band.size()));
        for (size_t c = 0; c < ctx.band.size(); ++c)
            ctx.band_basis.col(static_cast<Eigen::Index>(c)) =
                sd.eigenvectors.col(ctx.band[c]).cast<Complex>();
    }
    return ctx;
}

inline GridFunction frame_atom(const FrameContext& ctx, int j, int tau) {
    const ScaleNet& sn = ctx.net.scale(j);
    if (tau < 0 || tau >= static_cast<int>(sn.cubes.size()))
        throw std::invalid_argument("frame_atom: unknown cube");
    const Cube& c = sn.cubes[tau];
    Vec v = std::sqrt(ctx.log_delta() * c.measure) * ctx.kernel(j).col(c.center_index);
    return GridFunction(ctx.op.domain, std::move(v));
}

inline GridFunction dual_atom(const FrameContext& ctx, int j, int tau) {
    const ScaleNet& sn = ctx.net.scale(j);
    if (tau < 0 || tau >= static_cast<int>(sn.cubes.size()))
        throw std::invalid_argument("dual_atom: unknown cube");
    const Cube& c = sn.cubes[tau];
    Vec v = std::sqrt(ctx.log_delta() * c.measure) *
            ctx.kernel(j).row(c.center_index).conjugate().transpose();
    return GridFunction(ctx.op.domain, std::move(v));
}

/// <f, psi*_{j,tau}> = sqrt(ln d) |Q|^{1/2} (q(d^{-2j}L) f)(y_Q), evaluated
/// through the cached kernel rows.
inline FrameCoefficients raw_coefficients(const FrameContext& ctx, const GridFunction& f) {
    require_same_domain(ctx.op.domain, f.domain, "raw_coefficients");
    FrameCoefficients out;
    out.params = ctx.params;
    const double sld = std::sqrt(ctx.log_delta());
    for (int j = ctx.params.j_min; j <= ctx.params.j_max; ++j) {
        const ScaleNet& sn = ctx.net.scale(j);
        Vec qf = ctx.hdim() * (ctx.kernel(j) * f.values);
        Vec e(sn.cubes.size());
        for (size_t c = 0; c < sn.cubes.size(); ++c)
            e[static_cast<int>(c)] =
                sld * std::sqrt(sn.cubes[c].measure) * qf[sn.cubes[c].center_index];
        out.entries.push_back(std::move(e));
    }
    return out;
}

inline GridFunction synthesize(const FrameContext& ctx, const FrameCoefficients& coeffs) {
    if (coeffs.params.j_min != ctx.params.j_min || coeffs.params.j_max != ctx.params.j_max)
        throw std::invalid_argument("synthesize: coefficient keys do not match the net");
    const int m = ctx.op.domain.total_points();
    Vec out = Vec::Zero(m);
    const double sld = std::sqrt(ctx.log_delta());
    for (int j = ctx.params.j_min; j <= ctx.params.j_max; ++j) {
        const ScaleNet& sn = ctx.net.scale(j);
        const Vec& e = coeffs.entries[static_cast<size_t>(j - ctx.params.j_min)];
        if (e.size() != static_cast<Eigen::Index>(sn.cubes.size()))
            throw std::invalid_argument("synthesize: coefficient keys do not match the net");
        const Mat& k = ctx.kernel(j);
        for (size_t c = 0; c < sn.cubes.size(); ++c)
            out.noalias() += (sld * std::sqrt(sn.cubes[c].measure) * e[static_cast<int>(c)]) *
                             k.col(sn.cubes[c].center_index);
    }
    return GridFunction(ctx.op.domain, std::move(out));
}

/// T applied through the cached kernels, no materialized matrix.
inline GridFunction apply_T_via_kernels(const FrameContext& ctx, const GridFunction& f) {
    return synthesize(ctx, raw_coefficients(ctx, f));
}

inline Vec apply_T(const FrameContext& ctx, const Vec& f) { return ctx.T * f; }

/// Largest singular value of x -> op(x) via power iteration on op^H op.
inline double spectral_norm_power(const std::function<Vec(const Vec&)>& apply,
                                  const std::function<Vec(const Vec&)>& apply_adjoint, int size,
                                  double rel_tol = 1e-6, int max_iter = 5000) {
    Vec x(size);
    for (int i = 0; i < size; ++i)
        x[i] = Complex(std::cos(0.7 * i + 0.3), std::sin(1.3 * i + 0.1));
    x.normalize();
    double prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec y = apply_adjoint(apply(x));
        double lam = y.norm();
        if (lam == 0.0) return 0.0;
        x = y / lam;
        double sigma = std::sqrt(lam);
        if (it > 0 && std::abs(sigma - prev) <= rel_tol * std::max(sigma, 1e-300)) return sigma;
        prev = sigma;
    }
    throw std::runtime_error("spectral_norm_power: no convergence within iteration cap");
}

inline double spectral_norm_power(const Mat& a, double rel_tol = 1e-6, int max_iter = 5000) {
    return spectral_norm_power([&](const Vec& v) { return Vec(a * v); },
                               [&](const Vec& v) { return Vec(a.adjoint() * v); },
                               static_cast<int>(a.cols()), rel_tol, max_iter);
}

namespace detail {

inline Vec project_band(const FrameContext& ctx, const Vec& v) {
    if (ctx.band.empty()) return v;
    return ctx.band_basis * (ctx.band_basis.adjoint() * v);
}

} // namespace detail

/// ||I - T|| on the resolvable band (the identity is unreachable outside the
/// truncated scale range, so the full-space norm is always ~1 and says
/// nothing about the sampling quality the theorems are about).
inline double estimate_R_norm(FrameContext& ctx, double rel_tol = 1e-6, int max_iter = 5000) {
    const int m = ctx.op.domain.total_points();
    const bool sym = ctx.op.is_symmetric();
    if (sym && ctx.band.empty()) {
        ctx.r_norm = 1.0;
        return 1.0;
    }
    auto project = [&](const Vec& v) { return sym ? detail::project_band(ctx, v) : v; };
    auto fwd = [&](const Vec& v) {
        Vec w = project(v);
        w -= ctx.T * w;
        return project(w);
    };
    auto adj = [&](const Vec& v) {
        Vec w = project(v);
        w -= ctx.T.adjoint() * w;
        return project(w);
    };
    double norm = spectral_norm_power(fwd, adj, m, rel_tol, max_iter);
    ctx.r_norm = norm;
    return norm;
}

struct NeumannResult {
    GridFunction value;
    int iterations = 0;
    double residual = 0.0; // ||T g - f|| / ||f||
    bool converged = false;
};

/// Partial sums of sum_k R^k f, stopped by the true residual ||T g - f||.
inline NeumannResult neumann_solve(const FrameContext& ctx, const GridFunction& f, double tol,
                                   int max_iter) {
    require_same_domain(ctx.op.domain, f.domain, "neumann_apply_inverse");
    if (!ctx.r_norm.has_value() || *ctx.r_norm >= 1.0)
        throw std::invalid_argument(
            "neumann_apply_inverse: contraction not established (||R|| >= 1 or unknown)");
    const double fn = f.values.norm();
    NeumannResult res;
    if (fn == 0.0) {
        res.value = GridFunction::zero(ctx.op.domain);
        res.converged = true;
        return res;
    }
    Vec g = f.values;
    Vec p = f.values; // R^k f
    for (int k = 0;; ++k) {
        p -= ctx.T * p; // now R^{k+1} f; residual of g_k is exactly its norm
        res.residual = p.norm() / fn;
        res.iterations = k;
        if (res.residual <= tol) {
            res.converged = true;
            break;
        }
        if (k >= max_iter) break;
        g += p;
    }
    res.value = GridFunction(ctx.op.domain, std::move(g));
    return res;
}

inline GridFunction neumann_apply_inverse(const FrameContext& ctx, const GridFunction& f,
                                          double tol = 1e-8, int max_iter = 200) {
    NeumannResult r = neumann_solve(ctx, f, tol, max_iter);
    if (!r.converged)
        throw std::runtime_error("neumann_apply_inverse: residual " + std::to_string(r.residual) +
                                 " above tol after max_iter iterations");
    return r.value;
}

inline FrameCoefficients analyze(const FrameContext& ctx, const GridFunction& f, double tol = 1e-8,
                                 int max_iter = 200) {
    return raw_coefficients(ctx, neumann_apply_inverse(ctx, f, tol, max_iter));
}

/// Ideal (unsampled) contribution of one extra scale beyond each end of the
/// truncated range, relative to ||f||; reported next to reconstruction errors.
inline double truncation_residual(const FrameContext& ctx, const GridFunction& f) {
    const double ld = ctx.log_delta();
    Vec extra = Vec::Zero(f.values.size());
    for (int j : {ctx.params.j_min - 1, ctx.params.j_max + 1}) {
        double t = ctx.params.scale_time(j);
        Vec once = apply_calculus_spectral(ctx.op, ctx.q, t, f.values);
        extra += ld * apply_calculus_spectral(ctx.op, ctx.q, t, once);
    }
    double fn = f.values.norm();
    return fn == 0.0 ? 0.0 : extra.norm() / fn;
}

struct SearchResult {
    double delta = 0.0;
    int M = 0;
    double achieved_norm = 1.0;
    bool achieved = false;
    DyadicParams params;
};

/// Grid search over (delta, M) for ||R_delta|| <= target on the resolvable
/// band; returns the first hit, otherwise the argmin flagged not-achieved.
inline SearchResult search_params(const OperatorModel& op, const AnalyticSymbol& zeta,
                                  double target_norm = 0.5,
                                  std::vector<double> delta_list = {1.05, 1.1, 1.2, 1.4},
                                  std::vector<int> m_list = {1, 2, 3, 4, 5, 6},
                                  const FrameOptions& opts = {}) {
    SearchResult best;
    best.achieved_norm = std::numeric_limits<double>::infinity();
    for (double delta : delta_list)
        for (int M : m_list) {
            DyadicParams p;
            try {
                p = auto_params(delta, M, op.domain);
            } catch (const std::invalid_argument&) {
                continue; // no buildable scale range for this pair
            }
            FrameContext ctx = build_frame_context(op, zeta, p, opts);
            double norm = estimate_R_norm(ctx);
            if (norm < best.achieved_norm) {
                best.delta = delta;
                best.M = M;
                best.achieved_norm = norm;
                best.params = p;
            }
            if (norm <= target_norm) {
                best.achieved = true;
                return best;
            }
        }
    best.achieved = false;
    return best;
}

} // namespace heatframe
