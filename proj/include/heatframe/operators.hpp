#pragma once

#include "heatframe/bounds.hpp"
#include "heatframe/grid.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatframe {

enum class OperatorKind { laplacian, schrodinger, divergence_form, custom };

inline std::string to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::laplacian: return "laplacian";
        case OperatorKind::schrodinger: return "schrodinger";
        case OperatorKind::divergence_form: return "divergence_form";
        case OperatorKind::custom: return "custom";
    }
    return "?";
}

struct SpectralData {
    RealVec eigenvalues;  // ascending
    RealMat eigenvectors; // orthogonal, columns

    double reconstruction_error(const RealMat& L) const {
        RealMat R = eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
        return (R - L).cwiseAbs().maxCoeff();
    }
    double orthogonality_error() const {
        RealMat I = eigenvectors.transpose() * eigenvectors;
        I.diagonal().array() -= 1.0;
        return I.cwiseAbs().maxCoeff();
    }
};

/// Kernel density K(x,y) against Lebesgue quadrature: applying the operator
/// to f is K * diag(h^dim) * f.
struct KernelMatrix {
    GridDomain domain;
    Mat values;
    double measure_weight = 0.0; // h^dim

    Vec apply(const Vec& f) const { return measure_weight * (values * f); }
    GridFunction apply(const GridFunction& f) const {
        require_same_domain(domain, f.domain, "KernelMatrix::apply");
        return GridFunction(domain, apply(f.values));
    }
};

/// Discretized L on a periodic grid: second-order centered differences,
/// real symmetric for all built-in kinds.
struct OperatorModel {
    GridDomain domain;
    OperatorKind kind = OperatorKind::laplacian;
    RealMat matrix;
    RealVec field; // potential (schrodinger) or coefficient (divergence_form); empty otherwise

    mutable std::shared_ptr<const SpectralData> spectral;

    bool is_symmetric(double tol = 1e-12) const {
        double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
        return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
    }
};

namespace detail {

// Assemble sum over axes of D^T diag(a at midpoints) D for the periodic
// forward-difference D; coefficient identically 1 gives the plain stencil.
inline RealMat divergence_form_matrix(const GridDomain& dom, const RealVec& coeff) {
    const int m = dom.total_points();
    const double inv_h2 = 1.0 / (dom.spacing() * dom.spacing());
    RealMat L = RealMat::Zero(m, m);
    for (int idx = 0; idx < m; ++idx) {
        auto c = dom.coords(idx);
        for (int a = 0; a < dom.dim; ++a) {
            int jdx = (a == 0) ? dom.index(c[0] + 1, c[1]) : dom.index(c[0], c[1] + 1);
            double am = 0.5 * (coeff[idx] + coeff[jdx]) * inv_h2;
            L(idx, idx) += am;
            L(jdx, jdx) += am;
            L(idx, jdx) -= am;
            L(jdx, idx) -= am;
        }
    }
    return L;
}

} // namespace detail

inline OperatorModel build_laplacian(const GridDomain& dom) {
    OperatorModel op;
    op.domain = dom;
    op.kind = OperatorKind::laplacian;
    op.matrix = detail::divergence_form_matrix(dom, RealVec::Ones(dom.total_points()));
    return op;
}

inline OperatorModel build_schrodinger(const GridDomain& dom, const GridFunction& potential) {
    require_same_domain(dom, potential.domain, "build_schrodinger");
    if (potential.values.imag().cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("build_schrodinger: potential must be real");
    RealVec v = potential.values.real();
    if (v.minCoeff() < 0.0)
        throw std::invalid_argument("build_schrodinger: potential must be nonnegative");
    OperatorModel op;
    op.domain = dom;
    op.kind = OperatorKind::schrodinger;
    op.field = v;
    op.matrix = detail::divergence_form_matrix(dom, RealVec::Ones(dom.total_points()));
    op.matrix.diagonal() += v;
    return op;
}

inline OperatorModel build_divergence_form(const GridDomain& dom, const GridFunction& coefficient) {
    require_same_domain(dom, coefficient.domain, "build_divergence_form");
    if (coefficient.values.imag().cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("build_divergence_form: coefficient must be real");
    RealVec a = coefficient.values.real();
    if (a.minCoeff() <= 0.0)
        throw std::invalid_argument("build_divergence_form: coefficient must be bounded below by a positive constant");
    OperatorModel op;
    op.domain = dom;
    op.kind = OperatorKind::divergence_form;
    op.field = a;
    op.matrix = detail::divergence_form_matrix(dom, a);
    return op;
}

/// Wrap an explicit matrix (test hook for mildly non-symmetric models that
/// go through the contour path).
inline OperatorModel operator_from_matrix(const GridDomain& dom, RealMat m) {
    if (m.rows() != dom.total_points() || m.cols() != dom.total_points())
        throw std::invalid_argument("operator_from_matrix: size mismatch");
    OperatorModel op;
    op.domain = dom;
    op.kind = OperatorKind::custom;
    op.matrix = std::move(m);
    return op;
}

/// Eigendecomposition, cached on the model. Eigenvalues within
/// 1e-10 * max|lambda| of zero are snapped to zero so that the exactly
/// conserved modes of the stencils stay exact under the calculus.
inline const SpectralData& spectral_decompose(const OperatorModel& op) {
    if (op.spectral) return *op.spectral;
    if (!op.is_symmetric())
        throw std::invalid_argument("spectral_decompose: matrix is not symmetric; use the contour path");
    Eigen::SelfAdjointEigenSolver<RealMat> es(op.matrix);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectral_decompose: eigensolver failed");
    auto data = std::make_shared<SpectralData>();
    data->eigenvalues = es.eigenvalues();
    data->eigenvectors = es.eigenvectors();
    const double clamp = 1e-10 * data->eigenvalues.cwiseAbs().maxCoeff();
    for (int i = 0; i < data->eigenvalues.size(); ++i)
        if (std::abs(data->eigenvalues[i]) <= clamp) data->eigenvalues[i] = 0.0;
    op.spectral = data;
    return *op.spectral;
}

inline GridFunction heat_semigroup_apply(const OperatorModel& op, double t, const GridFunction& f) {
    require_same_domain(op.domain, f.domain, "heat_semigroup_apply");
    if (t < 0.0) throw std::invalid_argument("heat_semigroup_apply: t must be nonnegative");
    if (t == 0.0) return f;
    const SpectralData& sd = spectral_decompose(op);
    RealVec e = (-t * sd.eigenvalues.array()).exp();
    Vec out = sd.eigenvectors * (e.asDiagonal() * (sd.eigenvectors.transpose() * f.values));
    return GridFunction(op.domain, std::move(out));
}

inline KernelMatrix heat_kernel_matrix(const OperatorModel& op, double t) {
    if (t <= 0.0) throw std::invalid_argument("heat_kernel_matrix: t must be positive");
    const SpectralData& sd = spectral_decompose(op);
    const double hdim = std::pow(op.domain.spacing(), op.domain.dim);
    RealVec e = (-t * sd.eigenvalues.array()).exp();
    RealMat k = sd.eigenvectors * e.asDiagonal() * sd.eigenvectors.transpose() / hdim;
    return KernelMatrix{op.domain, k.cast<Complex>(), hdim};
}

/// Centered-difference x-gradient of the heat kernel, one matrix per axis.
inline std::vector<KernelMatrix> gradient_heat_kernel(const OperatorModel& op, double t) {
    KernelMatrix k = heat_kernel_matrix(op, t);
    const GridDomain& dom = op.domain;
    const double inv_2h = 1.0 / (2.0 * dom.spacing());
    std::vector<KernelMatrix> out;
    for (int a = 0; a < dom.dim; ++a) {
        Mat g(k.values.rows(), k.values.cols());
        for (int idx = 0; idx < dom.total_points(); ++idx) {
            auto c = dom.coords(idx);
            int up = (a == 0) ? dom.index(c[0] + 1, c[1]) : dom.index(c[0], c[1] + 1);
            int dn = (a == 0) ? dom.index(c[0] - 1, c[1]) : dom.index(c[0], c[1] - 1);
            g.row(idx) = (k.values.row(up) - k.values.row(dn)) * inv_2h;
        }
        out.push_back(KernelMatrix{dom, std::move(g), k.measure_weight});
    }
    return out;
}

/// Fits the smallest C with |p_t(x,y)| <= C t^{-n/2} exp(-|x-y|^2 / (c t)),
/// c frozen at 4(1+margin). Small-t precondition keeps wraparound negligible.
inline BoundReport verify_gaussian_bound(const OperatorModel& op, const std::vector<double>& t_list,
                                         double c_ref = 4.0, double margin = 0.1) {
    if (t_list.empty()) throw std::invalid_argument("verify_gaussian_bound: empty t list");
    const GridDomain& dom = op.domain;
    const double t_cap = (dom.side / 4.0) * (dom.side / 4.0) / c_ref;
    BoundReport rep;
    rep.what = "gaussian_bound[" + to_string(op.kind) + "]";
    const double c = 4.0 * (1.0 + margin);
    for (double t : t_list) {
        if (t <= 0.0 || t > t_cap)
            throw std::invalid_argument("verify_gaussian_bound: t outside the small-t regime");
        KernelMatrix k = heat_kernel_matrix(op, t);
        BoundProbe probe;
        probe.t = t;
        const double scale = std::pow(t, -0.5 * dom.dim);
        // entries below the fp noise floor of the spectral reconstruction are
        // not kernel values; dividing them by a deep-tail shape is meaningless
        const double floor = 1e-13 * k.values.cwiseAbs().maxCoeff();
        for (int i = 0; i < k.values.rows(); ++i)
            for (int j = 0; j < k.values.cols(); ++j) {
                double v = std::abs(k.values(i, j));
                if (v < floor) continue;
                double d = dom.distance(i, j);
                double shape = scale * std::exp(-d * d / (c * t));
                double ratio = v / shape;
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

} // namespace heatframe
