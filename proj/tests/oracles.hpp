// Independent reference implementations for cross-checking the library.
// Everything here is deliberately written as plain loops against the raw
// spectral data, sharing no code with the paths under test.
#pragma once

#include "heatframe/grid.hpp"
#include "heatframe/operators.hpp"

#include <Eigen/LU>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using heatframe::Complex;
using heatframe::GridDomain;
using heatframe::GridFunction;
using heatframe::RealMat;
using heatframe::RealVec;
using heatframe::SpectralData;
using heatframe::Vec;

/// Matrix exponential by Pade-13 scaling and squaring (Higham's coefficients).
inline RealMat expm_pade(const RealMat& a) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,           16380.0,
                               182.0,               1.0};
    const int m = static_cast<int>(a.rows());
    double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (nrm > 5.4) squarings = static_cast<int>(std::ceil(std::log2(nrm / 5.4)));
    RealMat as = a / std::pow(2.0, squarings);
    RealMat eye = RealMat::Identity(m, m);
    RealMat a2 = as * as, a4 = a2 * a2, a6 = a4 * a2;
    RealMat u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                      b[3] * a2 + b[1] * eye);
    RealMat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
                b[0] * eye;
    RealMat r = (v - u).lu().solve(v + u);
    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

inline double wrapped_gaussian_1d(double d, double t, double side, int images = 4) {
    double s = 0.0;
    for (int m = -images; m <= images; ++m) {
        double x = d + m * side;
        s += std::exp(-x * x / (4.0 * t));
    }
    return s / std::sqrt(4.0 * M_PI * t);
}

inline double torus_dist(const GridDomain& dom, int ia, int ib) {
    const double h = dom.side / dom.n;
    double acc = 0.0;
    int ca0 = ia % dom.n, ca1 = ia / dom.n;
    int cb0 = ib % dom.n, cb1 = ib / dom.n;
    int diffs[2] = {ca0 - cb0, dom.dim == 2 ? ca1 - cb1 : 0};
    for (int axis = 0; axis < dom.dim; ++axis) {
        double d = std::fmod(diffs[axis] * h, dom.side);
        if (d > 0.5 * dom.side) d -= dom.side;
        if (d < -0.5 * dom.side) d += dom.side;
        acc += d * d;
    }
    return std::sqrt(acc);
}

/// psi(tL) f through explicit loops over the eigen data.
inline Vec apply_multiplier(const SpectralData& sd, const std::function<double(double)>& psi,
                            double t, const Vec& f) {
    const int m = static_cast<int>(sd.eigenvalues.size());
    Vec coeff = Vec::Zero(m);
    for (int k = 0; k < m; ++k) {
        Complex c = 0.0;
        for (int i = 0; i < m; ++i) c += sd.eigenvectors(i, k) * f[i];
        coeff[k] = c * psi(t * sd.eigenvalues[k]);
    }
    Vec out = Vec::Zero(m);
    for (int i = 0; i < m; ++i) {
        Complex c = 0.0;
        for (int k = 0; k < m; ++k) c += sd.eigenvectors(i, k) * coeff[k];
        out[i] = c;
    }
    return out;
}

/// S_L by direct double loops: same t nodes/weights, same cone.
inline RealVec sl_bruteforce(const GridDomain& dom, const SpectralData& sd,
                             const std::function<double(double)>& q, const Vec& f,
                             const std::vector<double>& t_nodes,
                             const std::vector<double>& t_weights, double aperture) {
    const int m = static_cast<int>(f.size());
    const double hdim = std::pow(dom.side / dom.n, dom.dim);
    RealVec acc = RealVec::Zero(m);
    for (size_t it = 0; it < t_nodes.size(); ++it) {
        const double t = t_nodes[it];
        Vec qf = apply_multiplier(sd, q, t * t, f);
        const double w = t_weights[it] * std::pow(t, -dom.dim) * hdim;
        for (int x = 0; x < m; ++x)
            for (int y = 0; y < m; ++y)
                if (torus_dist(dom, x, y) < aperture * t) acc[x] += w * std::norm(qf[y]);
    }
    return acc.array().sqrt();
}

/// g2: per-cube time integral of |q(t^2 L) f(y_Q)|^2, direct loops. Cube
/// centers and memberships are data taken from the caller.
struct CubeData {
    int center_index;
    std::vector<int> members;
};

inline RealVec g2_bruteforce(const GridDomain& dom, const SpectralData& sd,
                             const std::function<double(double)>& q, const Vec& f,
                             const std::vector<std::vector<CubeData>>& scales, double delta,
                             int j_min, const std::vector<double>& sub_nodes,
                             const std::vector<double>& sub_weights) {
    const int m = static_cast<int>(f.size());
    RealVec acc = RealVec::Zero(m);
    for (size_t s = 0; s < scales.size(); ++s) {
        const int j = j_min + static_cast<int>(s);
        const double t_lo = std::pow(delta, -j);
        std::vector<double> cube_val(scales[s].size(), 0.0);
        for (size_t n = 0; n < sub_nodes.size(); ++n) {
            const double t = t_lo * sub_nodes[n]; // sub_nodes relative to [1, delta]
            Vec qf = apply_multiplier(sd, q, t * t, f);
            for (size_t c = 0; c < scales[s].size(); ++c)
                cube_val[c] += sub_weights[n] * std::norm(qf[scales[s][c].center_index]);
        }
        for (size_t c = 0; c < scales[s].size(); ++c)
            for (int idx : scales[s][c].members) acc[idx] += cube_val[c];
    }
    return acc.array().sqrt();
}

/// Nontangential maximal function, triple loop, same sampling.
inline RealVec nt_bruteforce(const GridDomain& dom, const SpectralData& sd, const Vec& f,
                             const std::vector<double>& t_nodes, double aperture) {
    const int m = static_cast<int>(f.size());
    RealVec best = RealVec::Zero(m);
    for (double t : t_nodes) {
        Vec u = apply_multiplier(sd, [t](double lam) { return std::exp(-t * t * lam); }, 1.0, f);
        for (int x = 0; x < m; ++x)
            for (int y = 0; y < m; ++y)
                if (torus_dist(dom, x, y) < aperture * t)
                    best[x] = std::max(best[x], std::abs(u[y]));
    }
    return best;
}

/// Gradient nontangential maximal function, own centered differences.
inline RealVec gradnt_bruteforce(const GridDomain& dom, const SpectralData& sd, const Vec& f,
                                 const std::vector<double>& t_nodes, double aperture) {
    const int m = static_cast<int>(f.size());
    const double h = dom.side / dom.n;
    RealVec best = RealVec::Zero(m);
    auto wrap = [&](int i) { return ((i % dom.n) + dom.n) % dom.n; };
    for (double t : t_nodes) {
        Vec u = apply_multiplier(sd, [t](double lam) { return std::exp(-t * t * lam); }, 1.0, f);
        RealVec gn(m);
        for (int i = 0; i < m; ++i) {
            int c0 = i % dom.n, c1 = i / dom.n;
            double ssq = 0.0;
            {
                int up = wrap(c0 + 1) + (dom.dim == 2 ? dom.n * c1 : 0);
                int dn = wrap(c0 - 1) + (dom.dim == 2 ? dom.n * c1 : 0);
                ssq += std::norm((u[up] - u[dn]) / (2.0 * h));
            }
            if (dom.dim == 2) {
                int up = c0 + dom.n * wrap(c1 + 1);
                int dn = c0 + dom.n * wrap(c1 - 1);
                ssq += std::norm((u[up] - u[dn]) / (2.0 * h));
            }
            gn[i] = t * std::sqrt(ssq);
        }
        for (int x = 0; x < m; ++x)
            for (int y = 0; y < m; ++y)
                if (torus_dist(dom, x, y) < aperture * t) best[x] = std::max(best[x], gn[y]);
    }
    return best;
}

} // namespace oracle
