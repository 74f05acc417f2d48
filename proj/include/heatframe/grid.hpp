#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace heatframe {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

/// Periodic n-torus discretization, dim 1 or 2, n points per axis.
/// Grid points are x_i = i*h per axis with h = side/n; index order is
/// axis-0 fastest: idx = i0 + n*i1.
struct GridDomain {
    int dim = 1;
    int n = 0;
    double side = 1.0;

    static constexpr int default_point_cap = 4096;

    GridDomain() = default;
    GridDomain(int dim_, int n_, double side_ = 1.0, int point_cap = default_point_cap)
        : dim(dim_), n(n_), side(side_) {
        if (dim != 1 && dim != 2)
            throw std::invalid_argument("GridDomain: dim must be 1 or 2");
        if (n < 2)
            throw std::invalid_argument("GridDomain: need at least 2 points per axis");
        if (side <= 0.0)
            throw std::invalid_argument("GridDomain: side must be positive");
        if (total_points() > point_cap)
            throw std::invalid_argument("GridDomain: grid of " + std::to_string(total_points()) +
                                        " points exceeds cap " + std::to_string(point_cap));
    }

    double spacing() const { return side / n; }
    int total_points() const { return dim == 1 ? n : n * n; }

    std::array<int, 2> coords(int idx) const {
        return {idx % n, dim == 2 ? idx / n : 0};
    }
    int index(int i0, int i1 = 0) const {
        return wrap(i0) + (dim == 2 ? n * wrap(i1) : 0);
    }
    int wrap(int i) const {
        int r = i % n;
        return r < 0 ? r + n : r;
    }
    double axis_coord(int i) const { return i * spacing(); }

    /// Wrapped per-axis difference in [-side/2, side/2].
    double wrapped_diff(double a, double b) const {
        double d = std::fmod(a - b, side);
        if (d > 0.5 * side) d -= side;
        if (d < -0.5 * side) d += side;
        return d;
    }

    /// Torus (Euclidean-of-wrapped) distance between grid indices.
    double distance(int idx_a, int idx_b) const {
        auto ca = coords(idx_a), cb = coords(idx_b);
        double h = spacing();
        double s = 0.0;
        for (int a = 0; a < dim; ++a) {
            double d = wrapped_diff(ca[a] * h, cb[a] * h);
            s += d * d;
        }
        return std::sqrt(s);
    }

    bool operator==(const GridDomain& o) const {
        return dim == o.dim && n == o.n && side == o.side;
    }
    bool operator!=(const GridDomain& o) const { return !(*this == o); }
};

/// Scalar field on a GridDomain; values indexed as in GridDomain.
struct GridFunction {
    GridDomain domain;
    Vec values;

    GridFunction() = default;
    GridFunction(const GridDomain& d, Vec v) : domain(d), values(std::move(v)) {
        if (values.size() != domain.total_points())
            throw std::invalid_argument("GridFunction: value count does not match domain");
    }
    static GridFunction zero(const GridDomain& d) {
        return GridFunction(d, Vec::Zero(d.total_points()));
    }
    static GridFunction constant(const GridDomain& d, Complex c) {
        return GridFunction(d, Vec::Constant(d.total_points(), c));
    }
};

inline void require_same_domain(const GridDomain& a, const GridDomain& b, const char* where) {
    if (a != b) throw std::invalid_argument(std::string(where) + ": domain mismatch");
}

} // namespace heatframe
