#pragma once

#include "heatframe/grid.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

namespace heatframe {

/// Holomorphic symbol on a sector S^0_nu with decay |f(z)| <= C |z|^alpha / (1+|z|^beta).
/// beta = +inf marks super-polynomial (exponential) decay at infinity.
struct AnalyticSymbol {
    std::function<Complex(Complex)> evaluator;
    double alpha = 1.0;
    double beta = std::numeric_limits<double>::infinity();
    std::function<Complex(Complex)> derivative; // optional, empty if unknown
    double sector_angle = 1.4; // nu, in (0, pi/2)
    std::string name;

    Complex eval(Complex z) const {
        if (z == Complex(0.0, 0.0) && alpha > 0.0) return {0.0, 0.0};
        return evaluator(z);
    }
    /// Value on the nonnegative real axis (spectral path); the limit 0 is
    /// taken at the origin whenever alpha > 0.
    Complex eval_real(double u) const { return eval(Complex(u, 0.0)); }

    bool has_derivative() const { return static_cast<bool>(derivative); }
    Complex deriv(Complex z) const {
        if (!has_derivative())
            throw std::invalid_argument("AnalyticSymbol: no derivative for " + name);
        if (z == Complex(0.0, 0.0) && alpha > 1.0) return {0.0, 0.0};
        return derivative(z);
    }

    AnalyticSymbol scaled(double factor) const {
        AnalyticSymbol s = *this;
        auto f = evaluator;
        s.evaluator = [f, factor](Complex z) { return factor * f(z); };
        if (derivative) {
            auto df = derivative;
            s.derivative = [df, factor](Complex z) { return factor * df(z); };
        }
        s.name = name + "*" + std::to_string(factor);
        return s;
    }
};

/// zeta(z) = z^k e^{-z/2}; the working instance of the frame generator.
/// Exponential decay dominates any polynomial, so beta is +inf.
inline AnalyticSymbol builtin_zeta_exp(int k) {
    if (k < 1) throw std::invalid_argument("builtin_zeta_exp: k must be >= 1");
    AnalyticSymbol s;
    s.alpha = static_cast<double>(k);
    s.beta = std::numeric_limits<double>::infinity();
    s.sector_angle = 1.4;
    s.name = "zeta_exp(" + std::to_string(k) + ")";
    s.evaluator = [k](Complex z) { return std::pow(z, k) * std::exp(-0.5 * z); };
    s.derivative = [k](Complex z) {
        return (static_cast<double>(k) * std::pow(z, k - 1) - 0.5 * std::pow(z, k)) *
               std::exp(-0.5 * z);
    };
    return s;
}

/// q(z) = z^2 zeta(z)^2.
inline AnalyticSymbol derived_q(const AnalyticSymbol& zeta) {
    AnalyticSymbol s;
    s.alpha = 2.0 + 2.0 * zeta.alpha;
    s.beta = 2.0 * zeta.beta;
    s.sector_angle = zeta.sector_angle;
    s.name = "q[" + zeta.name + "]";
    auto f = zeta.evaluator;
    s.evaluator = [f](Complex z) {
        Complex w = f(z);
        return z * z * w * w;
    };
    if (zeta.has_derivative()) {
        auto df = zeta.derivative;
        s.derivative = [f, df](Complex z) {
            Complex w = f(z);
            return 2.0 * z * w * w + 2.0 * z * z * w * df(z);
        };
    }
    return s;
}

/// phi(z) = z^2 zeta(z), so that q = zeta * phi.
inline AnalyticSymbol derived_phi(const AnalyticSymbol& zeta) {
    AnalyticSymbol s;
    s.alpha = 2.0 + zeta.alpha;
    s.beta = zeta.beta;
    s.sector_angle = zeta.sector_angle;
    s.name = "phi[" + zeta.name + "]";
    auto f = zeta.evaluator;
    s.evaluator = [f](Complex z) { return z * z * f(z); };
    if (zeta.has_derivative()) {
        auto df = zeta.derivative;
        s.derivative = [f, df](Complex z) { return 2.0 * z * f(z) + z * z * df(z); };
    }
    return s;
}

/// q'(z); satisfies |q'(z)| <= C |z|^{alpha_q - 1} / (1 + |z|^{beta_q}).
inline AnalyticSymbol derived_qprime(const AnalyticSymbol& zeta) {
    AnalyticSymbol q = derived_q(zeta);
    if (!q.has_derivative())
        throw std::invalid_argument("derived_qprime: zeta has no derivative");
    AnalyticSymbol s;
    s.alpha = q.alpha - 1.0;
    s.beta = q.beta;
    s.sector_angle = zeta.sector_angle;
    s.name = "q'[" + zeta.name + "]";
    s.evaluator = q.derivative;
    return s;
}

/// z q'(z): applying it at t^2 L gives t^2 L q'(t^2 L), the g4 multiplier.
inline AnalyticSymbol derived_z_qprime(const AnalyticSymbol& zeta) {
    AnalyticSymbol qp = derived_qprime(zeta);
    AnalyticSymbol s;
    s.alpha = qp.alpha + 1.0;
    s.beta = qp.beta;
    s.sector_angle = zeta.sector_angle;
    s.name = "zq'[" + zeta.name + "]";
    auto f = qp.evaluator;
    s.evaluator = [f](Complex z) { return z * f(z); };
    return s;
}

} // namespace heatframe
