#pragma once

#include "heatframe/grid.hpp"
#include "heatframe/operators.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace heatframe {

/// Seeded generator with a hand-rolled Box-Muller normal so that identical
/// seeds give identical streams on every platform (std::normal_distribution
/// is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Random real function on the lowest band_fraction of the spectrum
/// (zero modes excluded), unit L^2 norm.
inline GridFunction band_limited_function(const OperatorModel& op, Rng& rng,
                                          double band_fraction = 0.25) {
    const SpectralData& sd = spectral_decompose(op);
    const int m = static_cast<int>(sd.eigenvalues.size());
    const int upto = std::max(1, static_cast<int>(std::floor(band_fraction * m)));
    RealVec coeffs = RealVec::Zero(m);
    bool any = false;
    for (int i = 0; i < upto; ++i) {
        if (sd.eigenvalues[i] <= 0.0) continue;
        coeffs[i] = rng.normal();
        any = true;
    }
    if (!any)
        throw std::runtime_error("band_limited_function: no nonzero modes in the band");
    RealVec v = sd.eigenvectors * coeffs;
    const double hdim = std::pow(op.domain.spacing(), op.domain.dim);
    const double norm = v.norm() * std::sqrt(hdim);
    v /= norm;
    return GridFunction(op.domain, v.cast<Complex>());
}

} // namespace heatframe
