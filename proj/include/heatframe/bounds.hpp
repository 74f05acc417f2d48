#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace heatframe {

/// One constant-fit probe: smallest C with |observed| <= C * bound_shape,
/// i.e. C = sup over the probe set of observed/shape.
struct BoundProbe {
    double t = 0.0;
    double s = std::numeric_limits<double>::quiet_NaN(); // unset for single-scale probes
    double fitted_c = 0.0;
    int worst_row = -1;
    int worst_col = -1;
};

struct BoundReport {
    std::string what;
    std::vector<BoundProbe> probes;
    double overall_c = 0.0;
    double ceiling = std::numeric_limits<double>::infinity();
    bool pass = true;

    void finish() {
        overall_c = 0.0;
        for (const auto& p : probes) overall_c = std::max(overall_c, p.fitted_c);
        pass = overall_c <= ceiling && overall_c > 0.0 && std::isfinite(overall_c);
    }
};

} // namespace heatframe
