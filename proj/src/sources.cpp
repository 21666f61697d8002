#include "bqs/sources.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bqs {

SampledSource::SampledSource(double t0, double dt, std::vector<std::vector<Complex>> values)
    : t0_(t0), dt_(dt), values_(std::move(values)) {
    if (values_.size() < 4) throw std::invalid_argument("sampled source needs at least 4 nodes");
    if (!(dt_ > 0.0)) throw std::invalid_argument("sampled source needs positive node spacing");
}

Complex SampledSource::eval(std::size_t mode, double t) const {
    const int n = static_cast<int>(values_.size());
    const double s = (t - t0_) / dt_;
    // Window of 4 nodes centered at s, clamped to the sampled range.
    int j0 = static_cast<int>(std::floor(s)) - 1;
    j0 = std::clamp(j0, 0, n - 4);

    // Exact node hit: avoid interpolation noise at the stencil points.
    const double nearest = std::round(s);
    if (std::abs(s - nearest) < 1e-12 && nearest >= 0 && nearest < n)
        return values_[static_cast<int>(nearest)][mode];

    Complex acc{0.0, 0.0};
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            w *= (s - (j0 + b)) / static_cast<double>(a - b);
        }
        acc += w * values_[j0 + a][mode];
    }
    return acc;
}

}  // namespace bqs
