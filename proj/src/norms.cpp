#include "bqs/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace bqs {

NormSuite::NormSuite(const SpectralGrid& grid, double s, double p) : grid_(grid), s_(s), p_(p) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must lie in [1, inf)");
    multiplier_.resize(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m)
        multiplier_[m] = std::pow(1.0 + grid.xi_norm_sq(m), s / 2.0);
}

double NormSuite::lp(const SpectralField& f) const {
    if (f.domain() != Domain::physical) throw std::invalid_argument("lp needs a physical field");
    const double vol = grid_.cell_volume();
    double acc = 0.0;
    for (const auto& v : f.values()) acc += std::pow(std::abs(v), p_) * vol;
    return std::pow(acc, 1.0 / p_);
}

double NormSuite::l1(const SpectralField& f) const {
    if (f.domain() != Domain::physical) throw std::invalid_argument("l1 needs a physical field");
    const double vol = grid_.cell_volume();
    double acc = 0.0;
    for (const auto& v : f.values()) acc += std::abs(v) * vol;
    return acc;
}

double NormSuite::linf(const SpectralField& f) const {
    if (f.domain() != Domain::physical) throw std::invalid_argument("linf needs a physical field");
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double NormSuite::ysp(const SpectralField& f) const {
    SpectralField hat = (f.domain() == Domain::frequency) ? f : to_frequency(f);
    for (std::size_t m = 0; m < hat.size(); ++m) hat[m] *= multiplier_[m];
    return lp(to_physical(hat));
}

double lp_norm(const SpectralField& f, double p) { return NormSuite(f.grid(), 0.0, p).lp(f); }

double linf_norm(const SpectralField& f) { return NormSuite(f.grid(), 0.0, 2.0).linf(f); }

double ysp_norm(const SpectralField& f, double s, double p) {
    return NormSuite(f.grid(), s, p).ysp(f);
}

}  // namespace bqs
