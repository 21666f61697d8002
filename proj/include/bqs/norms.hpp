#pragma once

#include <vector>

#include "bqs/grid.hpp"

namespace bqs {

/// Discrete L^p / L^inf / Liouville-Sobolev norms on one grid. The Y^{s,p}
/// norm applies the multiplier (1+|xi|^2)^{s/2} in frequency space and then
/// takes the cell-volume-weighted L^p norm in physical space.
class NormSuite {
public:
    NormSuite(const SpectralGrid& grid, double s, double p);

    double s() const { return s_; }
    double p() const { return p_; }
    const std::vector<double>& multiplier() const { return multiplier_; }

    double lp(const SpectralField& f) const;    // physical field
    double l1(const SpectralField& f) const;    // physical field
    double linf(const SpectralField& f) const;  // physical field
    /// Accepts either tag: a frequency field skips the forward transform.
    double ysp(const SpectralField& f) const;

private:
    SpectralGrid grid_;
    double s_, p_;
    std::vector<double> multiplier_;
};

double lp_norm(const SpectralField& f, double p);
double linf_norm(const SpectralField& f);
double ysp_norm(const SpectralField& f, double s, double p);

}  // namespace bqs
