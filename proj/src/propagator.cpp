#include "bqs/propagator.hpp"

#include <cmath>

#include "bqs/errors.hpp"

namespace bqs {

Complex principal_sqrt(Complex z) {
    if (z.imag() == 0.0) z = Complex{z.real(), +0.0};  // pin the branch cut side
    Complex r = std::sqrt(z);
    if (r.real() < 0.0) r = -r;
    if (r.real() == 0.0 && r.imag() < 0.0) r = -r;
    return r;
}

PropagatorTable::PropagatorTable(const SpectralGrid& grid, const OperatorSymbol& L0,
                                 const OperatorSymbol& L1, const OperatorSymbol& L2)
    : grid_(grid) {
    const double eps_den = symbol_zero_tolerance(L0, grid, true);
    q_.resize(grid.size());
    l_.resize(grid.size());
    sqrt_q_.resize(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const auto xi = grid.xi(m);
        const QLValue ql = compute_QL(L0, L1, L2, xi, eps_den);
        q_[m] = ql.Q;
        l_[m] = ql.L;
        sqrt_q_[m] = principal_sqrt(ql.Q);
    }
}

namespace {

Complex guarded_z(const PropagatorTable& table, std::size_t mode, double t) {
    const Complex z = table.sqrtQ(mode) * t;
    if (std::abs(z.imag()) > table.z_max)
        throw HyperbolicGrowthError(mode, t, std::abs(z.imag()));
    return z;
}

}  // namespace

Complex cos_prop(const PropagatorTable& table, std::size_t mode, double t) {
    const Complex z = guarded_z(table, mode, t);
    if (std::abs(z) < table.z_eps) {
        const Complex z2 = z * z;
        return 1.0 - z2 / 2.0 + z2 * z2 / 24.0;
    }
    return std::cos(z);
}

Complex sin_prop(const PropagatorTable& table, std::size_t mode, double t) {
    const Complex z = guarded_z(table, mode, t);
    if (std::abs(z) < table.z_eps) {
        const Complex z2 = z * z;
        return t * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
    }
    return std::sin(z) / table.sqrtQ(mode);
}

Complex phi_kernel(const PropagatorTable& table, std::size_t mode, double t, Complex ghat) {
    if (ghat == Complex{0.0, 0.0}) return ghat;
    return table.L(mode) * sin_prop(table, mode, t) * ghat;
}

Complex ut_prop(const PropagatorTable& table, std::size_t mode, double t, Complex u0, Complex u1,
                Complex duhamel) {
    return -table.Q(mode) * sin_prop(table, mode, t) * u0 + cos_prop(table, mode, t) * u1 +
           duhamel;
}

}  // namespace bqs
