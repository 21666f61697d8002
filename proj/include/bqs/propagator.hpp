#pragma once

#include <vector>

#include "bqs/grid.hpp"
#include "bqs/symbols.hpp"

namespace bqs {

/// Per-mode symbol values Q(xi), L(xi) and the principal square root of Q,
/// precomputed once per grid. Immutable after construction.
///
/// C(xi,t) = cos(sqrtQ t) and S(xi,t) = sin(sqrtQ t)/sqrtQ are even in the
/// sign of sqrtQ, so the branch choice (Re >= 0, and Im >= 0 on the cut)
/// cannot affect results.
class PropagatorTable {
public:
    PropagatorTable(const SpectralGrid& grid, const OperatorSymbol& L0, const OperatorSymbol& L1,
                    const OperatorSymbol& L2);

    const SpectralGrid& grid() const { return grid_; }
    std::size_t size() const { return q_.size(); }
    Complex Q(std::size_t mode) const { return q_[mode]; }
    Complex L(std::size_t mode) const { return l_[mode]; }
    Complex sqrtQ(std::size_t mode) const { return sqrt_q_[mode]; }

    /// Series switchover for |sqrtQ t| and overflow guard on |Im(sqrtQ t)|.
    double z_eps = 1e-4;
    double z_max = 700.0;

private:
    SpectralGrid grid_;
    std::vector<Complex> q_, l_, sqrt_q_;
};

/// Principal square root, normalized so Re >= 0 and Im >= 0 when Re == 0.
Complex principal_sqrt(Complex z);

/// cos(sqrtQ t); series below z_eps, complex exponentials otherwise.
Complex cos_prop(const PropagatorTable& table, std::size_t mode, double t);

/// sin(sqrtQ t)/sqrtQ; finite at Q = 0 via the sinc series t(1 - z^2/6 + z^4/120).
Complex sin_prop(const PropagatorTable& table, std::size_t mode, double t);

/// Source kernel of one mode: L(xi) * S(xi,t) * ghat.
Complex phi_kernel(const PropagatorTable& table, std::size_t mode, double t, Complex ghat);

/// Time derivative assembly: -Q S(t) u0 + C(t) u1 + duhamel, with the
/// caller-supplied convolution term.
Complex ut_prop(const PropagatorTable& table, std::size_t mode, double t, Complex u0, Complex u1,
                Complex duhamel);

}  // namespace bqs
