#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "bqs/linear_solver.hpp"

namespace bqs {

/// Time factor q(t) with its first two derivatives in closed form.
struct TimeProfile {
    std::function<Complex(double)> q, dq, d2q;

    static TimeProfile cosine(double omega, double phase = 0.0);
    static TimeProfile polynomial(std::vector<double> coeffs);
};

/// One lattice mode index (signed integers, xi_d = pi * j_d / L_d) with a
/// complex amplitude and time profile.
struct ManufacturedMode {
    std::vector<int> index;
    Complex amplitude;
    TimeProfile profile;
};

/// Closed-form exact solution u(x,t) = sum_k A_k e^{i xi_k . x} q_k(t),
/// supported on finitely many lattice modes so it is grid-exact.
class ManufacturedSolution {
public:
    explicit ManufacturedSolution(std::vector<ManufacturedMode> modes);

    const std::vector<ManufacturedMode>& modes() const { return modes_; }
    SpectralField u_at(const SpectralGrid& grid, double t) const;
    SpectralField ut_at(const SpectralGrid& grid, double t) const;

    /// The source the PDE assigns to this solution:
    /// ghat_k(t) = [(1 + L0(xi)) A q'' + L1(xi) A q] / L2(xi) per carried mode.
    /// Throws when L2 vanishes at a mode whose numerator does not.
    std::shared_ptr<const ModeSource> forcing(const SpectralGrid& grid,
                                              const SymbolTriple& symbols) const;

private:
    std::size_t flat_index(const SpectralGrid& grid, const std::vector<int>& index) const;
    std::vector<ManufacturedMode> modes_;
};

struct ManufacturedReport {
    double max_linf_error = 0.0;  // solver against the exact solution
    std::vector<std::pair<int, double>> node_errors;  // (duhamel nodes, error)
    double richardson_order = 0.0;                    // log2 slope over the sweep
};

/// Runs the solver against the exact solution with classical data. When
/// `duhamel_node_sweep` is nonempty, reruns with those fixed Duhamel node
/// counts and estimates the quadrature order from the error decay.
ManufacturedReport manufactured_residual(const SpectralGrid& grid, const SymbolTriple& symbols,
                                         double horizon, const ManufacturedSolution& exact,
                                         SolverConfig config = {},
                                         const std::vector<int>& duhamel_node_sweep = {});

}  // namespace bqs
