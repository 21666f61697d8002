#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bqs/propagator.hpp"
#include "bqs/sources.hpp"

namespace bqs {

/// Weight measure of one integral condition on (0, T): either a density
/// sampled on uniform nodes covering [0, T], or a finite list of atoms
/// (the multipoint case). Immutable after construction.
class NonlocalKernel {
public:
    struct Atom {
        double location;  // in [0, T]
        double weight;
    };

    static NonlocalKernel zero(double horizon);
    static NonlocalKernel density(double horizon, std::vector<double> values);
    static NonlocalKernel atoms(double horizon, std::vector<Atom> atoms);

    // Registry of closed-form densities.
    static NonlocalKernel constant(double horizon, double value, int nodes = 129);
    static NonlocalKernel linear(double horizon, double a, double b, int nodes = 129);
    static NonlocalKernel gaussian_bump(double horizon, double amplitude, double center,
                                        double width, int nodes = 129);

    double horizon() const { return horizon_; }
    bool is_atoms() const { return is_atoms_; }
    bool is_zero() const;
    const std::vector<double>& density_values() const { return density_; }
    const std::vector<Atom>& atom_list() const { return atoms_; }
    int nodes() const { return static_cast<int>(density_.size()); }

    /// Density value at sigma: the registry closed form when one backs this
    /// kernel, linear interpolation between the stored nodes otherwise.
    double value_at(double sigma) const;

    /// Total variation: quadrature of |values| for densities, sum|w| for atoms.
    double total_variation() const;

    /// Integral of kernel(sigma) * g(sigma) over [0, T]. Densities use
    /// composite Simpson on the stored nodes (trapezoid when the interval
    /// count is odd); atoms evaluate exactly.
    Complex integrate(const std::function<Complex(double)>& g) const;

    /// Same integral with the density resampled `refine` times finer
    /// (linear interpolation); used for a posteriori residual checks so the
    /// measurement rule differs from the solve rule. Atoms are unaffected.
    Complex integrate_refined(const std::function<Complex(double)>& g, int refine) const;

private:
    NonlocalKernel(double horizon, bool is_atoms) : horizon_(horizon), is_atoms_(is_atoms) {}
    double horizon_;
    bool is_atoms_;
    std::vector<double> density_;
    std::vector<Atom> atoms_;
    std::function<double(double)> closed_form_;  // set by the registry builders
};

struct Admissibility {
    bool admissible;
    double margin;  // |1 + int(alpha*beta)| - int(|alpha| + |beta|)
};

/// Lemma-style sufficient condition for a uniformly invertible determinant.
Admissibility check_admissibility(const NonlocalKernel& alpha, const NonlocalKernel& beta);

/// Kernel moments of one mode against the propagators, and the 2x2 system
/// determinant built from them.
struct ModeMoments {
    Complex a_c;   // int alpha(s) C(xi,s) ds
    Complex a_s;   // int alpha(s) S(xi,s) ds
    Complex b_c;   // int beta(s) C(xi,s) ds
    Complex b_qs;  // int beta(s) Q(xi) S(xi,s) ds
    Complex det;   // (1 - a_c)(1 - b_c) + a_s * b_qs
};

class DeterminantTable {
public:
    DeterminantTable(std::vector<ModeMoments> moments, const SpectralGrid& grid,
                     double det_floor);

    const ModeMoments& moments(std::size_t mode) const { return moments_[mode]; }
    Complex det(std::size_t mode) const { return moments_[mode].det; }
    std::size_t size() const { return moments_.size(); }
    double min_abs_det() const { return min_abs_det_; }
    std::size_t argmin_mode() const { return argmin_; }

private:
    std::vector<ModeMoments> moments_;
    double min_abs_det_;
    std::size_t argmin_;
};

/// Builds the per-mode determinant table. Throws SingularDeterminantError
/// when min |D| falls below `det_floor`.
DeterminantTable build_determinant(const NonlocalKernel& alpha, const NonlocalKernel& beta,
                                   const PropagatorTable& prop, double det_floor = 1e-10);

/// Recovers the true initial pair of one mode from the right-hand sides
/// (f1, f2) of the 2x2 system.
std::pair<Complex, Complex> solve_initial_pair(const DeterminantTable& table, std::size_t mode,
                                               Complex f1, Complex f2);

struct RhsPair {
    std::vector<Complex> f1, f2;
};

/// Assembles f1, f2: the nested kernel-by-Duhamel integrals of the source
/// plus the transformed data. `inner_nodes` sets the Simpson count of the
/// inner integral on [0, sigma] (the kernel's own node pattern, mapped
/// affinely). `phihat(mode, t)` is the Duhamel forcing L(xi) ghat(xi, t);
/// the S / C convolution kernels are applied here.
RhsPair build_rhs(const NonlocalKernel& alpha, const NonlocalKernel& beta,
                  const PropagatorTable& prop,
                  const std::function<Complex(std::size_t, double)>& phihat,
                  const std::vector<Complex>& phi_hat, const std::vector<Complex>& psi_hat,
                  int inner_nodes = 129);

}  // namespace bqs
