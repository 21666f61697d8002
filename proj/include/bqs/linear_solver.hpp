#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "bqs/nonlocal.hpp"
#include "bqs/norms.hpp"
#include "bqs/propagator.hpp"
#include "bqs/sources.hpp"
#include "bqs/symbols.hpp"

namespace bqs {

struct SolverConfig {
    double s = 2.0;
    double p = 2.0;
    int kernel_nodes = 129;       // Nq: density sampling and nested tau-integrals
    int duhamel_nodes = 65;       // starting Simpson count on [0, t]
    bool duhamel_adaptive = true; // double nodes until duhamel_rel_tol or the cap
    int duhamel_max_nodes = 1025;
    double duhamel_rel_tol = 1e-9;
    double det_floor = 1e-10;
    int residual_refine = 4;      // finer rule for a posteriori condition residuals
    bool force = false;           // bypass the kernel admissibility gate
};

/// Physical-space source g(x, t) in one of three shapes.
class SourceTerm {
public:
    static SourceTerm zero();
    static SourceTerm separable(SpectralField spatial_physical,
                                std::function<Complex(double)> time_profile);
    static SourceTerm callback(std::function<SpectralField(double)> physical_at);
    static SourceTerm modes(std::shared_ptr<const ModeSource> src);

    bool is_zero() const { return kind_ == Kind::zero; }
    /// Frequency-space evaluator (transforms the spatial factor once for
    /// separable sources; callback sources transform lazily with a cache).
    std::shared_ptr<const ModeSource> resolve() const;

private:
    enum class Kind { zero, separable, callback, modes };
    SourceTerm(Kind k) : kind_(k) {}
    Kind kind_;
    std::shared_ptr<const SpectralField> spatial_;
    std::function<Complex(double)> time_;
    std::function<SpectralField(double)> callback_;
    std::shared_ptr<const ModeSource> modes_;
};

/// The linearized nonlocal problem on [0, horizon].
struct LinearProblem {
    LinearProblem(SpectralGrid grid, SymbolTriple symbols, NonlocalKernel alpha,
                  NonlocalKernel beta, SpectralField phi, SpectralField psi, SourceTerm source,
                  double horizon, std::vector<double> output_times, SolverConfig config = {});

    SpectralGrid grid;
    SymbolTriple symbols;
    NonlocalKernel alpha, beta;
    SpectralField phi, psi;
    SourceTerm source;
    double horizon;
    std::vector<double> output_times;
    SolverConfig config;
};

struct TransformedProblem {
    std::vector<Complex> phi_hat, psi_hat;
    std::shared_ptr<const ModeSource> ghat;
};

/// Frequency-space data and the lazy ghat evaluator.
TransformedProblem transform_problem(const LinearProblem& p);

enum class DuhamelKind {
    displacement,  // kernel S(t - tau), the solution formula
    velocity       // kernel C(t - tau), its time derivative
};

/// Composite Simpson approximation of int_0^t K(t-tau) phihat(tau) dtau on
/// `nodes` points; t = 0 returns 0.
Complex duhamel(const PropagatorTable& table, std::size_t mode, double t,
                const std::function<Complex(double)>& phihat, int nodes,
                DuhamelKind kind = DuhamelKind::displacement);

/// Node-doubling variant controlled by the config tolerances.
Complex duhamel_adaptive(const PropagatorTable& table, std::size_t mode, double t,
                         const std::function<Complex(double)>& phihat, const SolverConfig& config,
                         DuhamelKind kind = DuhamelKind::displacement);

struct LinearSolution {
    std::vector<double> times;
    std::vector<SpectralField> u, ut;  // physical fields per output time
    std::vector<Complex> u0, u1;       // recovered initial pair per mode
    double residual_u = 0.0;           // ||u(.,0) - int alpha u - phi||_inf
    double residual_ut = 0.0;          // ||u_t(.,0) - int beta u_t - psi||_inf
    double min_abs_det = 1.0;
};

/// Assembled per-mode machinery of one problem: admissibility gates, symbol
/// tables, determinant, recovered initial pair. Evaluates the solution at
/// any time in [0, horizon]. Holds a reference to the problem, which must
/// outlive the engine.
class LinearEngine {
public:
    explicit LinearEngine(const LinearProblem& p);

    const PropagatorTable& propagators() const { return prop_; }
    const DeterminantTable& determinant() const { return det_; }
    const std::vector<Complex>& u0() const { return u0_; }
    const std::vector<Complex>& u1() const { return u1_; }
    const TransformedProblem& transformed() const { return data_; }

    Complex phihat(std::size_t mode, double t) const;
    Complex u_hat(std::size_t mode, double t) const;
    Complex ut_hat(std::size_t mode, double t) const;
    SpectralField u_at(double t) const;
    SpectralField ut_at(double t) const;

    /// A posteriori residuals of the integral conditions, measured with a
    /// refined quadrature rule.
    double residual_initial_u() const;
    double residual_initial_ut() const;

private:
    const LinearProblem& p_;
    PropagatorTable prop_;
    DeterminantTable det_;
    TransformedProblem data_;
    std::vector<Complex> u0_, u1_;
    bool source_zero_;
};

/// Full pipeline of Eq-style assembly: gates, transform, recovery, output
/// snapshots and diagnostics.
LinearSolution solve_linear(const LinearProblem& p);

/// Homogeneous-data solution operators realized as per-mode multipliers
/// (the master formula with g = 0 and the other datum zeroed).
SpectralField apply_S1(const LinearProblem& p, const SpectralField& phi, double t);
SpectralField apply_S2(const LinearProblem& p, const SpectralField& psi, double t);

}  // namespace bqs
