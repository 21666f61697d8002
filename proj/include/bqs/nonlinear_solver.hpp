#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bqs/linear_solver.hpp"

namespace bqs {

/// Pointwise nonlinearity with derivative evaluators and an exact monotone
/// majorant fbar(r) >= max_{|x|<=r} { |f'(x)|, |f''(x)| }.
struct Nonlinearity {
    std::string name;
    std::function<Complex(Complex)> f, f1, f2, f3;
    std::function<double(double)> majorant;
    bool is_zero = false;
};

/// Registry: zero, linear (param c), quadratic, cubic, sine.
Nonlinearity register_nonlinearity(const std::string& name, double param = 1.0);

/// Window-length bound: the minimum of
///   {(M+1)[1 + 2 C0 (M+1) fbar(M+1)]}^-1  and  (1/2)[1 + C1 (M+1)^2 fbar(M+1)]^-1.
double max_window(double M, double c0, double c1, const std::function<double(double)>& fbar);

struct NonlinearControls {
    double tol_fp = 1e-10;   // fixed-point stop on sup-node (Y^{2,p} + Linf) difference
    int max_iterations = 50;
    int time_nodes = 33;     // N_t uniform nodes per window
    double c0 = 1.0;
    double c1 = 1.0;
    double blowup_ceiling = 1e6;
    int max_windows = 10000;
    double window_cap = std::numeric_limits<double>::infinity();
    double window_floor = 1e-6;  // shrink-and-retry limit on non-contraction
    bool zero_initial_iterate = false;  // start from the zero trajectory instead
                                        // of the linear solution
};

enum class Termination { horizon_reached, blow_up_detected, max_windows };

std::string to_string(Termination t);

struct WindowRecord {
    int index = 0;
    double t_start = 0.0;
    double length = 0.0;
    double data_norm = 0.0;  // M of this window
    int iterations = 0;
    double final_ratio = 0.0;
    std::vector<double> ratios;         // successive-difference ratios, from iteration 2
    std::vector<double> iterate_norms;  // ||G^k(u)||_{Y(T)} per iteration
    double monitor_end = 0.0;
    // False when the window had to exceed the step-size bound (a first window
    // stretched to the kernel horizon): convergence then rests on the
    // measured ratios alone.
    bool certified = true;
};

struct NonlinearRun {
    Termination reason = Termination::horizon_reached;
    std::vector<WindowRecord> windows;
    double reached_time = 0.0;
    double monitor_max = 0.0;
    std::optional<double> blowup_time;  // first node where the monitor crossed
};

/// The full nonlinear problem: integral conditions bind on the first window,
/// continuation windows restart from the end state with classical data.
struct NonlinearProblem {
    NonlinearProblem(SpectralGrid grid, SymbolTriple symbols, NonlocalKernel alpha,
                     NonlocalKernel beta, SpectralField phi, SpectralField psi, Nonlinearity f,
                     SolverConfig config = {}, NonlinearControls controls = {});

    SpectralGrid grid;
    SymbolTriple symbols;
    NonlocalKernel alpha, beta;
    SpectralField phi, psi;
    Nonlinearity f;
    SolverConfig config;
    NonlinearControls controls;
};

/// One window of the Picard iteration: data at the window start, kernels
/// (zero after the first window), window length, node count.
struct WindowProblem {
    SpectralGrid grid;
    SymbolTriple symbols;
    NonlocalKernel alpha, beta;
    std::vector<Complex> phi_hat, psi_hat;
    double length = 0.0;
    int time_nodes = 33;
    Nonlinearity f;
    SolverConfig config;
};

/// Trajectory sampled at the window's uniform nodes, frequency space.
struct WindowTrajectory {
    double dt = 0.0;
    std::vector<std::vector<Complex>> u_hat;  // [node][mode]
};

/// Precomputed per-window machinery: propagators, determinant, Duhamel
/// stencils, norms. All evaluation methods are const.
class WindowContext {
public:
    explicit WindowContext(WindowProblem problem);

    const WindowProblem& problem() const { return p_; }
    const PropagatorTable& propagators() const { return prop_; }
    double node_time(int k) const { return k * dt_; }
    int nodes() const { return p_.time_nodes; }

    WindowTrajectory zero_trajectory() const;
    /// Homogeneous linear solution sampled at the nodes.
    WindowTrajectory linear_trajectory() const;

    /// One application of the Picard map G.
    WindowTrajectory apply_G(const WindowTrajectory& u) const;

    /// sup over nodes of (Y^{2,p} + Linf) of the trajectory / of a difference.
    double trajectory_norm(const WindowTrajectory& u) const;
    double difference_norm(const WindowTrajectory& a, const WindowTrajectory& b) const;

    struct Finalized {
        std::vector<std::vector<Complex>> u_hat, ut_hat;  // [node][mode]
        std::vector<Complex> u0, u1;
        std::shared_ptr<const ModeSource> ghat;  // converged source samples
    };
    /// Recovers (u0, u1) for the converged source and assembles u and u_t at
    /// every node.
    Finalized finalize(const WindowTrajectory& u) const;

    /// Evaluation at an arbitrary window-local time from the converged
    /// trajectory (cubic source interpolation + adaptive Duhamel).
    Complex u_hat_at(const WindowTrajectory& u, const Finalized& fin, std::size_t mode,
                     double t_local, bool velocity) const;

private:
    struct Recovery {
        std::vector<Complex> u0, u1;
    };
    Recovery recover(const std::vector<std::vector<Complex>>& what) const;
    std::vector<std::vector<Complex>> source_values(const WindowTrajectory& u) const;

    WindowProblem p_;
    double dt_;
    PropagatorTable prop_;
    DeterminantTable det_;
    NormSuite norms_;
    std::vector<std::vector<double>> prefix_;  // Duhamel weights per target node
};

/// Spec-level Picard map on a sampled trajectory.
WindowTrajectory picard_map(const WindowContext& ctx, const WindowTrajectory& u);

/// Eq-style blow-up functional: ||u||_{Y^{2,p}} + ||u||_inf + same for u_t.
/// Non-finite fields report +inf.
double blowup_monitor(const SpectralField& u, const SpectralField& ut, double p);

/// End state of a window becomes classical data of the next one.
WindowProblem continuation_step(const SpectralField& u_end, const SpectralField& ut_end,
                                const NonlinearProblem& p, double length);

struct NonlinearResult {
    NonlinearRun run;
    std::vector<double> node_times;          // global node times across windows
    std::vector<SpectralField> u, ut;        // physical trajectory at the nodes
    std::vector<double> output_times;        // requested times actually reached
    std::vector<SpectralField> u_out, ut_out;
};

NonlinearResult solve_nonlinear(const NonlinearProblem& p, double t_goal,
                                const std::vector<double>& output_times = {});

}  // namespace bqs
