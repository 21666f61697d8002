#include "bqs/nonlinear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bqs/errors.hpp"
#include "bqs/quadrature.hpp"

namespace bqs {

Nonlinearity register_nonlinearity(const std::string& name, double param) {
    Nonlinearity nl;
    nl.name = name;
    if (name == "zero") {
        nl.f = [](Complex) { return Complex{0.0, 0.0}; };
        nl.f1 = nl.f2 = nl.f3 = nl.f;
        nl.majorant = [](double) { return 0.0; };
        nl.is_zero = true;
    } else if (name == "linear") {
        const double c = param;
        nl.f = [c](Complex u) { return c * u; };
        nl.f1 = [c](Complex) { return Complex{c, 0.0}; };
        nl.f2 = [](Complex) { return Complex{0.0, 0.0}; };
        nl.f3 = nl.f2;
        nl.majorant = [c](double) { return std::abs(c); };
    } else if (name == "quadratic") {
        nl.f = [](Complex u) { return u * u; };
        nl.f1 = [](Complex u) { return 2.0 * u; };
        nl.f2 = [](Complex) { return Complex{2.0, 0.0}; };
        nl.f3 = [](Complex) { return Complex{0.0, 0.0}; };
        nl.majorant = [](double r) { return std::max(2.0 * r, 2.0); };
    } else if (name == "cubic") {
        nl.f = [](Complex u) { return u * u * u; };
        nl.f1 = [](Complex u) { return 3.0 * u * u; };
        nl.f2 = [](Complex u) { return 6.0 * u; };
        nl.f3 = [](Complex) { return Complex{6.0, 0.0}; };
        nl.majorant = [](double r) { return std::max(3.0 * r * r, 6.0 * r); };
    } else if (name == "sine") {
        nl.f = [](Complex u) { return std::sin(u); };
        nl.f1 = [](Complex u) { return std::cos(u); };
        nl.f2 = [](Complex u) { return -std::sin(u); };
        nl.f3 = [](Complex u) { return -std::cos(u); };
        nl.majorant = [](double) { return 1.0; };
    } else {
        throw std::invalid_argument("unknown nonlinearity: " + name);
    }
    return nl;
}

double max_window(double M, double c0, double c1, const std::function<double(double)>& fbar) {
    if (M < 0.0) throw std::invalid_argument("data norm M must be nonnegative");
    const double fb = fbar(M + 1.0);
    const double ball = M + 1.0;
    const double bound_invariance = 1.0 / (ball * (1.0 + 2.0 * c0 * ball * fb));
    const double bound_contraction = 0.5 / (1.0 + c1 * ball * ball * fb);
    return std::min(bound_invariance, bound_contraction);
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::horizon_reached:
            return "horizon_reached";
        case Termination::blow_up_detected:
            return "blow_up_detected";
        case Termination::max_windows:
            return "max_windows";
    }
    return "unknown";
}

NonlinearProblem::NonlinearProblem(SpectralGrid grid_, SymbolTriple symbols_,
                                   NonlocalKernel alpha_, NonlocalKernel beta_,
                                   SpectralField phi_, SpectralField psi_, Nonlinearity f_,
                                   SolverConfig config_, NonlinearControls controls_)
    : grid(std::move(grid_)),
      symbols(std::move(symbols_)),
      alpha(std::move(alpha_)),
      beta(std::move(beta_)),
      phi(std::move(phi_)),
      psi(std::move(psi_)),
      f(std::move(f_)),
      config(config_),
      controls(controls_) {
    if (!phi.grid().same_shape(grid) || !psi.grid().same_shape(grid))
        throw std::invalid_argument("phi/psi grids do not match the problem grid");
    if (controls.time_nodes < 4)
        throw std::invalid_argument("windows need at least 4 time nodes");
}

WindowContext::WindowContext(WindowProblem problem)
    : p_(std::move(problem)),
      dt_(p_.length / (p_.time_nodes - 1)),
      prop_(p_.grid, p_.symbols.L0, p_.symbols.L1, p_.symbols.L2),
      det_(build_determinant(p_.alpha, p_.beta, prop_, p_.config.det_floor)),
      norms_(p_.grid, 2.0, p_.config.p) {
    if (p_.time_nodes < 4) throw std::invalid_argument("windows need at least 4 time nodes");
    if (!(p_.length > 0.0)) throw std::invalid_argument("window length must be positive");
    prefix_.resize(p_.time_nodes);
    for (int k = 0; k < p_.time_nodes; ++k) prefix_[k] = prefix_weights(k, dt_);
}

WindowTrajectory WindowContext::zero_trajectory() const {
    WindowTrajectory t;
    t.dt = dt_;
    t.u_hat.assign(p_.time_nodes, std::vector<Complex>(prop_.size(), Complex{0.0, 0.0}));
    return t;
}

WindowTrajectory WindowContext::linear_trajectory() const {
    WindowTrajectory t = zero_trajectory();
    for (std::size_t m = 0; m < prop_.size(); ++m) {
        auto [a, b] = solve_initial_pair(det_, m, p_.phi_hat[m], p_.psi_hat[m]);
        for (int k = 0; k < p_.time_nodes; ++k) {
            const double tk = node_time(k);
            t.u_hat[k][m] = cos_prop(prop_, m, tk) * a + sin_prop(prop_, m, tk) * b;
        }
    }
    return t;
}

std::vector<std::vector<Complex>> WindowContext::source_values(const WindowTrajectory& u) const {
    std::vector<std::vector<Complex>> what(p_.time_nodes);
    if (p_.f.is_zero) {
        for (auto& row : what) row.assign(prop_.size(), Complex{0.0, 0.0});
        return what;
    }
    for (int k = 0; k < p_.time_nodes; ++k) {
        SpectralField hat(p_.grid, Domain::frequency, u.u_hat[k]);
        SpectralField phys = to_physical(hat);
        for (auto& v : phys.values()) v = p_.f.f(v);
        // TODO: optional 2/3-rule dealiasing of the product spectrum
        what[k] = to_frequency(phys).values();
    }
    return what;
}

WindowContext::Recovery WindowContext::recover(
    const std::vector<std::vector<Complex>>& what) const {
    Recovery r;
    const std::size_t n = prop_.size();
    r.u0.resize(n);
    r.u1.resize(n);
    const bool kernels_zero = p_.alpha.is_zero() && p_.beta.is_zero();
    bool source_zero = p_.f.is_zero;
    if (kernels_zero || source_zero) {
        for (std::size_t m = 0; m < n; ++m) {
            auto [a, b] = solve_initial_pair(det_, m, p_.phi_hat[m], p_.psi_hat[m]);
            r.u0[m] = a;
            r.u1[m] = b;
        }
        return r;
    }
    SampledSource ghat(0.0, dt_, what);
    auto phihat_fn = [&](std::size_t mode, double tau) {
        return prop_.L(mode) * ghat.eval(mode, tau);
    };
    RhsPair rhs =
        build_rhs(p_.alpha, p_.beta, prop_, phihat_fn, p_.phi_hat, p_.psi_hat,
                  p_.config.kernel_nodes);
    for (std::size_t m = 0; m < n; ++m) {
        auto [a, b] = solve_initial_pair(det_, m, rhs.f1[m], rhs.f2[m]);
        r.u0[m] = a;
        r.u1[m] = b;
    }
    return r;
}

WindowTrajectory WindowContext::apply_G(const WindowTrajectory& u) const {
    const auto what = source_values(u);
    const Recovery rec = recover(what);
    const std::size_t n = prop_.size();

    // Duhamel forcing L ghat at the nodes.
    std::vector<std::vector<Complex>> phihat(p_.time_nodes, std::vector<Complex>(n));
    for (int k = 0; k < p_.time_nodes; ++k)
        for (std::size_t m = 0; m < n; ++m) phihat[k][m] = prop_.L(m) * what[k][m];

    WindowTrajectory g = zero_trajectory();
    for (std::size_t m = 0; m < n; ++m) {
        for (int k = 0; k < p_.time_nodes; ++k) {
            const double tk = node_time(k);
            Complex duh{0.0, 0.0};
            if (!p_.f.is_zero) {
                const auto& w = prefix_[k];
                for (std::size_t j = 0; j < w.size(); ++j)
                    duh += w[j] * sin_prop(prop_, m, tk - node_time(static_cast<int>(j))) *
                           phihat[j][m];
            }
            g.u_hat[k][m] = cos_prop(prop_, m, tk) * rec.u0[m] +
                            sin_prop(prop_, m, tk) * rec.u1[m] + duh;
        }
    }
    return g;
}

double WindowContext::trajectory_norm(const WindowTrajectory& u) const {
    double worst = 0.0;
    for (int k = 0; k < p_.time_nodes; ++k) {
        SpectralField hat(p_.grid, Domain::frequency, u.u_hat[k]);
        worst = std::max(worst, norms_.ysp(hat) + norms_.linf(to_physical(hat)));
    }
    return worst;
}

double WindowContext::difference_norm(const WindowTrajectory& a, const WindowTrajectory& b) const {
    double worst = 0.0;
    for (int k = 0; k < p_.time_nodes; ++k) {
        SpectralField hat(p_.grid, Domain::frequency, a.u_hat[k]);
        for (std::size_t m = 0; m < hat.size(); ++m) hat[m] -= b.u_hat[k][m];
        worst = std::max(worst, norms_.ysp(hat) + norms_.linf(to_physical(hat)));
    }
    return worst;
}

WindowContext::Finalized WindowContext::finalize(const WindowTrajectory& u) const {
    const auto what = source_values(u);
    const Recovery rec = recover(what);
    const std::size_t n = prop_.size();

    std::vector<std::vector<Complex>> phihat(p_.time_nodes, std::vector<Complex>(n));
    for (int k = 0; k < p_.time_nodes; ++k)
        for (std::size_t m = 0; m < n; ++m) phihat[k][m] = prop_.L(m) * what[k][m];

    Finalized fin;
    fin.u0 = rec.u0;
    fin.u1 = rec.u1;
    fin.ghat = std::make_shared<SampledSource>(0.0, dt_, what);
    fin.u_hat.assign(p_.time_nodes, std::vector<Complex>(n));
    fin.ut_hat.assign(p_.time_nodes, std::vector<Complex>(n));
    for (std::size_t m = 0; m < n; ++m) {
        for (int k = 0; k < p_.time_nodes; ++k) {
            const double tk = node_time(k);
            Complex duh_s{0.0, 0.0}, duh_c{0.0, 0.0};
            if (!p_.f.is_zero) {
                const auto& w = prefix_[k];
                for (std::size_t j = 0; j < w.size(); ++j) {
                    const double tj = node_time(static_cast<int>(j));
                    duh_s += w[j] * sin_prop(prop_, m, tk - tj) * phihat[j][m];
                    duh_c += w[j] * cos_prop(prop_, m, tk - tj) * phihat[j][m];
                }
            }
            fin.u_hat[k][m] = cos_prop(prop_, m, tk) * rec.u0[m] +
                              sin_prop(prop_, m, tk) * rec.u1[m] + duh_s;
            fin.ut_hat[k][m] = ut_prop(prop_, m, tk, rec.u0[m], rec.u1[m], duh_c);
        }
    }
    return fin;
}

Complex WindowContext::u_hat_at(const WindowTrajectory&, const Finalized& fin, std::size_t mode,
                                double t_local, bool velocity) const {
    Complex duh{0.0, 0.0};
    if (!p_.f.is_zero) {
        auto phihat_fn = [&](double tau) {
            return prop_.L(mode) * fin.ghat->eval(mode, tau);
        };
        duh = duhamel_adaptive(prop_, mode, t_local, phihat_fn, p_.config,
                               velocity ? DuhamelKind::velocity : DuhamelKind::displacement);
    }
    if (velocity) return ut_prop(prop_, mode, t_local, fin.u0[mode], fin.u1[mode], duh);
    return cos_prop(prop_, mode, t_local) * fin.u0[mode] +
           sin_prop(prop_, mode, t_local) * fin.u1[mode] + duh;
}

WindowTrajectory picard_map(const WindowContext& ctx, const WindowTrajectory& u) {
    return ctx.apply_G(u);
}

double blowup_monitor(const SpectralField& u, const SpectralField& ut, double p) {
    if (!u.all_finite() || !ut.all_finite()) return std::numeric_limits<double>::infinity();
    return ysp_norm(u, 2.0, p) + linf_norm(u) + ysp_norm(ut, 2.0, p) + linf_norm(ut);
}

WindowProblem continuation_step(const SpectralField& u_end, const SpectralField& ut_end,
                                const NonlinearProblem& p, double length) {
    if (!u_end.all_finite() || !ut_end.all_finite())
        throw SolverError("continuation from a non-finite end state");
    WindowProblem w{p.grid,
                    p.symbols,
                    NonlocalKernel::zero(length),
                    NonlocalKernel::zero(length),
                    to_frequency(u_end).values(),
                    to_frequency(ut_end).values(),
                    length,
                    p.controls.time_nodes,
                    p.f,
                    p.config};
    return w;
}

namespace {

struct WindowEval {
    double t_start;
    double length;
    WindowContext ctx;
    WindowTrajectory converged;
    WindowContext::Finalized fin;
};

struct IterationOutcome {
    bool converged = false;
    bool noncontractive = false;
    int iterations = 0;
    WindowTrajectory fixed_point;
    std::vector<double> ratios;
    std::vector<double> iterate_norms;
};

IterationOutcome iterate_window(const WindowContext& ctx, const NonlinearControls& controls) {
    IterationOutcome out;
    WindowTrajectory u =
        controls.zero_initial_iterate ? ctx.zero_trajectory() : ctx.linear_trajectory();
    double prev_diff = -1.0;
    int consecutive_expanding = 0;
    for (int iter = 1; iter <= controls.max_iterations; ++iter) {
        WindowTrajectory g = ctx.apply_G(u);
        const double norm_g = ctx.trajectory_norm(g);
        const double diff = ctx.difference_norm(g, u);
        out.iterate_norms.push_back(norm_g);
        if (prev_diff > 0.0) {
            const double ratio = diff / prev_diff;
            out.ratios.push_back(ratio);
            consecutive_expanding = (ratio >= 1.0) ? consecutive_expanding + 1 : 0;
        }
        u = std::move(g);
        out.iterations = iter;
        if (!std::isfinite(diff) || !std::isfinite(norm_g)) {
            // Divergence inside the ball: handled like non-contraction so the
            // window shrinks; persistent blow-up surfaces via the monitor.
            out.noncontractive = true;
            break;
        }
        if (diff <= controls.tol_fp * std::max(1.0, norm_g)) {
            out.converged = true;
            break;
        }
        if (consecutive_expanding >= 3) {
            out.noncontractive = true;
            break;
        }
        prev_diff = diff;
    }
    out.fixed_point = std::move(u);
    return out;
}

}  // namespace

NonlinearResult solve_nonlinear(const NonlinearProblem& p, double t_goal,
                                const std::vector<double>& output_times) {
    if (!(t_goal > 0.0)) throw std::invalid_argument("horizon must be positive");

    // Admissibility gates, as for the linear problem.
    {
        const SymbolReport report = check_condition21(p.symbols.L0, p.symbols.L1, p.symbols.L2,
                                                      p.config.s, p.config.p, p.grid);
        if (!report.zero_hits.empty())
            throw AdmissibilityError::condition21(report.zero_hits.front(),
                                                  "zero of L1 or of 1 + L0 on the grid");
        const Admissibility a = check_admissibility(p.alpha, p.beta);
        if (!a.admissible && !p.config.force) throw AdmissibilityError::lemma11(a.margin);
    }

    NormSuite norms(p.grid, 2.0, p.config.p);
    const bool kernels_present = !(p.alpha.is_zero() && p.beta.is_zero());

    NonlinearResult result;
    NonlinearRun& run = result.run;
    std::vector<WindowEval> evals;

    SpectralField phi = p.phi, psi = p.psi;
    double t_reached = 0.0;
    int window_idx = 0;
    bool done = false;

    while (!done) {
        if (t_reached >= t_goal - 1e-14) {
            run.reason = Termination::horizon_reached;
            break;
        }
        if (window_idx >= p.controls.max_windows) {
            run.reason = Termination::max_windows;
            break;
        }

        const double M = norms.ysp(phi) + norms.linf(phi) + norms.ysp(psi) + norms.linf(psi);
        const double bound = max_window(M, p.controls.c0, p.controls.c1, p.f.majorant);
        double length = std::min({bound, p.controls.window_cap, t_goal - t_reached});

        const bool first = (window_idx == 0);
        const bool window_kernels = first && kernels_present;
        // The integral conditions read u over the whole kernel horizon, so
        // the first window cannot be shorter than it.
        if (window_kernels) length = std::max(length, p.alpha.horizon());

        std::vector<Complex> phi_hat = to_frequency(phi).values();
        std::vector<Complex> psi_hat = to_frequency(psi).values();

        IterationOutcome outcome;
        while (true) {
            WindowProblem wp{p.grid,
                             p.symbols,
                             window_kernels ? p.alpha : NonlocalKernel::zero(length),
                             window_kernels ? p.beta : NonlocalKernel::zero(length),
                             phi_hat,
                             psi_hat,
                             length,
                             p.controls.time_nodes,
                             p.f,
                             p.config};
            WindowContext ctx(std::move(wp));
            outcome = iterate_window(ctx, p.controls);
            if (outcome.converged) {
                auto fin = ctx.finalize(outcome.fixed_point);
                evals.push_back(WindowEval{t_reached, length, std::move(ctx),
                                           std::move(outcome.fixed_point), std::move(fin)});
                break;
            }
            // Shrink and retry; the first window cannot go below the kernel
            // horizon, and nothing goes below the floor.
            const double shrunk = length / 2.0;
            if (window_kernels && shrunk < p.alpha.horizon())
                throw SolverError(
                    "Picard iteration did not contract on the first window and the integral "
                    "conditions forbid shrinking below the kernel horizon");
            if (shrunk < p.controls.window_floor)
                throw SolverError("Picard iteration did not contract above the window floor");
            length = shrunk;
        }

        WindowEval& ev = evals.back();
        WindowRecord rec;
        rec.index = window_idx;
        rec.t_start = t_reached;
        rec.length = length;
        rec.data_norm = M;
        rec.iterations = outcome.iterations;
        rec.ratios = outcome.ratios;
        rec.iterate_norms = outcome.iterate_norms;
        rec.final_ratio = rec.ratios.empty() ? 0.0 : rec.ratios.back();
        rec.certified = length <= bound + 1e-15;

        // Node outputs, monitored for blow-up.
        bool blew_up = false;
        double monitor_end = 0.0;
        const int n_nodes = p.controls.time_nodes;
        for (int k = 0; k < n_nodes; ++k) {
            if (!first && k == 0) continue;  // splice point already emitted
            SpectralField u_k =
                to_physical(SpectralField(p.grid, Domain::frequency, ev.fin.u_hat[k]));
            SpectralField ut_k =
                to_physical(SpectralField(p.grid, Domain::frequency, ev.fin.ut_hat[k]));
            const double monitor = blowup_monitor(u_k, ut_k, p.config.p);
            const double t_node = t_reached + ev.ctx.node_time(k);
            if (!std::isfinite(monitor) || monitor > p.controls.blowup_ceiling) {
                run.blowup_time = t_node;
                blew_up = true;
                if (std::isfinite(monitor)) {
                    // The crossing state itself is still finite; keep it.
                    result.node_times.push_back(t_node);
                    result.u.push_back(std::move(u_k));
                    result.ut.push_back(std::move(ut_k));
                    run.monitor_max = std::max(run.monitor_max, monitor);
                    monitor_end = monitor;
                }
                break;
            }
            monitor_end = monitor;
            run.monitor_max = std::max(run.monitor_max, monitor);
            result.node_times.push_back(t_node);
            result.u.push_back(std::move(u_k));
            result.ut.push_back(std::move(ut_k));
        }
        rec.monitor_end = monitor_end;
        run.windows.push_back(std::move(rec));

        if (blew_up) {
            run.reason = Termination::blow_up_detected;
            done = true;
            break;
        }

        // Next window restarts from the end state with classical data.
        phi = to_physical(SpectralField(p.grid, Domain::frequency, ev.fin.u_hat.back()));
        psi = to_physical(SpectralField(p.grid, Domain::frequency, ev.fin.ut_hat.back()));

        // Windows hosting no requested output time are not needed again;
        // dropping them keeps long runs at bounded memory.
        const bool hosts_output =
            std::any_of(output_times.begin(), output_times.end(), [&](double t) {
                return t >= t_reached - 1e-12 && t <= t_reached + length + 1e-12;
            });
        if (!hosts_output) evals.pop_back();

        t_reached += length;
        ++window_idx;
    }

    run.reached_time = std::min(t_reached, t_goal);

    // Requested output times, evaluated inside their windows.
    for (double t : output_times) {
        if (t > run.reached_time + 1e-12) continue;
        const WindowEval* home = nullptr;
        for (const auto& ev : evals)
            if (t >= ev.t_start - 1e-12 && t <= ev.t_start + ev.length + 1e-12) home = &ev;
        if (!home) continue;
        const double t_local = std::clamp(t - home->t_start, 0.0, home->length);
        SpectralField u_hat(p.grid, Domain::frequency);
        SpectralField ut_hat(p.grid, Domain::frequency);
        for (std::size_t m = 0; m < u_hat.size(); ++m) {
            u_hat[m] = home->ctx.u_hat_at(home->converged, home->fin, m, t_local, false);
            ut_hat[m] = home->ctx.u_hat_at(home->converged, home->fin, m, t_local, true);
        }
        result.output_times.push_back(t);
        result.u_out.push_back(to_physical(u_hat));
        result.ut_out.push_back(to_physical(ut_hat));
    }
    return result;
}

}  // namespace bqs
