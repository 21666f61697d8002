// Command-line front end: admissibility checks, linear and nonlinear solves,
// and the verification suites.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "bqs/errors.hpp"
#include "bqs/estimates.hpp"
#include "bqs/manufactured.hpp"
#include "bqs/problem_io.hpp"

using namespace bqs;
namespace fs = std::filesystem;

namespace {

std::string xi_string(const std::vector<double>& xi) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < xi.size(); ++i) os << (i ? ", " : "") << xi[i];
    os << ")";
    return os.str();
}

int run_check_symbols(const std::string& path, double s, double p, std::vector<int> points,
                      double half_width, bool kv) {
    const SymbolFile sf = load_symbols(path);
    if (points.empty()) points.assign(sf.n, 64);
    const SpectralGrid grid = SpectralGrid::make(sf.n, points, half_width);
    const SymbolReport report =
        check_condition21(sf.symbols.L0, sf.symbols.L1, sf.symbols.L2, s, p, grid);

    if (kv) {
        std::cout << std::setprecision(17);
        std::cout << "admissible = " << (report.admissible ? "true" : "false") << "\n";
        std::cout << "M1_est = " << report.M1_est << "\n";
        std::cout << "M2_est = " << report.M2_est << "\n";
        std::cout << "M1_inv_est = " << report.M1_inv_est << "\n";
        std::cout << "zero_hits = " << report.zero_hits.size() << "\n";
        if (!report.worst_xi.empty()) std::cout << "worst_xi = " << xi_string(report.worst_xi) << "\n";
        return report.admissible ? 0 : 1;
    }

    std::cout << "operator family from " << path << " on a " << sf.n << "-d grid, s = " << s
              << ", p = " << p << "\n";
    if (report.admissible) {
        std::cout << "admissible: growth bounds fit with M1 = " << report.M1_est
                  << ", M2 = " << report.M2_est << " (inverse-root fit " << report.M1_inv_est
                  << ")\n";
        std::cout << "tightest fit at xi = " << xi_string(report.worst_xi) << "\n";
    } else {
        std::cout << "NOT admissible: " << report.zero_hits.size()
                  << " zero condition hit(s); first at xi = " << xi_string(report.zero_hits.front())
                  << "\n";
    }
    return report.admissible ? 0 : 1;
}

int run_check_kernels(const std::string& path) {
    const KernelFile kf = load_kernels(path);
    const Admissibility adm = check_admissibility(*kf.alpha, *kf.beta);
    std::cout << std::setprecision(17);
    std::cout << "margin = " << adm.margin << "\n";
    std::cout << "admissible = " << (adm.admissible ? "true" : "false") << "\n";
    return adm.admissible ? 0 : 1;
}

std::string snapshot_name(const char* prefix, std::size_t index) {
    std::ostringstream os;
    os << prefix << "_" << std::setw(4) << std::setfill('0') << index << ".bqf";
    return os.str();
}

int run_solve_linear(const std::string& problem_path, const std::string& out_dir) {
    const LoadedProblem lp = load_problem(problem_path);
    const LinearSolution sol = solve_linear(lp.linear());
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        write_snapshot((fs::path(out_dir) / snapshot_name("u", i)).string(), sol.u[i]);
        write_snapshot((fs::path(out_dir) / snapshot_name("ut", i)).string(), sol.ut[i]);
    }
    write_norms_csv((fs::path(out_dir) / "norms.csv").string(), sol.times, sol.u, sol.ut,
                    lp.config.s, lp.config.p);
    write_diagnostics_csv((fs::path(out_dir) / "diagnostics.csv").string(), sol);
    std::cout << "wrote " << sol.times.size() << " snapshots to " << out_dir << "\n";
    std::cout << "condition residuals: u " << sol.residual_u << ", u_t " << sol.residual_ut
              << "; min |D| = " << sol.min_abs_det << "\n";
    return 0;
}

int run_solve(const std::string& problem_path, double horizon, const std::string& out_dir) {
    const LoadedProblem lp = load_problem(problem_path);
    if (!lp.nonlinearity)
        throw std::runtime_error("problem file has no 'nonlinearity' entry; use solve-linear");
    const double t_goal = horizon > 0.0 ? horizon : lp.horizon;
    std::vector<double> times = lp.output_times;
    for (double& t : times) t = std::min(t, t_goal);

    const NonlinearResult res = solve_nonlinear(lp.nonlinear(), t_goal, times);
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < res.output_times.size(); ++i) {
        write_snapshot((fs::path(out_dir) / snapshot_name("u", i)).string(), res.u_out[i]);
        write_snapshot((fs::path(out_dir) / snapshot_name("ut", i)).string(), res.ut_out[i]);
    }
    if (!res.output_times.empty())
        write_norms_csv((fs::path(out_dir) / "norms.csv").string(), res.output_times, res.u_out,
                        res.ut_out, lp.config.s, lp.config.p);
    write_run_csv((fs::path(out_dir) / "run.csv").string(), res.run);
    write_termination_record((fs::path(out_dir) / "termination.txt").string(), res.run);
    std::cout << "termination: " << to_string(res.run.reason) << " after "
              << res.run.windows.size() << " window(s), reached t = " << res.run.reached_time
              << "\n";
    if (res.run.blowup_time)
        std::cout << "monitor crossed the ceiling at t = " << *res.run.blowup_time << "\n";
    return 0;
}

int run_verify(const std::string& suite, int trials, std::uint64_t seed,
               const std::string& out_dir) {
    fs::create_directories(out_dir);
    const SpectralGrid grid = SpectralGrid::make(1, {48}, 8.0);
    SolverConfig config;
    std::ostringstream summary;
    bool pass = false;

    auto write_estimate_csv = [&](const EstimateReport& rep, const std::string& name) {
        std::ofstream out((fs::path(out_dir) / (name + ".csv")).string());
        out << std::setprecision(17) << "trial,lhs,rhs,ratio,skipped\n";
        for (std::size_t i = 0; i < rep.trials.size(); ++i) {
            const TrialRecord& t = rep.trials[i];
            out << i << ',' << t.lhs << ',' << t.rhs << ',' << t.ratio << ','
                << (t.skipped ? 1 : 0) << '\n';
        }
    };

    if (suite == "thm21" || suite == "thm22") {
        const EstimateReport rep = verify_estimate(
            suite == "thm21" ? EstimateKind::sup_norm : EstimateKind::sobolev_norm, trials, seed,
            grid, config);
        write_estimate_csv(rep, suite);
        pass = rep.stable && std::isfinite(rep.max_ratio);
        summary << "max ratio " << rep.max_ratio << ", refined " << rep.refined_max_ratio
                << ", stable: " << (rep.stable ? "yes" : "no");
    } else if (suite == "nirenberg") {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::ofstream out((fs::path(out_dir) / "nirenberg.csv").string());
        out << std::setprecision(17) << "trial,lhs,rhs,c_est,ok\n";
        pass = true;
        for (int i = 0; i < trials; ++i) {
            const double width = 0.4 + 1.2 * unit(rng);
            const double amp = 0.2 + 2.0 * unit(rng);
            const SpectralField u = sample_field(grid, [&](const std::vector<double>& x) {
                return Complex{amp * std::exp(-0.5 * x[0] * x[0] / (width * width)), 0.0};
            });
            const NirenbergResult res = nirenberg_check(u, 1, 2, 2.0, 2.0, 2.0, 0.5);
            out << i << ',' << res.lhs << ',' << res.rhs << ',' << res.c_est << ','
                << (res.ok ? 1 : 0) << '\n';
            pass = pass && res.ok;
        }
        summary << trials << " gaussian trials, all within the calibrated constant: "
                << (pass ? "yes" : "no");
    } else if (suite == "manufactured") {
        const SymbolTriple symbols = preset_symbol("classical_boussinesq_1");
        const SpectralGrid mg = SpectralGrid::make(1, {32}, M_PI);
        const double omega = std::sqrt(4.0 / 5.0);
        const ManufacturedReport matched = manufactured_residual(
            mg, symbols, 1.0,
            ManufacturedSolution({{{2}, Complex{1.0, 0.0}, TimeProfile::cosine(omega)}}));
        const ManufacturedReport forced = manufactured_residual(
            mg, symbols, 1.0,
            ManufacturedSolution(
                {{{1}, Complex{1.0, 0.0}, TimeProfile::polynomial({1.0, 0.5, -2.0, 0.25, 0.5})}}),
            config, {9, 17, 33});
        std::ofstream out((fs::path(out_dir) / "manufactured.csv").string());
        out << std::setprecision(17) << "case,max_linf_error,richardson_order\n";
        out << "matched-mode," << matched.max_linf_error << ",\n";
        out << "polynomial-forced," << forced.max_linf_error << ',' << forced.richardson_order
            << '\n';
        for (const auto& [nodes, err] : forced.node_errors)
            out << "nodes-" << nodes << ',' << err << ",\n";
        pass = matched.max_linf_error < 1e-9 && forced.richardson_order >= 3.5;
        summary << "matched-mode error " << matched.max_linf_error << ", quadrature order "
                << forced.richardson_order;
    } else if (suite == "identities") {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const SymbolTriple symbols = preset_symbol("classical_boussinesq_1");
        const PropagatorTable prop(grid, symbols.L0, symbols.L1, symbols.L2);
        std::ofstream out((fs::path(out_dir) / "identities.csv").string());
        out << std::setprecision(17) << "trial,trig_defect,energy_defect\n";
        double worst_trig = 0.0, worst_energy = 0.0;
        for (int i = 0; i < trials; ++i) {
            const std::size_t m =
                std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(rng);
            const double sigma = 2.0 * (unit(rng) - 0.5);
            const double tau = 2.0 * (unit(rng) - 0.5);
            const Complex cs = cos_prop(prop, m, sigma), ct = cos_prop(prop, m, tau);
            const Complex ss = sin_prop(prop, m, sigma), st = sin_prop(prop, m, tau);
            const double trig = std::abs(cs * ct + prop.Q(m) * ss * st -
                                         cos_prop(prop, m, sigma - tau));
            const double energy =
                std::abs(cs * cs + prop.Q(m) * ss * ss - 1.0);
            out << i << ',' << trig << ',' << energy << '\n';
            worst_trig = std::max(worst_trig, trig);
            worst_energy = std::max(worst_energy, energy);
        }
        pass = worst_trig < 1e-9 && worst_energy < 1e-10;
        summary << "worst trig defect " << worst_trig << ", worst energy defect " << worst_energy;
    } else {
        throw std::runtime_error("unknown suite: " + suite);
    }

    std::cout << (pass ? "PASS" : "FAIL") << " " << suite << ": " << summary.str() << "\n";
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral solver for generalized Boussinesq equations with integral "
                 "initial conditions"};
    app.require_subcommand(1);

    // check-symbols
    std::string symbols_path;
    double s = 2.0, p = 2.0, half_width = M_PI;
    std::vector<int> points;
    bool kv = false;
    auto* cs = app.add_subcommand("check-symbols", "Scan the operator symbols on a grid");
    cs->add_option("--symbols", symbols_path, "symbol definition file")->required();
    cs->add_option("--s", s, "Sobolev smoothness");
    cs->add_option("--p", p, "Lebesgue exponent");
    cs->add_option("--points", points, "grid points per dimension");
    cs->add_option("--half-width", half_width, "domain half width");
    cs->add_flag("--kv", kv, "machine-readable key = value output");

    // check-kernels
    std::string kernels_path;
    auto* ck = app.add_subcommand("check-kernels", "Inequality margin of the condition kernels");
    ck->add_option("--kernels", kernels_path, "kernel definition file")->required();

    // solve-linear
    std::string problem_path, out_dir = "out";
    auto* sl = app.add_subcommand("solve-linear", "Solve the linearized nonlocal problem");
    sl->add_option("--problem", problem_path, "problem file")->required();
    sl->add_option("--out", out_dir, "output directory");

    // solve
    std::string nl_problem, nl_out = "out";
    double horizon = 0.0;
    auto* sv = app.add_subcommand("solve", "Solve the nonlinear problem by Picard windows");
    sv->add_option("--problem", nl_problem, "problem file")->required();
    sv->add_option("--horizon", horizon, "evolution horizon (defaults to the problem horizon)");
    sv->add_option("--out", nl_out, "output directory");

    // verify
    std::string suite, verify_out = "verify-out";
    int trials = 100;
    std::uint64_t seed = 1;
    auto* vf = app.add_subcommand("verify", "Run a verification suite");
    vf->add_option("--suite", suite, "thm21 | thm22 | nirenberg | manufactured | identities")
        ->required();
    vf->add_option("--trials", trials, "trial count");
    vf->add_option("--seed", seed, "random seed");
    vf->add_option("--out", verify_out, "report directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cs->parsed()) return run_check_symbols(symbols_path, s, p, points, half_width, kv);
        if (ck->parsed()) return run_check_kernels(kernels_path);
        if (sl->parsed()) return run_solve_linear(problem_path, out_dir);
        if (sv->parsed()) return run_solve(nl_problem, horizon, nl_out);
        if (vf->parsed()) return run_verify(suite, trials, seed, verify_out);
    } catch (const SolverError& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
