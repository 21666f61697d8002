#include <random>

#include "bqs/errors.hpp"
#include "bqs/nonlinear_solver.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace bqs;
using namespace bqs::testing;

namespace {

SpectralField gaussian_field(const SpectralGrid& g, double amp, double center, double width) {
    return sample_field(g, [&](const std::vector<double>& x) {
        double q = 0.0;
        for (double xd : x) {
            const double z = (xd - center) / width;
            q += z * z;
        }
        return Complex{amp * std::exp(-0.5 * q), 0.0};
    });
}

NonlinearProblem classical_nonlinear(const SpectralGrid& g, SpectralField phi, SpectralField psi,
                                     Nonlinearity f, NonlinearControls controls = {},
                                     SolverConfig config = {}) {
    return NonlinearProblem(g, preset_symbol("classical_boussinesq_" + std::to_string(g.dim())),
                            NonlocalKernel::zero(1.0), NonlocalKernel::zero(1.0), std::move(phi),
                            std::move(psi), std::move(f), config, controls);
}

WindowContext make_context(const SpectralGrid& g, const SpectralField& phi,
                           const SpectralField& psi, Nonlinearity f, double length,
                           int nodes = 33) {
    WindowProblem wp{g,
                     preset_symbol("classical_boussinesq_" + std::to_string(g.dim())),
                     NonlocalKernel::zero(length),
                     NonlocalKernel::zero(length),
                     to_frequency(phi).values(),
                     to_frequency(psi).values(),
                     length,
                     nodes,
                     std::move(f),
                     SolverConfig{}};
    return WindowContext(std::move(wp));
}

}  // namespace

TEST_CASE("nonlinearity registry") {
    const Nonlinearity zero = register_nonlinearity("zero");
    CHECK(zero.is_zero);
    CHECK(zero.majorant(3.0) == 0.0);

    const Nonlinearity sine = register_nonlinearity("sine");
    CHECK(sine.majorant(0.1) == 1.0);
    CHECK(sine.majorant(100.0) == 1.0);
    CHECK(std::abs(sine.f(Complex{M_PI / 2.0, 0.0}) - Complex{1.0, 0.0}) < 1e-15);

    const Nonlinearity cubic = register_nonlinearity("cubic");
    CHECK(cubic.majorant(3.0) == doctest::Approx(27.0));  // max(3 r^2, 6 r)
    CHECK(cubic.majorant(1.0) == doctest::Approx(6.0));

    const Nonlinearity quad = register_nonlinearity("quadratic");
    CHECK(quad.majorant(2.0) == doctest::Approx(4.0));
    CHECK(quad.majorant(0.5) == doctest::Approx(2.0));

    const Nonlinearity lin = register_nonlinearity("linear", -0.75);
    CHECK(lin.majorant(9.0) == doctest::Approx(0.75));
    CHECK(lin.f(Complex{2.0, 0.0}) == Complex{-1.5, 0.0});

    CHECK_THROWS_AS(register_nonlinearity("unknown"), std::invalid_argument);
}

TEST_CASE("max_window bounds") {
    auto zero_bar = [](double) { return 0.0; };
    CHECK(max_window(0.7, 1.0, 1.0, zero_bar) == doctest::Approx(std::min(1.0 / 1.7, 0.5)));
    CHECK(max_window(3.0, 1.0, 1.0, zero_bar) == doctest::Approx(0.25));

    // M = 1, C0 = C1 = 1, fbar(2) = 4: both bounds give 1/34.
    auto four = [](double) { return 4.0; };
    CHECK(max_window(1.0, 1.0, 1.0, four) == doctest::Approx(1.0 / 34.0));

    // M = 0, C0 = C1 = 1, fbar(1) = 1: min(1/3, 1/4).
    auto one = [](double) { return 1.0; };
    CHECK(max_window(0.0, 1.0, 1.0, one) == doctest::Approx(0.25));
}

TEST_CASE("picard map with zero nonlinearity is one-shot") {
    const SpectralGrid g = SpectralGrid::make(1, {16}, M_PI);
    std::mt19937_64 rng(73);
    const SpectralField phi = random_smooth_field(g, rng);
    const SpectralField psi = random_smooth_field(g, rng);
    const WindowContext ctx = make_context(g, phi, psi, register_nonlinearity("zero"), 0.4, 17);

    const WindowTrajectory from_zero = picard_map(ctx, ctx.zero_trajectory());
    const WindowTrajectory from_linear = picard_map(ctx, ctx.linear_trajectory());
    const WindowTrajectory linear = ctx.linear_trajectory();
    CHECK(ctx.difference_norm(from_zero, linear) < 1e-12);
    CHECK(ctx.difference_norm(from_linear, linear) < 1e-12);
}

TEST_CASE("picard fixed point matches the per-mode linear ODE for f(u) = u") {
    // Single-mode data: uhat_tt + Q uhat = L uhat has the closed form
    // cos(sqrt(Q - L) t) per mode; Q = L for the classical preset, so the
    // mode coasts at its initial value.
    const SpectralGrid g = SpectralGrid::make(1, {16}, M_PI);
    const SpectralField phi = sample_field(
        g, [](const std::vector<double>& x) { return Complex{std::cos(2.0 * x[0]), 0.0}; });
    const SpectralField psi(g, Domain::physical);
    const double length = 0.2;
    const WindowContext ctx =
        make_context(g, phi, psi, register_nonlinearity("linear", 1.0), length, 33);

    WindowTrajectory u = ctx.linear_trajectory();
    for (int iter = 0; iter < 40; ++iter) {
        WindowTrajectory next = picard_map(ctx, u);
        const double diff = ctx.difference_norm(next, u);
        u = std::move(next);
        if (diff < 1e-12) break;
    }

    for (int k = 0; k < ctx.nodes(); ++k) {
        // Effective frequency sqrt(Q - L) = 0 at xi = 2: cos(0 t) = 1.
        CHECK(std::abs(u.u_hat[k][2] - Complex{0.5, 0.0}) < 1e-7);
    }
}

TEST_CASE("successive applications contract for the quadratic nonlinearity") {
    const SpectralGrid g = SpectralGrid::make(1, {32}, 4.0);
    const SpectralField phi = gaussian_field(g, 0.4, 0.0, 0.8);
    const SpectralField psi = gaussian_field(g, -0.2, 0.5, 0.7);
    const Nonlinearity f = register_nonlinearity("quadratic");

    NormSuite norms(g, 2.0, 2.0);
    const double M = norms.ysp(phi) + norms.linf(phi) + norms.ysp(psi) + norms.linf(psi);
    const double length = max_window(M, 1.0, 1.0, f.majorant);
    const WindowContext ctx = make_context(g, phi, psi, f, length);

    WindowTrajectory u = ctx.linear_trajectory();
    WindowTrajectory gu = picard_map(ctx, u);
    WindowTrajectory ggu = picard_map(ctx, gu);
    const double d1 = ctx.difference_norm(gu, u);
    const double d2 = ctx.difference_norm(ggu, gu);
    CHECK(d2 <= 0.55 * d1);
}

TEST_CASE("solve_nonlinear reduces to the linear solve for f = 0") {
    const SpectralGrid g = SpectralGrid::make(1, {16}, M_PI);
    std::mt19937_64 rng(79);
    const SpectralField phi = random_smooth_field(g, rng);
    const SpectralField psi = random_smooth_field(g, rng);
    const double T = 0.8;
    const std::vector<double> times{0.0, 0.3, 0.6, 0.8};

    NonlinearControls controls;
    const NonlinearResult res = solve_nonlinear(
        classical_nonlinear(g, phi, psi, register_nonlinearity("zero"), controls), T, times);
    CHECK(res.run.reason == Termination::horizon_reached);

    LinearProblem lp(g, preset_symbol("classical_boussinesq_1"), NonlocalKernel::zero(T),
                     NonlocalKernel::zero(T), phi, psi, SourceTerm::zero(), T, times);
    const LinearSolution lin = solve_linear(lp);
    REQUIRE(res.output_times.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(max_abs_diff(res.u_out[i], lin.u[i]) < 1e-10);
}

TEST_CASE("fixed point agrees with the frequency-space RK4 oracle") {
    const SpectralGrid g = SpectralGrid::make(1, {32}, 4.0);
    const SymbolTriple symbols = preset_symbol("classical_boussinesq_1");
    const PropagatorTable prop(g, symbols.L0, symbols.L1, symbols.L2);
    const SpectralField phi = gaussian_field(g, 0.5, 0.0, 0.9);
    const SpectralField psi = gaussian_field(g, 0.25, -0.4, 0.8);
    const double T = 0.3;

    for (const char* name : {"linear", "quadratic", "cubic"}) {
        const Nonlinearity f = register_nonlinearity(name);
        const NonlinearResult res = solve_nonlinear(classical_nonlinear(g, phi, psi, f), T, {T});
        REQUIRE(res.output_times.size() == 1);

        const Rk4State oracle = rk4_frequency_oracle(
            g, prop, f, to_frequency(phi).values(), to_frequency(psi).values(), T, 3000);
        const SpectralField oracle_u = to_physical(SpectralField(g, Domain::frequency, oracle.u));
        CHECK(max_abs_diff(res.u_out[0], oracle_u) < 1e-5);
    }
}

TEST_CASE("two-dimensional fixed point agrees with the RK4 oracle") {
    const SpectralGrid g = SpectralGrid::make(2, {16, 16}, 4.0);
    const SymbolTriple symbols = preset_symbol("classical_boussinesq_2");
    const PropagatorTable prop(g, symbols.L0, symbols.L1, symbols.L2);
    const SpectralField phi = sample_field(g, [](const std::vector<double>& x) {
        return Complex{0.4 * std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]) / 0.81), 0.0};
    });
    const SpectralField psi(g, Domain::physical);
    const double T = 0.25;

    const Nonlinearity f = register_nonlinearity("quadratic");
    const NonlinearResult res = solve_nonlinear(classical_nonlinear(g, phi, psi, f), T, {T});
    const Rk4State oracle = rk4_frequency_oracle(
        g, prop, f, to_frequency(phi).values(), to_frequency(psi).values(), T, 1500);
    const SpectralField oracle_u = to_physical(SpectralField(g, Domain::frequency, oracle.u));
    CHECK(max_abs_diff(res.u_out[0], oracle_u) < 1e-5);
}

TEST_CASE("continuation splice") {
    const SpectralGrid g = SpectralGrid::make(1, {16}, M_PI);
    std::mt19937_64 rng(83);
    const SpectralField phi = random_smooth_field(g, rng, 2, 0.4);
    const SpectralField psi = random_smooth_field(g, rng, 2, 0.2);
    NormSuite norms(g, 2.0, 2.0);
    const double M = norms.ysp(phi) + norms.linf(phi) + norms.ysp(psi) + norms.linf(psi);

    SUBCASE("zero nonlinearity: two windows equal one") {
        // Pick the horizon safely under the window bound so the cap alone
        // decides the window count.
        const double T = 0.8 * max_window(M, 1.0, 1.0, [](double) { return 0.0; });
        const std::vector<double> times{0.0, T / 4.0, T / 2.0, 3.0 * T / 4.0, T};
        NonlinearControls one_window;
        one_window.window_cap = T;
        NonlinearControls two_windows;
        two_windows.window_cap = T / 2.0;

        const NonlinearResult a = solve_nonlinear(
            classical_nonlinear(g, phi, psi, register_nonlinearity("zero"), one_window), T, times);
        const NonlinearResult b = solve_nonlinear(
            classical_nonlinear(g, phi, psi, register_nonlinearity("zero"), two_windows), T,
            times);
        CHECK(a.run.windows.size() == 1);
        CHECK(b.run.windows.size() == 2);
        for (std::size_t i = 0; i < times.size(); ++i)
            CHECK(max_abs_diff(a.u_out[i], b.u_out[i]) < 1e-9);

        int hits = 0;
        for (double t : b.node_times)
            if (std::abs(t - T / 2.0) < 1e-12) ++hits;
        CHECK(hits == 1);
    }

    SUBCASE("quadratic nonlinearity: splice at 1e-6") {
        const SpectralField small_phi = gaussian_field(g, 0.05, 0.0, 0.8);
        const SpectralField small_psi(g, Domain::physical);
        const Nonlinearity f = register_nonlinearity("quadratic");
        const double Ms = norms.ysp(small_phi) + norms.linf(small_phi);
        const double T = 0.8 * max_window(Ms, 1.0, 1.0, f.majorant);
        const std::vector<double> times{0.0, T / 2.0, T};
        NonlinearControls one_window;
        one_window.window_cap = T;
        NonlinearControls two_windows;
        two_windows.window_cap = T / 2.0;

        const NonlinearResult a = solve_nonlinear(
            classical_nonlinear(g, small_phi, small_psi, f, one_window), T, times);
        const NonlinearResult b = solve_nonlinear(
            classical_nonlinear(g, small_phi, small_psi, f, two_windows), T, times);
        CHECK(a.run.windows.size() == 1);
        CHECK(b.run.windows.size() == 2);
        for (std::size_t i = 0; i < times.size(); ++i)
            CHECK(max_abs_diff(a.u_out[i], b.u_out[i]) < 1e-6);
    }
}

TEST_CASE("continuation_step hands over the end state classically") {
    const SpectralGrid g = SpectralGrid::make(1, {16}, M_PI);
    std::mt19937_64 rng(139);
    const SpectralField u_end = random_smooth_field(g, rng);
    const SpectralField ut_end = random_smooth_field(g, rng);
    const NonlinearProblem p = classical_nonlinear(g, u_end, ut_end,
                                                   register_nonlinearity("quadratic"));

    const WindowProblem next = continuation_step(u_end, ut_end, p, 0.1);
    CHECK(next.alpha.is_zero());
    CHECK(next.beta.is_zero());
    CHECK(max_abs_diff(next.phi_hat, to_frequency(u_end).values()) == 0.0);
    CHECK(max_abs_diff(next.psi_hat, to_frequency(ut_end).values()) == 0.0);

    // Splice continuity by construction: the window's t = 0 state is the
    // handed-over data.
    WindowContext ctx(next);
    const WindowTrajectory lin = ctx.linear_trajectory();
    CHECK(max_abs_diff(lin.u_hat.front(), to_frequency(u_end).values()) < 1e-14);

    SpectralField bad = u_end;
    bad[3] = Complex{std::numeric_limits<double>::quiet_NaN(), 0.0};
    CHECK_THROWS_AS(continuation_step(bad, ut_end, p, 0.1), SolverError);
}

TEST_CASE("blowup monitor values") {
    const SpectralGrid g = SpectralGrid::make(1, {16}, M_PI);
    const SpectralField zero(g, Domain::physical);
    CHECK(blowup_monitor(zero, zero, 2.0) == 0.0);

    // Constant field c: the Y^{2,p} multiplier is 1 at the only active mode,
    // so the norm sum is |c| (2L)^{1/p} + |c|.
    SpectralField c_field(g, Domain::physical);
    for (auto& v : c_field.values()) v = Complex{1.5, 0.0};
    const double expected = 1.5 * std::pow(2.0 * M_PI, 0.5) + 1.5;
    CHECK(blowup_monitor(c_field, zero, 2.0) == doctest::Approx(expected).epsilon(1e-12));

    // Homogeneity in the amplitude of a single mode.
    const SpectralField one = sample_field(
        g, [](const std::vector<double>& x) { return Complex{std::cos(x[0]), 0.0}; });
    SpectralField three = one;
    for (auto& v : three.values()) v *= 3.0;
    CHECK(blowup_monitor(three, zero, 2.0) ==
          doctest::Approx(3.0 * blowup_monitor(one, zero, 2.0)).epsilon(1e-12));

    SpectralField bad = zero;
    bad[0] = Complex{std::numeric_limits<double>::infinity(), 0.0};
    CHECK(std::isinf(blowup_monitor(bad, zero, 2.0)));
}

TEST_CASE("large quadratic data trips the blow-up monitor") {
    const SpectralGrid g = SpectralGrid::make(1, {32}, 4.0);
    const SpectralField phi = gaussian_field(g, 1.0, 0.0, 0.9);
    const SpectralField psi = gaussian_field(g, 6.0, 0.0, 0.9);
    const double m0 = blowup_monitor(phi, psi, 2.0);

    // The certified window bound is microscopic at this data size; loosening
    // the user constants C0, C1 trades certification for measured ratios.
    NonlinearControls controls;
    controls.c0 = 0.02;
    controls.c1 = 0.02;
    controls.time_nodes = 17;
    controls.blowup_ceiling = 1.1 * m0;
    controls.max_windows = 2000;
    const NonlinearResult res = solve_nonlinear(
        classical_nonlinear(g, phi, psi, register_nonlinearity("quadratic"), controls), 5.0, {});
    CHECK(res.run.reason == Termination::blow_up_detected);
    CHECK(res.run.blowup_time.has_value());
    CHECK(res.run.windows.size() < 2000);
    for (const auto& u : res.u) CHECK(u.all_finite());
    for (const auto& ut : res.ut) CHECK(ut.all_finite());
}

TEST_CASE("uniqueness probe: both initial iterates land on the same fixed point") {
    const SpectralGrid g = SpectralGrid::make(1, {32}, 4.0);
    const SpectralField phi = gaussian_field(g, 0.3, 0.0, 0.8);
    const SpectralField psi = gaussian_field(g, -0.1, 0.3, 0.9);
    const double T = 0.1;

    NonlinearControls from_linear;
    from_linear.window_cap = T;
    NonlinearControls from_zero = from_linear;
    from_zero.zero_initial_iterate = true;

    const NonlinearResult a = solve_nonlinear(
        classical_nonlinear(g, phi, psi, register_nonlinearity("quadratic"), from_linear), T, {T});
    const NonlinearResult b = solve_nonlinear(
        classical_nonlinear(g, phi, psi, register_nonlinearity("quadratic"), from_zero), T, {T});
    CHECK(max_abs_diff(a.u_out[0], b.u_out[0]) < 10.0 * from_linear.tol_fp);
}

TEST_CASE("iterates stay in the ball Q(M; T)") {
    const SpectralGrid g = SpectralGrid::make(1, {32}, 4.0);
    const SpectralField phi = gaussian_field(g, 0.4, 0.0, 0.8);
    const SpectralField psi = gaussian_field(g, 0.2, -0.3, 0.7);
    NormSuite norms(g, 2.0, 2.0);
    const double M = norms.ysp(phi) + norms.linf(phi) + norms.ysp(psi) + norms.linf(psi);

    const NonlinearResult res = solve_nonlinear(
        classical_nonlinear(g, phi, psi, register_nonlinearity("quadratic")), 0.05, {});
    REQUIRE(!res.run.windows.empty());
    for (double norm : res.run.windows.front().iterate_norms) CHECK(norm <= M + 1.0);
}

TEST_CASE("composition bound from the mean value theorem") {
    // ||f(u) - f(0)||_p <= fbar(||u||_inf) ||u||_p on real fields.
    const SpectralGrid g = SpectralGrid::make(1, {64}, 3.0);
    std::mt19937_64 rng(89);
    for (const char* name : {"linear", "quadratic", "cubic", "sine"}) {
        const Nonlinearity f = register_nonlinearity(name);
        for (int rep = 0; rep < 5; ++rep) {
            const SpectralField u = random_smooth_field(g, rng, 3, 1.5);
            SpectralField fu(g, Domain::physical);
            const Complex f0 = f.f(Complex{0.0, 0.0});
            for (std::size_t i = 0; i < u.size(); ++i) fu[i] = f.f(u[i]) - f0;
            const double lhs = lp_norm(fu, 2.0);
            const double rhs = f.majorant(linf_norm(u)) * lp_norm(u, 2.0);
            CHECK(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("first window honors the nonlocal conditions and the kernel horizon") {
    const SpectralGrid g = SpectralGrid::make(1, {32}, 4.0);
    const double T_kernel = 0.25;
    NonlocalKernel alpha = NonlocalKernel::atoms(T_kernel, {{0.2, 0.1}});
    NonlocalKernel beta = NonlocalKernel::atoms(T_kernel, {{0.1, -0.05}});
    const SpectralField phi = gaussian_field(g, 0.3, 0.0, 0.8);
    const SpectralField psi(g, Domain::physical);
    NonlinearProblem p(g, preset_symbol("classical_boussinesq_1"), alpha, beta, phi, psi,
                       register_nonlinearity("quadratic"), SolverConfig{}, NonlinearControls{});

    const NonlinearResult res = solve_nonlinear(p, 0.5, {0.0, 0.1, 0.2});
    CHECK(res.run.reason == Termination::horizon_reached);
    CHECK(res.run.windows.front().length >= T_kernel - 1e-12);
    // The stretched first window loses its step-bound certificate; the
    // classical continuation windows keep theirs.
    CHECK_FALSE(res.run.windows.front().certified);
    for (std::size_t w = 1; w < res.run.windows.size(); ++w)
        CHECK(res.run.windows[w].certified);

    // A posteriori check of u(., 0) = phi + 0.1 * u(., 0.2): atoms evaluate
    // exactly, so the Picard tolerance and output quadrature dominate.
    REQUIRE(res.output_times.size() == 3);
    SpectralField lhs = res.u_out[0];
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= phi[i] + 0.1 * res.u_out[2][i];
    CHECK(linf_norm(lhs) < 1e-6);
}
