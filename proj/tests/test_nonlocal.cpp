#include <random>

#include "bqs/errors.hpp"
#include "bqs/nonlocal.hpp"
#include "bqs/quadrature.hpp"
#include "doctest.h"

using namespace bqs;

namespace {

PropagatorTable classical_table_1d(int points = 16, double half_width = M_PI) {
    const SpectralGrid g = SpectralGrid::make(1, {points}, half_width);
    const SymbolTriple t = preset_symbol("classical_boussinesq_1");
    return PropagatorTable(g, t.L0, t.L1, t.L2);
}

NonlocalKernel random_small_kernel(double horizon, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < 0.5) {
        std::vector<NonlocalKernel::Atom> atoms;
        const int count = 1 + (unit(rng) < 0.5 ? 0 : 1);
        for (int i = 0; i < count; ++i)
            atoms.push_back({horizon * (0.1 + 0.8 * unit(rng)), (unit(rng) - 0.5) * 0.3 / count});
        return NonlocalKernel::atoms(horizon, atoms);
    }
    return NonlocalKernel::gaussian_bump(horizon, (unit(rng) - 0.5) * 0.3,
                                         horizon * (0.2 + 0.6 * unit(rng)), 0.15 * horizon, 65);
}

}  // namespace

TEST_CASE("kernel_integral") {
    const NonlocalKernel zero = NonlocalKernel::zero(1.0);
    CHECK(zero.integrate([](double) { return Complex{1.0, 0.0}; }) == Complex{0.0, 0.0});

    const double T = 2.0;
    const NonlocalKernel atom = NonlocalKernel::atoms(T, {{T / 2.0, 1.0}});
    CHECK(atom.integrate([](double s) { return Complex{s, 0.0}; }) == Complex{T / 2.0, 0.0});

    // Simpson is exact on sigma^2, and a refined rule must agree: the
    // refine-and-compare pair is the quadrature oracle.
    const NonlocalKernel ones = NonlocalKernel::constant(1.0, 1.0, 129);
    const Complex coarse = ones.integrate([](double s) { return Complex{s * s, 0.0}; });
    const Complex fine = ones.integrate_refined([](double s) { return Complex{s * s, 0.0}; }, 4);
    CHECK(std::abs(coarse - Complex{1.0 / 3.0, 0.0}) < 1e-12);
    CHECK(std::abs(coarse - fine) < 1e-12);
}

TEST_CASE("total variation") {
    const NonlocalKernel atoms = NonlocalKernel::atoms(1.0, {{0.2, 0.5}, {0.9, -0.25}});
    CHECK(atoms.total_variation() == doctest::Approx(0.75));
    const NonlocalKernel dens = NonlocalKernel::constant(1.0, -0.4, 65);
    CHECK(dens.total_variation() == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("check_admissibility") {
    const double T = 1.0;
    const NonlocalKernel zero = NonlocalKernel::zero(T);
    const Admissibility both_zero = check_admissibility(zero, zero);
    CHECK(both_zero.admissible);
    CHECK(both_zero.margin == doctest::Approx(1.0));

    const NonlocalKernel atom = NonlocalKernel::atoms(T, {{T / 2.0, 0.1}});
    const Admissibility one_atom = check_admissibility(atom, zero);
    CHECK(one_atom.margin == doctest::Approx(0.9));

    // Constants: int|alpha| = 0.6, int|beta| = 0.5, int alpha*beta = 0.3.
    const NonlocalKernel a = NonlocalKernel::constant(T, 0.6, 129);
    const NonlocalKernel b = NonlocalKernel::constant(T, 0.5, 129);
    const Admissibility c = check_admissibility(a, b);
    CHECK(c.margin == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(c.admissible);

    const NonlocalKernel other_horizon = NonlocalKernel::zero(2.0);
    CHECK_THROWS_AS(check_admissibility(atom, other_horizon), std::invalid_argument);
}

TEST_CASE("admissibility margin is monotone under joint scaling") {
    // With int(alpha*beta) >= 0, scaling both kernels by c in [0,1] cannot
    // decrease the margin.
    const double T = 1.0;
    double prev = -1.0;
    for (double c : {1.0, 0.75, 0.5, 0.25, 0.0}) {
        const NonlocalKernel a = NonlocalKernel::constant(T, 0.5 * c, 65);
        const NonlocalKernel b = NonlocalKernel::constant(T, 0.4 * c, 65);
        const double margin = check_admissibility(a, b).margin;
        if (prev >= -0.5) CHECK(margin >= prev - 1e-12);
        prev = margin;
    }
}

TEST_CASE("build_determinant reductions") {
    const PropagatorTable prop = classical_table_1d();
    const double T = 1.0;
    const NonlocalKernel zero = NonlocalKernel::zero(T);

    const DeterminantTable trivial = build_determinant(zero, zero, prop);
    for (std::size_t m = 0; m < trivial.size(); ++m)
        CHECK(trivial.det(m) == Complex{1.0, 0.0});  // exactly
    CHECK(trivial.min_abs_det() == 1.0);

    const NonlocalKernel alpha = NonlocalKernel::gaussian_bump(T, 0.2, 0.4, 0.15, 65);
    const DeterminantTable one_sided = build_determinant(alpha, zero, prop);
    for (std::size_t m = 0; m < one_sided.size(); ++m) {
        const Complex expected =
            1.0 - alpha.integrate([&](double s) { return cos_prop(prop, m, s); });
        CHECK(std::abs(one_sided.det(m) - expected) < 1e-14);
    }
}

TEST_CASE("determinant matches the expanded double-integral oracle") {
    std::mt19937_64 rng(41);
    const PropagatorTable prop = classical_table_1d();
    const double T = 1.0;
    for (int rep = 0; rep < 10; ++rep) {
        const NonlocalKernel alpha = random_small_kernel(T, rng);
        const NonlocalKernel beta = random_small_kernel(T, rng);
        const DeterminantTable table = build_determinant(alpha, beta, prop);
        for (std::size_t m = 0; m < table.size(); ++m) {
            // 1 - int (alpha+beta) C + int int C(sigma - tau) alpha beta,
            // the identity-free route.
            const Complex single =
                alpha.integrate([&](double s) { return cos_prop(prop, m, s); }) +
                beta.integrate([&](double s) { return cos_prop(prop, m, s); });
            const Complex cross = alpha.integrate([&](double sigma) {
                return beta.integrate(
                    [&](double tau) { return cos_prop(prop, m, sigma - tau); });
            });
            const Complex oracle = 1.0 - single + cross;
            CHECK(std::abs(table.det(m) - oracle) < 1e-9);
        }
    }
}

TEST_CASE("trig identity consistency across modes") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const PropagatorTable prop = classical_table_1d();
    const double T = 1.0;
    for (std::size_t m = 0; m < prop.size(); ++m) {
        for (int rep = 0; rep < 200; ++rep) {
            const double sigma = T * unit(rng);
            const double tau = T * unit(rng);
            const Complex c_s = cos_prop(prop, m, sigma);
            const Complex c_t = cos_prop(prop, m, tau);
            const Complex s_s = sin_prop(prop, m, sigma);
            const Complex s_t = sin_prop(prop, m, tau);
            const Complex lhs = c_s * c_t + prop.Q(m) * s_s * s_t;
            const Complex rhs = cos_prop(prop, m, sigma - tau);
            const double scale = std::max(
                {1.0, std::abs(c_s * c_t), std::abs(prop.Q(m) * s_s * s_t)});
            CHECK(std::abs(lhs - rhs) < 1e-9 * scale);
        }
    }
}

TEST_CASE("solve_initial_pair") {
    const PropagatorTable prop = classical_table_1d();
    const double T = 1.0;
    const NonlocalKernel zero = NonlocalKernel::zero(T);
    const DeterminantTable trivial = build_determinant(zero, zero, prop);

    // Classical reduction: data recovered bit-exactly.
    auto [u0, u1] = solve_initial_pair(trivial, 3, Complex{0.7, -0.2}, Complex{-1.1, 0.4});
    CHECK(u0 == Complex{0.7, -0.2});
    CHECK(u1 == Complex{-1.1, 0.4});

    auto [z0, z1] = solve_initial_pair(trivial, 0, Complex{0.0, 0.0}, Complex{0.0, 0.0});
    CHECK(z0 == Complex{0.0, 0.0});
    CHECK(z1 == Complex{0.0, 0.0});

    // Residual oracle: back-substitute into the original 2x2 relations.
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const NonlocalKernel alpha = random_small_kernel(T, rng);
        const NonlocalKernel beta = random_small_kernel(T, rng);
        const DeterminantTable table = build_determinant(alpha, beta, prop);
        for (std::size_t m = 0; m < table.size(); ++m) {
            const Complex f1{unit(rng), unit(rng)}, f2{unit(rng), unit(rng)};
            const auto [a, b] = solve_initial_pair(table, m, f1, f2);
            const ModeMoments& mm = table.moments(m);
            const Complex r1 = (1.0 - mm.a_c) * a - mm.a_s * b - f1;
            const Complex r2 = mm.b_qs * a + (1.0 - mm.b_c) * b - f2;
            const double scale = 1.0 + std::max(std::abs(f1), std::abs(f2));
            CHECK(std::abs(r1) < 1e-10 * scale);
            CHECK(std::abs(r2) < 1e-10 * scale);
        }
    }
}

TEST_CASE("atom weights below the margin bound keep the determinant away from zero") {
    const PropagatorTable prop = classical_table_1d();
    const double T = 1.0;
    const NonlocalKernel alpha = NonlocalKernel::atoms(T, {{0.3, 0.1}, {0.8, -0.05}});
    const NonlocalKernel beta = NonlocalKernel::atoms(T, {{0.5, 0.1}});
    const DeterminantTable table = build_determinant(alpha, beta, prop);
    const double bound = 1.0 - alpha.total_variation() - beta.total_variation();
    CHECK(bound > 0.0);
    CHECK(table.min_abs_det() >= bound - 1e-12);
}

TEST_CASE("build_rhs") {
    const PropagatorTable prop = classical_table_1d();
    const double T = 1.0;
    const std::size_t n = prop.size();
    const std::vector<Complex> phi_hat(n, Complex{0.5, 0.25});
    const std::vector<Complex> psi_hat(n, Complex{-0.3, 0.1});
    auto zero_phihat = [](std::size_t, double) { return Complex{0.0, 0.0}; };

    // Vanishing source: both right-hand sides reduce to the data.
    const NonlocalKernel alpha = NonlocalKernel::atoms(T, {{0.6, 0.2}});
    const NonlocalKernel beta = NonlocalKernel::atoms(T, {{0.4, -0.1}});
    const RhsPair plain = build_rhs(alpha, beta, prop, zero_phihat, phi_hat, psi_hat, 65);
    CHECK(plain.f1 == phi_hat);
    CHECK(plain.f2 == psi_hat);

    // Vanishing kernels: the data regardless of the source.
    const NonlocalKernel zerok = NonlocalKernel::zero(T);
    auto loud = [](std::size_t, double) { return Complex{10.0, -3.0}; };
    const RhsPair classical = build_rhs(zerok, zerok, prop, loud, phi_hat, psi_hat, 65);
    CHECK(classical.f1 == phi_hat);
    CHECK(classical.f2 == psi_hat);

    // Constant source kernel against the closed forms
    //   int_0^l S(l - tau) d tau = (1 - C(l))/Q,
    //   int_0^l C(l - tau) d tau = S(l).
    const Complex c{0.8, 0.0};
    auto constant = [&](std::size_t, double) { return c; };
    const RhsPair forced = build_rhs(alpha, beta, prop, constant, phi_hat, psi_hat, 129);
    for (std::size_t m = 0; m < n; ++m) {
        const Complex q = prop.Q(m);
        Complex inner_s;
        if (std::abs(q) > 1e-12)
            inner_s = (1.0 - cos_prop(prop, m, 0.6)) / q;
        else
            inner_s = Complex{0.6 * 0.6 / 2.0, 0.0};
        const Complex expected_f1 = phi_hat[m] + 0.2 * c * inner_s;
        const Complex expected_f2 = psi_hat[m] + (-0.1) * c * sin_prop(prop, m, 0.4);
        CHECK(std::abs(forced.f1[m] - expected_f1) < 1e-9);
        CHECK(std::abs(forced.f2[m] - expected_f2) < 1e-9);
    }
}

TEST_CASE("near-singular determinant is rejected with the offending frequency") {
    const PropagatorTable prop = classical_table_1d();
    // alpha with an atom of weight 1 at 0 makes alpha_11 = 1 - C(0) = 0 at
    // every mode, so D has a zero column product at beta = 0.
    const NonlocalKernel alpha = NonlocalKernel::atoms(1.0, {{0.0, 1.0}});
    const NonlocalKernel zero = NonlocalKernel::zero(1.0);
    CHECK_THROWS_AS(build_determinant(alpha, zero, prop), SingularDeterminantError);
}
