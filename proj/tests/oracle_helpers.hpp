#pragma once

// Independent reference implementations used as test oracles. These must not
// share code paths with the library routines they are checking.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bqs/grid.hpp"
#include "bqs/nonlinear_solver.hpp"
#include "bqs/propagator.hpp"

namespace bqs::testing {

// Direct O(N^2) discrete Fourier sum with the library's normalization:
// uhat_j = (1/N) sum_i u(x_i) exp(-i xi_j . x_i).
inline std::vector<Complex> naive_dft(const SpectralField& f) {
    const SpectralGrid& g = f.grid();
    const std::size_t n = g.size();
    std::vector<Complex> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto xi = g.xi(j);
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = g.coordinate(i);
            double phase = 0.0;
            for (int d = 0; d < g.dim(); ++d) phase += xi[d] * x[d];
            acc += f[i] * std::polar(1.0, -phase);
        }
        out[j] = acc / static_cast<double>(n);
    }
    return out;
}

// Inverse: u(x_i) = sum_j uhat_j exp(+i xi_j . x_i).
inline std::vector<Complex> naive_idft(const SpectralField& f) {
    const SpectralGrid& g = f.grid();
    const std::size_t n = g.size();
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = g.coordinate(i);
        Complex acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const auto xi = g.xi(j);
            double phase = 0.0;
            for (int d = 0; d < g.dim(); ++d) phase += xi[d] * x[d];
            acc += f[j] * std::polar(1.0, phase);
        }
        out[i] = acc;
    }
    return out;
}

inline SpectralField random_field(const SpectralGrid& grid, std::mt19937_64& rng,
                                  bool complex_values = true) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    SpectralField f(grid, Domain::physical);
    for (auto& v : f.values())
        v = Complex{unit(rng), complex_values ? unit(rng) : 0.0};
    return f;
}

// Smooth real random field: a few low modes with random amplitudes, so
// spectral derivatives stay well resolved.
inline SpectralField random_smooth_field(const SpectralGrid& grid, std::mt19937_64& rng,
                                         int max_mode = 3, double amplitude = 1.0) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::pair<std::vector<int>, double>> modes;
    for (int rep = 0; rep < 4; ++rep) {
        std::vector<int> k(grid.dim());
        for (int d = 0; d < grid.dim(); ++d)
            k[d] = static_cast<int>(std::round(unit(rng) * max_mode));
        modes.emplace_back(k, unit(rng) * amplitude);
    }
    return sample_field(grid, [&](const std::vector<double>& x) {
        double acc = 0.0;
        for (const auto& [k, a] : modes) {
            double phase = 0.0;
            for (int d = 0; d < grid.dim(); ++d)
                phase += M_PI * k[d] / grid.half_widths()[d] * x[d];
            acc += a * std::cos(phase);
        }
        return Complex{acc, 0.0};
    });
}

// Classical RK4 on the per-mode system (1 + L0) uhat_tt + L1 uhat = L2 fhat(u),
// i.e. uhat' = vhat, vhat' = L fhat(u) - Q uhat, with the nonlinearity applied
// pointwise in physical space each stage. Classical Cauchy data.
struct Rk4State {
    std::vector<Complex> u, v;
};

inline Rk4State rk4_frequency_oracle(const SpectralGrid& grid, const PropagatorTable& prop,
                                     const Nonlinearity& f, std::vector<Complex> u_hat0,
                                     std::vector<Complex> v_hat0, double t_end, int steps) {
    const std::size_t n = grid.size();
    auto rhs = [&](const std::vector<Complex>& u_hat, std::vector<Complex>& acc) {
        SpectralField hat(grid, Domain::frequency, u_hat);
        SpectralField phys = to_physical(hat);
        for (auto& w : phys.values()) w = f.f(w);
        const std::vector<Complex> fhat = to_frequency(phys).values();
        for (std::size_t m = 0; m < n; ++m) acc[m] = prop.L(m) * fhat[m] - prop.Q(m) * u_hat[m];
    };

    Rk4State s{std::move(u_hat0), std::move(v_hat0)};
    const double h = t_end / steps;
    std::vector<Complex> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int step = 0; step < steps; ++step) {
        // k1
        rhs(s.u, k1);
        // k2
        for (std::size_t m = 0; m < n; ++m) tmp[m] = s.u[m] + 0.5 * h * s.v[m];
        rhs(tmp, k2);
        // k3 (velocity midpoint uses k1)
        for (std::size_t m = 0; m < n; ++m)
            tmp[m] = s.u[m] + 0.5 * h * (s.v[m] + 0.5 * h * k1[m]);
        rhs(tmp, k3);
        // k4
        for (std::size_t m = 0; m < n; ++m) tmp[m] = s.u[m] + h * (s.v[m] + 0.5 * h * k2[m]);
        rhs(tmp, k4);

        for (std::size_t m = 0; m < n; ++m) {
            const Complex du = s.v[m] + (h / 6.0) * (k1[m] + k2[m] + k3[m]);
            const Complex dv = (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]) / 6.0;
            s.u[m] += h * du;
            s.v[m] += h * dv;
        }
    }
    return s;
}

inline double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
    return max_abs_diff(a.values(), b.values());
}

}  // namespace bqs::testing
