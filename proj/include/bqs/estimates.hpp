#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bqs/linear_solver.hpp"

namespace bqs {

struct TrialRecord {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool skipped = false;
    std::string note;
};

struct EstimateReport {
    std::vector<TrialRecord> trials;
    double max_ratio = 0.0;
    double refined_max_ratio = 0.0;  // same trial family, grid doubled once
    bool stable = false;             // max ratio moved by < 20%
};

enum class EstimateKind {
    sup_norm,      // Linf of u, u_t against Y^{s,p} + L1 data norms
    sobolev_norm,  // Y^{s,p} on both sides
};

/// Samples a seeded family of admissible problems (gaussian data, small
/// random kernels, optional separable sources) on `base_grid`, records the
/// estimate ratios, and repeats the same family on a doubled grid.
EstimateReport verify_estimate(EstimateKind kind, int trials, std::uint64_t seed,
                               const SpectralGrid& base_grid, const SolverConfig& config);

inline EstimateReport verify_thm21(int trials, std::uint64_t seed, const SpectralGrid& grid,
                                   const SolverConfig& config = {}) {
    return verify_estimate(EstimateKind::sup_norm, trials, seed, grid, config);
}

inline EstimateReport verify_thm22(int trials, std::uint64_t seed, const SpectralGrid& grid,
                                   const SolverConfig& config = {}) {
    return verify_estimate(EstimateKind::sobolev_norm, trials, seed, grid, config);
}

struct NirenbergResult {
    double lhs = 0.0;   // sup over |a| = i of ||D^a u||_r
    double rhs = 0.0;   // ||u||_p^(1-mu) * sum_k ||D_k^m u||_q^mu
    double c_est = 0.0; // frozen reference-family constant for these exponents
    bool ok = false;    // lhs <= c_est * rhs
};

/// Interpolation-inequality check with spectral derivatives. Requires the
/// exponent relation 1/r = i/n + mu(1/q - m/n) + (1-mu)/p to 1e-12 and
/// i/m <= mu <= 1.
NirenbergResult nirenberg_check(const SpectralField& u, int i, int m, double p, double q,
                                double r, double mu);

}  // namespace bqs
