#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bqs/config_doc.hpp"
#include "bqs/nonlinear_solver.hpp"

namespace bqs {

struct SymbolFile {
    int n = 1;
    SymbolTriple symbols;
};

/// Symbol definition file: top-level `n`, `convention`, and either
/// `preset = <name>` or [L0]/[L1]/[L2] sections whose repeated `term` keys
/// carry `alpha = [..], re = .., im = ..` entries.
SymbolFile load_symbols(const std::string& path);

struct KernelFile {
    double horizon = 1.0;
    std::optional<NonlocalKernel> alpha, beta;  // zero kernels when absent
};

/// Kernel definition file: top-level `horizon`; [alpha]/[beta] sections with
/// `type = zero|atoms|density`, atoms via repeated `atom = location = .., weight = ..`
/// entries, densities via a registry form (constant, linear, gaussian-bump)
/// or explicit `values = [..]`.
KernelFile load_kernels(const std::string& path);

struct LoadedProblem {
    SpectralGrid grid;
    SymbolTriple symbols;
    NonlocalKernel alpha, beta;
    SpectralField phi, psi;
    SourceTerm source;
    double horizon = 1.0;
    std::vector<double> output_times;
    SolverConfig config;
    std::optional<std::string> nonlinearity;  // e.g. "quadratic" or "linear(0.5)"
    NonlinearControls controls;

    LinearProblem linear() const;
    NonlinearProblem nonlinear() const;
};

/// Full problem file; relative `symbols`/`kernels` paths resolve against the
/// problem file's directory.
LoadedProblem load_problem(const std::string& path);

/// Parses "name" or "name(param)" registry syntax.
Nonlinearity parse_nonlinearity(const std::string& text);

// Binary field snapshots: magic "BQF1", u8 dimension, u32 points per dim,
// then f64 little-endian interleaved re/im site values.
void write_snapshot(const std::string& path, const SpectralField& field);

struct RawSnapshot {
    int n = 0;
    std::vector<int> points;
    std::vector<Complex> values;
};
RawSnapshot read_snapshot(const std::string& path);

void write_norms_csv(const std::string& path, const std::vector<double>& times,
                     const std::vector<SpectralField>& u, const std::vector<SpectralField>& ut,
                     double s, double p);
void write_diagnostics_csv(const std::string& path, const LinearSolution& sol);
void write_run_csv(const std::string& path, const NonlinearRun& run);
void write_termination_record(const std::string& path, const NonlinearRun& run);

}  // namespace bqs
