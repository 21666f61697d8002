#include "bqs/manufactured.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "bqs/errors.hpp"

namespace bqs {

TimeProfile TimeProfile::cosine(double omega, double phase) {
    TimeProfile p;
    p.q = [omega, phase](double t) { return Complex{std::cos(omega * t + phase), 0.0}; };
    p.dq = [omega, phase](double t) { return Complex{-omega * std::sin(omega * t + phase), 0.0}; };
    p.d2q = [omega, phase](double t) {
        return Complex{-omega * omega * std::cos(omega * t + phase), 0.0};
    };
    return p;
}

TimeProfile TimeProfile::polynomial(std::vector<double> coeffs) {
    auto horner = [](const std::vector<double>& c, double t) {
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
        return acc;
    };
    std::vector<double> d1, d2;
    for (std::size_t k = 1; k < coeffs.size(); ++k) d1.push_back(k * coeffs[k]);
    for (std::size_t k = 1; k < d1.size(); ++k) d2.push_back(k * d1[k]);
    TimeProfile p;
    p.q = [coeffs, horner](double t) { return Complex{horner(coeffs, t), 0.0}; };
    p.dq = [d1, horner](double t) { return Complex{horner(d1, t), 0.0}; };
    p.d2q = [d2, horner](double t) { return Complex{horner(d2, t), 0.0}; };
    return p;
}

ManufacturedSolution::ManufacturedSolution(std::vector<ManufacturedMode> modes)
    : modes_(std::move(modes)) {
    if (modes_.empty() == false)
        for (const auto& m : modes_)
            if (m.index.empty()) throw std::invalid_argument("manufactured mode needs an index");
}

std::size_t ManufacturedSolution::flat_index(const SpectralGrid& grid,
                                             const std::vector<int>& index) const {
    if (static_cast<int>(index.size()) != grid.dim())
        throw std::invalid_argument("manufactured mode index does not match the grid dimension");
    std::vector<int> storage(grid.dim());
    for (int d = 0; d < grid.dim(); ++d) {
        const int N = grid.points()[d];
        int j = index[d];
        if (j < -N / 2 || j >= N / 2)
            throw std::invalid_argument("manufactured mode is not representable on the grid");
        storage[d] = (j >= 0) ? j : j + N;
    }
    return grid.ravel(storage);
}

SpectralField ManufacturedSolution::u_at(const SpectralGrid& grid, double t) const {
    SpectralField hat(grid, Domain::frequency);
    for (const auto& m : modes_) hat[flat_index(grid, m.index)] += m.amplitude * m.profile.q(t);
    return to_physical(hat);
}

SpectralField ManufacturedSolution::ut_at(const SpectralGrid& grid, double t) const {
    SpectralField hat(grid, Domain::frequency);
    for (const auto& m : modes_) hat[flat_index(grid, m.index)] += m.amplitude * m.profile.dq(t);
    return to_physical(hat);
}

namespace {

class SparseModeSource final : public ModeSource {
public:
    explicit SparseModeSource(std::map<std::size_t, std::function<Complex(double)>> entries)
        : entries_(std::move(entries)) {}
    Complex eval(std::size_t mode, double t) const override {
        auto it = entries_.find(mode);
        return (it == entries_.end()) ? Complex{0.0, 0.0} : it->second(t);
    }
    bool is_zero() const override { return entries_.empty(); }

private:
    std::map<std::size_t, std::function<Complex(double)>> entries_;
};

}  // namespace

std::shared_ptr<const ModeSource> ManufacturedSolution::forcing(
    const SpectralGrid& grid, const SymbolTriple& symbols) const {
    std::map<std::size_t, std::function<Complex(double)>> entries;
    const double eps2 = symbol_zero_tolerance(symbols.L2, grid, false);
    for (const auto& m : modes_) {
        const std::size_t flat = flat_index(grid, m.index);
        const auto xi = grid.xi(flat);
        const Complex denom0 = 1.0 + eval_symbol(symbols.L0, xi);
        const Complex v1 = eval_symbol(symbols.L1, xi);
        const Complex v2 = eval_symbol(symbols.L2, xi);
        const Complex amp = m.amplitude;
        if (std::abs(v2) <= eps2) {
            // Only admissible when this mode is unforced: (1+L0) q'' + L1 q = 0.
            const Complex probe = denom0 * m.profile.d2q(0.0) + v1 * m.profile.q(0.0);
            if (std::abs(amp) * std::abs(probe) > 1e-10)
                throw SolverError("manufactured mode requires forcing where L2(xi) = 0");
            continue;
        }
        auto profile = m.profile;
        entries[flat] = [denom0, v1, v2, amp, profile](double t) {
            return amp * (denom0 * profile.d2q(t) + v1 * profile.q(t)) / v2;
        };
    }
    return std::make_shared<SparseModeSource>(std::move(entries));
}

namespace {

double solve_error(const SpectralGrid& grid, const SymbolTriple& symbols, double horizon,
                   const ManufacturedSolution& exact, const SolverConfig& config) {
    const std::vector<double> times{0.0, horizon / 4.0, horizon / 2.0, 3.0 * horizon / 4.0,
                                    horizon};
    LinearProblem problem(grid, symbols, NonlocalKernel::zero(horizon),
                          NonlocalKernel::zero(horizon), exact.u_at(grid, 0.0),
                          exact.ut_at(grid, 0.0),
                          SourceTerm::modes(exact.forcing(grid, symbols)), horizon, times,
                          config);
    const LinearSolution sol = solve_linear(problem);
    double err = 0.0;
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        const SpectralField ref = exact.u_at(grid, sol.times[i]);
        SpectralField diff = sol.u[i];
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= ref[k];
        err = std::max(err, linf_norm(diff));
    }
    return err;
}

}  // namespace

ManufacturedReport manufactured_residual(const SpectralGrid& grid, const SymbolTriple& symbols,
                                         double horizon, const ManufacturedSolution& exact,
                                         SolverConfig config,
                                         const std::vector<int>& duhamel_node_sweep) {
    ManufacturedReport report;
    report.max_linf_error = solve_error(grid, symbols, horizon, exact, config);

    if (!duhamel_node_sweep.empty()) {
        SolverConfig fixed = config;
        fixed.duhamel_adaptive = false;
        for (int nodes : duhamel_node_sweep) {
            fixed.duhamel_nodes = nodes;
            report.node_errors.emplace_back(nodes,
                                            solve_error(grid, symbols, horizon, exact, fixed));
        }
        // Least-squares slope of log2(error) against log2(h) ~ -log2(nodes).
        if (report.node_errors.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int count = 0;
            for (const auto& [nodes, err] : report.node_errors) {
                if (err <= 0.0) continue;
                const double x = std::log2(static_cast<double>(nodes - 1));
                const double y = std::log2(err);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                ++count;
            }
            if (count >= 2)
                report.richardson_order = -(count * sxy - sx * sy) / (count * sxx - sx * sx);
        }
    }
    return report;
}

}  // namespace bqs
