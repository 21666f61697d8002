#include "bqs/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bqs/errors.hpp"

namespace bqs {

OperatorSymbol::OperatorSymbol(int n, SymbolConvention convention)
    : n_(n), convention_(convention) {
    if (n < 1 || n > 3) throw std::invalid_argument("symbol dimension must be 1, 2 or 3");
}

OperatorSymbol& OperatorSymbol::add_term(const std::vector<int>& alpha, Complex coeff) {
    if (static_cast<int>(alpha.size()) != n_)
        throw std::invalid_argument("multi-index length does not match symbol dimension");
    for (int a : alpha)
        if (a < 0) throw std::invalid_argument("multi-index entries must be nonnegative");
    auto it = terms_.find(alpha);
    if (it == terms_.end()) {
        if (coeff != Complex{0.0, 0.0}) terms_.emplace(alpha, coeff);
    } else {
        it->second += coeff;
        if (it->second == Complex{0.0, 0.0}) terms_.erase(it);
    }
    return *this;
}

int OperatorSymbol::order() const {
    int m = 0;
    for (const auto& [alpha, c] : terms_) {
        int total = 0;
        for (int a : alpha) total += a;
        m = std::max(m, total);
    }
    return m;
}

OperatorSymbol OperatorSymbol::zero(int n) { return OperatorSymbol(n); }

OperatorSymbol OperatorSymbol::constant(int n, Complex c) {
    OperatorSymbol s(n);
    s.add_term(std::vector<int>(n, 0), c);
    return s;
}

OperatorSymbol OperatorSymbol::neg_laplacian(int n) {
    OperatorSymbol s(n);
    for (int d = 0; d < n; ++d) {
        std::vector<int> alpha(n, 0);
        alpha[d] = 2;
        s.add_term(alpha, Complex{-1.0, 0.0});
    }
    return s;
}

OperatorSymbol OperatorSymbol::identity_minus_laplacian(int n) {
    OperatorSymbol s = neg_laplacian(n);
    s.add_term(std::vector<int>(n, 0), Complex{1.0, 0.0});
    return s;
}

OperatorSymbol OperatorSymbol::biharmonic_plus_identity(int n) {
    // Delta^2 = sum_d D_d^4 + 2 sum_{d<e} D_d^2 D_e^2; fourier symbol 1 + |xi|^4.
    OperatorSymbol s(n);
    s.add_term(std::vector<int>(n, 0), Complex{1.0, 0.0});
    for (int d = 0; d < n; ++d) {
        std::vector<int> alpha(n, 0);
        alpha[d] = 4;
        s.add_term(alpha, Complex{1.0, 0.0});
    }
    for (int d = 0; d < n; ++d)
        for (int e = d + 1; e < n; ++e) {
            std::vector<int> alpha(n, 0);
            alpha[d] = 2;
            alpha[e] = 2;
            s.add_term(alpha, Complex{2.0, 0.0});
        }
    return s;
}

Complex eval_symbol(const OperatorSymbol& sym, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != sym.dim())
        throw std::invalid_argument("frequency vector length does not match symbol dimension");
    const bool fourier = sym.convention() == SymbolConvention::fourier;
    Complex total{0.0, 0.0};
    for (const auto& [alpha, coeff] : sym.terms()) {
        Complex mono{1.0, 0.0};
        for (int d = 0; d < sym.dim(); ++d) {
            const Complex base = fourier ? Complex{0.0, xi[d]} : Complex{xi[d], 0.0};
            for (int k = 0; k < alpha[d]; ++k) mono *= base;
        }
        total += coeff * mono;
    }
    return total;
}

double symbol_zero_tolerance(const OperatorSymbol& sym, const SpectralGrid& grid, bool plus_one) {
    double max_abs = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const auto xi = grid.xi(m);
        Complex v = eval_symbol(sym, xi);
        if (plus_one) v += 1.0;
        max_abs = std::max(max_abs, std::abs(v));
    }
    return 1e-12 * (1.0 + max_abs);
}

QLValue compute_QL(const OperatorSymbol& L0, const OperatorSymbol& L1, const OperatorSymbol& L2,
                   std::span<const double> xi, double eps_den) {
    const Complex denom = 1.0 + eval_symbol(L0, xi);
    if (std::abs(denom) <= eps_den)
        throw SymbolSingularityError(std::vector<double>(xi.begin(), xi.end()), denom);
    return QLValue{eval_symbol(L1, xi) / denom, eval_symbol(L2, xi) / denom};
}

SymbolReport check_condition21(const OperatorSymbol& L0, const OperatorSymbol& L1,
                               const OperatorSymbol& L2, double s, double p,
                               const SpectralGrid& grid) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must lie in (1, inf)");
    const double gap = s - grid.dim() / p;
    if (!(gap > 0.0)) throw std::invalid_argument("Condition 2.1 requires s > n/p");

    const double eps_l1 = symbol_zero_tolerance(L1, grid, false);
    const double eps_l0 = symbol_zero_tolerance(L0, grid, true);
    const double eps_l2 = symbol_zero_tolerance(L2, grid, false);

    SymbolReport report;
    report.s = s;
    report.p = p;

    double worst_fit = -1.0;
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const auto xi = grid.xi(m);
        const Complex v0 = 1.0 + eval_symbol(L0, xi);
        const Complex v1 = eval_symbol(L1, xi);
        const Complex v2 = eval_symbol(L2, xi);

        if (std::abs(v0) <= eps_l0) {
            report.zero_hits.push_back(xi);
            continue;
        }
        const bool l1_zero = std::abs(v1) <= eps_l1;
        if (l1_zero && std::abs(v2) > eps_l2) {
            report.zero_hits.push_back(xi);
            continue;
        }

        const Complex q = v1 / v0;
        const Complex l = v2 / v0;
        const double growth = std::pow(1.0 + std::sqrt(grid.xi_norm_sq(m)), gap);
        const double fit1 = std::sqrt(std::abs(q)) / growth;
        report.M1_est = std::max(report.M1_est, fit1);
        double fit2 = 0.0;
        if (!l1_zero) {
            fit2 = std::abs(l) / std::sqrt(std::abs(q)) / growth;
            report.M2_est = std::max(report.M2_est, fit2);
            report.M1_inv_est = std::max(report.M1_inv_est, 1.0 / std::sqrt(std::abs(q)) / growth);
        }
        if (std::max(fit1, fit2) > worst_fit) {
            worst_fit = std::max(fit1, fit2);
            report.worst_xi = xi;
        }
    }

    report.admissible = report.zero_hits.empty() && std::isfinite(report.M1_est) &&
                        std::isfinite(report.M2_est);
    if (!report.zero_hits.empty()) report.worst_xi = report.zero_hits.front();
    return report;
}

bool degree_heuristic(int m0, int m1, int m2, double s, double p, int n) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must lie in (1, inf)");
    const double bound = 2.0 * (s - n / p);
    return (m0 - m1) <= bound && (m2 - m1) <= bound;
}

namespace {

OperatorSymbol from_terms(int n, int max_order, const TermList& terms) {
    OperatorSymbol s(n);
    for (const auto& [alpha, coeff] : terms) {
        int total = 0;
        for (int a : alpha) total += a;
        if (total > max_order)
            throw std::invalid_argument("preset override exceeds the preset's operator order");
        s.add_term(alpha, coeff);
    }
    return s;
}

}  // namespace

SymbolTriple preset_symbol(const std::string& name, const TermList& l0_terms,
                           const TermList& l1_terms, const TermList& l2_terms) {
    int n = 0;
    int m0 = 0, m1 = 0, m2 = 0;
    OperatorSymbol d0(1), d1(1), d2(1);
    if (name == "classical_boussinesq_1" || name == "classical_boussinesq_2" ||
        name == "classical_boussinesq_3") {
        n = name.back() - '0';
        m0 = m1 = m2 = 2;
        d0 = d1 = d2 = OperatorSymbol::neg_laplacian(n);
    } else if (name == "app1_2d") {
        n = 2;
        m0 = m1 = m2 = 2;
        d0 = d1 = d2 = OperatorSymbol::identity_minus_laplacian(n);
    } else if (name == "app2_3d") {
        n = 3;
        m0 = m1 = m2 = 4;
        d0 = d1 = d2 = OperatorSymbol::biharmonic_plus_identity(n);
    } else if (name == "app3_mixed") {
        n = 3;
        m0 = 4;
        m1 = 2;
        m2 = 4;
        d0 = OperatorSymbol::biharmonic_plus_identity(n);
        d1 = OperatorSymbol::identity_minus_laplacian(n);
        d2 = OperatorSymbol::biharmonic_plus_identity(n);
    } else {
        throw std::invalid_argument("unknown symbol preset: " + name);
    }

    SymbolTriple triple{d0, d1, d2};
    if (!l0_terms.empty()) triple.L0 = from_terms(n, m0, l0_terms);
    if (!l1_terms.empty()) triple.L1 = from_terms(n, m1, l1_terms);
    if (!l2_terms.empty()) triple.L2 = from_terms(n, m2, l2_terms);
    return triple;
}

}  // namespace bqs
