#pragma once

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bqs/grid.hpp"

namespace bqs {

/// Interpretation of the coefficient table during evaluation: `plain` sums
/// a_alpha * xi^alpha; `fourier` sums a_alpha * (i*xi)^alpha so that the
/// derivative D^alpha maps to the expected multiplier.
enum class SymbolConvention { plain, fourier };

/// Constant-coefficient differential operator Sum_{|alpha| <= m} a_alpha D^alpha,
/// kept as its multi-index coefficient table. Immutable in practice: build with
/// add_term, then only evaluate.
class OperatorSymbol {
public:
    OperatorSymbol() : OperatorSymbol(1) {}  // the empty 1-d symbol
    explicit OperatorSymbol(int n, SymbolConvention convention = SymbolConvention::fourier);

    /// Accumulates `coeff` onto the multi-index `alpha`; exact-zero totals are pruned.
    OperatorSymbol& add_term(const std::vector<int>& alpha, Complex coeff);

    int dim() const { return n_; }
    SymbolConvention convention() const { return convention_; }
    /// Highest |alpha| over stored terms (0 for the empty symbol).
    int order() const;
    const std::map<std::vector<int>, Complex>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    /// The usual named operators.
    static OperatorSymbol zero(int n);
    static OperatorSymbol constant(int n, Complex c);
    static OperatorSymbol neg_laplacian(int n);      // -Delta
    static OperatorSymbol identity_minus_laplacian(int n);
    static OperatorSymbol biharmonic_plus_identity(int n);  // I + Delta^2

private:
    int n_;
    SymbolConvention convention_;
    std::map<std::vector<int>, Complex> terms_;
};

/// Frequency polynomial of `sym` at xi.
Complex eval_symbol(const OperatorSymbol& sym, std::span<const double> xi);

struct QLValue {
    Complex Q;  // L1(xi) / (1 + L0(xi))
    Complex L;  // L2(xi) / (1 + L0(xi))
};

/// Relative zero tolerance used for L1(xi) and 1+L0(xi):
/// 1e-12 * (1 + max over the grid of the quantity's magnitude).
double symbol_zero_tolerance(const OperatorSymbol& sym, const SpectralGrid& grid, bool plus_one);

QLValue compute_QL(const OperatorSymbol& L0, const OperatorSymbol& L1, const OperatorSymbol& L2,
                   std::span<const double> xi, double eps_den);

struct SymbolReport {
    bool admissible = false;
    std::vector<double> worst_xi;  // tightest fit, or the first violation
    double M1_est = 0.0;           // smallest M1 with |Q^(1/2)| <= M1 (1+|xi|)^(s-n/p)
    double M2_est = 0.0;           // smallest M2 with |L Q^(-1/2)| <= M2 (1+|xi|)^(s-n/p)
    double M1_inv_est = 0.0;       // fit of |Q^(-1/2)| over modes with Q != 0 (reported only)
    std::vector<std::vector<double>> zero_hits;
    double s = 0.0;
    double p = 0.0;
};

/// Scans every grid frequency for the Condition 2.1 bounds and zero conditions.
/// A zero of L1 counts as a hit only where L2 does not vanish with it; shared
/// zeros are removable for the solver and skipped in the M2 fit.
SymbolReport check_condition21(const OperatorSymbol& L0, const OperatorSymbol& L1,
                               const OperatorSymbol& L2, double s, double p,
                               const SpectralGrid& grid);

/// Order heuristic: m0-m1 <= 2(s-n/p) and m2-m1 <= 2(s-n/p).
bool degree_heuristic(int m0, int m1, int m2, double s, double p, int n);

struct SymbolTriple {
    OperatorSymbol L0, L1, L2;
};

using TermList = std::vector<std::pair<std::vector<int>, Complex>>;

/// Built-in scenarios: classical_boussinesq_{1,2,3} (all operators -Delta),
/// app1_2d (order-2 family on R^2), app2_3d (order-4 family on R^3),
/// app3_mixed (orders 4, 2, 4 on R^3). Nonempty override lists replace the
/// free coefficient tables; they must respect the preset's dimension and order.
SymbolTriple preset_symbol(const std::string& name, const TermList& l0_terms = {},
                           const TermList& l1_terms = {}, const TermList& l2_terms = {});

}  // namespace bqs
