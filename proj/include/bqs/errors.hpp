#pragma once

#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bqs {

/// Base class for every failure the solver can diagnose.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
inline std::string format_xi(const std::vector<double>& xi) {
    std::ostringstream os;
    os << "(";
    for (std::size_t d = 0; d < xi.size(); ++d) {
        if (d) os << ", ";
        os << xi[d];
    }
    os << ")";
    return os.str();
}
}  // namespace detail

/// 1 + L0(xi) is within tolerance of zero, so Q and L cannot be formed.
class SymbolSingularityError : public SolverError {
public:
    SymbolSingularityError(std::vector<double> xi, std::complex<double> denom)
        : SolverError("symbol singularity: 1 + L0(xi) = " + std::to_string(denom.real()) +
                      (denom.imag() < 0 ? "-" : "+") + std::to_string(std::abs(denom.imag())) +
                      "i vanishes at xi = " + detail::format_xi(xi)),
          xi(std::move(xi)) {}
    std::vector<double> xi;
};

/// An input was rejected before solving. `hypothesis` names the violated
/// assumption ("Lemma 1.1" or "Condition 2.1"); the witness is either the
/// offending frequency or the admissibility margin.
class AdmissibilityError : public SolverError {
public:
    AdmissibilityError(std::string hypothesis_, std::string detail)
        : SolverError(hypothesis_ + " violated: " + detail), hypothesis(std::move(hypothesis_)) {}
    std::string hypothesis;
    std::vector<double> witness_xi;
    double margin = 0.0;

    static AdmissibilityError condition21(const std::vector<double>& xi, const std::string& which) {
        AdmissibilityError e("Condition 2.1", which + " at xi = " + detail::format_xi(xi));
        e.witness_xi = xi;
        return e;
    }
    static AdmissibilityError lemma11(double margin) {
        AdmissibilityError e("Lemma 1.1",
                             "|1 + int(alpha*beta)| - int(|alpha|+|beta|) = " + std::to_string(margin) +
                             " is not positive");
        e.margin = margin;
        return e;
    }
};

/// The per-mode determinant D(xi) fell below the solvable floor.
class SingularDeterminantError : public SolverError {
public:
    SingularDeterminantError(std::vector<double> xi, double abs_det, double floor)
        : SolverError("near-singular determinant: |D(xi)| = " + std::to_string(abs_det) +
                      " < " + std::to_string(floor) + " at xi = " + detail::format_xi(xi)),
          xi(std::move(xi)), abs_det(abs_det) {}
    std::vector<double> xi;
    double abs_det;
};

/// |Im(sqrt(Q) * t)| exceeded the overflow guard: the mode grows
/// hyperbolically past the representable range.
class HyperbolicGrowthError : public SolverError {
public:
    HyperbolicGrowthError(std::size_t mode, double t, double im_z)
        : SolverError("hyperbolic growth guard: |Im(sqrt(Q)*t)| = " + std::to_string(im_z) +
                      " at mode " + std::to_string(mode) + ", t = " + std::to_string(t)),
          mode(mode), t(t) {}
    std::size_t mode;
    double t;
};

}  // namespace bqs
