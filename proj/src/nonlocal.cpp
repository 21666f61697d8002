#include "bqs/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bqs/errors.hpp"
#include "bqs/quadrature.hpp"

namespace bqs {

NonlocalKernel NonlocalKernel::zero(double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("kernel horizon must be positive");
    return NonlocalKernel(horizon, true);  // empty atom list: integrals are exactly 0
}

NonlocalKernel NonlocalKernel::density(double horizon, std::vector<double> values) {
    if (!(horizon > 0.0)) throw std::invalid_argument("kernel horizon must be positive");
    if (values.size() < 2) throw std::invalid_argument("density kernel needs at least 2 nodes");
    NonlocalKernel k(horizon, false);
    k.density_ = std::move(values);
    return k;
}

NonlocalKernel NonlocalKernel::atoms(double horizon, std::vector<Atom> atoms) {
    if (!(horizon > 0.0)) throw std::invalid_argument("kernel horizon must be positive");
    for (const auto& a : atoms)
        if (a.location < 0.0 || a.location > horizon)
            throw std::invalid_argument("atom location outside [0, T]");
    NonlocalKernel k(horizon, true);
    k.atoms_ = std::move(atoms);
    return k;
}

namespace {

std::vector<double> sample_closed_form(const std::function<double(double)>& f, double horizon,
                                       int nodes) {
    std::vector<double> v(nodes);
    for (int i = 0; i < nodes; ++i) v[i] = f(horizon * i / (nodes - 1));
    return v;
}

}  // namespace

NonlocalKernel NonlocalKernel::constant(double horizon, double value, int nodes) {
    auto form = [value](double) { return value; };
    NonlocalKernel k = density(horizon, sample_closed_form(form, horizon, nodes));
    k.closed_form_ = form;
    return k;
}

NonlocalKernel NonlocalKernel::linear(double horizon, double a, double b, int nodes) {
    auto form = [a, b](double s) { return a + b * s; };
    NonlocalKernel k = density(horizon, sample_closed_form(form, horizon, nodes));
    k.closed_form_ = form;
    return k;
}

NonlocalKernel NonlocalKernel::gaussian_bump(double horizon, double amplitude, double center,
                                             double width, int nodes) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian bump width must be positive");
    auto form = [amplitude, center, width](double s) {
        const double z = (s - center) / width;
        return amplitude * std::exp(-0.5 * z * z);
    };
    NonlocalKernel k = density(horizon, sample_closed_form(form, horizon, nodes));
    k.closed_form_ = form;
    return k;
}

bool NonlocalKernel::is_zero() const {
    if (is_atoms_) {
        for (const auto& a : atoms_)
            if (a.weight != 0.0) return false;
        return true;
    }
    return std::all_of(density_.begin(), density_.end(), [](double v) { return v == 0.0; });
}

double NonlocalKernel::value_at(double sigma) const {
    if (is_atoms_) throw std::logic_error("value_at is only defined for density kernels");
    if (closed_form_) return closed_form_(sigma);
    const int n = nodes();
    const double h = horizon_ / (n - 1);
    double s = sigma / h;
    int j = static_cast<int>(std::floor(s));
    j = std::clamp(j, 0, n - 2);
    const double frac = std::clamp(s - j, 0.0, 1.0);
    return density_[j] * (1.0 - frac) + density_[j + 1] * frac;
}

double NonlocalKernel::total_variation() const {
    if (is_atoms_) {
        double s = 0.0;
        for (const auto& a : atoms_) s += std::abs(a.weight);
        return s;
    }
    const auto w = uniform_weights(0.0, horizon_, nodes());
    double s = 0.0;
    for (int i = 0; i < nodes(); ++i) s += w[i] * std::abs(density_[i]);
    return s;
}

Complex NonlocalKernel::integrate(const std::function<Complex(double)>& g) const {
    if (is_atoms_) {
        Complex total{0.0, 0.0};
        for (const auto& a : atoms_) total += a.weight * g(a.location);
        return total;
    }
    const auto w = uniform_weights(0.0, horizon_, nodes());
    const double h = horizon_ / (nodes() - 1);
    Complex total{0.0, 0.0};
    for (int i = 0; i < nodes(); ++i) total += w[i] * density_[i] * g(i * h);
    return total;
}

Complex NonlocalKernel::integrate_refined(const std::function<Complex(double)>& g,
                                          int refine) const {
    if (is_atoms_ || refine <= 1) return integrate(g);
    const int n = (nodes() - 1) * refine + 1;
    const auto w = uniform_weights(0.0, horizon_, n);
    const double h = horizon_ / (n - 1);
    Complex total{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        const double s = i * h;
        total += w[i] * value_at(s) * g(s);
    }
    return total;
}

namespace {

// int alpha(s) beta(s) ds for any representation pairing: quadrature of the
// product for two densities, the density evaluated at the other kernel's
// atoms for mixed pairs, and products of weights at coincident locations for
// two atomic kernels.
double kernel_product_integral(const NonlocalKernel& alpha, const NonlocalKernel& beta) {
    if (!alpha.is_atoms() && !beta.is_atoms()) {
        const int n = std::max(alpha.nodes(), beta.nodes());
        const auto w = uniform_weights(0.0, alpha.horizon(), n);
        const double h = alpha.horizon() / (n - 1);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double s = i * h;
            total += w[i] * alpha.value_at(s) * beta.value_at(s);
        }
        return total;
    }
    if (alpha.is_atoms() && beta.is_atoms()) {
        double total = 0.0;
        for (const auto& a : alpha.atom_list())
            for (const auto& b : beta.atom_list())
                if (std::abs(a.location - b.location) <= 1e-14 * (1.0 + alpha.horizon()))
                    total += a.weight * b.weight;
        return total;
    }
    const NonlocalKernel& atom_side = alpha.is_atoms() ? alpha : beta;
    const NonlocalKernel& dens_side = alpha.is_atoms() ? beta : alpha;
    double total = 0.0;
    for (const auto& a : atom_side.atom_list()) total += a.weight * dens_side.value_at(a.location);
    return total;
}

}  // namespace

Admissibility check_admissibility(const NonlocalKernel& alpha, const NonlocalKernel& beta) {
    if (std::abs(alpha.horizon() - beta.horizon()) > 1e-14 * (1.0 + alpha.horizon()))
        throw std::invalid_argument("alpha and beta kernels must share one horizon");
    const double cross = kernel_product_integral(alpha, beta);
    const double margin =
        std::abs(1.0 + cross) - (alpha.total_variation() + beta.total_variation());
    return Admissibility{margin > 0.0, margin};
}

DeterminantTable::DeterminantTable(std::vector<ModeMoments> moments, const SpectralGrid& grid,
                                   double det_floor)
    : moments_(std::move(moments)) {
    min_abs_det_ = std::numeric_limits<double>::infinity();
    argmin_ = 0;
    for (std::size_t m = 0; m < moments_.size(); ++m) {
        const double a = std::abs(moments_[m].det);
        if (a < min_abs_det_) {
            min_abs_det_ = a;
            argmin_ = m;
        }
    }
    if (min_abs_det_ < det_floor)
        throw SingularDeterminantError(grid.xi(argmin_), min_abs_det_, det_floor);
}

DeterminantTable build_determinant(const NonlocalKernel& alpha, const NonlocalKernel& beta,
                                   const PropagatorTable& prop, double det_floor) {
    std::vector<ModeMoments> mm(prop.size());
    const bool alpha_zero = alpha.is_zero();
    const bool beta_zero = beta.is_zero();
    for (std::size_t m = 0; m < prop.size(); ++m) {
        ModeMoments& mom = mm[m];
        if (!alpha_zero) {
            mom.a_c = alpha.integrate([&](double s) { return cos_prop(prop, m, s); });
            mom.a_s = alpha.integrate([&](double s) { return sin_prop(prop, m, s); });
        }
        if (!beta_zero) {
            mom.b_c = beta.integrate([&](double s) { return cos_prop(prop, m, s); });
            mom.b_qs =
                beta.integrate([&](double s) { return prop.Q(m) * sin_prop(prop, m, s); });
        }
        mom.det = (1.0 - mom.a_c) * (1.0 - mom.b_c) + mom.a_s * mom.b_qs;
    }
    return DeterminantTable(std::move(mm), prop.grid(), det_floor);
}

std::pair<Complex, Complex> solve_initial_pair(const DeterminantTable& table, std::size_t mode,
                                               Complex f1, Complex f2) {
    const ModeMoments& m = table.moments(mode);
    const Complex u0 = ((1.0 - m.b_c) * f1 + m.a_s * f2) / m.det;
    const Complex u1 = ((1.0 - m.a_c) * f2 - m.b_qs * f1) / m.det;
    return {u0, u1};
}

RhsPair build_rhs(const NonlocalKernel& alpha, const NonlocalKernel& beta,
                  const PropagatorTable& prop,
                  const std::function<Complex(std::size_t, double)>& phihat,
                  const std::vector<Complex>& phi_hat, const std::vector<Complex>& psi_hat,
                  int inner_nodes) {
    RhsPair out;
    out.f1 = phi_hat;
    out.f2 = psi_hat;
    const bool alpha_zero = alpha.is_zero();
    const bool beta_zero = beta.is_zero();
    if (alpha_zero && beta_zero) return out;

    for (std::size_t m = 0; m < prop.size(); ++m) {
        if (!alpha_zero) {
            out.f1[m] += alpha.integrate([&](double sigma) -> Complex {
                if (sigma == 0.0) return {0.0, 0.0};
                return integrate_uniform(0.0, sigma, inner_nodes, [&](double tau) {
                    return sin_prop(prop, m, sigma - tau) * phihat(m, tau);
                });
            });
        }
        if (!beta_zero) {
            out.f2[m] += beta.integrate([&](double sigma) -> Complex {
                if (sigma == 0.0) return {0.0, 0.0};
                return integrate_uniform(0.0, sigma, inner_nodes, [&](double tau) {
                    return cos_prop(prop, m, sigma - tau) * phihat(m, tau);
                });
            });
        }
    }
    return out;
}

}  // namespace bqs
