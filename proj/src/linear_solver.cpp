#include "bqs/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bqs/errors.hpp"
#include "bqs/quadrature.hpp"

namespace bqs {

SourceTerm SourceTerm::zero() { return SourceTerm(Kind::zero); }

SourceTerm SourceTerm::separable(SpectralField spatial_physical,
                                 std::function<Complex(double)> time_profile) {
    if (spatial_physical.domain() != Domain::physical)
        throw std::invalid_argument("separable source needs a physical spatial factor");
    SourceTerm s(Kind::separable);
    s.spatial_ = std::make_shared<SpectralField>(std::move(spatial_physical));
    s.time_ = std::move(time_profile);
    return s;
}

SourceTerm SourceTerm::callback(std::function<SpectralField(double)> physical_at) {
    SourceTerm s(Kind::callback);
    s.callback_ = std::move(physical_at);
    return s;
}

SourceTerm SourceTerm::modes(std::shared_ptr<const ModeSource> src) {
    SourceTerm s(Kind::modes);
    s.modes_ = std::move(src);
    return s;
}

std::shared_ptr<const ModeSource> SourceTerm::resolve() const {
    switch (kind_) {
        case Kind::zero:
            return std::make_shared<ZeroSource>();
        case Kind::separable:
            return std::make_shared<SeparableSource>(to_frequency(*spatial_).values(), time_);
        case Kind::callback:
            return std::make_shared<TransformingSource>(callback_);
        case Kind::modes:
            return modes_;
    }
    throw std::logic_error("unreachable");
}

LinearProblem::LinearProblem(SpectralGrid grid_, SymbolTriple symbols_, NonlocalKernel alpha_,
                             NonlocalKernel beta_, SpectralField phi_, SpectralField psi_,
                             SourceTerm source_, double horizon_,
                             std::vector<double> output_times_, SolverConfig config_)
    : grid(std::move(grid_)),
      symbols(std::move(symbols_)),
      alpha(std::move(alpha_)),
      beta(std::move(beta_)),
      phi(std::move(phi_)),
      psi(std::move(psi_)),
      source(std::move(source_)),
      horizon(horizon_),
      output_times(std::move(output_times_)),
      config(config_) {
    if (!(horizon > 0.0)) throw std::invalid_argument("problem horizon must be positive");
    if (!phi.grid().same_shape(grid) || !psi.grid().same_shape(grid))
        throw std::invalid_argument("phi/psi grids do not match the problem grid");
    if (phi.domain() != Domain::physical || psi.domain() != Domain::physical)
        throw std::invalid_argument("phi/psi must be physical-space fields");
    if (!std::is_sorted(output_times.begin(), output_times.end()))
        throw std::invalid_argument("output times must be sorted");
    for (double t : output_times)
        if (t < 0.0 || t > horizon + 1e-12)
            throw std::invalid_argument("output times must lie within [0, horizon]");
}

TransformedProblem transform_problem(const LinearProblem& p) {
    TransformedProblem out{to_frequency(p.phi).values(), to_frequency(p.psi).values(),
                           p.source.resolve()};
    return out;
}

Complex duhamel(const PropagatorTable& table, std::size_t mode, double t,
                const std::function<Complex(double)>& phihat, int nodes, DuhamelKind kind) {
    if (t == 0.0) return {0.0, 0.0};
    auto integrand = [&](double tau) {
        const Complex k = (kind == DuhamelKind::displacement) ? sin_prop(table, mode, t - tau)
                                                              : cos_prop(table, mode, t - tau);
        return k * phihat(tau);
    };
    return integrate_uniform(0.0, t, nodes, integrand);
}

Complex duhamel_adaptive(const PropagatorTable& table, std::size_t mode, double t,
                         const std::function<Complex(double)>& phihat, const SolverConfig& config,
                         DuhamelKind kind) {
    if (t == 0.0) return {0.0, 0.0};
    int nodes = config.duhamel_nodes;
    Complex prev = duhamel(table, mode, t, phihat, nodes, kind);
    if (!config.duhamel_adaptive) return prev;
    while (nodes < config.duhamel_max_nodes) {
        nodes = 2 * nodes - 1;
        const Complex next = duhamel(table, mode, t, phihat, nodes, kind);
        if (std::abs(next - prev) <= config.duhamel_rel_tol * std::max(1.0, std::abs(next)))
            return next;
        prev = next;
    }
    return prev;
}

namespace {

void gate_symbols(const LinearProblem& p) {
    const SymbolReport report = check_condition21(p.symbols.L0, p.symbols.L1, p.symbols.L2,
                                                  p.config.s, p.config.p, p.grid);
    if (!report.zero_hits.empty())
        throw AdmissibilityError::condition21(report.zero_hits.front(),
                                              "zero of L1 or of 1 + L0 on the grid");
}

void gate_kernels(const LinearProblem& p) {
    const Admissibility a = check_admissibility(p.alpha, p.beta);
    if (!a.admissible && !p.config.force) throw AdmissibilityError::lemma11(a.margin);
}

// Both gates must reject before any table is built.
const SpectralGrid& gated_grid(const LinearProblem& p) {
    gate_symbols(p);
    gate_kernels(p);
    return p.grid;
}

}  // namespace

LinearEngine::LinearEngine(const LinearProblem& p)
    : p_(p),
      prop_(gated_grid(p), p.symbols.L0, p.symbols.L1, p.symbols.L2),
      det_(build_determinant(p.alpha, p.beta, prop_, p.config.det_floor)),
      data_(transform_problem(p)),
      source_zero_(data_.ghat->is_zero()) {
    const std::size_t n = prop_.size();
    if (source_zero_ || (p.alpha.is_zero() && p.beta.is_zero())) {
        RhsPair rhs{data_.phi_hat, data_.psi_hat};
        u0_.resize(n);
        u1_.resize(n);
        for (std::size_t m = 0; m < n; ++m) {
            auto [a, b] = solve_initial_pair(det_, m, rhs.f1[m], rhs.f2[m]);
            u0_[m] = a;
            u1_[m] = b;
        }
    } else {
        auto phihat_fn = [this](std::size_t mode, double t) { return phihat(mode, t); };
        RhsPair rhs = build_rhs(p.alpha, p.beta, prop_, phihat_fn, data_.phi_hat, data_.psi_hat,
                                p.config.kernel_nodes);
        u0_.resize(n);
        u1_.resize(n);
        for (std::size_t m = 0; m < n; ++m) {
            auto [a, b] = solve_initial_pair(det_, m, rhs.f1[m], rhs.f2[m]);
            u0_[m] = a;
            u1_[m] = b;
        }
    }
}

// Duhamel forcing L(xi) ghat(xi, t): the convolution kernels S(t - tau) and
// C(t - tau) are applied by the integrators, so the pointwise factor is the
// plain forcing (the elapsed-time response L S(t) ghat is phi_kernel).
Complex LinearEngine::phihat(std::size_t mode, double t) const {
    return prop_.L(mode) * data_.ghat->eval(mode, t);
}

Complex LinearEngine::u_hat(std::size_t mode, double t) const {
    Complex duh{0.0, 0.0};
    if (!source_zero_) {
        auto f = [&](double tau) { return phihat(mode, tau); };
        duh = duhamel_adaptive(prop_, mode, t, f, p_.config, DuhamelKind::displacement);
    }
    return cos_prop(prop_, mode, t) * u0_[mode] + sin_prop(prop_, mode, t) * u1_[mode] + duh;
}

Complex LinearEngine::ut_hat(std::size_t mode, double t) const {
    Complex duh{0.0, 0.0};
    if (!source_zero_) {
        auto f = [&](double tau) { return phihat(mode, tau); };
        duh = duhamel_adaptive(prop_, mode, t, f, p_.config, DuhamelKind::velocity);
    }
    return ut_prop(prop_, mode, t, u0_[mode], u1_[mode], duh);
}

SpectralField LinearEngine::u_at(double t) const {
    SpectralField hat(p_.grid, Domain::frequency);
    for (std::size_t m = 0; m < prop_.size(); ++m) hat[m] = u_hat(m, t);
    return to_physical(hat);
}

SpectralField LinearEngine::ut_at(double t) const {
    SpectralField hat(p_.grid, Domain::frequency);
    for (std::size_t m = 0; m < prop_.size(); ++m) hat[m] = ut_hat(m, t);
    return to_physical(hat);
}

double LinearEngine::residual_initial_u() const {
    SpectralField res(p_.grid, Domain::frequency);
    for (std::size_t m = 0; m < prop_.size(); ++m) {
        const Complex condition = p_.alpha.integrate_refined(
            [&](double s) { return u_hat(m, s); }, p_.config.residual_refine);
        res[m] = u_hat(m, 0.0) - condition - data_.phi_hat[m];
    }
    return linf_norm(to_physical(res));
}

double LinearEngine::residual_initial_ut() const {
    SpectralField res(p_.grid, Domain::frequency);
    for (std::size_t m = 0; m < prop_.size(); ++m) {
        const Complex condition = p_.beta.integrate_refined(
            [&](double s) { return ut_hat(m, s); }, p_.config.residual_refine);
        res[m] = ut_hat(m, 0.0) - condition - data_.psi_hat[m];
    }
    return linf_norm(to_physical(res));
}

LinearSolution solve_linear(const LinearProblem& p) {
    LinearEngine engine(p);
    LinearSolution out;
    out.times = p.output_times;
    out.u.reserve(out.times.size());
    out.ut.reserve(out.times.size());
    for (double t : out.times) {
        out.u.push_back(engine.u_at(t));
        out.ut.push_back(engine.ut_at(t));
    }
    out.u0 = engine.u0();
    out.u1 = engine.u1();
    out.residual_u = engine.residual_initial_u();
    out.residual_ut = engine.residual_initial_ut();
    out.min_abs_det = engine.determinant().min_abs_det();
    return out;
}

namespace {

SpectralField apply_multiplier_solution(const LinearProblem& p, const SpectralField& datum,
                                        double t, bool first_operator) {
    gate_symbols(p);
    gate_kernels(p);
    PropagatorTable prop(p.grid, p.symbols.L0, p.symbols.L1, p.symbols.L2);
    DeterminantTable det = build_determinant(p.alpha, p.beta, prop, p.config.det_floor);
    SpectralField hat = to_frequency(datum);
    for (std::size_t m = 0; m < prop.size(); ++m) {
        const ModeMoments& mm = det.moments(m);
        const Complex c = cos_prop(prop, m, t);
        const Complex s = sin_prop(prop, m, t);
        const Complex mult = first_operator
                                 ? (c * (1.0 - mm.b_c) - s * mm.b_qs) / mm.det
                                 : (c * mm.a_s + s * (1.0 - mm.a_c)) / mm.det;
        hat[m] *= mult;
    }
    return to_physical(hat);
}

}  // namespace

SpectralField apply_S1(const LinearProblem& p, const SpectralField& phi, double t) {
    return apply_multiplier_solution(p, phi, t, true);
}

SpectralField apply_S2(const LinearProblem& p, const SpectralField& psi, double t) {
    return apply_multiplier_solution(p, psi, t, false);
}

}  // namespace bqs
