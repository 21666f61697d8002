#include "bqs/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "bqs/errors.hpp"

namespace bqs {

SpectralGrid SpectralGrid::make(int n, std::vector<int> points, double half_width) {
    return make(n, std::move(points), std::vector<double>(static_cast<std::size_t>(n), half_width));
}

SpectralGrid SpectralGrid::make(int n, std::vector<int> points, std::vector<double> half_widths) {
    if (n < 1 || n > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
    if (static_cast<int>(points.size()) != n || static_cast<int>(half_widths.size()) != n)
        throw std::invalid_argument("points/half_width lists must have one entry per dimension");
    for (int p : points) {
        if (p < 4) throw std::invalid_argument("grid needs at least 4 points per dimension");
        if (p % 2 != 0) throw std::invalid_argument("points per dimension must be even");
    }
    for (double L : half_widths)
        if (!(L > 0.0)) throw std::invalid_argument("half_width must be positive");

    SpectralGrid g;
    g.n_ = n;
    g.points_ = std::move(points);
    g.half_widths_ = std::move(half_widths);
    g.size_ = 1;
    g.wavenumbers_.resize(n);
    for (int d = 0; d < n; ++d) {
        const int N = g.points_[d];
        g.size_ *= static_cast<std::size_t>(N);
        auto& w = g.wavenumbers_[d];
        w.resize(N);
        const double base = M_PI / g.half_widths_[d];
        for (int j = 0; j < N; ++j) {
            const int signed_j = (j < N / 2) ? j : j - N;
            w[j] = base * signed_j;
        }
    }
    return g;
}

double SpectralGrid::cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < n_; ++d) v *= spacing(d);
    return v;
}

double SpectralGrid::volume() const {
    double v = 1.0;
    for (int d = 0; d < n_; ++d) v *= 2.0 * half_widths_[d];
    return v;
}

std::array<int, 3> SpectralGrid::unravel(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int d = n_ - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(flat % points_[d]);
        flat /= points_[d];
    }
    return idx;
}

std::size_t SpectralGrid::ravel(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (int d = 0; d < n_; ++d) flat = flat * points_[d] + static_cast<std::size_t>(idx[d]);
    return flat;
}

std::vector<double> SpectralGrid::xi(std::size_t flat) const {
    const auto idx = unravel(flat);
    std::vector<double> out(n_);
    for (int d = 0; d < n_; ++d) out[d] = wavenumbers_[d][idx[d]];
    return out;
}

double SpectralGrid::xi_norm_sq(std::size_t flat) const {
    const auto idx = unravel(flat);
    double s = 0.0;
    for (int d = 0; d < n_; ++d) {
        const double w = wavenumbers_[d][idx[d]];
        s += w * w;
    }
    return s;
}

std::vector<double> SpectralGrid::coordinate(std::size_t flat) const {
    const auto idx = unravel(flat);
    std::vector<double> x(n_);
    for (int d = 0; d < n_; ++d) x[d] = -half_widths_[d] + idx[d] * spacing(d);
    return x;
}

bool SpectralGrid::same_shape(const SpectralGrid& other) const {
    return n_ == other.n_ && points_ == other.points_ && half_widths_ == other.half_widths_;
}

SpectralField::SpectralField(SpectralGrid grid, Domain domain)
    : grid_(std::move(grid)), domain_(domain), values_(grid_.size(), Complex{0.0, 0.0}) {}

SpectralField::SpectralField(SpectralGrid grid, Domain domain, std::vector<Complex> values)
    : grid_(std::move(grid)), domain_(domain), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("field value count does not match grid size");
}

bool SpectralField::all_finite() const {
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

namespace {

// FFTW plans are cached per (shape, direction); plan creation is not
// thread-safe, execution on caller buffers is. FFTW_UNALIGNED makes the
// cached plan valid for any buffer pair.
class PlanCache {
public:
    fftw_plan get(const std::vector<int>& dims, int sign) {
        std::scoped_lock lock(mu_);
        auto key = std::make_pair(dims, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::size_t total = 1;
        for (int d : dims) total *= static_cast<std::size_t>(d);
        std::vector<Complex> in(total), out(total);
        fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(),
                                       reinterpret_cast<fftw_complex*>(in.data()),
                                       reinterpret_cast<fftw_complex*>(out.data()), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fftw_plan_dft failed");
        plans_.emplace(std::move(key), plan);
        return plan;
    }

private:
    std::mutex mu_;
    std::map<std::pair<std::vector<int>, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void run_fft(const SpectralGrid& grid, const std::vector<Complex>& in, std::vector<Complex>& out,
             int sign) {
    fftw_plan plan = plan_cache().get(grid.points(), sign);
    // fftw_execute_dft does not modify the input for out-of-place c2c plans,
    // but takes non-const pointers.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

// The physical grid starts at -L, not 0, which shows up as a per-mode phase
// (-1)^(sum of storage indices) relative to the plain DFT.
double site_phase(const SpectralGrid& grid, std::size_t flat) {
    const auto idx = grid.unravel(flat);
    int s = 0;
    for (int d = 0; d < grid.dim(); ++d) s += idx[d];
    return (s % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

SpectralField to_frequency(const SpectralField& f) {
    if (f.domain() != Domain::physical)
        throw std::invalid_argument("to_frequency requires a physical-space field");
    SpectralField out(f.grid(), Domain::frequency);
    run_fft(f.grid(), f.values(), out.values(), FFTW_FORWARD);
    const double inv_n = 1.0 / static_cast<double>(f.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] *= site_phase(f.grid(), j) * inv_n;
    return out;
}

SpectralField to_physical(const SpectralField& f) {
    if (f.domain() != Domain::frequency)
        throw std::invalid_argument("to_physical requires a frequency-space field");
    std::vector<Complex> staged(f.values());
    for (std::size_t j = 0; j < staged.size(); ++j) staged[j] *= site_phase(f.grid(), j);
    SpectralField out(f.grid(), Domain::physical);
    run_fft(f.grid(), staged, out.values(), FFTW_BACKWARD);
    return out;
}

}  // namespace bqs
