#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bqs {

using Complex = std::complex<double>;

enum class Domain { physical, frequency };

/// Periodic lattice on [-L, L)^n with its frequency bookkeeping.
///
/// Axis d carries points[d] sites x_j = -L_d + j*h_d, h_d = 2*L_d/points[d],
/// and wavenumbers xi = pi*k/L_d for the signed index k in [-N/2, N/2),
/// stored in the usual FFT order (0, 1, ..., N/2-1, -N/2, ..., -1).
/// Immutable after construction.
class SpectralGrid {
public:
    static SpectralGrid make(int n, std::vector<int> points, double half_width);
    static SpectralGrid make(int n, std::vector<int> points, std::vector<double> half_widths);

    int dim() const { return n_; }
    const std::vector<int>& points() const { return points_; }
    const std::vector<double>& half_widths() const { return half_widths_; }
    std::size_t size() const { return size_; }

    double spacing(int axis) const { return 2.0 * half_widths_[axis] / points_[axis]; }
    double cell_volume() const;
    double volume() const;

    /// Wavenumber table of one axis, FFT storage order.
    const std::vector<double>& wavenumbers(int axis) const { return wavenumbers_[axis]; }

    /// Per-axis storage indices of flat site/mode `flat` (row-major, last axis fastest).
    std::array<int, 3> unravel(std::size_t flat) const;
    std::size_t ravel(std::span<const int> idx) const;

    /// Frequency vector of mode `flat`.
    std::vector<double> xi(std::size_t flat) const;
    double xi_norm_sq(std::size_t flat) const;
    /// Physical coordinates of site `flat`.
    std::vector<double> coordinate(std::size_t flat) const;

    bool same_shape(const SpectralGrid& other) const;

private:
    SpectralGrid() = default;
    int n_ = 0;
    std::vector<int> points_;
    std::vector<double> half_widths_;
    std::vector<std::vector<double>> wavenumbers_;
    std::size_t size_ = 0;
};

/// Complex lattice function tagged as physical- or frequency-space samples.
class SpectralField {
public:
    SpectralField(SpectralGrid grid, Domain domain);
    SpectralField(SpectralGrid grid, Domain domain, std::vector<Complex> values);

    const SpectralGrid& grid() const { return grid_; }
    Domain domain() const { return domain_; }
    std::vector<Complex>& values() { return values_; }
    const std::vector<Complex>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    Complex& operator[](std::size_t i) { return values_[i]; }
    const Complex& operator[](std::size_t i) const { return values_[i]; }

    bool all_finite() const;

private:
    SpectralGrid grid_;
    Domain domain_;
    std::vector<Complex> values_;
};

/// Forward transform: mode amplitudes, normalized so that cos(k.x) maps to
/// coefficients of 1/2 at +-k. Requires a physical-space field.
SpectralField to_frequency(const SpectralField& f);

/// Inverse of to_frequency. Requires a frequency-space field.
SpectralField to_physical(const SpectralField& f);

/// Build a physical field from point samples of a callable (x -> Complex).
template <typename F>
SpectralField sample_field(const SpectralGrid& grid, F&& f) {
    SpectralField out(grid, Domain::physical);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.coordinate(i));
    return out;
}

}  // namespace bqs
