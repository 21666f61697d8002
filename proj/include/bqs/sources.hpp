#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "bqs/grid.hpp"

namespace bqs {

/// Frequency-space source ghat(xi, t), evaluable at any t in the problem
/// horizon. Implementations must be safe for concurrent reads.
class ModeSource {
public:
    virtual ~ModeSource() = default;
    virtual Complex eval(std::size_t mode, double t) const = 0;
    virtual bool is_zero() const { return false; }
};

class ZeroSource final : public ModeSource {
public:
    Complex eval(std::size_t, double) const override { return {0.0, 0.0}; }
    bool is_zero() const override { return true; }
};

/// Separable g(x,t) = X(x) q(t): one transform of the spatial factor,
/// scalar time profile afterwards.
class SeparableSource final : public ModeSource {
public:
    SeparableSource(std::vector<Complex> spatial_hat, std::function<Complex(double)> time_profile)
        : coeffs_(std::move(spatial_hat)), time_(std::move(time_profile)) {}
    Complex eval(std::size_t mode, double t) const override { return coeffs_[mode] * time_(t); }

private:
    std::vector<Complex> coeffs_;
    std::function<Complex(double)> time_;
};

/// General physical-space source: transforms g(.,t) lazily at each requested
/// t and caches the coefficients (synchronized fill, concurrent reads).
class TransformingSource final : public ModeSource {
public:
    explicit TransformingSource(std::function<SpectralField(double)> physical_at)
        : physical_at_(std::move(physical_at)) {}

    Complex eval(std::size_t mode, double t) const override {
        std::scoped_lock lock(mu_);
        auto it = cache_.find(t);
        if (it == cache_.end()) {
            it = cache_.emplace(t, to_frequency(physical_at_(t)).values()).first;
        }
        return it->second[mode];
    }

private:
    std::function<SpectralField(double)> physical_at_;
    mutable std::mutex mu_;
    mutable std::map<double, std::vector<Complex>> cache_;
};

/// Trajectory sampled on uniform time nodes, evaluated anywhere by cubic
/// (4-point Lagrange) interpolation. Exact at the nodes.
class SampledSource final : public ModeSource {
public:
    /// values[k] holds the per-mode coefficients at node t0 + k*dt.
    SampledSource(double t0, double dt, std::vector<std::vector<Complex>> values);
    Complex eval(std::size_t mode, double t) const override;

private:
    double t0_, dt_;
    std::vector<std::vector<Complex>> values_;
};

}  // namespace bqs
