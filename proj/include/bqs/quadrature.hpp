#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bqs {

/// Composite quadrature weights for `nodes` uniform points spanning [a, b]:
/// Simpson when the interval count is even, trapezoid otherwise.
inline std::vector<double> uniform_weights(double a, double b, int nodes) {
    if (nodes < 2) throw std::invalid_argument("quadrature needs at least 2 nodes");
    const double h = (b - a) / (nodes - 1);
    std::vector<double> w(nodes);
    if ((nodes - 1) % 2 == 0) {
        w.front() = w.back() = h / 3.0;
        for (int i = 1; i < nodes - 1; ++i) w[i] = (i % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
    } else {
        w.front() = w.back() = h / 2.0;
        for (int i = 1; i < nodes - 1; ++i) w[i] = h;
    }
    return w;
}

/// Integrates f over [a, b] on `nodes` uniform points.
template <typename F>
auto integrate_uniform(double a, double b, int nodes, F&& f) -> decltype(f(a) * 1.0) {
    const auto w = uniform_weights(a, b, nodes);
    const double h = (b - a) / (nodes - 1);
    decltype(f(a) * 1.0) total{};
    for (int i = 0; i < nodes; ++i) total += w[i] * f(a + i * h);
    return total;
}

/// Weights for integrating over the prefix [t_0, t_k] of a uniform node grid
/// with spacing h; returned weights pair with node values 0..k (0..2 when
/// k == 1, where a parabola through the first three nodes is used). Composite
/// Simpson for even k, a 3/8 head plus Simpson for odd k >= 3. All rules are
/// 4th-order accurate, so the frozen-node Duhamel stencil keeps one order.
inline std::vector<double> prefix_weights(int k, double h) {
    if (k < 0) throw std::invalid_argument("prefix_weights needs k >= 0");
    if (k == 0) return {};
    if (k == 1) return {h * 5.0 / 12.0, h * 8.0 / 12.0, -h / 12.0};
    std::vector<double> w;
    int start = 0;
    if (k % 2 == 1) {
        w.assign(4, 0.0);
        const double c = 3.0 * h / 8.0;
        w[0] += c;
        w[1] += 3.0 * c;
        w[2] += 3.0 * c;
        w[3] += c;
        start = 3;
    } else {
        w.assign(1, 0.0);
    }
    w.resize(k + 1, 0.0);
    for (int i = start; i + 2 <= k; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    return w;
}

}  // namespace bqs
