#include "pertspec/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "pertspec/errors.hpp"

namespace pertspec {

namespace {

// (P_n(x), P_{n-1}(x)) by the three-term recurrence.
std::pair<double, double> legendre_pair(std::size_t n, double x) {
    double prev = 1.0, cur = x;
    for (std::size_t k = 2; k <= n; ++k) {
        const double next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / static_cast<double>(k);
        prev = cur;
        cur = next;
    }
    return {cur, prev};
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n) {
    if (n == 0) throw DimensionError("gauss_legendre: zero nodes");
    QuadratureRule rule;
    rule.nodes.assign(n, 0.5);
    rule.weights.assign(n, 1.0);
    if (n == 1) return rule;
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            const auto [pn, pm] = legendre_pair(n, x);
            dp = dn * (x * pn - pm) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const auto [pn, pm] = legendre_pair(n, x);
        dp = dn * (x * pn - pm) / (x * x - 1.0);
        const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // half the [-1,1] weight
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

const QuadratureRule& cached_gauss_legendre(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
    return it->second;  // map nodes are stable, so the reference outlives the lock
}

std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> nodes,
                                                  int max_order) {
    const std::size_t n = nodes.size();
    const auto m = static_cast<std::size_t>(max_order);
    if (n == 0 || max_order < 0) throw DimensionError("fornberg_weights: empty stencil");
    // c[k][j]: weight of node j for derivative k.
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

std::vector<double> simpson_weights(std::size_t points) {
    if (points < 2) throw DimensionError("simpson_weights: need at least two samples");
    const std::size_t intervals = points - 1;
    const double h = 1.0 / static_cast<double>(intervals);
    std::vector<double> w(points, 0.0);
    if (intervals == 1) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    std::size_t simpson_end = intervals;
    if (intervals % 2 == 1) {
        // 3/8 rule on the final three intervals.
        simpson_end = intervals - 3;
        const double f = 3.0 * h / 8.0;
        w[simpson_end] += f;
        w[simpson_end + 1] += 3.0 * f;
        w[simpson_end + 2] += 3.0 * f;
        w[simpson_end + 3] += f;
    }
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    return w;
}

std::pair<double, double> halton2(std::size_t index) {
    auto radical_inverse = [](std::size_t i, std::size_t base) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= static_cast<double>(base);
            r += f * static_cast<double>(i % base);
            i /= base;
        }
        return r;
    };
    return {radical_inverse(index, 2), radical_inverse(index, 3)};
}

}  // namespace pertspec
