#pragma once

// Small numerical building blocks shared by the catalog, the root scanner
// and the finite-difference oracle.

#include <cstddef>
#include <span>
#include <vector>

#include "pertspec/types.hpp"

namespace pertspec {

/// Nodes and weights of a quadrature rule on [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    /// Highest polynomial degree integrated exactly.
    std::size_t design_degree() const { return nodes.empty() ? 0 : 2 * nodes.size() - 1; }
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
QuadratureRule gauss_legendre(std::size_t n);

/// Shared instance for n in {4, 8, 16, 32, 64}; other n are computed on demand
/// and cached for the life of the process.
const QuadratureRule& cached_gauss_legendre(std::size_t n);

/// Finite-difference weights (Fornberg) for derivatives 0..max_order at x0
/// from values at `nodes`. Result[k][j] multiplies f(nodes[j]) for f^(k)(x0).
std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> nodes,
                                                  int max_order);

/// Composite Simpson weights for `points` equispaced samples on [0, 1]
/// (3/8 rule on the last panel when the interval count is odd).
std::vector<double> simpson_weights(std::size_t points);

/// Point `index` of the 2D Halton sequence (bases 2 and 3) in [0,1)^2.
std::pair<double, double> halton2(std::size_t index);

}  // namespace pertspec
