#pragma once

// Independent checks of the characteristic-function spectra: a
// finite-difference discretization of the perturbed operator and grid
// residuals of reconstructed eigenfunctions.

#include <cstddef>
#include <vector>

#include "pertspec/catalog.hpp"
#include "pertspec/linop.hpp"
#include "pertspec/types.hpp"

namespace pertspec {

/// Discrete shadow of the perturbed operator on the grid s_i = i h, h = 1/n.
/// The boundary rows have been eliminated, so `matrix` acts on the values
/// at the nodes listed in `kept`.
struct Discretization {
    std::size_t n = 0;
    double h = 0.0;
    ComplexMatrix matrix;
    std::vector<std::size_t> kept;
    std::vector<std::size_t> eliminated;
    ProblemKind kind;
    Functionals psi;
};

/// Second-order finite differences for the differential expression; the
/// conditions Psi f = 0 (and any domain constraints) are imposed with 5-node
/// one-sided stencils and eliminated. Throws InapplicableError for delayed
/// functionals or a singular endpoint block, UnsupportedKindError for
/// non-Dirichlet kinds.
Discretization fd_discretize(const ProblemKind& kind, const Functionals& psi, std::size_t n);

/// Eigenvalues of M inside `window`, each certified by inverse iteration:
/// ||(M - lambda) v|| < 1e-8 ||M|| for a unit vector v. Throws
/// ConvergenceError when the eigensolver fails or a value cannot be
/// certified.
std::vector<Complex> dense_eigenvalues(const ComplexMatrix& m, const Rectangle& window);

/// ||(M - lambda) v||_2 for the unit vector v produced by inverse iteration.
double inverse_iteration_residual(const ComplexMatrix& m, Complex lambda);

struct EigenResidual {
    double ode = 0.0;  ///< max |(lambda - A_m) f| over the grid
    double bc = 0.0;   ///< max |Psi_i f| and domain-constraint violations
};

/// Residuals of a candidate eigenfunction, normalized so that max |f| = 1
/// over `points` equispaced grid points.
EigenResidual eigen_residual(const ProblemKind& kind, const Functionals& psi, Complex lambda,
                             const HoloCurve& f, std::size_t points);

/// Element of `values` nearest to `target`; throws Error when empty.
Complex nearest(const std::vector<Complex>& values, Complex target);

}  // namespace pertspec
