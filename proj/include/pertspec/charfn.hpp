#pragma once

// Characteristic matrices and scalar characteristic functions of the
// catalog problems, eigenvector / eigenfunction recovery and the perturbed
// resolvent of d/ds.

#include <functional>
#include <optional>
#include <vector>

#include "pertspec/catalog.hpp"
#include "pertspec/linop.hpp"
#include "pertspec/types.hpp"

namespace pertspec {

struct Tolerances {
    double root = 1e-10;
    double residual = 1e-7;
    bool operator==(const Tolerances&) const = default;
};

/// A problem kind together with its boundary coupling, search region and
/// tolerances.
///
/// For Dirichlet kinds `psi` has one functional per boundary dimension. The
/// two delayed kinds may leave it empty, in which case their catalog
/// coupling (heat_delay_psi / convection_delay_psi) is used. Delay systems
/// and pencils take no functionals.
struct ProblemSpec {
    ProblemKind kind = FirstDerivative{};
    Functionals psi;
    Rectangle region{{-1.0, -1.0}, {1.0, 1.0}};
    Tolerances tolerances;

    /// Throws ValidationError / DimensionError when an invariant is violated.
    void validate() const;
    /// psi, or the catalog default for the delayed kinds.
    Functionals effective_psi() const;
    /// True when F(conj z) = conj F(z) is guaranteed.
    bool real_data() const;

    bool operator==(const ProblemSpec&) const = default;
};

/// lambda -> F(lambda) together with lambda -> M(lambda), where F = det M.
class CharFunction {
public:
    using ValueFn = std::function<Complex(Complex)>;
    using MatrixFn = std::function<ComplexMatrix(Complex)>;

    CharFunction(ValueFn value, MatrixFn matrix, std::optional<ProblemSpec> spec = std::nullopt);

    /// Scalar function; its matrix is the 1x1 matrix [F(lambda)].
    static CharFunction from_scalar(ValueFn value);
    static CharFunction from_spec(const ProblemSpec& spec);

    Complex operator()(Complex lambda) const { return value_(lambda); }
    ComplexMatrix matrix(Complex lambda) const { return matrix_(lambda); }
    const std::optional<ProblemSpec>& spec() const { return spec_; }

private:
    ValueFn value_;
    MatrixFn matrix_;
    std::optional<ProblemSpec> spec_;
};

/// Phi L_lambda for Dirichlet kinds: entry (i, j) = Phi_i(f_j).
ComplexMatrix delta_matrix(const ProblemSpec& spec, Complex lambda);

/// The matrix whose determinant is char_value: Id - Delta for Dirichlet
/// kinds, the delay or pencil matrix otherwise.
ComplexMatrix characteristic_matrix(const ProblemSpec& spec, Complex lambda);

/// F(lambda). The delayed heat problem uses its scalar closed form.
Complex char_value(const ProblemSpec& spec, Complex lambda);

/// det(Id - Phi L_lambda) from the generic m x m assembly, for every
/// Dirichlet kind (including the delayed ones).
Complex char_value_generic(const ProblemSpec& spec, Complex lambda);

/// det(Id - Phi L_lambda) assembled as the Schur complement of a block
/// matrix that keeps the delayed part of Phi in its own block.
Complex char_value_block_route(const ProblemSpec& spec, Complex lambda);

/// (1 - cosh sqrt(z)) / z, entire with value -1/2 at 0.
Complex heat_integral_factor(Complex z);

/// cosh sqrt(lambda) - sum_j w_j e^{lambda r_j} (1 - cosh sqrt(lambda)) / lambda.
Complex heat_delay_closed_form(const BoundaryDelayHeat& heat, Complex lambda);

/// e^{-lambda} - l(0) + l'(0) for the convection-diffusion Dirichlet curve l.
Complex convection_delay_direct(const ConvectionDiffusion& cd, Complex lambda);

/// lambda Id - A - sum_k A_k e^{-lambda tau_k}.
ComplexMatrix delay_char_matrix(const DelaySystem& d, Complex lambda);

/// lambda^2 Id - lambda P - A.
ComplexMatrix pencil_char_matrix(const QuadraticPencil& q, Complex lambda);

/// [[0, Id], [A, P]]; its eigenvalues are the zeros of det Q.
ComplexMatrix pencil_companion(const QuadraticPencil& q);

/// Central complex difference with step 1e-6 (1 + |lambda|) along the real
/// and imaginary axes, averaged.
Complex numeric_derivative(const CharFunction& f, Complex lambda);

/// Hadamard bound (product of row 2-norms) of a square matrix; a natural
/// magnitude against which |det| is judged.
double determinant_scale(const ComplexMatrix& m);

/// Basis of ker M(lambda); NotARootError when |F(lambda)| exceeds the
/// root tolerance times the determinant scale.
std::vector<CVector> kernel_vectors(const ProblemSpec& spec, Complex lambda);

/// f = sum_j x_j f_j for the Dirichlet basis at lambda.
HoloCurve eigenfunction(const ProblemSpec& spec, Complex lambda, const CVector& x);

/// Size of the summands of M(lambda) for delay systems and pencils, e.g.
/// |lambda| + ||A|| + sum_k |e^{-lambda tau_k}| ||A_k||. M itself is nearly
/// zero at a root, so residuals are measured against this instead.
double characteristic_scale(const ProblemSpec& spec, Complex lambda);

/// ||M x||_inf / (scale ||x||_inf), the certification used for kinds
/// without eigenfunctions.
double kernel_residual(const ComplexMatrix& m, const CVector& x, double scale);

struct ResolventResult {
    SampledFunction value;        ///< R(lambda, A + ...) g from the first formula
    SampledFunction second_form;  ///< (Id - L_lambda Phi)^{-1} R(lambda, A) g
    double form_difference = 0.0; ///< max |value - second_form|
    double ode_residual = 0.0;    ///< max |lambda f - f' - g|
    double bc_residual = 0.0;     ///< max_i |Psi_i f|
};

/// Perturbed resolvent applied to sampled g, for FirstDerivative specs.
/// Throws ResolventUndefinedError when lambda is a root.
ResolventResult resolvent_value(const ProblemSpec& spec, Complex lambda, const SampledFunction& g);

}  // namespace pertspec
