#pragma once

// Problem catalog: maximal operators on [0, 1], boundary functionals and the
// closed-form Dirichlet operators L_lambda of each problem kind, exposed as
// curves that are entire in lambda.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "pertspec/linop.hpp"
#include "pertspec/types.hpp"

namespace pertspec {

// ---------------------------------------------------------------------------
// Problem kinds

/// d/ds on [0, 1] with L = delta_0.
struct FirstDerivative {
    bool operator==(const FirstDerivative&) const = default;
};

/// d^2/ds^2 on [0, 1] with L = (delta_0, delta'_0).
struct SecondDerivative {
    bool operator==(const SecondDerivative&) const = default;
};

/// d^2/ds^2 - 2c d/ds + k on {f'(1) = 0} with L = delta_1. Boundary feedback
/// from the history segment is expressed with delayed functional terms.
struct ConvectionDiffusion {
    Complex c;
    Complex k;
    bool operator==(const ConvectionDiffusion&) const = default;
};

/// Atom of the delay measure: mass `w` at history position `r` in [-1, 0].
struct DelayAtom {
    double r = -1.0;
    Complex w{1.0, 0.0};
    bool operator==(const DelayAtom&) const = default;
};

/// Heat equation on {f(1) = 0} with L = delta'_1 and nonlocal delayed
/// Neumann condition f'(0) = sum_j w_j * int_0^1 v(r_j, s) ds.
struct BoundaryDelayHeat {
    std::vector<DelayAtom> atoms;
    bool operator==(const BoundaryDelayHeat&) const = default;
};

struct DelayLag {
    double tau = 1.0;
    ComplexMatrix a;
    bool operator==(const DelayLag&) const = default;
};

/// u'(t) = A u(t) + sum_k A_k u(t - tau_k).
struct DelaySystem {
    ComplexMatrix a;
    std::vector<DelayLag> lags;
    bool operator==(const DelaySystem&) const = default;
};

/// u'' = P u' + A u, characteristic matrix lambda^2 - lambda P - A.
struct QuadraticPencil {
    ComplexMatrix a;
    ComplexMatrix p;
    bool operator==(const QuadraticPencil&) const = default;
};

using ProblemKind = std::variant<FirstDerivative, SecondDerivative, ConvectionDiffusion,
                                 BoundaryDelayHeat, DelaySystem, QuadraticPencil>;

std::string kind_name(const ProblemKind& kind);
/// Throws ValidationError when a kind invariant is violated.
void validate_kind(const ProblemKind& kind);
/// Kinds whose spectrum is computed through Dirichlet operators.
bool is_dirichlet_kind(const ProblemKind& kind);
/// m for Dirichlet kinds; the matrix order for delay systems and pencils.
std::size_t boundary_dimension(const ProblemKind& kind);
/// True when all parameters are real, so F(conj z) = conj F(z).
bool has_real_data(const ProblemKind& kind);

// ---------------------------------------------------------------------------
// Curves

/// One summand coeff * e^{drift t} * base(t) with t = s - shift.
///  - polynomial: base(t) = sum_i poly[i] t^i
///  - cosh_family: base(t) = cosh(sqrt(z) t)
///  - sinh_family: base(t) = sinh(sqrt(z) t) / sqrt(z)
/// The two families are even in sqrt(z) and therefore entire in z.
struct CurveTerm {
    enum class Base { polynomial, cosh_family, sinh_family };
    Base base = Base::polynomial;
    Complex coeff{1.0, 0.0};
    Complex drift{};
    double shift = 0.0;
    Complex z{};
    CVector poly{Complex{1.0, 0.0}};
};

/// Function on [0, 1] with analytic derivatives up to order 2, instantiated
/// at a spectral parameter lambda. Delayed boundary terms read the history
/// of the mode e^{lambda t} f, so they evaluate with this lambda.
class HoloCurve {
public:
    HoloCurve() = default;
    HoloCurve(Complex lambda, std::string kind, std::vector<CurveTerm> terms);

    static HoloCurve polynomial(CVector coeffs, Complex lambda = {});
    static HoloCurve exponential(Complex rate, Complex lambda);

    /// f^(order)(s); throws Error for order outside 0..2 or s outside [0, 1].
    Complex evaluate(double s, int order = 0) const;

    Complex lambda() const { return lambda_; }
    const std::string& kind() const { return kind_; }
    const std::vector<CurveTerm>& terms() const { return terms_; }

    HoloCurve& operator+=(const HoloCurve& other);
    HoloCurve& operator*=(Complex s);

private:
    Complex lambda_{};
    std::string kind_;
    std::vector<CurveTerm> terms_;
};

HoloCurve operator+(HoloCurve a, const HoloCurve& b);
HoloCurve operator*(Complex s, HoloCurve a);

/// cosh(sqrt(z) t) and sinh(sqrt(z) t)/sqrt(z), switching to the Taylor
/// series in z near z = 0.
Complex cosh_family(Complex z, double t);
Complex sinh_family(Complex z, double t);

// ---------------------------------------------------------------------------
// Boundary functionals

/// weight * f^(order)(location). A positive delay tau reads the history
/// v(-tau, location) = e^{-lambda tau} f(location) of an eigenmode.
struct PointTerm {
    double location = 0.0;
    int order = 0;
    Complex weight{1.0, 0.0};
    double delay = 0.0;
    bool operator==(const PointTerm&) const = default;
};

enum class IntegralWeight { constant, exponential };

/// weight * int_0^1 e^{rate s} f(s) ds (rate ignored for `constant`), with
/// the same delay convention as PointTerm.
struct IntegralTerm {
    IntegralWeight shape = IntegralWeight::constant;
    Complex rate{};
    Complex weight{1.0, 0.0};
    double delay = 0.0;
    bool operator==(const IntegralTerm&) const = default;
};

struct BoundaryFunctional {
    std::vector<PointTerm> points;
    std::vector<IntegralTerm> integrals;

    static BoundaryFunctional point(double location, int order = 0, Complex weight = 1.0,
                                    double delay = 0.0);
    static BoundaryFunctional integral(Complex weight = 1.0, double delay = 0.0);
    static BoundaryFunctional exp_integral(Complex rate, Complex weight = 1.0, double delay = 0.0);

    bool has_delay() const;
    bool empty() const { return points.empty() && integrals.empty(); }
    int max_order() const;
    /// Like terms merged, zero weights dropped, terms in canonical order.
    BoundaryFunctional simplified() const;
    /// Throws ValidationError for locations outside [0,1], orders above 2 or
    /// negative delays.
    void validate() const;

    BoundaryFunctional& operator+=(const BoundaryFunctional& o);
    BoundaryFunctional& operator-=(const BoundaryFunctional& o);
    BoundaryFunctional& operator*=(Complex s);
    bool operator==(const BoundaryFunctional&) const = default;
};

BoundaryFunctional operator+(BoundaryFunctional a, const BoundaryFunctional& b);
BoundaryFunctional operator-(BoundaryFunctional a, const BoundaryFunctional& b);
BoundaryFunctional operator*(Complex s, BoundaryFunctional a);

using Functionals = std::vector<BoundaryFunctional>;

/// Applies psi to f. Integral terms use 32-point Gauss-Legendre, or 64
/// points when the 16- and 32-point values disagree by more than 1e-10.
Complex apply_functional(const BoundaryFunctional& psi, const HoloCurve& f);

// ---------------------------------------------------------------------------
// Dirichlet machinery

/// Curves f_j with (lambda - A_m) f_j = 0 and L f_j = e_j.
std::vector<HoloCurve> dirichlet_basis(const ProblemKind& kind, Complex lambda);

/// The canonical L of each Dirichlet kind.
Functionals trace_operator(const ProblemKind& kind);

/// Conditions built into the maximal domain (f(1) = 0 for the delayed heat
/// problem, f'(1) = 0 for convection-diffusion).
Functionals domain_constraints(const ProblemKind& kind);

/// Phi = L - Psi, termwise.
Functionals phi_from_psi(const ProblemKind& kind, const Functionals& psi);

/// Psi of the delayed heat problem: f'(0) - sum_j w_j e^{lambda r_j} int f.
Functionals heat_delay_psi(const BoundaryDelayHeat& heat);

/// The boundary coupling of the convection-diffusion example with boundary
/// delay: f'(0) - f(0) + e^{-lambda} f(1).
Functionals convection_delay_psi();

/// (lambda - A_m) f using the analytic derivatives of f.
Complex ode_residual_at(const ProblemKind& kind, Complex lambda, const HoloCurve& f, double s);

// ---------------------------------------------------------------------------
// Sampled functions and the resolvent of d/ds

/// Values on the uniform grid s_i = i / (size - 1).
struct SampledFunction {
    CVector values;

    std::size_t size() const { return values.size(); }
    double spacing() const { return 1.0 / static_cast<double>(values.size() - 1); }
    double node(std::size_t i) const { return static_cast<double>(i) * spacing(); }
};

SampledFunction sample(const HoloCurve& f, std::size_t points, int order = 0);

/// Fourth-order finite-difference derivative of sampled data.
SampledFunction differentiate(const SampledFunction& f);

/// Applies psi to sampled data (5-node Fornberg stencils, Simpson for
/// integrals). Delayed terms use `lambda`.
Complex apply_functional(const BoundaryFunctional& psi, const SampledFunction& f, Complex lambda);

/// Row vector r with r . f = psi(f) for every sampled f.
CVector functional_row(const BoundaryFunctional& psi, std::size_t points, Complex lambda);

/// R(lambda, A) g for A = d/ds with f(0) = 0, i.e.
/// f(s) = -int_0^s e^{lambda (s - t)} g(t) dt, by a fourth-order cumulative
/// rule. Only FirstDerivative is supported.
SampledFunction resolvent_apply(const ProblemKind& kind, Complex lambda, const SampledFunction& g);

}  // namespace pertspec
