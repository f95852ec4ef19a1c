#include "pertspec/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pertspec/errors.hpp"

namespace pertspec {

namespace {

bool weights_real(const Functionals& psi) {
    for (const BoundaryFunctional& f : psi) {
        for (const PointTerm& p : f.points)
            if (p.weight.imag() != 0.0) return false;
        for (const IntegralTerm& t : f.integrals)
            if (t.weight.imag() != 0.0 || t.rate.imag() != 0.0) return false;
    }
    return true;
}

/// Splits a functional into its undelayed and delayed parts.
std::pair<BoundaryFunctional, BoundaryFunctional> split_delayed(const BoundaryFunctional& f) {
    BoundaryFunctional now, late;
    for (const PointTerm& p : f.points) (p.delay == 0.0 ? now : late).points.push_back(p);
    for (const IntegralTerm& t : f.integrals) (t.delay == 0.0 ? now : late).integrals.push_back(t);
    return {now, late};
}

ComplexMatrix functional_matrix(const Functionals& rows, const std::vector<HoloCurve>& basis) {
    ComplexMatrix m(rows.size(), basis.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j) m(i, j) = apply_functional(rows[i], basis[j]);
    return m;
}

void require_dirichlet(const ProblemSpec& spec, const char* op) {
    if (!is_dirichlet_kind(spec.kind))
        throw UnsupportedKindError(std::string(op) + ": unsupported kind " + kind_name(spec.kind));
}

}  // namespace

// ---------------------------------------------------------------------------
// ProblemSpec

void ProblemSpec::validate() const {
    validate_kind(kind);
    if (!region.valid()) throw ValidationError("search region must have positive width and height");
    if (!(tolerances.root > 0.0) || !(tolerances.residual > 0.0))
        throw ValidationError("tolerances must be positive");
    if (is_dirichlet_kind(kind)) {
        const bool may_default = std::holds_alternative<BoundaryDelayHeat>(kind) ||
                                 std::holds_alternative<ConvectionDiffusion>(kind);
        if (!(psi.empty() && may_default) && psi.size() != boundary_dimension(kind))
            throw DimensionError(kind_name(kind) + " needs " + std::to_string(boundary_dimension(kind)) +
                                 " boundary functionals, got " + std::to_string(psi.size()));
    } else if (!psi.empty()) {
        throw DimensionError(kind_name(kind) + " takes no boundary functionals");
    }
    for (const BoundaryFunctional& f : psi) f.validate();
}

Functionals ProblemSpec::effective_psi() const {
    if (psi.empty()) {
        if (const auto* heat = std::get_if<BoundaryDelayHeat>(&kind)) return heat_delay_psi(*heat);
        if (std::holds_alternative<ConvectionDiffusion>(kind)) return convection_delay_psi();
    }
    return psi;
}

bool ProblemSpec::real_data() const { return has_real_data(kind) && weights_real(effective_psi()); }

// ---------------------------------------------------------------------------
// CharFunction

CharFunction::CharFunction(ValueFn value, MatrixFn matrix, std::optional<ProblemSpec> spec)
    : value_(std::move(value)), matrix_(std::move(matrix)), spec_(std::move(spec)) {}

CharFunction CharFunction::from_scalar(ValueFn value) {
    auto matrix = [value](Complex z) {
        ComplexMatrix m(1, 1);
        m(0, 0) = value(z);
        return m;
    };
    return CharFunction(std::move(value), std::move(matrix));
}

CharFunction CharFunction::from_spec(const ProblemSpec& spec) {
    spec.validate();
    return CharFunction([spec](Complex z) { return char_value(spec, z); },
                        [spec](Complex z) { return characteristic_matrix(spec, z); }, spec);
}

// ---------------------------------------------------------------------------
// Assembly

ComplexMatrix delta_matrix(const ProblemSpec& spec, Complex lambda) {
    require_dirichlet(spec, "delta_matrix");
    const Functionals phi = phi_from_psi(spec.kind, spec.effective_psi());
    return functional_matrix(phi, dirichlet_basis(spec.kind, lambda));
}

ComplexMatrix characteristic_matrix(const ProblemSpec& spec, Complex lambda) {
    if (const auto* d = std::get_if<DelaySystem>(&spec.kind)) return delay_char_matrix(*d, lambda);
    if (const auto* q = std::get_if<QuadraticPencil>(&spec.kind)) return pencil_char_matrix(*q, lambda);
    const ComplexMatrix delta = delta_matrix(spec, lambda);
    return ComplexMatrix::identity(delta.rows()) - delta;
}

Complex char_value(const ProblemSpec& spec, Complex lambda) {
    if (const auto* heat = std::get_if<BoundaryDelayHeat>(&spec.kind); heat && spec.psi.empty())
        return heat_delay_closed_form(*heat, lambda);
    return determinant(characteristic_matrix(spec, lambda));
}

Complex char_value_generic(const ProblemSpec& spec, Complex lambda) {
    require_dirichlet(spec, "char_value_generic");
    const ComplexMatrix delta = delta_matrix(spec, lambda);
    return determinant(ComplexMatrix::identity(delta.rows()) - delta);
}

Complex char_value_block_route(const ProblemSpec& spec, Complex lambda) {
    require_dirichlet(spec, "char_value_block_route");
    const Functionals phi = phi_from_psi(spec.kind, spec.effective_psi());
    const std::vector<HoloCurve> basis = dirichlet_basis(spec.kind, lambda);
    Functionals now, late;
    for (const BoundaryFunctional& f : phi) {
        auto [a, b] = split_delayed(f);
        now.push_back(std::move(a));
        late.push_back(std::move(b));
    }
    const std::size_t m = phi.size();
    // T = (Id - Phi_now L, -Phi_late L; -Id, Id); Delta_1 = Id - Phi L.
    BlockMatrix t;
    t.P = ComplexMatrix::identity(m) - functional_matrix(now, basis);
    t.Q = Complex{-1.0} * functional_matrix(late, basis);
    t.R = Complex{-1.0} * ComplexMatrix::identity(m);
    t.S = ComplexMatrix::identity(m);
    return determinant(schur_complement_1(t));
}

Complex heat_integral_factor(Complex z) {
    if (std::abs(z) < 0.5) {
        // -sum_{k>=1} z^{k-1} / (2k)!
        Complex term{0.5, 0.0}, sum = term;
        for (int k = 2; k < 16; ++k) {
            term *= z / static_cast<double>((2 * k - 1) * (2 * k));
            sum += term;
        }
        return -sum;
    }
    return (1.0 - cosh_family(z, 1.0)) / z;
}

Complex heat_delay_closed_form(const BoundaryDelayHeat& heat, Complex lambda) {
    Complex memory{};
    for (const DelayAtom& a : heat.atoms) memory += a.w * std::exp(lambda * a.r);
    return cosh_family(lambda, 1.0) - memory * heat_integral_factor(lambda);
}

Complex convection_delay_direct(const ConvectionDiffusion& cd, Complex lambda) {
    const HoloCurve l = dirichlet_basis(cd, lambda).front();
    return std::exp(-lambda) - l.evaluate(0.0, 0) + l.evaluate(0.0, 1);
}

ComplexMatrix delay_char_matrix(const DelaySystem& d, Complex lambda) {
    const std::size_t n = d.a.rows();
    ComplexMatrix m = lambda * ComplexMatrix::identity(n) - d.a;
    for (const DelayLag& lag : d.lags) m -= std::exp(-lambda * lag.tau) * lag.a;
    return m;
}

ComplexMatrix pencil_char_matrix(const QuadraticPencil& q, Complex lambda) {
    const std::size_t n = q.a.rows();
    return (lambda * lambda) * ComplexMatrix::identity(n) - lambda * q.p - q.a;
}

ComplexMatrix pencil_companion(const QuadraticPencil& q) {
    const std::size_t n = q.a.rows();
    ComplexMatrix g(2 * n, 2 * n);
    g.set_block(0, n, ComplexMatrix::identity(n));
    g.set_block(n, 0, q.a);
    g.set_block(n, n, q.p);
    return g;
}

Complex numeric_derivative(const CharFunction& f, Complex lambda) {
    const double h = 1e-6 * (1.0 + std::abs(lambda));
    const Complex ih{0.0, h};
    const Complex along_re = (f(lambda + h) - f(lambda - h)) / (2.0 * h);
    const Complex along_im = (f(lambda + ih) - f(lambda - ih)) / (2.0 * ih);
    return 0.5 * (along_re + along_im);
}

double determinant_scale(const ComplexMatrix& m) {
    double scale = 1.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (Complex v : m.row(i)) s += std::norm(v);
        scale *= std::sqrt(s);
    }
    return scale;
}

// ---------------------------------------------------------------------------
// Kernels and eigenfunctions

std::vector<CVector> kernel_vectors(const ProblemSpec& spec, Complex lambda) {
    const ComplexMatrix m = characteristic_matrix(spec, lambda);
    const Complex f = determinant(m);
    const double bound = spec.tolerances.root * std::max(1.0, determinant_scale(m));
    if (!(std::abs(f) <= bound))
        throw NotARootError("kernel_vectors: |F(lambda)| = " + std::to_string(std::abs(f)) +
                            " exceeds " + std::to_string(bound));
    return kernel_basis(m, 1e-7, 1);
}

HoloCurve eigenfunction(const ProblemSpec& spec, Complex lambda, const CVector& x) {
    require_dirichlet(spec, "eigenfunction");
    const std::vector<HoloCurve> basis = dirichlet_basis(spec.kind, lambda);
    if (x.size() != basis.size())
        throw DimensionError("eigenfunction: coefficient vector has length " + std::to_string(x.size()) +
                             ", expected " + std::to_string(basis.size()));
    HoloCurve f(lambda, kind_name(spec.kind), {});
    for (std::size_t j = 0; j < basis.size(); ++j) f += x[j] * basis[j];
    return f;
}

double characteristic_scale(const ProblemSpec& spec, Complex lambda) {
    if (const auto* d = std::get_if<DelaySystem>(&spec.kind)) {
        double s = std::abs(lambda) + d->a.norm_inf();
        for (const DelayLag& lag : d->lags) s += std::abs(std::exp(-lambda * lag.tau)) * lag.a.norm_inf();
        return s;
    }
    if (const auto* q = std::get_if<QuadraticPencil>(&spec.kind))
        return std::norm(lambda) + std::abs(lambda) * q->p.norm_inf() + q->a.norm_inf();
    throw UnsupportedKindError("characteristic_scale: " + kind_name(spec.kind) + " has eigenfunctions instead");
}

double kernel_residual(const ComplexMatrix& m, const CVector& x, double scale) {
    return norm_inf(m * x) / (std::max(scale, 1e-300) * std::max(norm_inf(x), 1e-300));
}

// ---------------------------------------------------------------------------
// Perturbed resolvent of d/ds

ResolventResult resolvent_value(const ProblemSpec& spec, Complex lambda, const SampledFunction& g) {
    if (!std::holds_alternative<FirstDerivative>(spec.kind))
        throw UnsupportedKindError("resolvent_value: only first_derivative is supported, got " +
                                   kind_name(spec.kind));
    spec.validate();
    const Complex f_lambda = char_value(spec, lambda);
    if (std::abs(f_lambda) <= spec.tolerances.root)
        throw ResolventUndefinedError("resolvent_value: lambda is a root of the characteristic function");

    const std::size_t n = g.size();
    const BoundaryFunctional phi = phi_from_psi(spec.kind, spec.psi).front();
    const BoundaryFunctional psi = spec.psi.front();
    const CVector phi_row = functional_row(phi, n, lambda);
    const SampledFunction u = sample(dirichlet_basis(spec.kind, lambda).front(), n);
    const SampledFunction r = resolvent_apply(spec.kind, lambda, g);

    Complex phi_u{}, phi_r{};
    for (std::size_t i = 0; i < n; ++i) {
        phi_u += phi_row[i] * u.values[i];
        phi_r += phi_row[i] * r.values[i];
    }

    ResolventResult out;
    // R(lambda, A) g + L_lambda (1 - Phi L_lambda)^{-1} Phi R(lambda, A) g
    out.value.values.resize(n);
    const Complex coupling = phi_r / (1.0 - phi_u);
    for (std::size_t i = 0; i < n; ++i) out.value.values[i] = r.values[i] + u.values[i] * coupling;

    // (Id - L_lambda Phi)^{-1} R(lambda, A) g as a dense solve on the grid.
    ComplexMatrix op = ComplexMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) op(i, j) -= u.values[i] * phi_row[j];
    out.second_form.values = solve(op, r.values);

    for (std::size_t i = 0; i < n; ++i)
        out.form_difference =
            std::max(out.form_difference, std::abs(out.value.values[i] - out.second_form.values[i]));

    const SampledFunction df = differentiate(out.value);
    for (std::size_t i = 0; i < n; ++i)
        out.ode_residual = std::max(out.ode_residual,
                                    std::abs(lambda * out.value.values[i] - df.values[i] - g.values[i]));
    out.bc_residual = std::abs(apply_functional(psi, out.value, lambda));
    return out;
}

}  // namespace pertspec
