#include "pertspec/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>

#include "pertspec/errors.hpp"
#include "pertspec/numerics.hpp"

namespace pertspec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_real(Complex z) { return z.imag() == 0.0; }

bool is_real(const ComplexMatrix& m) {
    return std::all_of(m.entries().begin(), m.entries().end(), [](Complex z) { return is_real(z); });
}

void require_square(const ComplexMatrix& m, std::size_t n, const std::string& what) {
    if (m.rows() != n || m.cols() != n)
        throw ValidationError(what + " must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!m.all_finite()) throw ValidationError(what + " has a non-finite entry");
}

Complex delay_factor(Complex lambda, double delay) {
    return delay == 0.0 ? Complex{1.0, 0.0} : std::exp(-lambda * delay);
}

// Below this |z| the cosh/sinh families use their Taylor series in z.
constexpr double kBranchSeriesRadius = 1e-6;
constexpr int kBranchSeriesTerms = 8;

}  // namespace

// ---------------------------------------------------------------------------
// Kinds

std::string kind_name(const ProblemKind& kind) {
    return std::visit(overloaded{
                          [](const FirstDerivative&) { return std::string("first_derivative"); },
                          [](const SecondDerivative&) { return std::string("second_derivative"); },
                          [](const ConvectionDiffusion&) { return std::string("convection_diffusion"); },
                          [](const BoundaryDelayHeat&) { return std::string("boundary_delay_heat"); },
                          [](const DelaySystem&) { return std::string("delay_system"); },
                          [](const QuadraticPencil&) { return std::string("quadratic_pencil"); },
                      },
                      kind);
}

void validate_kind(const ProblemKind& kind) {
    std::visit(overloaded{
                   [](const FirstDerivative&) {},
                   [](const SecondDerivative&) {},
                   [](const ConvectionDiffusion& cd) {
                       if (!std::isfinite(std::abs(cd.c)) || !std::isfinite(std::abs(cd.k)))
                           throw ValidationError("convection_diffusion: non-finite c or k");
                   },
                   [](const BoundaryDelayHeat& h) {
                       for (const DelayAtom& a : h.atoms)
                           if (!(a.r >= -1.0 && a.r <= 0.0))
                               throw ValidationError("boundary_delay_heat: atom location " +
                                                     std::to_string(a.r) + " outside [-1, 0]");
                   },
                   [](const DelaySystem& d) {
                       const std::size_t n = d.a.rows();
                       if (n == 0) throw ValidationError("delay_system: empty A");
                       require_square(d.a, n, "delay_system: A");
                       for (const DelayLag& lag : d.lags) {
                           if (!(lag.tau > 0.0) || !std::isfinite(lag.tau))
                               throw ValidationError("delay_system: lag must be strictly positive");
                           require_square(lag.a, n, "delay_system: lag matrix");
                       }
                   },
                   [](const QuadraticPencil& q) {
                       const std::size_t n = q.a.rows();
                       if (n == 0) throw ValidationError("quadratic_pencil: empty A");
                       require_square(q.a, n, "quadratic_pencil: A");
                       require_square(q.p, n, "quadratic_pencil: P");
                   },
               },
               kind);
}

bool is_dirichlet_kind(const ProblemKind& kind) {
    return std::holds_alternative<FirstDerivative>(kind) ||
           std::holds_alternative<SecondDerivative>(kind) ||
           std::holds_alternative<ConvectionDiffusion>(kind) ||
           std::holds_alternative<BoundaryDelayHeat>(kind);
}

std::size_t boundary_dimension(const ProblemKind& kind) {
    return std::visit(overloaded{
                          [](const FirstDerivative&) -> std::size_t { return 1; },
                          [](const SecondDerivative&) -> std::size_t { return 2; },
                          [](const ConvectionDiffusion&) -> std::size_t { return 1; },
                          [](const BoundaryDelayHeat&) -> std::size_t { return 1; },
                          [](const DelaySystem& d) -> std::size_t { return d.a.rows(); },
                          [](const QuadraticPencil& q) -> std::size_t { return q.a.rows(); },
                      },
                      kind);
}

bool has_real_data(const ProblemKind& kind) {
    return std::visit(overloaded{
                          [](const FirstDerivative&) { return true; },
                          [](const SecondDerivative&) { return true; },
                          [](const ConvectionDiffusion& cd) { return is_real(cd.c) && is_real(cd.k); },
                          [](const BoundaryDelayHeat& h) {
                              return std::all_of(h.atoms.begin(), h.atoms.end(),
                                                 [](const DelayAtom& a) { return is_real(a.w); });
                          },
                          [](const DelaySystem& d) {
                              return is_real(d.a) &&
                                     std::all_of(d.lags.begin(), d.lags.end(),
                                                 [](const DelayLag& l) { return is_real(l.a); });
                          },
                          [](const QuadraticPencil& q) { return is_real(q.a) && is_real(q.p); },
                      },
                      kind);
}

// ---------------------------------------------------------------------------
// Curves

Complex cosh_family(Complex z, double t) {
    if (std::abs(z) < kBranchSeriesRadius) {
        // sum_k (z t^2)^k / (2k)!
        const Complex x = z * t * t;
        Complex term{1.0, 0.0}, sum{1.0, 0.0};
        for (int k = 1; k < kBranchSeriesTerms; ++k) {
            term *= x / static_cast<double>((2 * k - 1) * (2 * k));
            sum += term;
        }
        return sum;
    }
    return std::cosh(std::sqrt(z) * t);
}

Complex sinh_family(Complex z, double t) {
    if (std::abs(z) < kBranchSeriesRadius) {
        // t * sum_k (z t^2)^k / (2k+1)!
        const Complex x = z * t * t;
        Complex term{1.0, 0.0}, sum{1.0, 0.0};
        for (int k = 1; k < kBranchSeriesTerms; ++k) {
            term *= x / static_cast<double>((2 * k) * (2 * k + 1));
            sum += term;
        }
        return t * sum;
    }
    const Complex w = std::sqrt(z);
    return std::sinh(w * t) / w;
}

HoloCurve::HoloCurve(Complex lambda, std::string kind, std::vector<CurveTerm> terms)
    : lambda_(lambda), kind_(std::move(kind)), terms_(std::move(terms)) {}

HoloCurve HoloCurve::polynomial(CVector coeffs, Complex lambda) {
    CurveTerm t;
    t.base = CurveTerm::Base::polynomial;
    t.poly = std::move(coeffs);
    return HoloCurve(lambda, "polynomial", {t});
}

HoloCurve HoloCurve::exponential(Complex rate, Complex lambda) {
    CurveTerm t;
    t.drift = rate;
    return HoloCurve(lambda, "exponential", {t});
}

Complex HoloCurve::evaluate(double s, int order) const {
    if (order < 0 || order > 2) throw Error("HoloCurve::evaluate: derivative order must be 0..2");
    if (!(s >= -1e-12 && s <= 1.0 + 1e-12)) throw Error("HoloCurve::evaluate: s outside [0, 1]");
    Complex total{};
    for (const CurveTerm& term : terms_) {
        const double t = s - term.shift;
        Complex b0, b1, b2;
        switch (term.base) {
            case CurveTerm::Base::polynomial: {
                const std::size_t n = term.poly.size();
                for (std::size_t i = n; i-- > 0;) {
                    b2 = b2 * t + 2.0 * b1;
                    b1 = b1 * t + b0;
                    b0 = b0 * t + term.poly[i];
                }
                break;
            }
            case CurveTerm::Base::cosh_family: {
                const Complex c = cosh_family(term.z, t);
                b0 = c;
                b1 = term.z * sinh_family(term.z, t);
                b2 = term.z * c;
                break;
            }
            case CurveTerm::Base::sinh_family: {
                const Complex sh = sinh_family(term.z, t);
                b0 = sh;
                b1 = cosh_family(term.z, t);
                b2 = term.z * sh;
                break;
            }
        }
        const Complex d = term.drift;
        const Complex e = d == Complex{} ? Complex{1.0, 0.0} : std::exp(d * t);
        Complex v;
        if (order == 0)
            v = b0;
        else if (order == 1)
            v = d * b0 + b1;
        else
            v = d * d * b0 + 2.0 * d * b1 + b2;
        total += term.coeff * e * v;
    }
    return total;
}

HoloCurve& HoloCurve::operator+=(const HoloCurve& other) {
    if (terms_.empty()) {
        lambda_ = other.lambda_;
        kind_ = other.kind_;
    }
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

HoloCurve& HoloCurve::operator*=(Complex s) {
    for (CurveTerm& t : terms_) t.coeff *= s;
    return *this;
}

HoloCurve operator+(HoloCurve a, const HoloCurve& b) { return a += b; }
HoloCurve operator*(Complex s, HoloCurve a) { return a *= s; }

// ---------------------------------------------------------------------------
// Functionals

BoundaryFunctional BoundaryFunctional::point(double location, int order, Complex weight, double delay) {
    BoundaryFunctional f;
    f.points.push_back({location, order, weight, delay});
    return f;
}

BoundaryFunctional BoundaryFunctional::integral(Complex weight, double delay) {
    BoundaryFunctional f;
    f.integrals.push_back({IntegralWeight::constant, {}, weight, delay});
    return f;
}

BoundaryFunctional BoundaryFunctional::exp_integral(Complex rate, Complex weight, double delay) {
    BoundaryFunctional f;
    f.integrals.push_back({IntegralWeight::exponential, rate, weight, delay});
    return f;
}

bool BoundaryFunctional::has_delay() const {
    return std::any_of(points.begin(), points.end(), [](const PointTerm& p) { return p.delay != 0.0; }) ||
           std::any_of(integrals.begin(), integrals.end(),
                       [](const IntegralTerm& t) { return t.delay != 0.0; });
}

int BoundaryFunctional::max_order() const {
    int m = 0;
    for (const PointTerm& p : points) m = std::max(m, p.order);
    return m;
}

BoundaryFunctional BoundaryFunctional::simplified() const {
    BoundaryFunctional out;
    for (const PointTerm& p : points) {
        auto it = std::find_if(out.points.begin(), out.points.end(), [&](const PointTerm& q) {
            return q.location == p.location && q.order == p.order && q.delay == p.delay;
        });
        if (it == out.points.end())
            out.points.push_back(p);
        else
            it->weight += p.weight;
    }
    for (const IntegralTerm& t : integrals) {
        IntegralTerm norm = t;
        if (norm.shape == IntegralWeight::constant) norm.rate = {};
        auto it = std::find_if(out.integrals.begin(), out.integrals.end(), [&](const IntegralTerm& q) {
            return q.shape == norm.shape && q.rate == norm.rate && q.delay == norm.delay;
        });
        if (it == out.integrals.end())
            out.integrals.push_back(norm);
        else
            it->weight += norm.weight;
    }
    std::erase_if(out.points, [](const PointTerm& p) { return p.weight == Complex{}; });
    std::erase_if(out.integrals, [](const IntegralTerm& t) { return t.weight == Complex{}; });
    std::sort(out.points.begin(), out.points.end(), [](const PointTerm& a, const PointTerm& b) {
        return std::tie(a.location, a.order, a.delay) < std::tie(b.location, b.order, b.delay);
    });
    std::sort(out.integrals.begin(), out.integrals.end(), [](const IntegralTerm& a, const IntegralTerm& b) {
        return std::make_tuple(static_cast<int>(a.shape), a.rate.real(), a.rate.imag(), a.delay) <
               std::make_tuple(static_cast<int>(b.shape), b.rate.real(), b.rate.imag(), b.delay);
    });
    return out;
}

void BoundaryFunctional::validate() const {
    for (const PointTerm& p : points) {
        if (!(p.location >= 0.0 && p.location <= 1.0))
            throw ValidationError("functional: point location " + std::to_string(p.location) +
                                  " outside [0, 1]");
        if (p.order < 0 || p.order > 2)
            throw ValidationError("functional: derivative order " + std::to_string(p.order) +
                                  " outside 0..2");
        if (!(p.delay >= 0.0) || !std::isfinite(p.delay))
            throw ValidationError("functional: delay must be finite and non-negative");
        if (!std::isfinite(std::abs(p.weight))) throw ValidationError("functional: non-finite weight");
    }
    for (const IntegralTerm& t : integrals) {
        if (!(t.delay >= 0.0) || !std::isfinite(t.delay))
            throw ValidationError("functional: delay must be finite and non-negative");
        if (!std::isfinite(std::abs(t.weight)) || !std::isfinite(std::abs(t.rate)))
            throw ValidationError("functional: non-finite integral weight");
    }
}

BoundaryFunctional& BoundaryFunctional::operator+=(const BoundaryFunctional& o) {
    points.insert(points.end(), o.points.begin(), o.points.end());
    integrals.insert(integrals.end(), o.integrals.begin(), o.integrals.end());
    return *this;
}

BoundaryFunctional& BoundaryFunctional::operator*=(Complex s) {
    for (PointTerm& p : points) p.weight *= s;
    for (IntegralTerm& t : integrals) t.weight *= s;
    return *this;
}

BoundaryFunctional& BoundaryFunctional::operator-=(const BoundaryFunctional& o) {
    return *this += Complex{-1.0} * o;
}

BoundaryFunctional operator+(BoundaryFunctional a, const BoundaryFunctional& b) { return a += b; }
BoundaryFunctional operator-(BoundaryFunctional a, const BoundaryFunctional& b) { return a -= b; }
BoundaryFunctional operator*(Complex s, BoundaryFunctional a) { return a *= s; }

namespace {

Complex integrate_curve(const IntegralTerm& term, const HoloCurve& f, std::size_t nodes) {
    const QuadratureRule& rule = cached_gauss_legendre(nodes);
    Complex sum{};
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double s = rule.nodes[i];
        Complex v = f.evaluate(s, 0);
        if (term.shape == IntegralWeight::exponential) v *= std::exp(term.rate * s);
        sum += rule.weights[i] * v;
    }
    return sum;
}

}  // namespace

Complex apply_functional(const BoundaryFunctional& psi, const HoloCurve& f) {
    const Complex lambda = f.lambda();
    Complex total{};
    for (const PointTerm& p : psi.points)
        total += p.weight * delay_factor(lambda, p.delay) * f.evaluate(p.location, p.order);
    for (const IntegralTerm& t : psi.integrals) {
        const Complex coarse = integrate_curve(t, f, 16);
        Complex value = integrate_curve(t, f, 32);
        if (std::abs(value - coarse) > 1e-10 * std::max(std::abs(value), 1e-300))
            value = integrate_curve(t, f, 64);
        total += t.weight * delay_factor(lambda, t.delay) * value;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Dirichlet machinery

std::vector<HoloCurve> dirichlet_basis(const ProblemKind& kind, Complex lambda) {
    const std::string name = kind_name(kind);
    return std::visit(
        overloaded{
            [&](const FirstDerivative&) -> std::vector<HoloCurve> {
                HoloCurve e = HoloCurve::exponential(lambda, lambda);
                return {HoloCurve(lambda, name, e.terms())};
            },
            [&](const SecondDerivative&) -> std::vector<HoloCurve> {
                CurveTerm c{CurveTerm::Base::cosh_family, 1.0, {}, 0.0, lambda, {}};
                CurveTerm s{CurveTerm::Base::sinh_family, 1.0, {}, 0.0, lambda, {}};
                return {HoloCurve(lambda, name, {c}), HoloCurve(lambda, name, {s})};
            },
            [&](const ConvectionDiffusion& cd) -> std::vector<HoloCurve> {
                // e^{c(s-1)} (C(s-1) - c S(s-1)) with z = lambda + c^2 - k.
                const Complex z = lambda + cd.c * cd.c - cd.k;
                CurveTerm c{CurveTerm::Base::cosh_family, 1.0, cd.c, 1.0, z, {}};
                CurveTerm s{CurveTerm::Base::sinh_family, -cd.c, cd.c, 1.0, z, {}};
                return {HoloCurve(lambda, name, {c, s})};
            },
            [&](const BoundaryDelayHeat&) -> std::vector<HoloCurve> {
                CurveTerm s{CurveTerm::Base::sinh_family, 1.0, {}, 1.0, lambda, {}};
                return {HoloCurve(lambda, name, {s})};
            },
            [&](const DelaySystem&) -> std::vector<HoloCurve> {
                throw UnsupportedKindError("dirichlet_basis: delay_system has no Dirichlet operator");
            },
            [&](const QuadraticPencil&) -> std::vector<HoloCurve> {
                throw UnsupportedKindError("dirichlet_basis: quadratic_pencil has no Dirichlet operator");
            },
        },
        kind);
}

Functionals trace_operator(const ProblemKind& kind) {
    using BF = BoundaryFunctional;
    return std::visit(overloaded{
                          [](const FirstDerivative&) -> Functionals { return {BF::point(0.0)}; },
                          [](const SecondDerivative&) -> Functionals {
                              return {BF::point(0.0), BF::point(0.0, 1)};
                          },
                          [](const ConvectionDiffusion&) -> Functionals { return {BF::point(1.0)}; },
                          [](const BoundaryDelayHeat&) -> Functionals { return {BF::point(1.0, 1)}; },
                          [](const DelaySystem&) -> Functionals {
                              throw UnsupportedKindError("trace_operator: unsupported kind delay_system");
                          },
                          [](const QuadraticPencil&) -> Functionals {
                              throw UnsupportedKindError("trace_operator: unsupported kind quadratic_pencil");
                          },
                      },
                      kind);
}

Functionals domain_constraints(const ProblemKind& kind) {
    if (std::holds_alternative<BoundaryDelayHeat>(kind)) return {BoundaryFunctional::point(1.0)};
    if (std::holds_alternative<ConvectionDiffusion>(kind)) return {BoundaryFunctional::point(1.0, 1)};
    return {};
}

Functionals phi_from_psi(const ProblemKind& kind, const Functionals& psi) {
    const Functionals l = trace_operator(kind);
    if (psi.size() != l.size())
        throw DimensionError("phi_from_psi: " + kind_name(kind) + " needs " + std::to_string(l.size()) +
                             " functionals, got " + std::to_string(psi.size()));
    Functionals phi;
    phi.reserve(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) phi.push_back((l[i] - psi[i]).simplified());
    return phi;
}

Functionals heat_delay_psi(const BoundaryDelayHeat& heat) {
    BoundaryFunctional psi = BoundaryFunctional::point(0.0, 1);
    for (const DelayAtom& a : heat.atoms) psi += BoundaryFunctional::integral(-a.w, -a.r);
    return {psi.simplified()};
}

Functionals convection_delay_psi() {
    BoundaryFunctional psi = BoundaryFunctional::point(0.0, 1) - BoundaryFunctional::point(0.0) +
                             BoundaryFunctional::point(1.0, 0, 1.0, 1.0);
    return {psi.simplified()};
}

Complex ode_residual_at(const ProblemKind& kind, Complex lambda, const HoloCurve& f, double s) {
    return std::visit(
        overloaded{
            [&](const FirstDerivative&) { return lambda * f.evaluate(s, 0) - f.evaluate(s, 1); },
            [&](const SecondDerivative&) { return lambda * f.evaluate(s, 0) - f.evaluate(s, 2); },
            [&](const BoundaryDelayHeat&) { return lambda * f.evaluate(s, 0) - f.evaluate(s, 2); },
            [&](const ConvectionDiffusion& cd) {
                const Complex f0 = f.evaluate(s, 0);
                return lambda * f0 - (f.evaluate(s, 2) - 2.0 * cd.c * f.evaluate(s, 1) + cd.k * f0);
            },
            [&](const DelaySystem&) -> Complex {
                throw UnsupportedKindError("ode_residual_at: delay_system has no differential expression");
            },
            [&](const QuadraticPencil&) -> Complex {
                throw UnsupportedKindError("ode_residual_at: quadratic_pencil has no differential expression");
            },
        },
        kind);
}

// ---------------------------------------------------------------------------
// Sampled functions

namespace {

constexpr std::size_t kStencilWidth = 5;

// First node of the kStencilWidth-node window nearest to x, clamped to the grid.
std::size_t stencil_start(double x, std::size_t points) {
    const double h = 1.0 / static_cast<double>(points - 1);
    const long centre = std::lround(x / h);
    const long half = static_cast<long>(kStencilWidth / 2);
    const long last = static_cast<long>(points) - static_cast<long>(kStencilWidth);
    return static_cast<std::size_t>(std::clamp(centre - half, 0L, std::max(last, 0L)));
}

}  // namespace

SampledFunction sample(const HoloCurve& f, std::size_t points, int order) {
    if (points < 2) throw DimensionError("sample: need at least two points");
    SampledFunction out;
    out.values.resize(points);
    for (std::size_t i = 0; i < points; ++i)
        out.values[i] = f.evaluate(static_cast<double>(i) / static_cast<double>(points - 1), order);
    return out;
}

SampledFunction differentiate(const SampledFunction& f) {
    const std::size_t n = f.size();
    if (n < kStencilWidth) throw DimensionError("differentiate: need at least five samples");
    SampledFunction d;
    d.values.resize(n);
    std::vector<double> nodes(kStencilWidth);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t start = stencil_start(f.node(i), n);
        for (std::size_t j = 0; j < kStencilWidth; ++j) nodes[j] = f.node(start + j);
        const auto w = fornberg_weights(f.node(i), nodes, 1);
        Complex s{};
        for (std::size_t j = 0; j < kStencilWidth; ++j) s += w[1][j] * f.values[start + j];
        d.values[i] = s;
    }
    return d;
}

CVector functional_row(const BoundaryFunctional& psi, std::size_t points, Complex lambda) {
    if (points < kStencilWidth) throw DimensionError("functional_row: need at least five samples");
    const double h = 1.0 / static_cast<double>(points - 1);
    CVector row(points, Complex{});
    std::vector<double> nodes(kStencilWidth);
    for (const PointTerm& p : psi.points) {
        const std::size_t start = stencil_start(p.location, points);
        for (std::size_t j = 0; j < kStencilWidth; ++j) nodes[j] = static_cast<double>(start + j) * h;
        const auto w = fornberg_weights(p.location, nodes, p.order);
        const Complex scale = p.weight * delay_factor(lambda, p.delay);
        for (std::size_t j = 0; j < kStencilWidth; ++j)
            row[start + j] += scale * w[static_cast<std::size_t>(p.order)][j];
    }
    if (!psi.integrals.empty()) {
        const std::vector<double> sw = simpson_weights(points);
        for (const IntegralTerm& t : psi.integrals) {
            const Complex scale = t.weight * delay_factor(lambda, t.delay);
            for (std::size_t i = 0; i < points; ++i) {
                Complex w = sw[i] * scale;
                if (t.shape == IntegralWeight::exponential) w *= std::exp(t.rate * (static_cast<double>(i) * h));
                row[i] += w;
            }
        }
    }
    return row;
}

Complex apply_functional(const BoundaryFunctional& psi, const SampledFunction& f, Complex lambda) {
    const CVector row = functional_row(psi, f.size(), lambda);
    Complex s{};
    for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * f.values[i];
    return s;
}

SampledFunction resolvent_apply(const ProblemKind& kind, Complex lambda, const SampledFunction& g) {
    if (!std::holds_alternative<FirstDerivative>(kind))
        throw UnsupportedKindError("resolvent_apply: only first_derivative is supported, got " +
                                   kind_name(kind));
    const std::size_t n = g.size();
    if (n < 4) throw DimensionError("resolvent_apply: need at least four samples");
    const double h = g.spacing();
    const QuadratureRule& rule = cached_gauss_legendre(4);
    const Complex step = std::exp(lambda * h);

    SampledFunction f;
    f.values.assign(n, Complex{});
    std::vector<double> nodes(4);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Cubic interpolant of g on the 4-node window around [s_i, s_{i+1}].
        const std::size_t start = std::min(i == 0 ? 0 : i - 1, n - 4);
        for (std::size_t j = 0; j < 4; ++j) nodes[j] = g.node(start + j);
        const double a = g.node(i);
        Complex integral{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double t = a + h * rule.nodes[q];
            const auto w = fornberg_weights(t, nodes, 0);
            Complex gt{};
            for (std::size_t j = 0; j < 4; ++j) gt += w[0][j] * g.values[start + j];
            integral += rule.weights[q] * std::exp(lambda * (a + h - t)) * gt;
        }
        f.values[i + 1] = step * f.values[i] - h * integral;
    }
    return f;
}

}  // namespace pertspec
