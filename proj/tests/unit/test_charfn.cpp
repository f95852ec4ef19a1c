#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pertspec/charfn.hpp"
#include "pertspec/errors.hpp"
#include "test_support.hpp"

using namespace pertspec;
using BF = BoundaryFunctional;

namespace {

ProblemSpec periodic() {
    ProblemSpec s;
    s.kind = FirstDerivative{};
    s.psi = {BF::point(0.0) - BF::point(1.0)};
    s.region = {{-1.0, -7.0}, {1.0, 7.0}};
    return s;
}

ProblemSpec wentzell() {
    ProblemSpec s;
    s.kind = SecondDerivative{};
    s.psi = {BF::point(0.0, 2) - BF::point(0.0, 1), BF::point(1.0, 2) - BF::point(1.0, 1)};
    s.region = {{-45.0, -1.0}, {2.0, 1.0}};
    return s;
}

ProblemSpec heat() {
    ProblemSpec s;
    s.kind = BoundaryDelayHeat{{DelayAtom{-1.0, 1.0}}};
    s.region = {{-30.0, -20.0}, {5.0, 20.0}};
    return s;
}

}  // namespace

TEST_CASE("spec validation") {
    ProblemSpec s = periodic();
    CHECK_NOTHROW(s.validate());
    s.region = {{0.0, 0.0}, {1.0, 0.0}};
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = periodic();
    s.psi.push_back(BF::point(0.5));
    CHECK_THROWS_AS(s.validate(), DimensionError);
    s = heat();
    CHECK_NOTHROW(s.validate());
    CHECK(s.effective_psi() == heat_delay_psi(std::get<BoundaryDelayHeat>(s.kind)));
    ProblemSpec d;
    d.kind = DelaySystem{ComplexMatrix::identity(1), {}};
    d.psi = {BF::point(0.0)};
    CHECK_THROWS_AS(d.validate(), DimensionError);
}

TEST_CASE("delta_matrix examples") {
    ProblemSpec s = periodic();
    CHECK(std::abs(delta_matrix(s, 0.0)(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(delta_matrix(s, std::log(2.0))(0, 0) - 2.0) < 1e-14);
    ProblemSpec unperturbed;
    unperturbed.kind = SecondDerivative{};
    unperturbed.psi = trace_operator(SecondDerivative{});
    CHECK(delta_matrix(unperturbed, Complex{3.0, 1.0}).norm_max() == 0.0);
    CHECK(char_value(unperturbed, Complex{3.0, 1.0}) == Complex{1.0});
    ProblemSpec d;
    d.kind = DelaySystem{ComplexMatrix::identity(1), {}};
    CHECK_THROWS_AS(delta_matrix(d, 0.0), UnsupportedKindError);
}

TEST_CASE("char_value examples") {
    const ProblemSpec s = periodic();
    for (Complex z : {Complex{0.3, 0.2}, Complex{-0.7, 5.0}, Complex{1.0, -3.0}})
        CHECK(std::abs(char_value(s, z) - (1.0 - std::exp(z))) < 1e-14);
    CHECK(std::abs(char_value(s, Complex{0.0, 2.0 * kPi})) < 1e-14);
    CHECK(std::abs(char_value(s, Complex{0.0, kPi}) - 2.0) < 1e-14);

    const ProblemSpec w = wentzell();
    CHECK(std::abs(char_value(w, 1.0)) < 1e-13);
    CHECK(std::abs(char_value(w, -kPi * kPi)) < 1e-12);
    CHECK(std::abs(char_value(w, 4.0)) > 1.0);
}

TEST_CASE("Wentzell F equals lambda (lambda - 1) sinh(sqrt lambda) / sqrt lambda") {
    const ProblemSpec w = wentzell();
    for (Complex z : {Complex{2.0, 0.5}, Complex{-5.0, 1.0}, Complex{-30.0, -0.3}, Complex{0.01, 0.0}}) {
        const Complex expected = z * (z - 1.0) * sinh_family(z, 1.0);
        CHECK(testing::rel_diff(char_value(w, z), expected) < 1e-12);
    }
}

TEST_CASE("delayed heat: closed form, generic assembly and block route agree") {
    const ProblemSpec h = heat();
    const auto& kind = std::get<BoundaryDelayHeat>(h.kind);
    CHECK(std::abs(heat_integral_factor(0.0) + 0.5) < 1e-16);
    CHECK(std::abs(heat_integral_factor(0.49) - (1.0 - std::cosh(0.7)) / 0.49) < 1e-14);
    for (Complex z : {Complex{0.0, 0.0}, Complex{-2.0, 7.0}, Complex{-25.0, -15.0}, Complex{4.0, 1.0}}) {
        const Complex closed = heat_delay_closed_form(kind, z);
        CHECK(testing::rel_diff(closed, char_value_generic(h, z)) < 1e-10);
        CHECK(testing::rel_diff(closed, char_value_block_route(h, z)) < 1e-10);
        // The published form differs from F by the factor lambda e^lambda.
        const Complex published = (z * std::exp(z) + 1.0) * cosh_family(z, 1.0) - 1.0;
        CHECK(std::abs(published - z * std::exp(z) * closed) < 1e-9 * std::max(1.0, std::abs(published)));
    }
    CHECK(std::abs(char_value(h, 0.0) - 1.5) < 1e-15);
}

TEST_CASE("convection-diffusion: generic assembly equals the direct formula") {
    for (auto [c, k] : {std::pair{0.0, 0.0}, std::pair{1.0, 0.0}, std::pair{1.0, -1.0}}) {
        ProblemSpec s;
        s.kind = ConvectionDiffusion{c, k};
        s.region = {{-20.0, -10.0}, {5.0, 10.0}};
        for (Complex z : {Complex{-3.0, 4.0}, Complex{0.5, -1.0}, Complex{-15.0, 9.0}}) {
            const Complex direct = convection_delay_direct(std::get<ConvectionDiffusion>(s.kind), z);
            CHECK(testing::rel_diff(char_value(s, z), direct) < 1e-12);
            CHECK(testing::rel_diff(char_value_block_route(s, z), direct) < 1e-12);
        }
    }
}

TEST_CASE("holomorphy: mean value and Cauchy-Riemann") {
    for (const ProblemSpec& s : {periodic(), wentzell(), heat()}) {
        const CharFunction f = CharFunction::from_spec(s);
        for (Complex z0 : {Complex{-3.3, 0.7}, Complex{1.7, -2.1}}) {
            Complex mean{};
            const double r = 0.05;
            for (int k = 0; k < 64; ++k) mean += f(z0 + std::polar(r, 2.0 * kPi * k / 64.0));
            mean /= 64.0;
            CHECK(std::abs(mean - f(z0)) < 1e-6 * std::abs(f(z0)));
            const double h = 1e-5;
            const Complex dx = (f(z0 + h) - f(z0 - h)) / (2 * h);
            const Complex dy = (f(z0 + Complex{0, h}) - f(z0 - Complex{0, h})) / Complex{0, 2 * h};
            CHECK(std::abs(dx - dy) < 1e-5 * std::max(1.0, std::abs(dx)));
        }
    }
}

TEST_CASE("F equals the determinant of its matrix; conjugate symmetry") {
    for (const ProblemSpec& s : {periodic(), wentzell()}) {
        const CharFunction f = CharFunction::from_spec(s);
        CHECK(s.real_data());
        for (Complex z : {Complex{-2.0, 1.0}, Complex{0.5, 3.5}}) {
            CHECK(testing::rel_diff(f(z), determinant(f.matrix(z))) < 1e-12);
            CHECK(std::abs(f(std::conj(z)) - std::conj(f(z))) < 1e-12 * std::abs(f(z)));
        }
    }
}

TEST_CASE("delay and pencil matrices") {
    const DelaySystem d{ComplexMatrix{{0.0}}, {DelayLag{1.0, ComplexMatrix{{-kPi / 2}}}}};
    CHECK(std::abs(delay_char_matrix(d, Complex{0.0, kPi / 2})(0, 0)) < 1e-15);
    const ComplexMatrix a{{1.0, 2.0}, {0.5, -1.0}};
    const DelaySystem nolag{a, {}};
    CHECK(testing::max_diff(delay_char_matrix(nolag, 3.0), Complex{3.0} * ComplexMatrix::identity(2) - a) == 0.0);
    const DelaySystem pure{ComplexMatrix(2, 2), {DelayLag{0.7, ComplexMatrix::identity(2)}}};
    CHECK(testing::max_diff(delay_char_matrix(pure, 0.0), Complex{-1.0} * ComplexMatrix::identity(2)) == 0.0);

    const QuadraticPencil q{ComplexMatrix{{1.0}}, ComplexMatrix{{0.0}}};
    CHECK(std::abs(pencil_char_matrix(q, 1.0)(0, 0)) == 0.0);
    CHECK(std::abs(pencil_char_matrix(q, -1.0)(0, 0)) == 0.0);
    const QuadraticPencil q2{a, ComplexMatrix::identity(2)};
    CHECK(testing::max_diff(pencil_char_matrix(q2, 0.0), Complex{-1.0} * a) == 0.0);
    const ComplexMatrix g = pencil_companion(q2);
    CHECK(g.rows() == 4);
    CHECK(g(0, 2) == Complex{1.0});
    CHECK(g(2, 0) == a(0, 0));
}

TEST_CASE("a delay system without lag feedback reduces to det(lambda - A)") {
    const ComplexMatrix a{{2.0, 1.0}, {0.0, -3.0}};
    ProblemSpec s;
    s.kind = DelaySystem{a, {DelayLag{1.0, ComplexMatrix(2, 2)}}};
    for (Complex z : {Complex{2.0}, Complex{-3.0}}) CHECK(std::abs(char_value(s, z)) < 1e-12);
    CHECK(std::abs(char_value(s, Complex{1.0, 1.0}) - (Complex{1.0, 1.0} - 2.0) * (Complex{1.0, 1.0} + 3.0)) < 1e-12);
}

TEST_CASE("numeric derivative") {
    const CharFunction f = CharFunction::from_scalar([](Complex z) { return std::exp(z) * z; });
    const Complex z{0.3, -1.2};
    CHECK(std::abs(numeric_derivative(f, z) - std::exp(z) * (1.0 + z)) < 1e-8);
}

TEST_CASE("kernel vectors and eigenfunctions") {
    SUBCASE("periodic problem at 2 pi i") {
        const ProblemSpec s = periodic();
        const Complex root{0.0, 2.0 * kPi};
        const auto k = kernel_vectors(s, root);
        REQUIRE(k.size() == 1);
        CHECK(std::abs(k[0][0] - 1.0) < 1e-12);
        const HoloCurve f = eigenfunction(s, root, k[0]);
        CHECK(std::abs(f.evaluate(0.25) - std::exp(root * 0.25)) < 1e-14);
        CHECK(std::abs(apply_functional(s.psi[0], f)) < 1e-13);
    }
    SUBCASE("not a root") { CHECK_THROWS_AS(kernel_vectors(periodic(), 5.0), NotARootError); }
    SUBCASE("Wentzell at 1 and -pi^2") {
        const ProblemSpec w = wentzell();
        CHECK(kernel_vectors(w, 1.0).size() == 1);
        const Complex root = -kPi * kPi;
        const auto k = kernel_vectors(w, root);
        REQUIRE(k.size() == 1);
        const HoloCurve f = eigenfunction(w, root, k[0]);
        for (double s : {0.0, 1.0}) CHECK(std::abs(f.evaluate(s, 2) - f.evaluate(s, 1)) < 1e-8);
    }
    SUBCASE("zero coefficients give the zero curve; wrong length is rejected") {
        const HoloCurve f = eigenfunction(wentzell(), -1.0, CVector{0.0, 0.0});
        CHECK(f.evaluate(0.5) == Complex{});
        CHECK_THROWS_AS(eigenfunction(wentzell(), -1.0, CVector{1.0}), DimensionError);
    }
}

TEST_CASE("perturbed resolvent of d/ds") {
    SampledFunction g;
    g.values.assign(2001, Complex{1.0});
    SUBCASE("periodic coupling at i pi") {
        const ResolventResult r = resolvent_value(periodic(), Complex{0.0, kPi}, g);
        CHECK(r.form_difference < 1e-8);
        CHECK(r.ode_residual < 1e-6);
        CHECK(r.bc_residual < 1e-6);
        // Closed form: f = 1/lambda for constant g (the constant satisfies f(0) = f(1)).
        CHECK(std::abs(r.value.values[700] - 1.0 / Complex{0.0, kPi}) < 1e-8);
    }
    SUBCASE("Phi = 0 reduces to the unperturbed resolvent") {
        ProblemSpec s = periodic();
        s.psi = trace_operator(FirstDerivative{});
        const Complex lambda{1.0, 1.0};
        const ResolventResult r = resolvent_value(s, lambda, g);
        const SampledFunction plain = resolvent_apply(FirstDerivative{}, lambda, g);
        for (std::size_t i = 0; i < g.size(); i += 100) CHECK(std::abs(r.value.values[i] - plain.values[i]) < 1e-12);
    }
    SUBCASE("undefined at a root") {
        CHECK_THROWS_AS(resolvent_value(periodic(), Complex{0.0, 2.0 * kPi}, g), ResolventUndefinedError);
    }
}
