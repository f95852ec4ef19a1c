#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "pertspec/catalog.hpp"
#include "pertspec/errors.hpp"

using namespace pertspec;

namespace {

using BF = BoundaryFunctional;

std::vector<ProblemKind> dirichlet_kinds() {
    return {FirstDerivative{}, SecondDerivative{}, ConvectionDiffusion{{0.7, 0.0}, {-0.4, 0.0}},
            ConvectionDiffusion{{1.0, 0.5}, {0.3, -0.2}}, BoundaryDelayHeat{{DelayAtom{-1.0, 1.0}}}};
}

std::vector<Complex> lambda_grid() {
    return {{0.0, 0.0}, {1.0, 0.0}, {-9.0, 0.0}, {2.5, 3.0}, {-4.0, -7.5}, {0.3, 12.0}, {-20.0, 1.0}};
}

Complex curve_scale(const HoloCurve& f) {
    double m = 1.0;
    for (int i = 0; i <= 20; ++i)
        for (int k = 0; k <= 2; ++k) m = std::max(m, std::abs(f.evaluate(i / 20.0, k)));
    return m;
}

}  // namespace

TEST_CASE("kind metadata") {
    CHECK(kind_name(FirstDerivative{}) == "first_derivative");
    CHECK(kind_name(QuadraticPencil{}) == "quadratic_pencil");
    CHECK(boundary_dimension(SecondDerivative{}) == 2);
    CHECK(boundary_dimension(BoundaryDelayHeat{}) == 1);
    CHECK(boundary_dimension(DelaySystem{ComplexMatrix::identity(3), {}}) == 3);
    CHECK(is_dirichlet_kind(ConvectionDiffusion{}));
    CHECK_FALSE(is_dirichlet_kind(DelaySystem{}));
    CHECK(has_real_data(ConvectionDiffusion{{1.0, 0.0}, {-1.0, 0.0}}));
    CHECK_FALSE(has_real_data(ConvectionDiffusion{{1.0, 1.0}, {0.0, 0.0}}));
}

TEST_CASE("kind invariants") {
    CHECK_THROWS_AS(validate_kind(BoundaryDelayHeat{{DelayAtom{0.5, 1.0}}}), ValidationError);
    CHECK_THROWS_AS(validate_kind(DelaySystem{ComplexMatrix::identity(2), {DelayLag{0.0, ComplexMatrix::identity(2)}}}),
                    ValidationError);
    CHECK_THROWS_AS(validate_kind(DelaySystem{ComplexMatrix::identity(2), {DelayLag{1.0, ComplexMatrix::identity(3)}}}),
                    ValidationError);
    CHECK_THROWS_AS(validate_kind(QuadraticPencil{ComplexMatrix::identity(2), ComplexMatrix::identity(3)}),
                    ValidationError);
    CHECK_NOTHROW(validate_kind(BoundaryDelayHeat{{DelayAtom{-0.25, 2.0}}}));
}

TEST_CASE("dirichlet_basis closed forms") {
    SUBCASE("second derivative at lambda = 0 is {1, s}") {
        const auto b = dirichlet_basis(SecondDerivative{}, 0.0);
        REQUIRE(b.size() == 2);
        for (double s : {0.0, 0.3, 1.0}) {
            CHECK(std::abs(b[0].evaluate(s) - 1.0) < 1e-15);
            CHECK(std::abs(b[1].evaluate(s) - s) < 1e-15);
        }
    }
    SUBCASE("first derivative is e^{lambda s}") {
        const Complex lambda{0.4, -2.0};
        const auto b = dirichlet_basis(FirstDerivative{}, lambda);
        REQUIRE(b.size() == 1);
        for (double s : {0.0, 0.5, 1.0}) CHECK(std::abs(b[0].evaluate(s) - std::exp(lambda * s)) < 1e-14);
    }
    SUBCASE("convection-diffusion at its branch point") {
        const Complex c{0.8, 0.0}, k{-0.5, 0.0};
        const auto b = dirichlet_basis(ConvectionDiffusion{c, k}, k - c * c);
        for (double s : {0.0, 0.25, 0.7, 1.0}) {
            const Complex expected = std::exp(c * (s - 1.0)) * (1.0 + c - c * s);
            CHECK(std::abs(b[0].evaluate(s) - expected) < 1e-14);
        }
    }
    SUBCASE("matrix kinds have no Dirichlet operator") {
        CHECK_THROWS_AS(dirichlet_basis(DelaySystem{ComplexMatrix::identity(1), {}}, 1.0), UnsupportedKindError);
        CHECK_THROWS_AS(trace_operator(QuadraticPencil{}), UnsupportedKindError);
    }
}

TEST_CASE("Dirichlet property: ODE residual and L f_j = e_j") {
    for (const ProblemKind& kind : dirichlet_kinds()) {
        const Functionals l = trace_operator(kind);
        for (Complex lambda : lambda_grid()) {
            const auto basis = dirichlet_basis(kind, lambda);
            REQUIRE(basis.size() == l.size());
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const double scale = std::abs(curve_scale(basis[j])) * (1.0 + std::abs(lambda));
                for (int i = 0; i <= 100; ++i)
                    CHECK(std::abs(ode_residual_at(kind, lambda, basis[j], i / 100.0)) < 1e-8 * scale);
                for (std::size_t i = 0; i < l.size(); ++i)
                    CHECK(std::abs(apply_functional(l[i], basis[j]) - (i == j ? 1.0 : 0.0)) < 1e-10);
                for (const BF& c : domain_constraints(kind)) CHECK(std::abs(apply_functional(c, basis[j])) < 1e-12);
            }
        }
    }
}

TEST_CASE("first derivatives match central differences of values") {
    for (const ProblemKind& kind : dirichlet_kinds()) {
        const auto basis = dirichlet_basis(kind, Complex{-3.0, 2.0});
        for (const HoloCurve& f : basis) {
            const double h = 1e-5;
            const double scale = std::abs(curve_scale(f));
            for (double s : {0.2, 0.5, 0.8}) {
                const Complex fd = (f.evaluate(s + h) - f.evaluate(s - h)) / (2 * h);
                CHECK(std::abs(fd - f.evaluate(s, 1)) < 1e-6 * scale);
                const Complex fd2 = (f.evaluate(s + h, 1) - f.evaluate(s - h, 1)) / (2 * h);
                CHECK(std::abs(fd2 - f.evaluate(s, 2)) < 1e-6 * scale);
            }
        }
    }
}

TEST_CASE("branch continuity of the entire bases") {
    struct Case {
        ProblemKind kind;
        Complex branch;
    };
    const Complex c{1.0, 0.0}, k{-1.0, 0.0};
    const std::vector<Case> cases{{SecondDerivative{}, 0.0},
                                  {ConvectionDiffusion{c, k}, k - c * c},
                                  {BoundaryDelayHeat{{DelayAtom{-1.0, 1.0}}}, 0.0}};
    for (const Case& cs : cases) {
        const auto at = dirichlet_basis(cs.kind, cs.branch);
        for (Complex d : {Complex{1e-4, 0.0}, Complex{-1e-4, 0.0}, Complex{0.0, 1e-4}, Complex{0.0, -1e-4}}) {
            const auto near = dirichlet_basis(cs.kind, cs.branch + d);
            for (std::size_t j = 0; j < at.size(); ++j)
                for (double s : {0.0, 0.4, 1.0})
                    for (int order = 0; order <= 2; ++order)
                        CHECK(std::abs(at[j].evaluate(s, order) - near[j].evaluate(s, order)) < 10.0 * std::abs(d));
        }
        // The Taylor branch and the closed form meet without a jump.
        const auto inside = dirichlet_basis(cs.kind, cs.branch + Complex{0.9e-6, 0.0});
        const auto outside = dirichlet_basis(cs.kind, cs.branch + Complex{1.1e-6, 0.0});
        for (std::size_t j = 0; j < at.size(); ++j)
            CHECK(std::abs(inside[j].evaluate(0.3) - outside[j].evaluate(0.3)) < 1e-7);
    }
}

TEST_CASE("conjugate symmetry for real parameters") {
    const std::vector<ProblemKind> kinds{FirstDerivative{}, SecondDerivative{}, ConvectionDiffusion{{1.0, 0.0}, {-1.0, 0.0}},
                                         BoundaryDelayHeat{{DelayAtom{-1.0, 1.0}}}};
    for (const ProblemKind& kind : kinds) {
        const Complex lambda{-2.3, 5.1};
        const auto a = dirichlet_basis(kind, lambda);
        const auto b = dirichlet_basis(kind, std::conj(lambda));
        for (std::size_t j = 0; j < a.size(); ++j)
            for (double s : {0.0, 0.37, 1.0})
                CHECK(std::abs(std::conj(a[j].evaluate(s)) - b[j].evaluate(s)) < 1e-12 * std::abs(a[j].evaluate(s)) + 1e-14);
    }
}

TEST_CASE("apply_functional examples") {
    CHECK(std::abs(apply_functional(BF::point(0.0), dirichlet_basis(FirstDerivative{}, Complex{2.0, 1.0})[0]) - 1.0) <
          1e-15);
    CHECK(std::abs(apply_functional(BF::integral(), HoloCurve::polynomial({1.0})) - 1.0) < 1e-14);
    const HoloCurve cosh2 = dirichlet_basis(SecondDerivative{}, 4.0)[0];
    CHECK(std::abs(apply_functional(BF::point(0.0, 2), cosh2) - 4.0) < 1e-13);
    // int_0^1 e^{2s} s ds = (e^2 + 1) / 4
    CHECK(std::abs(apply_functional(BF::exp_integral(2.0), HoloCurve::polynomial({0.0, 1.0})) -
                   (std::exp(2.0) + 1.0) / 4.0) < 1e-13);
}

TEST_CASE("delayed terms read the history of the mode") {
    const Complex lambda{0.5, 1.5};
    const HoloCurve e = dirichlet_basis(FirstDerivative{}, lambda)[0];
    const BF late = BF::point(1.0, 0, 1.0, 1.0);
    // e^{-lambda} f(1) = 1 for f = e^{lambda s}.
    CHECK(std::abs(apply_functional(late, e) - 1.0) < 1e-14);
    CHECK(late.has_delay());
    CHECK_FALSE(BF::point(1.0).has_delay());
}

TEST_CASE("linearity of apply_functional") {
    const Complex lambda{-1.0, 3.0};
    const auto b = dirichlet_basis(SecondDerivative{}, lambda);
    const BF psi = BF::point(0.3, 2, {1.0, -2.0}) + BF::integral({0.5, 0.0}) + BF::exp_integral({1.0, 1.0}, 3.0) +
                   BF::point(1.0, 1, -1.0);
    const Complex a{2.0, -1.0}, c{-0.5, 0.25};
    const HoloCurve combo = a * b[0] + c * b[1];
    CHECK(std::abs(apply_functional(psi, combo) - (a * apply_functional(psi, b[0]) + c * apply_functional(psi, b[1]))) <
          1e-12 * std::abs(apply_functional(psi, combo)));
    const BF other = BF::point(0.0, 1, 3.0);
    CHECK(std::abs(apply_functional(a * psi + other, b[0]) -
                   (a * apply_functional(psi, b[0]) + apply_functional(other, b[0]))) < 1e-12 * 100.0);
}

TEST_CASE("trace operators and phi_from_psi") {
    CHECK(trace_operator(FirstDerivative{}) == Functionals{BF::point(0.0)});
    CHECK(trace_operator(SecondDerivative{}) == Functionals{BF::point(0.0), BF::point(0.0, 1)});
    CHECK(trace_operator(ConvectionDiffusion{}) == Functionals{BF::point(1.0)});
    CHECK(trace_operator(BoundaryDelayHeat{}) == Functionals{BF::point(1.0, 1)});

    SUBCASE("Psi = L gives Phi = 0") {
        const Functionals phi = phi_from_psi(SecondDerivative{}, trace_operator(SecondDerivative{}));
        for (const BF& f : phi) CHECK(f.empty());
    }
    SUBCASE("periodic coupling") {
        const Functionals phi = phi_from_psi(FirstDerivative{}, {BF::point(0.0) - BF::point(1.0)});
        CHECK(phi.front() == BF::point(1.0));
    }
    SUBCASE("Wentzell coupling") {
        const Functionals psi{BF::point(0.0, 2) - BF::point(0.0, 1), BF::point(1.0, 2) - BF::point(1.0, 1)};
        const Functionals phi = phi_from_psi(SecondDerivative{}, psi);
        CHECK(phi[0] == (BF::point(0.0) - BF::point(0.0, 2) + BF::point(0.0, 1)).simplified());
        CHECK(phi[1] == (BF::point(0.0, 1) - BF::point(1.0, 2) + BF::point(1.0, 1)).simplified());
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(phi_from_psi(SecondDerivative{}, {BF::point(0.0)}), DimensionError);
    }
}

TEST_CASE("functional validation and evaluation guards") {
    CHECK_THROWS_AS(BF::point(1.5).validate(), ValidationError);
    CHECK_THROWS_AS(BF::point(0.5, 3).validate(), ValidationError);
    CHECK_THROWS_AS(BF::point(0.5, 0, 1.0, -1.0).validate(), ValidationError);
    const HoloCurve f = HoloCurve::polynomial({1.0, 1.0});
    CHECK_THROWS_AS(f.evaluate(0.5, 3), Error);
    CHECK_THROWS_AS(f.evaluate(1.5), Error);
}

TEST_CASE("sampled functionals reproduce exact values on quadratics") {
    const HoloCurve q = HoloCurve::polynomial({0.5, -1.0, 2.0});
    const BF psi = BF::point(0.0, 2) - BF::point(0.0, 1) + BF::point(1.0, 1, 2.0) + BF::point(0.37) + BF::integral(3.0);
    for (std::size_t n : {65u, 129u, 257u}) {
        const SampledFunction s = sample(q, n);
        CHECK(std::abs(apply_functional(psi, s, 0.0) - apply_functional(psi, q)) < 1e-9);
    }
}

TEST_CASE("fourth-order differentiation of samples") {
    const HoloCurve e = dirichlet_basis(FirstDerivative{}, Complex{1.0, 2.0})[0];
    double previous = 0.0;
    for (std::size_t n : {101u, 201u, 401u}) {
        const SampledFunction d = differentiate(sample(e, n));
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(d.values[i] - e.evaluate(d.node(i), 1)));
        if (previous > 0.0) CHECK(previous / err > 12.0);
        previous = err;
    }
}

TEST_CASE("resolvent of d/ds") {
    SUBCASE("zero data") {
        SampledFunction g;
        g.values.assign(101, Complex{});
        const SampledFunction f = resolvent_apply(FirstDerivative{}, {1.0, 1.0}, g);
        for (Complex v : f.values) CHECK(v == Complex{});
    }
    SUBCASE("lambda = 0, g = 1 gives -s") {
        SampledFunction g;
        g.values.assign(201, Complex{1.0});
        const SampledFunction f = resolvent_apply(FirstDerivative{}, 0.0, g);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f.values[i] + f.node(i)) < 1e-13);
    }
    SUBCASE("defining equations") {
        const Complex lambda{0.5, -3.0};
        const SampledFunction g = sample(HoloCurve::polynomial({1.0, -2.0, 0.0, 4.0}), 2001);
        const SampledFunction f = resolvent_apply(FirstDerivative{}, lambda, g);
        const SampledFunction df = differentiate(f);
        CHECK(f.values[0] == Complex{});
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(std::abs(lambda * f.values[i] - df.values[i] - g.values[i]) < 1e-8);
    }
    SUBCASE("Dirichlet-operator identity at lambda = 1, mu = 2") {
        const Complex lambda = 1.0, mu = 2.0;
        const SampledFunction l_lambda = sample(dirichlet_basis(FirstDerivative{}, lambda)[0], 2001);
        const SampledFunction r = resolvent_apply(FirstDerivative{}, mu, l_lambda);
        const SampledFunction dr = differentiate(r);
        const HoloCurve l_mu = dirichlet_basis(FirstDerivative{}, mu)[0];
        for (std::size_t i = 0; i < r.size(); ++i)
            CHECK(std::abs(lambda * r.values[i] - dr.values[i] - l_mu.evaluate(r.node(i))) < 1e-6);
    }
    SUBCASE("other kinds are unsupported") {
        SampledFunction g;
        g.values.assign(11, Complex{1.0});
        CHECK_THROWS_AS(resolvent_apply(SecondDerivative{}, 1.0, g), UnsupportedKindError);
    }
}

TEST_CASE("catalog couplings") {
    const Functionals heat = heat_delay_psi(BoundaryDelayHeat{{DelayAtom{-1.0, 2.0}, DelayAtom{-0.5, 1.0}}});
    REQUIRE(heat.size() == 1);
    CHECK(heat[0].points == std::vector<PointTerm>{{0.0, 1, 1.0, 0.0}});
    CHECK(heat[0].integrals.size() == 2);
    const Functionals cd = convection_delay_psi();
    REQUIRE(cd.size() == 1);
    CHECK(cd[0].has_delay());
    // psi(l) = l'(0) - l(0) + e^{-lambda} l(1) with l(1) = 1.
    const Complex lambda{-1.0, 2.0};
    const HoloCurve l = dirichlet_basis(ConvectionDiffusion{1.0, 0.0}, lambda)[0];
    CHECK(std::abs(apply_functional(cd[0], l) - (l.evaluate(0.0, 1) - l.evaluate(0.0) + std::exp(-lambda))) < 1e-14);
}
