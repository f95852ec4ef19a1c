#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pertspec/charfn.hpp"
#include "pertspec/errors.hpp"
#include "pertspec/oracle.hpp"
#include "test_support.hpp"

using namespace pertspec;
using BF = BoundaryFunctional;
using pertspec::testing::ComplexSampler;

namespace {

/// f(0) = f(1): F = 1 - e^lambda.
Functionals periodic_psi() { return {BF::point(0.0) - BF::point(1.0)}; }

/// Wentzell-type conditions f'' = f' at both ends: roots 1, 0 and -(pi j)^2.
Functionals wentzell_psi() {
    return {BF::point(0.0, 2) - BF::point(0.0, 1), BF::point(1.0, 2) - BF::point(1.0, 1)};
}

}  // namespace

TEST_CASE("dense_eigenvalues: diagonal and companion matrices") {
    const ComplexMatrix d{{1.0, 0.0, 0.0}, {0.0, -2.0, 0.0}, {0.0, 0.0, Complex{0.0, 3.0}}};
    const auto all = dense_eigenvalues(d, {{-5.0, -5.0}, {5.0, 5.0}});
    REQUIRE(all.size() == 3);
    const auto some = dense_eigenvalues(d, {{-0.5, -0.5}, {1.5, 0.5}});
    REQUIRE(some.size() == 1);
    CHECK(std::abs(some[0] - 1.0) < 1e-14);

    // Companion matrix of z^2 - 1.
    const auto c = dense_eigenvalues(ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}, {{-2.0, -1.0}, {2.0, 1.0}});
    REQUIRE(c.size() == 2);
    CHECK(std::abs(nearest(c, -1.0) + 1.0) < 1e-14);
    CHECK(std::abs(nearest(c, 1.0) - 1.0) < 1e-14);
}

TEST_CASE("dense_eigenvalues certifies every value of a random matrix") {
    ComplexSampler s(50);
    const ComplexMatrix m = s.matrix(50, 50);
    const auto ev = dense_eigenvalues(m, {{-20.0, -20.0}, {20.0, 20.0}});
    CHECK(ev.size() == 50);
    for (Complex z : ev) CHECK(inverse_iteration_residual(m, z) < 1e-8 * m.norm_inf());
}

TEST_CASE("nearest") {
    CHECK(nearest({1.0, 2.0, 3.0}, 2.2) == Complex{2.0});
    CHECK_THROWS_AS(nearest({}, 0.0), Error);
}

TEST_CASE("fd_discretize: periodic first-derivative problem") {
    const Discretization d = fd_discretize(FirstDerivative{}, periodic_psi(), 256);
    CHECK(d.eliminated.size() == 1);
    CHECK(d.kept.size() == 256);
    const auto ev = dense_eigenvalues(d.matrix, {{-1.0, -7.0}, {1.0, 7.0}});
    for (Complex z : {Complex{}, Complex{0.0, 2.0 * kPi}, Complex{0.0, -2.0 * kPi}})
        CHECK(std::abs(nearest(ev, z) - z) < 5e-2);
}

TEST_CASE("fd_discretize: Wentzell-type second-derivative problem") {
    const Discretization d = fd_discretize(SecondDerivative{}, wentzell_psi(), 256);
    CHECK(d.eliminated.size() == 2);
    const auto ev = dense_eigenvalues(d.matrix, {{-45.0, -1.0}, {2.0, 1.0}});
    for (double z : {-4.0 * kPi * kPi, -kPi * kPi, 1.0}) CHECK(std::abs(nearest(ev, z) - z) < 5e-2);
}

TEST_CASE("fd_discretize converges at second order") {
    // Convection-diffusion with c = k = 0 and f'(0) = 0: the Neumann
    // Laplacian, eigenvalues -(pi j)^2.
    const ConvectionDiffusion cd{0.0, 0.0};
    const Functionals psi{BF::point(0.0, 1)};
    const double target = -kPi * kPi;
    const Rectangle window{{-10.0, -1.0}, {1.0, 1.0}};
    double prev = 0.0;
    for (std::size_t n : {64u, 128u, 256u}) {
        const auto ev = dense_eigenvalues(fd_discretize(cd, psi, n).matrix, window);
        const double err = std::abs(nearest(ev, target) - target);
        if (n > 64) CHECK(prev / err >= 3.5);
        prev = err;
    }
}

TEST_CASE("fd_discretize refuses what it cannot discretize") {
    CHECK_THROWS_AS(fd_discretize(FirstDerivative{}, {BF::point(1.0, 0, 1.0, 0.5)}, 128), InapplicableError);
    CHECK_THROWS_AS(fd_discretize(QuadraticPencil{ComplexMatrix::identity(2), ComplexMatrix(2, 2)}, {}, 128),
                    UnsupportedKindError);
    CHECK_THROWS_AS(fd_discretize(FirstDerivative{}, periodic_psi(), 8), Error);
}

TEST_CASE("eigen_residual on exact eigenfunctions") {
    ProblemSpec spec;
    spec.kind = FirstDerivative{};
    spec.psi = periodic_psi();
    const Complex lambda{0.0, 2.0 * kPi};
    const auto kernel = kernel_vectors(spec, lambda);
    REQUIRE(kernel.size() == 1);
    const HoloCurve f = eigenfunction(spec, lambda, kernel[0]);
    const EigenResidual r = eigen_residual(spec.kind, spec.psi, lambda, f, 2001);
    CHECK(r.ode < 1e-10);
    CHECK(r.bc < 1e-10);

    // The same function is not an eigenfunction for a different lambda.
    const EigenResidual wrong = eigen_residual(spec.kind, spec.psi, Complex{0.0, 3.0}, f, 2001);
    CHECK(wrong.ode > 1e-3);
}
