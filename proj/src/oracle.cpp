#include "pertspec/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "pertspec/errors.hpp"

namespace pertspec {

namespace {

bool any_delay(const Functionals& fs) {
    return std::any_of(fs.begin(), fs.end(), [](const BoundaryFunctional& f) { return f.has_delay(); });
}

int differential_order(const ProblemKind& kind) {
    return std::holds_alternative<FirstDerivative>(kind) ? 1 : 2;
}

/// Row of the discrete differential expression centred at node i.
void operator_row(const ProblemKind& kind, std::size_t i, std::size_t n, double h, std::span<Complex> row) {
    if (std::holds_alternative<FirstDerivative>(kind)) {
        if (i == 0) {
            row[0] = -1.5 / h;
            row[1] = 2.0 / h;
            row[2] = -0.5 / h;
        } else if (i == n) {
            row[n] = 1.5 / h;
            row[n - 1] = -2.0 / h;
            row[n - 2] = 0.5 / h;
        } else {
            row[i + 1] = 0.5 / h;
            row[i - 1] = -0.5 / h;
        }
        return;
    }
    const double h2 = h * h;
    row[i - 1] = 1.0 / h2;
    row[i] = -2.0 / h2;
    row[i + 1] = 1.0 / h2;
    if (const auto* cd = std::get_if<ConvectionDiffusion>(&kind)) {
        // f'' - 2c f' + k f
        row[i + 1] -= cd->c / h;
        row[i - 1] += cd->c / h;
        row[i] += cd->k;
    }
}

/// Forward/back substitution on packed LU factors with tiny pivots floored,
/// so that shifts sitting exactly on an eigenvalue still produce a vector.
CVector guarded_solve(const LUFactors& lu, CVector b) {
    const std::size_t n = lu.size();
    const double floor = std::max(lu.max_pivot, 1e-300) * 1e-15;
    for (std::size_t k = 0; k < n; ++k)
        if (lu.pivots[k] != k) std::swap(b[k], b[lu.pivots[k]]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) b[i] -= lu.combined(i, j) * b[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) b[i] -= lu.combined(i, j) * b[j];
        Complex d = lu.combined(i, i);
        if (std::abs(d) < floor) d = floor;
        b[i] /= d;
    }
    return b;
}

double norm2(const CVector& v) {
    double s = 0.0;
    for (Complex z : v) s += std::norm(z);
    return std::sqrt(s);
}

}  // namespace

Discretization fd_discretize(const ProblemKind& kind, const Functionals& psi, std::size_t n) {
    if (!is_dirichlet_kind(kind))
        throw UnsupportedKindError("fd_discretize: unsupported kind " + kind_name(kind));
    if (n < 64) throw ValidationError("fd_discretize: need n >= 64");
    if (psi.size() != boundary_dimension(kind))
        throw DimensionError("fd_discretize: " + kind_name(kind) + " needs " +
                             std::to_string(boundary_dimension(kind)) + " functionals");
    const Functionals constraints_domain = domain_constraints(kind);
    if (any_delay(psi))
        throw InapplicableError("fd_discretize: delayed boundary terms have no finite-difference counterpart");

    const std::size_t points = n + 1;
    const double h = 1.0 / static_cast<double>(n);
    const int order = differential_order(kind);

    Functionals constraints = psi;
    constraints.insert(constraints.end(), constraints_domain.begin(), constraints_domain.end());
    const std::size_t r = constraints.size();
    if (r != static_cast<std::size_t>(order))
        throw InapplicableError("fd_discretize: " + std::to_string(r) + " boundary rows for an operator of order " +
                                std::to_string(order));

    ComplexMatrix b(r, points);
    for (std::size_t i = 0; i < r; ++i) {
        const CVector row = functional_row(constraints[i], points, Complex{});
        std::copy(row.begin(), row.end(), b.row(i).begin());
    }

    // Candidate endpoint sets: order 1 prefers s = 0 and falls back to s = 1.
    std::vector<std::vector<std::size_t>> candidates;
    if (order == 1)
        candidates = {{0}, {n}};
    else
        candidates = {{0, n}};

    for (const auto& elim : candidates) {
        ComplexMatrix be(r, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) be(i, j) = b(i, elim[j]);
        const LUFactors lu = lu_decompose(be, ExecPolicy::serial);
        if (lu.singular()) continue;

        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < points; ++i)
            if (std::find(elim.begin(), elim.end(), i) == elim.end()) kept.push_back(i);
        const std::size_t nk = kept.size();

        // f_E = E f_K with E = -B_E^{-1} B_K.
        ComplexMatrix bk(r, nk);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < nk; ++j) bk(i, j) = -b(i, kept[j]);
        const ComplexMatrix e = solve(lu, bk);

        Discretization d;
        d.n = n;
        d.h = h;
        d.kind = kind;
        d.psi = psi;
        d.kept = kept;
        d.eliminated = elim;
        d.matrix = ComplexMatrix(nk, nk);
        CVector row(points);
        for (std::size_t a = 0; a < nk; ++a) {
            std::fill(row.begin(), row.end(), Complex{});
            operator_row(kind, kept[a], n, h, row);
            for (std::size_t j = 0; j < nk; ++j) d.matrix(a, j) = row[kept[j]];
            for (std::size_t q = 0; q < r; ++q) {
                const Complex w = row[elim[q]];
                if (w == Complex{}) continue;
                for (std::size_t j = 0; j < nk; ++j) d.matrix(a, j) += w * e(q, j);
            }
        }
        return d;
    }
    throw InapplicableError("fd_discretize: boundary rows cannot be solved for the endpoint unknowns");
}

double inverse_iteration_residual(const ComplexMatrix& m, Complex lambda) {
    const std::size_t n = m.rows();
    const double scale = std::max(m.norm_inf(), 1e-300);
    ComplexMatrix shifted = m;
    const Complex shift = lambda + Complex{1e-10 * scale, 1e-10 * scale};
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= shift;
    const LUFactors lu = lu_decompose(shifted);

    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = Complex{1.0, 0.37 * static_cast<double>(i % 7)};
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 4; ++it) {
        v = guarded_solve(lu, std::move(v));
        const double nv = norm2(v);
        if (!(nv > 0.0) || !std::isfinite(nv)) break;
        for (Complex& z : v) z /= nv;
        CVector res = m * v;
        for (std::size_t i = 0; i < n; ++i) res[i] -= lambda * v[i];
        best = std::min(best, norm2(res));
    }
    return best;
}

std::vector<Complex> dense_eigenvalues(const ComplexMatrix& m, const Rectangle& window) {
    if (!m.is_square()) throw DimensionError("dense_eigenvalues: matrix must be square");
    if (m.rows() > 2048) throw DimensionError("dense_eigenvalues: dimension above 2048");
    const auto n = static_cast<Eigen::Index>(m.rows());
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver;
    solver.compute(a, false);
    if (solver.info() != Eigen::Success) throw ConvergenceError("dense_eigenvalues: QR iteration failed");

    const double bound = 1e-8 * std::max(m.norm_inf(), 1e-300);
    std::vector<Complex> out;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex lambda = solver.eigenvalues()(i);
        if (!window.contains(lambda)) continue;
        const double res = inverse_iteration_residual(m, lambda);
        if (!(res < bound))
            throw ConvergenceError("dense_eigenvalues: eigenvalue failed its residual certificate");
        out.push_back(lambda);
    }
    std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return out;
}

EigenResidual eigen_residual(const ProblemKind& kind, const Functionals& psi, Complex lambda, const HoloCurve& f,
                             std::size_t points) {
    if (points < 2) throw DimensionError("eigen_residual: need at least two grid points");
    double sup = 0.0;
    for (std::size_t i = 0; i < points; ++i)
        sup = std::max(sup, std::abs(f.evaluate(static_cast<double>(i) / static_cast<double>(points - 1))));
    const double scale = sup > 0.0 ? 1.0 / sup : 1.0;

    EigenResidual out;
    for (std::size_t i = 0; i < points; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(points - 1);
        out.ode = std::max(out.ode, scale * std::abs(ode_residual_at(kind, lambda, f, s)));
    }
    for (const BoundaryFunctional& p : psi) out.bc = std::max(out.bc, scale * std::abs(apply_functional(p, f)));
    for (const BoundaryFunctional& c : domain_constraints(kind))
        out.bc = std::max(out.bc, scale * std::abs(apply_functional(c, f)));
    return out;
}

Complex nearest(const std::vector<Complex>& values, Complex target) {
    if (values.empty()) throw Error("nearest: empty candidate list");
    return *std::min_element(values.begin(), values.end(), [&](Complex a, Complex b) {
        return std::abs(a - target) < std::abs(b - target);
    });
}

}  // namespace pertspec
