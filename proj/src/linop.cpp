#include "pertspec/linop.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pertspec/errors.hpp"

namespace pertspec {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                             "x" + std::to_string(b.cols()));
}

void require_square(const ComplexMatrix& m, const char* op) {
    if (!m.is_square())
        throw DimensionError(std::string(op) + ": matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected square");
}

// Row update a_i[j] -= l * a_k[j] over a contiguous range, written on the
// interleaved doubles so the compiler vectorizes without the C99 complex
// multiply NaN-recovery path.
inline void axpy_row(Complex l, const Complex* src, Complex* dst, std::size_t count) {
    const double lr = l.real();
    const double li = l.imag();
    const double* s = reinterpret_cast<const double*>(src);
    double* d = reinterpret_cast<double*>(dst);
    for (std::size_t j = 0; j < count; ++j) {
        const double sr = s[2 * j];
        const double si = s[2 * j + 1];
        d[2 * j] -= lr * sr - li * si;
        d[2 * j + 1] -= lr * si + li * sr;
    }
}

// Below this trailing size the fork/join overhead outweighs the update.
constexpr std::size_t kParallelLuThreshold = 96;

}  // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex{}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, CVector entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
        throw DimensionError("ComplexMatrix: " + std::to_string(entries_.size()) +
                             " entries for shape " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
    if (!all_finite()) throw ValidationError("ComplexMatrix: non-finite entry");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("ComplexMatrix: ragged initializer");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
    ComplexMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

CVector ComplexMatrix::column(std::size_t j) const {
    CVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                                   std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block: out of range");
    ComplexMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        std::copy_n(entries_.data() + (r0 + i) * cols_ + c0, nc, b.entries_.data() + i * nc);
    return b;
}

void ComplexMatrix::set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b) {
    if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw DimensionError("set_block: out of range");
    for (std::size_t i = 0; i < b.rows_; ++i)
        std::copy_n(b.entries_.data() + i * b.cols_, b.cols_, entries_.data() + (r0 + i) * cols_ + c0);
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool ComplexMatrix::all_finite() const {
    return std::all_of(entries_.begin(), entries_.end(), [](Complex z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

double ComplexMatrix::norm_inf() const {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (Complex z : row(i)) s += std::abs(z);
        best = std::max(best, s);
    }
    return best;
}

double ComplexMatrix::norm_max() const {
    double best = 0.0;
    for (Complex z : entries_) best = std::max(best, std::abs(z));
    return best;
}

double ComplexMatrix::norm_frobenius() const {
    double s = 0.0;
    for (Complex z : entries_) s += std::norm(z);
    return std::sqrt(s);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    require_same_shape(*this, o, "operator+=");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    require_same_shape(*this, o, "operator-=");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
    for (Complex& z : entries_) z *= s;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows())
        throw DimensionError("operator*: inner dimensions " + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()));
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            axpy_row(-aik, b.row(k).data(), ci.data(), b.cols());
        }
    }
    return c;
}

CVector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
    if (a.cols() != x.size()) throw DimensionError("matrix-vector product: size mismatch");
    CVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex s{};
        auto r = a.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

double norm_inf(std::span<const Complex> v) {
    double m = 0.0;
    for (Complex z : v) m = std::max(m, std::abs(z));
    return m;
}

// ---------------------------------------------------------------------------
// Determinants and LU

void ScaledDeterminant::multiply(Complex factor) {
    mantissa *= factor;
    const double mag = std::abs(mantissa);
    if (mag == 0.0 || !std::isfinite(mag)) {
        if (mag == 0.0) exponent = 0;
        return;
    }
    int e = 0;
    std::frexp(mag, &e);
    mantissa = {std::ldexp(mantissa.real(), -e), std::ldexp(mantissa.imag(), -e)};
    exponent += e;
}

Complex ScaledDeterminant::value() const {
    const long e = std::clamp(exponent, -100000L, 100000L);
    return {std::ldexp(mantissa.real(), static_cast<int>(e)),
            std::ldexp(mantissa.imag(), static_cast<int>(e))};
}

ScaledDeterminant LUFactors::scaled_determinant() const {
    ScaledDeterminant d;
    d.multiply(static_cast<double>(parity));
    for (std::size_t k = 0; k < size(); ++k) d.multiply(combined(k, k));
    return d;
}

ComplexMatrix LUFactors::lower() const {
    const std::size_t n = size();
    ComplexMatrix l = ComplexMatrix::identity(n);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) l(i, j) = combined(i, j);
    return l;
}

ComplexMatrix LUFactors::upper() const {
    const std::size_t n = size();
    ComplexMatrix u(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) u(i, j) = combined(i, j);
    return u;
}

ComplexMatrix LUFactors::reassemble() const {
    ComplexMatrix lu = lower() * upper();
    // Undo the swaps in reverse order: row k of LU came from row pivots[k].
    for (std::size_t k = size(); k-- > 0;) {
        if (pivots[k] != k) {
            auto a = lu.row(k);
            auto b = lu.row(pivots[k]);
            std::swap_ranges(a.begin(), a.end(), b.begin());
        }
    }
    return lu;
}

LUFactors lu_decompose(const ComplexMatrix& m, ExecPolicy policy) {
    require_square(m, "lu_decompose");
    const std::size_t n = m.rows();
    LUFactors f;
    f.combined = m;
    f.pivots.resize(n);
    f.parity = 1;
    f.min_pivot = n == 0 ? 0.0 : std::abs(m(0, 0));
    ComplexMatrix& a = f.combined;
    bool first = true;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        f.pivots[k] = p;
        if (p != k) {
            auto rk = a.row(k);
            auto rp = a.row(p);
            std::swap_ranges(rk.begin(), rk.end(), rp.begin());
            f.parity = -f.parity;
        }
        f.max_pivot = std::max(f.max_pivot, best);
        f.min_pivot = first ? best : std::min(f.min_pivot, best);
        first = false;
        if (best == 0.0) continue;  // column already eliminated

        const Complex inv_pivot = 1.0 / a(k, k);
        const Complex* pivot_row = a.row(k).data() + k + 1;
        const std::size_t tail = n - k - 1;
        const auto trailing = static_cast<std::ptrdiff_t>(n);
        const auto start = static_cast<std::ptrdiff_t>(k + 1);

        if (policy == ExecPolicy::parallel && tail >= kParallelLuThreshold) {
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = start; i < trailing; ++i) {
                Complex* ri = a.row(static_cast<std::size_t>(i)).data();
                const Complex l = ri[k] * inv_pivot;
                ri[k] = l;
                if (l != Complex{}) axpy_row(l, pivot_row, ri + k + 1, tail);
            }
        } else {
            for (std::ptrdiff_t i = start; i < trailing; ++i) {
                Complex* ri = a.row(static_cast<std::size_t>(i)).data();
                const Complex l = ri[k] * inv_pivot;
                ri[k] = l;
                if (l != Complex{}) axpy_row(l, pivot_row, ri + k + 1, tail);
            }
        }
    }
    return f;
}

Complex determinant(const ComplexMatrix& m) { return scaled_determinant(m).value(); }

ScaledDeterminant scaled_determinant(const ComplexMatrix& m) {
    return lu_decompose(m, ExecPolicy::serial).scaled_determinant();
}

CVector solve(const LUFactors& lu, std::span<const Complex> rhs) {
    const std::size_t n = lu.size();
    if (rhs.size() != n)
        throw DimensionError("solve: rhs length " + std::to_string(rhs.size()) + " for order " +
                             std::to_string(n));
    if (lu.singular()) throw SingularityError("solve: matrix singular to tolerance", lu.min_pivot);
    const ComplexMatrix& a = lu.combined;
    CVector x(rhs.begin(), rhs.end());
    for (std::size_t k = 0; k < n; ++k)
        if (lu.pivots[k] != k) std::swap(x[k], x[lu.pivots[k]]);
    for (std::size_t i = 0; i < n; ++i) {
        Complex s = x[i];
        auto r = a.row(i);
        for (std::size_t j = 0; j < i; ++j) s -= r[j] * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        Complex s = x[i];
        auto r = a.row(i);
        for (std::size_t j = i + 1; j < n; ++j) s -= r[j] * x[j];
        x[i] = s / r[i];
    }
    return x;
}

CVector solve(const ComplexMatrix& m, std::span<const Complex> rhs, ExecPolicy policy) {
    require_square(m, "solve");
    if (rhs.size() != m.rows()) throw DimensionError("solve: rhs length mismatch");
    return solve(lu_decompose(m, policy), rhs);
}

ComplexMatrix solve(const LUFactors& lu, const ComplexMatrix& rhs) {
    if (rhs.rows() != lu.size()) throw DimensionError("solve: rhs rows mismatch");
    ComplexMatrix x(rhs.rows(), rhs.cols());
    for (std::size_t j = 0; j < rhs.cols(); ++j) {
        const CVector col = solve(lu, rhs.column(j));
        for (std::size_t i = 0; i < rhs.rows(); ++i) x(i, j) = col[i];
    }
    return x;
}

ComplexMatrix inverse(const ComplexMatrix& m) {
    require_square(m, "inverse");
    return solve(lu_decompose(m), ComplexMatrix::identity(m.rows()));
}

std::vector<CVector> kernel_basis(const ComplexMatrix& m, double rel_tol, std::size_t min_dim) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    ComplexMatrix a = m;
    std::vector<std::size_t> col_perm(cols);
    for (std::size_t j = 0; j < cols; ++j) col_perm[j] = j;
    const double threshold = rel_tol * m.norm_max();
    const std::size_t max_rank = std::min(rows, cols);
    const std::size_t rank_cap = cols >= min_dim ? std::min(max_rank, cols - min_dim) : 0;

    std::size_t rank = 0;
    for (; rank < rank_cap; ++rank) {
        const std::size_t k = rank;
        std::size_t pi = k, pj = k;
        double best = -1.0;
        for (std::size_t i = k; i < rows; ++i)
            for (std::size_t j = k; j < cols; ++j)
                if (const double v = std::abs(a(i, j)); v > best) {
                    best = v;
                    pi = i;
                    pj = j;
                }
        if (best <= threshold) break;
        if (pi != k) {
            auto r1 = a.row(k);
            auto r2 = a.row(pi);
            std::swap_ranges(r1.begin(), r1.end(), r2.begin());
        }
        if (pj != k) {
            for (std::size_t i = 0; i < rows; ++i) std::swap(a(i, k), a(i, pj));
            std::swap(col_perm[k], col_perm[pj]);
        }
        for (std::size_t i = k + 1; i < rows; ++i) {
            const Complex l = a(i, k) / a(k, k);
            a(i, k) = 0.0;
            for (std::size_t j = k + 1; j < cols; ++j) a(i, j) -= l * a(k, j);
        }
    }

    std::vector<CVector> basis;
    for (std::size_t free = rank; free < cols; ++free) {
        CVector y(cols, Complex{});
        y[free] = 1.0;
        for (std::size_t i = rank; i-- > 0;) {
            Complex s{};
            for (std::size_t j = i + 1; j < cols; ++j) s += a(i, j) * y[j];
            y[i] = -s / a(i, i);
        }
        CVector x(cols);
        for (std::size_t j = 0; j < cols; ++j) x[col_perm[j]] = y[j];
        std::size_t arg = 0;
        for (std::size_t j = 1; j < cols; ++j)
            if (std::abs(x[j]) > std::abs(x[arg])) arg = j;
        const Complex scale = 1.0 / x[arg];
        for (Complex& z : x) z *= scale;
        x[arg] = 1.0;
        basis.push_back(std::move(x));
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Block matrices

void BlockMatrix::validate() const {
    if (P.rows() != Q.rows() || R.rows() != S.rows() || P.cols() != R.cols() || Q.cols() != S.cols())
        throw DimensionError("BlockMatrix: blocks do not tile (P " + std::to_string(P.rows()) + "x" +
                             std::to_string(P.cols()) + ", Q " + std::to_string(Q.rows()) + "x" +
                             std::to_string(Q.cols()) + ", R " + std::to_string(R.rows()) + "x" +
                             std::to_string(R.cols()) + ", S " + std::to_string(S.rows()) + "x" +
                             std::to_string(S.cols()) + ")");
}

ComplexMatrix BlockMatrix::assemble() const {
    validate();
    ComplexMatrix t(P.rows() + R.rows(), P.cols() + Q.cols());
    t.set_block(0, 0, P);
    t.set_block(0, P.cols(), Q);
    t.set_block(P.rows(), 0, R);
    t.set_block(P.rows(), P.cols(), S);
    return t;
}

namespace {

LUFactors factor_invertible(const ComplexMatrix& m, const char* what) {
    if (!m.is_square()) throw DimensionError(std::string(what) + " must be square");
    LUFactors lu = lu_decompose(m, ExecPolicy::serial);
    if (lu.singular()) throw SingularityError(std::string(what) + " singular to tolerance", lu.min_pivot);
    return lu;
}

ComplexMatrix invert_via_delta1(const BlockMatrix& b) {
    const LUFactors s_lu = factor_invertible(b.S, "S");
    const ComplexMatrix s_inv_r = solve(s_lu, b.R);
    const ComplexMatrix delta1 = b.P - b.Q * s_inv_r;
    const LUFactors d_lu = factor_invertible(delta1, "Delta_1");
    const ComplexMatrix s_inv = solve(s_lu, ComplexMatrix::identity(b.S.rows()));
    const ComplexMatrix d_inv = solve(d_lu, ComplexMatrix::identity(delta1.rows()));
    const ComplexMatrix q_s_inv = b.Q * s_inv;

    BlockMatrix inv;
    inv.P = d_inv;
    inv.Q = Complex{-1.0} * (d_inv * q_s_inv);
    inv.R = Complex{-1.0} * (s_inv_r * d_inv);
    inv.S = s_inv + s_inv_r * d_inv * q_s_inv;
    return inv.assemble();
}

ComplexMatrix invert_via_delta2(const BlockMatrix& b) {
    const LUFactors p_lu = factor_invertible(b.P, "P");
    const ComplexMatrix p_inv_q = solve(p_lu, b.Q);
    const ComplexMatrix delta2 = b.S - b.R * p_inv_q;
    const LUFactors d_lu = factor_invertible(delta2, "Delta_2");
    const ComplexMatrix p_inv = solve(p_lu, ComplexMatrix::identity(b.P.rows()));
    const ComplexMatrix d_inv = solve(d_lu, ComplexMatrix::identity(delta2.rows()));
    const ComplexMatrix r_p_inv = b.R * p_inv;

    BlockMatrix inv;
    inv.P = p_inv + p_inv_q * d_inv * r_p_inv;
    inv.Q = Complex{-1.0} * (p_inv_q * d_inv);
    inv.R = Complex{-1.0} * (d_inv * r_p_inv);
    inv.S = d_inv;
    return inv.assemble();
}

}  // namespace

ComplexMatrix schur_complement_1(const BlockMatrix& b) {
    b.validate();
    const LUFactors s_lu = factor_invertible(b.S, "schur_complement_1: S");
    return b.P - b.Q * solve(s_lu, b.R);
}

ComplexMatrix schur_complement_2(const BlockMatrix& b) {
    b.validate();
    const LUFactors p_lu = factor_invertible(b.P, "schur_complement_2: P");
    return b.S - b.R * solve(p_lu, b.Q);
}

ComplexMatrix block_invert(const BlockMatrix& b, SchurRoute route) {
    b.validate();
    switch (route) {
        case SchurRoute::via_delta1:
            return invert_via_delta1(b);
        case SchurRoute::via_delta2:
            return invert_via_delta2(b);
        case SchurRoute::automatic:
            break;
    }
    try {
        return invert_via_delta1(b);
    } catch (const SingularityError& first) {
        try {
            return invert_via_delta2(b);
        } catch (const SingularityError& second) {
            throw SingularityError("block_invert: neither diagonal route invertible",
                                   std::min(first.smallest_pivot(), second.smallest_pivot()));
        }
    }
}

ComplexMatrix transfer_inverse_qr(const ComplexMatrix& q, const ComplexMatrix& r,
                                  const ComplexMatrix& inv_rq) {
    if (q.cols() != r.rows() || r.cols() != q.rows() || inv_rq.rows() != q.cols() ||
        inv_rq.cols() != q.cols())
        throw DimensionError("transfer_inverse_qr: expected Q n x m, R m x n, inv m x m");
    const std::size_t n = q.rows();
    const ComplexMatrix id = ComplexMatrix::identity(n);
    ComplexMatrix result = id + q * inv_rq * r;

    const ComplexMatrix residual = (id - q * r) * result - id;
    if (!(residual.norm_max() <= 1e-9 * std::max(1.0, result.norm_max())))
        throw Error("transfer_inverse_qr: supplied inverse does not invert Id - RQ (residual " +
                    std::to_string(residual.norm_max()) + ")");
    return result;
}

}  // namespace pertspec
