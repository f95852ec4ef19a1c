#pragma once

// Dense complex linear algebra and the block-matrix (Schur complement)
// calculus used to reduce characteristic matrices.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "pertspec/types.hpp"

namespace pertspec {

/// Dense rectangular matrix of complex scalars, stored row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    /// Takes ownership of `entries` (row-major); throws DimensionError on a
    /// size mismatch and ValidationError on a non-finite entry.
    ComplexMatrix(std::size_t rows, std::size_t cols, CVector entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const Complex> diag);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return entries_.empty(); }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    std::span<Complex> row(std::size_t i) { return {entries_.data() + i * cols_, cols_}; }
    std::span<const Complex> row(std::size_t i) const { return {entries_.data() + i * cols_, cols_}; }
    const CVector& entries() const { return entries_; }
    CVector column(std::size_t j) const;

    ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b);
    ComplexMatrix transpose() const;

    bool all_finite() const;
    double norm_inf() const;  ///< max row sum of magnitudes
    double norm_max() const;  ///< largest entry magnitude
    double norm_frobenius() const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(Complex s);

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    CVector entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
CVector operator*(const ComplexMatrix& a, std::span<const Complex> x);

double norm_inf(std::span<const Complex> v);

/// Determinant stored as mantissa * 2^exponent so that long products of
/// pivots cannot overflow before the caller decides what to do with them.
struct ScaledDeterminant {
    Complex mantissa{1.0, 0.0};
    long exponent = 0;

    void multiply(Complex factor);
    Complex value() const;
};

/// Pivots below this fraction of the largest pivot count as zero.
inline constexpr double kSingularityTolerance = 1e-12;

/// Partial-pivoted LU factors packed into one matrix: strictly lower part
/// holds the unit-lower factor, the rest holds U. `pivots[k]` is the row
/// swapped with row k at step k.
struct LUFactors {
    ComplexMatrix combined;
    std::vector<std::size_t> pivots;
    int parity = 1;
    double max_pivot = 0.0;
    double min_pivot = 0.0;

    std::size_t size() const { return combined.rows(); }
    bool singular() const { return !(min_pivot > kSingularityTolerance * max_pivot); }
    ScaledDeterminant scaled_determinant() const;
    Complex determinant() const { return scaled_determinant().value(); }
    ComplexMatrix lower() const;
    ComplexMatrix upper() const;
    /// Rebuilds P*L*U (i.e. the original matrix).
    ComplexMatrix reassemble() const;
};

LUFactors lu_decompose(const ComplexMatrix& m, ExecPolicy policy = ExecPolicy::parallel);

Complex determinant(const ComplexMatrix& m);
ScaledDeterminant scaled_determinant(const ComplexMatrix& m);

/// Solves M x = rhs; SingularityError when M is singular to tolerance.
CVector solve(const ComplexMatrix& m, std::span<const Complex> rhs,
              ExecPolicy policy = ExecPolicy::parallel);
CVector solve(const LUFactors& lu, std::span<const Complex> rhs);
ComplexMatrix solve(const LUFactors& lu, const ComplexMatrix& rhs);
ComplexMatrix inverse(const ComplexMatrix& m);

/// Basis of the numerical kernel by Gaussian elimination with complete
/// pivoting. Pivots with magnitude <= rel_tol * max|entry| are treated as
/// zero; at least `min_dim` vectors are returned. Each vector is scaled so
/// its largest-magnitude entry is 1.
std::vector<CVector> kernel_basis(const ComplexMatrix& m, double rel_tol, std::size_t min_dim = 0);

/// Operator matrix T = (P Q; R S) with P: E->G, Q: F->G, R: E->H, S: F->H.
struct BlockMatrix {
    ComplexMatrix P;
    ComplexMatrix Q;
    ComplexMatrix R;
    ComplexMatrix S;

    /// Throws DimensionError unless the four blocks tile a matrix.
    void validate() const;
    ComplexMatrix assemble() const;
};

/// P - Q S^{-1} R. Requires S square and invertible to tolerance.
ComplexMatrix schur_complement_1(const BlockMatrix& b);
/// S - R P^{-1} Q. Requires P square and invertible to tolerance.
ComplexMatrix schur_complement_2(const BlockMatrix& b);

enum class SchurRoute { automatic, via_delta1, via_delta2 };

/// Inverse of the assembled block matrix built from the Schur-complement
/// block formulas. `automatic` prefers the S / Delta_1 route and falls
/// back to P / Delta_2.
ComplexMatrix block_invert(const BlockMatrix& b, SchurRoute route = SchurRoute::automatic);

/// (Id - Q R)^{-1} computed as Id + Q (Id - R Q)^{-1} R, given the inverse
/// of the small factor. Q: n x m, R: m x n, inv_rq: m x m.
ComplexMatrix transfer_inverse_qr(const ComplexMatrix& q, const ComplexMatrix& r,
                                  const ComplexMatrix& inv_rq);

}  // namespace pertspec
