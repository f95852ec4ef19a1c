#pragma once

// Zeros of a holomorphic characteristic function in a rectangle:
// argument-principle counting, recursive subdivision and Newton refinement.

#include <cstdint>
#include <vector>

#include "pertspec/charfn.hpp"
#include "pertspec/types.hpp"

namespace pertspec {

struct RootEntry {
    Complex location;
    int multiplicity = 1;
    double char_residual = 0.0;  ///< |F(location)|
    int newton_iterations = 0;
    double leaf_scale = 0.0;     ///< max |F| on the boundary of the leaf box
};

struct RootReport {
    std::vector<RootEntry> roots;  ///< sorted by real part, then imaginary part
    int region_count = 0;
    bool identically_zero = false;
    Rectangle region;              ///< rectangle actually scanned (after any dilation)

    int multiplicity_sum() const;
};

struct WindingResult {
    int count = 0;
    Rectangle rect;  ///< the rectangle counted; differs from the input after dilation
};

/// Argument-principle count of zeros of F inside rect. If F nearly vanishes
/// on the boundary, or the integral will not settle because a zero sits on
/// it, the rectangle is dilated (at most three times) and the count refers
/// to the dilated rectangle.
WindingResult winding_count_ex(const CharFunction& f, const Rectangle& rect,
                               ExecPolicy policy = ExecPolicy::parallel);
int winding_count(const CharFunction& f, const Rectangle& rect, ExecPolicy policy = ExecPolicy::parallel);

/// Argument-principle count on the circle |z - center| = radius by phase
/// increments, with 64 up to 4096 points.
int circle_winding(const CharFunction& f, Complex center, double radius);

struct NewtonResult {
    Complex root;
    int iterations = 0;
};

/// Newton iteration from `start` with a multiplicity-aware step when
/// convergence turns linear and a winding-box bisection fallback when it
/// stalls. DivergenceError when an iterate leaves the 2x dilation of `box`.
NewtonResult newton_refine(const CharFunction& f, Complex start, double tol, const Rectangle& box);
/// Convenience overload with a box centred on `start`.
NewtonResult newton_refine(const CharFunction& f, Complex start, double tol);

/// True when F is numerically zero at 25 Halton points of rect.
bool detect_identically_zero(const CharFunction& f, const Rectangle& rect, std::uint64_t seed = 0);

struct ScanOptions {
    ExecPolicy policy = ExecPolicy::parallel;
    std::uint64_t seed = 0;
};

RootReport find_zeros(const CharFunction& f, const Rectangle& rect, double tol, const ScanOptions& options = {});

/// Values of F at the given points, optionally in parallel.
CVector sample_values(const CharFunction& f, const CVector& points, ExecPolicy policy);

}  // namespace pertspec
