#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace pertspec {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline constexpr double kPi = 3.14159265358979323846;

/// Selects between the OpenMP kernels and their serial reference versions.
/// Both produce bit-identical results; the serial path exists for testing
/// and for use inside already-parallel regions.
enum class ExecPolicy { serial, parallel };

/// Axis-aligned closed rectangle in the complex plane.
struct Rectangle {
    Complex lower_left;
    Complex upper_right;

    double width() const { return upper_right.real() - lower_left.real(); }
    double height() const { return upper_right.imag() - lower_left.imag(); }
    Complex center() const { return 0.5 * (lower_left + upper_right); }
    double diameter() const { return std::hypot(width(), height()); }
    bool valid() const {
        return std::isfinite(width()) && std::isfinite(height()) && width() > 0.0 && height() > 0.0;
    }

    bool contains(Complex z, double margin = 0.0) const {
        return z.real() >= lower_left.real() - margin && z.real() <= upper_right.real() + margin &&
               z.imag() >= lower_left.imag() - margin && z.imag() <= upper_right.imag() + margin;
    }

    /// Scales width and height by `factor` about the center.
    Rectangle dilated(double factor) const {
        const Complex c = center();
        return {c + factor * (lower_left - c), c + factor * (upper_right - c)};
    }

    /// Smaller rectangle obtained by moving every edge inward by `fraction` of the extent.
    Rectangle shrunk(double fraction) const {
        const Complex d{fraction * width(), fraction * height()};
        return {lower_left + d, upper_right - d};
    }

    bool operator==(const Rectangle&) const = default;
};

}  // namespace pertspec
