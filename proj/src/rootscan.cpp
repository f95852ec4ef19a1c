#include "pertspec/rootscan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

#include "pertspec/errors.hpp"
#include "pertspec/numerics.hpp"

namespace pertspec {

namespace {

constexpr double kDegeneracyRatio = 1e-13;
constexpr std::array<double, 3> kDilations{1.013, 1.029, 1.041};
constexpr int kMaxDoublings = 12;
constexpr std::size_t kNodesPerPanel = 8;
constexpr std::size_t kInitialPanels = 4;
constexpr int kMaxClusterCount = 8;

// Off-centre cut positions. Catalog spectra sit on the axes and on lattices,
// so exact bisection would regularly place a zero on a cut line.
constexpr std::array<double, 6> kCutFractions{0.4871, 0.5183, 0.4627, 0.5419, 0.4409, 0.5641};

/// Runs body(i) for i in [0, n), in parallel if requested, rethrowing the
/// first exception on the calling thread.
template <class Body>
void for_each_index(std::size_t n, ExecPolicy policy, Body&& body) {
    std::exception_ptr failure;
    std::mutex guard;
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) if (policy == ExecPolicy::parallel && n > 1)
    for (long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::array<Complex, 4> corners(const Rectangle& r) {
    return {r.lower_left, Complex{r.upper_right.real(), r.lower_left.imag()}, r.upper_right,
            Complex{r.lower_left.real(), r.upper_right.imag()}};
}

struct EdgeSample {
    Complex value;
    Complex derivative;
};

/// One argument-principle evaluation with `panels` Gauss-Legendre panels per
/// edge. Throws BoundaryDegeneracyError when F nearly vanishes on an edge.
double contour_integral(const CharFunction& f, const Rectangle& rect, std::size_t panels, ExecPolicy policy) {
    const QuadratureRule& rule = cached_gauss_legendre(kNodesPerPanel);
    const auto c = corners(rect);
    const std::size_t per_edge = panels * kNodesPerPanel;
    std::vector<Complex> points(4 * per_edge);
    std::vector<Complex> dz(4 * per_edge);
    for (std::size_t e = 0; e < 4; ++e) {
        const Complex a = c[e], b = c[(e + 1) % 4];
        const Complex span = (b - a) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p)
            for (std::size_t q = 0; q < kNodesPerPanel; ++q) {
                const std::size_t k = e * per_edge + p * kNodesPerPanel + q;
                points[k] = a + span * (static_cast<double>(p) + rule.nodes[q]);
                dz[k] = span * rule.weights[q];
            }
    }

    std::vector<EdgeSample> samples(points.size());
    for_each_index(points.size(), policy, [&](std::size_t k) {
        samples[k] = {f(points[k]), numeric_derivative(f, points[k])};
    });

    Complex total{};
    for (std::size_t e = 0; e < 4; ++e) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t k = e * per_edge; k < (e + 1) * per_edge; ++k) {
            const double m = std::abs(samples[k].value);
            if (!std::isfinite(m) || !std::isfinite(std::abs(samples[k].derivative)))
                throw BoundaryDegeneracyError("winding_count: non-finite characteristic value on contour");
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        if (!(lo > kDegeneracyRatio * hi))
            throw BoundaryDegeneracyError("winding_count: characteristic function vanishes on the contour");
        for (std::size_t k = e * per_edge; k < (e + 1) * per_edge; ++k)
            total += samples[k].derivative / samples[k].value * dz[k];
    }
    return (total / Complex{0.0, 2.0 * kPi}).real();
}

/// Count without dilation; doubles panels until two rounded counts agree.
int winding_single(const CharFunction& f, const Rectangle& rect, ExecPolicy policy) {
    if (!rect.valid()) throw ValidationError("winding_count: degenerate rectangle");
    std::size_t panels = kInitialPanels;
    double previous = contour_integral(f, rect, panels, policy);
    for (int d = 0; d < kMaxDoublings; ++d) {
        panels *= 2;
        const double current = contour_integral(f, rect, panels, policy);
        const double rounded = std::round(current);
        if (rounded == std::round(previous) && std::abs(current - rounded) < 1e-3 && rounded >= 0.0)
            return static_cast<int>(rounded);
        previous = current;
    }
    throw QuadratureFailureError("winding_count: no convergence after " + std::to_string(kMaxDoublings) +
                                 " doublings");
}

double boundary_max(const CharFunction& f, const Rectangle& rect) {
    const auto c = corners(rect);
    double m = 0.0;
    for (std::size_t e = 0; e < 4; ++e)
        for (int k = 0; k < 4; ++k)
            m = std::max(m, std::abs(f(c[e] + (c[(e + 1) % 4] - c[e]) * (k / 4.0))));
    return m;
}

Rectangle centred_box(Complex z, double half) { return {z - Complex{half, half}, z + Complex{half, half}}; }

/// Shrinks a winding box around z until its diameter is below tol, keeping
/// the quadrant that carries the largest count.
NewtonResult count_bisection(const CharFunction& f, Complex z, double half, double tol, int iterations) {
    Rectangle box = centred_box(z, half);
    int count = 0;
    for (int grow = 0; grow < 6; ++grow) {
        const WindingResult w = winding_count_ex(f, box, ExecPolicy::serial);
        box = w.rect;
        count = w.count;
        if (count > 0) break;
        box = box.dilated(4.0);
    }
    if (count == 0) throw ConvergenceError("newton_refine: no zero found near the stalled iterate");
    while (box.diameter() >= tol) {
        int best = -1;
        Rectangle best_box;
        for (double fx : kCutFractions) {
            const double x = box.lower_left.real() + fx * box.width();
            const double y = box.lower_left.imag() + fx * box.height();
            const std::array<Rectangle, 4> kids{
                Rectangle{box.lower_left, {x, y}},
                Rectangle{{x, box.lower_left.imag()}, {box.upper_right.real(), y}},
                Rectangle{{x, y}, box.upper_right},
                Rectangle{{box.lower_left.real(), y}, {x, box.upper_right.imag()}},
            };
            try {
                best = -1;
                for (const Rectangle& k : kids) {
                    const int n = winding_single(f, k, ExecPolicy::serial);
                    if (n > best) {
                        best = n;
                        best_box = k;
                    }
                }
                break;
            } catch (const BoundaryDegeneracyError&) {
                best = -1;
            } catch (const QuadratureFailureError&) {
                best = -1;
            }
        }
        if (best <= 0) break;  // the box is already at the resolution limit of F
        box = best_box;
        ++iterations;
    }
    return {box.center(), iterations};
}

struct Cell {
    Rectangle rect;
    int count = 0;
};

struct Leaf {
    Complex location;
    int count = 0;
    int iterations = 0;
    Rectangle rect;
};

struct CellOutcome {
    std::vector<Cell> children;
    std::vector<Leaf> leaves;
};

std::vector<Cell> subdivide(const CharFunction& f, const Cell& cell) {
    const Rectangle& r = cell.rect;
    for (std::size_t attempt = 0; attempt < kCutFractions.size(); ++attempt) {
        const double fx = kCutFractions[attempt];
        const double fy = kCutFractions[(attempt + 2) % kCutFractions.size()];
        const double x = r.lower_left.real() + fx * r.width();
        const double y = r.lower_left.imag() + fy * r.height();
        const std::array<Rectangle, 4> kids{
            Rectangle{r.lower_left, {x, y}},
            Rectangle{{x, r.lower_left.imag()}, {r.upper_right.real(), y}},
            Rectangle{{x, y}, r.upper_right},
            Rectangle{{r.lower_left.real(), y}, {x, r.upper_right.imag()}},
        };
        try {
            std::vector<Cell> out;
            int total = 0;
            for (const Rectangle& k : kids) {
                const int n = winding_single(f, k, ExecPolicy::serial);
                total += n;
                if (n > 0) out.push_back({k, n});
            }
            if (total == cell.count) return out;
        } catch (const BoundaryDegeneracyError&) {
            // try the next cut position
        } catch (const QuadratureFailureError&) {
            // a zero sits too close to a cut for the quadrature to resolve
        }
    }
    throw QuadratureFailureError("find_zeros: subdivision counts never matched the parent count");
}

CellOutcome process_cell(const CharFunction& f, const Cell& cell, double tol) {
    CellOutcome out;
    const bool tiny = cell.rect.diameter() < 64.0 * tol;
    if (tiny && cell.count > kMaxClusterCount)
        throw ClusterError("find_zeros: " + std::to_string(cell.count) + " zeros clustered in a box of diameter " +
                           std::to_string(cell.rect.diameter()));
    if (cell.count == 1 || tiny) {
        try {
            const NewtonResult n = newton_refine(f, cell.rect.center(), tol, cell.rect);
            if (tiny || cell.rect.contains(n.root)) {
                out.leaves.push_back({n.root, cell.count, n.iterations, cell.rect});
                return out;
            }
        } catch (const DivergenceError&) {
            if (tiny) {
                out.leaves.push_back({cell.rect.center(), cell.count, 0, cell.rect});
                return out;
            }
        } catch (const ConvergenceError&) {
            if (tiny) {
                out.leaves.push_back({cell.rect.center(), cell.count, 0, cell.rect});
                return out;
            }
        }
    }
    out.children = subdivide(f, cell);
    return out;
}

}  // namespace

int RootReport::multiplicity_sum() const {
    int s = 0;
    for (const RootEntry& r : roots) s += r.multiplicity;
    return s;
}

CVector sample_values(const CharFunction& f, const CVector& points, ExecPolicy policy) {
    CVector out(points.size());
    for_each_index(points.size(), policy, [&](std::size_t i) { out[i] = f(points[i]); });
    return out;
}

WindingResult winding_count_ex(const CharFunction& f, const Rectangle& rect, ExecPolicy policy) {
    Rectangle current = rect;
    for (std::size_t attempt = 0;; ++attempt) {
        try {
            return {winding_single(f, current, policy), current};
        } catch (const BoundaryDegeneracyError&) {
            if (attempt == kDilations.size()) throw;
        } catch (const QuadratureFailureError&) {
            // Unresolved integrals almost always mean a zero near the contour.
            if (attempt == kDilations.size()) throw;
        }
        current = rect.dilated(kDilations[attempt]);
    }
}

int winding_count(const CharFunction& f, const Rectangle& rect, ExecPolicy policy) {
    return winding_count_ex(f, rect, policy).count;
}

int circle_winding(const CharFunction& f, Complex center, double radius) {
    int previous = -1;
    for (std::size_t points = 64; points <= 4096; points *= 2) {
        double phase = 0.0;
        Complex first = f(center + radius);
        Complex prev = first;
        if (prev == Complex{}) throw BoundaryDegeneracyError("circle_winding: zero on the circle");
        for (std::size_t k = 1; k <= points; ++k) {
            const Complex v = k == points ? first
                                          : f(center + std::polar(radius, 2.0 * kPi * static_cast<double>(k) /
                                                                              static_cast<double>(points)));
            if (v == Complex{} || !std::isfinite(std::abs(v)))
                throw BoundaryDegeneracyError("circle_winding: zero on the circle");
            phase += std::arg(v / prev);
            prev = v;
        }
        const int count = static_cast<int>(std::lround(phase / (2.0 * kPi)));
        if (count == previous) return count;
        previous = count;
    }
    throw QuadratureFailureError("circle_winding: phase count did not settle");
}

NewtonResult newton_refine(const CharFunction& f, Complex start, double tol) {
    const double half = std::max(1.0, std::abs(start));
    return newton_refine(f, start, tol, centred_box(start, half));
}

NewtonResult newton_refine(const CharFunction& f, Complex start, double tol, const Rectangle& box) {
    const Rectangle fence = box.dilated(2.0);
    Complex z = start;
    Complex fz = f(z);
    if (fz == Complex{}) return {z, 0};
    std::vector<double> steps;
    double multiplicity = 1.0;
    for (int it = 1; it <= 50; ++it) {
        const Complex d = numeric_derivative(f, z);
        if (d == Complex{} || !std::isfinite(std::abs(d)))
            return count_bisection(f, z, std::max(box.diameter() / 4.0, 100.0 * tol), tol, it);
        const Complex step = multiplicity * fz / d;
        const Complex next = z - step;
        if (!fence.contains(next) || !std::isfinite(std::abs(next)))
            throw DivergenceError("newton_refine: iterate left the search box");
        z = next;
        fz = f(z);
        const double s = std::abs(step);
        if (s < tol || fz == Complex{}) return {z, it};
        if (multiplicity > 1.0 && !steps.empty() && s > steps.back()) multiplicity = 1.0;
        steps.push_back(s);
        const std::size_t k = steps.size();
        if (multiplicity == 1.0 && k >= 3) {
            // Linear convergence with a steady ratio signals a multiple zero;
            // the ratio (m - 1) / m gives the multiplicity.
            const double r1 = steps[k - 1] / steps[k - 2];
            const double r2 = steps[k - 2] / steps[k - 3];
            if (r1 > 0.2 && r1 < 0.95 && std::abs(r1 - r2) < 0.05) {
                const double m = std::round(1.0 / (1.0 - r1));
                multiplicity = std::clamp(m, 1.0, static_cast<double>(kMaxClusterCount));
            }
        }
        if (k >= 6 && steps[k - 1] > 0.9 * steps[k - 6])
            return count_bisection(f, z, std::max(10.0 * steps.back(), 100.0 * tol), tol, it);
    }
    return count_bisection(f, z, std::max(10.0 * steps.back(), 100.0 * tol), tol, 50);
}

bool detect_identically_zero(const CharFunction& f, const Rectangle& rect, std::uint64_t seed) {
    for (std::size_t i = 0; i < 25; ++i) {
        const auto [u, v] = halton2(static_cast<std::size_t>(seed) + i + 1);
        const Complex z = rect.lower_left + Complex{u * rect.width(), v * rect.height()};
        const ComplexMatrix m = f.matrix(z);
        std::vector<double> mags;
        mags.reserve(m.entries().size());
        for (Complex e : m.entries()) mags.push_back(std::abs(e));
        double median = 0.0;
        if (!mags.empty()) {
            std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
            median = mags[mags.size() / 2];
        }
        if (!(std::abs(f(z)) < 1e-13 * (1.0 + median))) return false;
    }
    return true;
}

RootReport find_zeros(const CharFunction& f, const Rectangle& rect, double tol, const ScanOptions& options) {
    if (!rect.valid()) throw ValidationError("find_zeros: degenerate rectangle");
    if (!(tol > 0.0)) throw ValidationError("find_zeros: tolerance must be positive");
    RootReport report;
    report.region = rect;
    if (detect_identically_zero(f, rect, options.seed)) {
        report.identically_zero = true;
        return report;
    }
    const WindingResult top = winding_count_ex(f, rect, options.policy);
    report.region = top.rect;
    report.region_count = top.count;

    std::vector<Leaf> leaves;
    std::vector<Cell> level;
    if (top.count > 0) level.push_back({top.rect, top.count});
    while (!level.empty()) {
        std::vector<CellOutcome> outcomes(level.size());
        for_each_index(level.size(), options.policy,
                       [&](std::size_t i) { outcomes[i] = process_cell(f, level[i], tol); });
        std::vector<Cell> next;
        for (CellOutcome& o : outcomes) {
            next.insert(next.end(), o.children.begin(), o.children.end());
            leaves.insert(leaves.end(), o.leaves.begin(), o.leaves.end());
        }
        level = std::move(next);
    }

    // Merge duplicates, then attach residuals and multiplicities.
    std::vector<Leaf> merged;
    for (const Leaf& l : leaves) {
        auto it = std::find_if(merged.begin(), merged.end(),
                               [&](const Leaf& m) { return std::abs(m.location - l.location) < 10.0 * tol; });
        if (it == merged.end()) {
            merged.push_back(l);
        } else {
            it->count += l.count;
            it->iterations = std::max(it->iterations, l.iterations);
        }
    }
    report.roots.resize(merged.size());
    for_each_index(merged.size(), options.policy, [&](std::size_t i) {
        const Leaf& l = merged[i];
        RootEntry& e = report.roots[i];
        e.location = l.location;
        e.newton_iterations = l.iterations;
        e.char_residual = std::abs(f(l.location));
        e.leaf_scale = boundary_max(f, l.rect);
        e.multiplicity = l.count;
        try {
            const int circle = circle_winding(f, l.location, 100.0 * tol);
            if (circle > 0) e.multiplicity = circle;
        } catch (const Error&) {
            // keep the count of the leaf box
        }
    });
    std::sort(report.roots.begin(), report.roots.end(), [](const RootEntry& a, const RootEntry& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });
    return report;
}

}  // namespace pertspec
