#include "pertspec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "pertspec/errors.hpp"
#include "pertspec/oracle.hpp"

namespace pertspec {

namespace {

using ojson = nlohmann::ordered_json;

/// Grid used for eigenfunction residuals.
constexpr std::size_t kResidualPoints = 2001;

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* status_name(RunStatus s) {
    switch (s) {
        case RunStatus::ok: return "ok";
        case RunStatus::uncertified: return "uncertified";
        case RunStatus::error: return "error";
    }
    return "error";
}

void certify(const ProblemSpec& spec, SpectrumRecord& rec) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<CVector> kernel;
    try {
        kernel = kernel_vectors(spec, rec.location);
    } catch (const NotARootError&) {
        rec.ode_residual = rec.bc_residual = inf;
        return;
    }
    rec.ode_residual = rec.bc_residual = 0.0;
    if (is_dirichlet_kind(spec.kind)) {
        const Functionals psi = spec.effective_psi();
        for (const CVector& x : kernel) {
            const HoloCurve f = eigenfunction(spec, rec.location, x);
            const EigenResidual r = eigen_residual(spec.kind, psi, rec.location, f, kResidualPoints);
            rec.ode_residual = std::max(rec.ode_residual, r.ode);
            rec.bc_residual = std::max(rec.bc_residual, r.bc);
        }
    } else {
        const ComplexMatrix m = characteristic_matrix(spec, rec.location);
        const double scale = characteristic_scale(spec, rec.location);
        for (const CVector& x : kernel) rec.ode_residual = std::max(rec.ode_residual, kernel_residual(m, x, scale));
    }
}

/// Discrete eigenvalues standing in for the spectrum, or nullopt when no
/// oracle applies to the problem.
std::optional<std::vector<Complex>> oracle_spectrum(const JobConfig& config, std::string& why) {
    const ProblemSpec& spec = config.problem;
    if (const auto* q = std::get_if<QuadraticPencil>(&spec.kind))
        return dense_eigenvalues(pencil_companion(*q), spec.region);
    if (!is_dirichlet_kind(spec.kind)) {
        why = "delay systems have an exact finite-dimensional characteristic matrix; no discretization applies";
        return std::nullopt;
    }
    try {
        const Discretization d = fd_discretize(spec.kind, spec.effective_psi(), config.oracle.grid);
        return dense_eigenvalues(d.matrix, spec.region);
    } catch (const InapplicableError& e) {
        why = e.what();
        return std::nullopt;
    }
}

void compare_with_oracle(const JobConfig& config, RunResult& result) {
    std::string why;
    const auto discrete = oracle_spectrum(config, why);
    if (!discrete) {
        result.oracle_state = "inapplicable";
        result.notes.push_back("oracle: " + why);
        return;
    }
    bool ok = true;
    const double tol = config.oracle.match_tolerance;
    for (SpectrumRecord& rec : result.records) {
        if (discrete->empty()) {
            ok = false;
            continue;
        }
        const Complex z = nearest(*discrete, rec.location);
        rec.oracle = z;
        rec.oracle_distance = std::abs(z - rec.location);
        if (!(*rec.oracle_distance <= tol)) ok = false;
    }
    // Conversely, discrete eigenvalues well inside the window must be matched.
    const Rectangle inner = result.scanned_region.shrunk(0.1);
    for (Complex z : *discrete) {
        if (!inner.contains(z)) continue;
        const bool matched = std::any_of(result.records.begin(), result.records.end(),
                                         [&](const SpectrumRecord& r) { return std::abs(r.location - z) <= tol; });
        if (!matched) {
            ok = false;
            result.notes.push_back("oracle: discrete eigenvalue " + number(z.real()) + (z.imag() < 0 ? "" : "+") +
                                   number(z.imag()) + "i has no matching root");
        }
    }
    result.oracle_state = ok ? "matched" : "mismatched";
}

}  // namespace

int RunResult::exit_code() const {
    switch (status) {
        case RunStatus::ok: return 0;
        case RunStatus::uncertified: return 1;
        case RunStatus::error: return 2;
    }
    return 2;
}

std::vector<GridSample> sample_grid(const CharFunction& f, const Rectangle& rect, std::size_t nx, std::size_t ny,
                                    ExecPolicy policy) {
    if (nx < 2 || ny < 2) throw ValidationError("sample_grid: need at least 2 x 2 samples");
    CVector points;
    points.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            points.push_back(rect.lower_left +
                             Complex{rect.width() * static_cast<double>(i) / static_cast<double>(nx - 1),
                                     rect.height() * static_cast<double>(j) / static_cast<double>(ny - 1)});
    const CVector values = sample_values(f, points, policy);
    std::vector<GridSample> grid(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) grid[k] = {points[k], values[k]};
    return grid;
}

RunResult run_job(const JobConfig& config) {
    RunResult result;
    result.scanned_region = config.problem.region;
    try {
        config.validate();
        const ProblemSpec& spec = config.problem;
        const CharFunction f = CharFunction::from_spec(spec);
        const RootReport report = find_zeros(f, spec.region, spec.tolerances.root, {ExecPolicy::parallel, config.seed});
        result.region_count = report.region_count;
        result.identically_zero = report.identically_zero;
        result.scanned_region = report.region;
        if (report.identically_zero)
            result.notes.push_back("F vanishes identically: every point of the region is an eigenvalue");

        for (const RootEntry& r : report.roots) {
            SpectrumRecord rec;
            rec.location = r.location;
            rec.multiplicity = r.multiplicity;
            rec.abs_f = r.char_residual;
            rec.newton_iterations = r.newton_iterations;
            certify(spec, rec);
            result.records.push_back(rec);
        }
        std::sort(result.records.begin(), result.records.end(), [](const SpectrumRecord& a, const SpectrumRecord& b) {
            if (a.location.imag() != b.location.imag()) return a.location.imag() < b.location.imag();
            return a.location.real() < b.location.real();
        });

        if (config.oracle.enabled && config.outputs.oracle_comparison && !result.identically_zero)
            compare_with_oracle(config, result);
        if (config.outputs.f_grid.enabled())
            result.grid = sample_grid(f, spec.region, config.outputs.f_grid.nx, config.outputs.f_grid.ny);

        const double tol = spec.tolerances.residual;
        const bool residuals_ok = std::all_of(result.records.begin(), result.records.end(), [&](const SpectrumRecord& r) {
            return r.ode_residual <= tol && r.bc_residual <= tol;
        });
        if (!residuals_ok) result.notes.push_back("certification: a residual exceeds the tolerance");
        result.status = residuals_ok && result.oracle_state != "mismatched" ? RunStatus::ok : RunStatus::uncertified;
    } catch (const Error& e) {
        result.status = RunStatus::error;
        result.error = e.what();
    }
    if (!config.outputs.roots) result.records.clear();
    return result;
}

std::string format_csv(const std::vector<SpectrumRecord>& records) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const SpectrumRecord& r : records) {
        out += number(r.location.real()) + "," + number(r.location.imag()) + "," + std::to_string(r.multiplicity) +
               "," + number(r.abs_f) + "," + std::to_string(r.newton_iterations) + "," + number(r.ode_residual) +
               "," + number(r.bc_residual) + ",";
        if (r.oracle) out += number(r.oracle->real()) + "," + number(r.oracle->imag());
        else out += ",";
        out += ",";
        if (r.oracle_distance) out += number(*r.oracle_distance);
        out += "\n";
    }
    return out;
}

std::string format_grid_csv(const std::vector<GridSample>& grid) {
    std::string out = "re,im,F_re,F_im\n";
    for (const GridSample& g : grid)
        out += number(g.z.real()) + "," + number(g.z.imag()) + "," + number(g.value.real()) + "," +
               number(g.value.imag()) + "\n";
    return out;
}

std::string format_structured(const RunResult& result) {
    auto num = [](double v) -> ojson {
        if (std::isfinite(v)) return v;
        return number(v);  // JSON has no infinity; keep it readable
    };
    ojson root;
    ojson rows = ojson::array();
    for (const SpectrumRecord& r : result.records) {
        ojson row;
        row["re"] = r.location.real();
        row["im"] = r.location.imag();
        row["multiplicity"] = r.multiplicity;
        row["abs_F"] = num(r.abs_f);
        row["newton_iters"] = r.newton_iterations;
        row["ode_residual"] = num(r.ode_residual);
        row["bc_residual"] = num(r.bc_residual);
        row["oracle_re"] = r.oracle ? ojson(r.oracle->real()) : ojson(nullptr);
        row["oracle_im"] = r.oracle ? ojson(r.oracle->imag()) : ojson(nullptr);
        row["oracle_dist"] = r.oracle_distance ? ojson(*r.oracle_distance) : ojson(nullptr);
        rows.push_back(std::move(row));
    }
    root["roots"] = std::move(rows);
    ojson trailer;
    trailer["status"] = status_name(result.status);
    trailer["error"] = result.error.empty() ? ojson(nullptr) : ojson(result.error);
    trailer["identically_zero"] = result.identically_zero;
    trailer["region_count"] = result.region_count;
    trailer["region"]["re"] = {result.scanned_region.lower_left.real(), result.scanned_region.upper_right.real()};
    trailer["region"]["im"] = {result.scanned_region.lower_left.imag(), result.scanned_region.upper_right.imag()};
    trailer["oracle"] = result.oracle_state;
    trailer["notes"] = result.notes;
    trailer["grid_samples"] = result.grid.size();
    root["trailer"] = std::move(trailer);
    return root.dump(2) + "\n";
}

void emit_report(const RunResult& result, const std::filesystem::path& dir, ReportFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    auto write = [&](const std::string& name, const std::string& text) {
        const std::filesystem::path p = dir / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + p.string());
        out << text;
        if (!out) throw IoError("write failed for " + p.string());
    };
    if (format == ReportFormat::csv) write("roots.csv", format_csv(result.records));
    write("report.json", format_structured(result));
    if (!result.grid.empty()) write("f_grid.csv", format_grid_csv(result.grid));
}

}  // namespace pertspec
