#pragma once

// The batch pipeline behind the command-line tool: scan, certify,
// cross-check against the oracle, and write reports.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pertspec/config.hpp"
#include "pertspec/rootscan.hpp"

namespace pertspec {

/// One row of the spectrum table.
struct SpectrumRecord {
    Complex location;
    int multiplicity = 1;
    double abs_f = 0.0;
    int newton_iterations = 0;
    double ode_residual = 0.0;
    double bc_residual = 0.0;
    std::optional<Complex> oracle;
    std::optional<double> oracle_distance;
};

struct GridSample {
    Complex z;
    Complex value;
};

enum class RunStatus { ok, uncertified, error };

struct RunResult {
    std::vector<SpectrumRecord> records;  ///< sorted by (im, re)
    std::vector<GridSample> grid;
    int region_count = 0;
    bool identically_zero = false;
    Rectangle scanned_region;
    RunStatus status = RunStatus::ok;
    std::string error;
    std::string oracle_state = "disabled";  ///< disabled | matched | mismatched | inapplicable
    std::vector<std::string> notes;

    /// 0 when certified, 1 when a tolerance or the oracle match failed, 2 on error.
    int exit_code() const;
};

RunResult run_job(const JobConfig& config);

/// F on an nx x ny lattice over rect (row-major in the imaginary part, then
/// the real part), evaluated in parallel unless `policy` is serial.
std::vector<GridSample> sample_grid(const CharFunction& f, const Rectangle& rect, std::size_t nx, std::size_t ny,
                                    ExecPolicy policy = ExecPolicy::parallel);

inline constexpr const char* kCsvHeader =
    "re,im,multiplicity,abs_F,newton_iters,ode_residual,bc_residual,oracle_re,oracle_im,oracle_dist";

std::string format_csv(const std::vector<SpectrumRecord>& records);
std::string format_grid_csv(const std::vector<GridSample>& grid);
/// JSON twin of the CSV table followed by the run trailer.
std::string format_structured(const RunResult& result);

enum class ReportFormat { csv, structured };

/// Writes roots.csv (csv format), report.json (always) and f_grid.csv (when
/// sampled) into `dir`, creating it if needed. IoError when unwritable.
void emit_report(const RunResult& result, const std::filesystem::path& dir, ReportFormat format);

}  // namespace pertspec
