#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pertspec/errors.hpp"
#include "pertspec/report.hpp"

using namespace pertspec;
using BF = BoundaryFunctional;

namespace {

JobConfig periodic_job() {
    JobConfig c;
    c.problem.kind = FirstDerivative{};
    c.problem.psi = {BF::point(0.0) - BF::point(1.0)};
    c.problem.region = {{-1.0, -7.0}, {1.0, 7.0}};
    c.oracle.grid = 128;
    return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("an empty table is just the header") {
    CHECK(format_csv({}) == std::string(kCsvHeader) + "\n");
}

TEST_CASE("the periodic job yields three certified rows sorted by (im, re)") {
    const RunResult r = run_job(periodic_job());
    CHECK(r.status == RunStatus::ok);
    CHECK(r.exit_code() == 0);
    CHECK(r.oracle_state == "matched");
    REQUIRE(r.records.size() == 3);
    CHECK(r.region_count == 3);
    for (std::size_t i = 1; i < r.records.size(); ++i)
        CHECK(r.records[i - 1].location.imag() < r.records[i].location.imag());
    for (const SpectrumRecord& rec : r.records) {
        CHECK(rec.ode_residual < 1e-7);
        CHECK(rec.bc_residual < 1e-7);
        REQUIRE(rec.oracle.has_value());
        CHECK(*rec.oracle_distance < 5e-2);
    }
    const std::string csv = format_csv(r.records);
    CHECK(count_lines(csv) == 4);

    const auto doc = nlohmann::json::parse(format_structured(r));
    CHECK(doc["trailer"]["status"] == "ok");
    CHECK(doc["roots"].size() == 3);
}

TEST_CASE("grid sampling covers the lattice") {
    const CharFunction f = CharFunction::from_scalar([](Complex z) { return z; });
    const auto grid = sample_grid(f, {{-1.0, -1.0}, {1.0, 1.0}}, 101, 101);
    REQUIRE(grid.size() == 10201);
    CHECK(grid.front().z == Complex{-1.0, -1.0});
    CHECK(grid.back().z == Complex{1.0, 1.0});
    CHECK(grid[1].z.real() > grid[0].z.real());  // real part varies fastest
    CHECK(count_lines(format_grid_csv(grid)) == 10202);
    const auto serial = sample_grid(f, {{-1.0, -1.0}, {1.0, 1.0}}, 101, 101, ExecPolicy::serial);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(grid[i].value == serial[i].value);
}

TEST_CASE("an identically zero job reports no rows and exits cleanly") {
    JobConfig c = periodic_job();
    c.problem.psi = {BF{}};
    const RunResult r = run_job(c);
    CHECK(r.identically_zero);
    CHECK(r.records.empty());
    CHECK(r.exit_code() == 0);
    CHECK_FALSE(r.notes.empty());
}

TEST_CASE("runs are reproducible") {
    const RunResult a = run_job(periodic_job());
    const RunResult b = run_job(periodic_job());
    CHECK(format_csv(a.records) == format_csv(b.records));
    CHECK(format_structured(a) == format_structured(b));
}

TEST_CASE("exit codes follow the status") {
    RunResult r;
    CHECK(r.exit_code() == 0);
    r.status = RunStatus::uncertified;
    CHECK(r.exit_code() == 1);
    r.status = RunStatus::error;
    CHECK(r.exit_code() == 2);
}

TEST_CASE("emit_report writes the requested files") {
    const auto dir = std::filesystem::temp_directory_path() / "pertspec_report_test";
    std::filesystem::remove_all(dir);
    JobConfig c = periodic_job();
    c.outputs.f_grid = {5, 4};
    const RunResult r = run_job(c);
    REQUIRE(r.grid.size() == 20);
    emit_report(r, dir, ReportFormat::csv);
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(count_lines(slurp(dir / "roots.csv")) == 4);
    CHECK(count_lines(slurp(dir / "f_grid.csv")) == 21);
    std::filesystem::remove_all(dir);

    emit_report(r, dir, ReportFormat::structured);
    CHECK_FALSE(std::filesystem::exists(dir / "roots.csv"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("delay systems are certified through their characteristic matrix") {
    JobConfig c;
    c.problem.kind = DelaySystem{ComplexMatrix{{0.0}}, {DelayLag{1.0, ComplexMatrix{{-0.5 * kPi}}}}};
    c.problem.region = {{-1.0, -3.0}, {1.0, 3.0}};
    const RunResult r = run_job(c);
    CHECK(r.exit_code() == 0);
    CHECK(r.oracle_state == "inapplicable");
    REQUIRE(r.records.size() == 2);
    for (const SpectrumRecord& rec : r.records) CHECK(rec.ode_residual < 1e-12);
}

TEST_CASE("a failing job reports an error status") {
    JobConfig c = periodic_job();
    c.problem.region = {{0.0, 0.0}, {0.0, 1.0}};  // zero width
    const RunResult r = run_job(c);
    CHECK(r.status == RunStatus::error);
    CHECK(r.exit_code() == 2);
    CHECK_FALSE(r.error.empty());
}
