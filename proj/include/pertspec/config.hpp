#pragma once

// Job configuration: a JSON document describing one problem, the search
// region, the requested outputs and the oracle settings.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "pertspec/charfn.hpp"

namespace pertspec {

struct GridRequest {
    std::size_t nx = 0;
    std::size_t ny = 0;
    bool enabled() const { return nx > 0 && ny > 0; }
    bool operator==(const GridRequest&) const = default;
};

struct OutputRequest {
    bool roots = true;
    GridRequest f_grid;             ///< disabled when nx = ny = 0
    bool oracle_comparison = true;
    bool operator==(const OutputRequest&) const = default;
};

struct OracleSettings {
    bool enabled = true;
    std::size_t grid = 512;
    double match_tolerance = 5e-2;  ///< max |root - nearest discrete eigenvalue|
    bool operator==(const OracleSettings&) const = default;
};

struct JobConfig {
    ProblemSpec problem;
    OutputRequest outputs;
    OracleSettings oracle;
    std::uint64_t seed = 0;

    /// Throws ValidationError (or DimensionError) on invariant violations.
    void validate() const;
    bool operator==(const JobConfig&) const = default;
};

/// Parses and validates a configuration. Schema violations raise ParseError
/// naming the offending path (e.g. `problem.psi[0][1].order`).
JobConfig parse_config(std::string_view text);

/// Reads `path` and parses it; IoError when unreadable.
JobConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form: every field present, keys in fixed order.
std::string serialize_config(const JobConfig& config);

}  // namespace pertspec
