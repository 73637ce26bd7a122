#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracsearch/analysis.hpp"
#include "fracsearch/errors.hpp"
#include "fracsearch/lattice.hpp"
#include "fracsearch/time_series.hpp"

namespace fracsearch::io {

using nlohmann::json;
namespace fs = std::filesystem;

/// Refusal to overwrite an existing output without --force.
class OutputExists : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Malformed CSV input; the message names the offending line.
class CsvError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Formats with 17 significant digits, the CSV convention for reals.
std::string format_real(double v);

/// `t,<value_name>` header, one row per sample.
std::string series_csv(const TimeSeries& series, std::string_view value_name = "P");

/// Reads a two-column CSV with an integer first column. The header line is
/// required and its names are not checked.
TimeSeries read_series_csv(const fs::path& path);

/// Reads a two-column CSV of reals (header required).
std::vector<std::pair<double, double>> read_xy_csv(const fs::path& path);

/// `vertex,+x,-x,+y,-y`.
std::string adjacency_csv(const CarpetLattice& lattice);

/// `i,j,P` for a per-vertex probability vector.
std::string distribution_csv(const CarpetLattice& lattice, const std::vector<double>& p);

json lattice_summary(const CarpetLattice& lattice);

/// Writes `content` to `path`, creating parent directories. Throws
/// OutputExists if the file is already there and `force` is false.
void write_file(const fs::path& path, std::string_view content, bool force);

/// Throws OutputExists if any path exists and `force` is false.
void ensure_writable(const std::vector<fs::path>& paths, bool force);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

std::string utc_timestamp();

json to_json(const Measured& m);
json to_json(const PeriodEstimate& e);
json to_json(const PowerLawFit& f);
json to_json(const HypothesisReport& r);
json to_json(const InverseComparison& c);

/// Reads back a fit written by to_json(PowerLawFit).
PowerLawFit fit_from_json(const json& j);

/// Record of one command invocation: config, outputs and their digests.
/// Output paths are stored relative to the manifest's directory.
class RunManifest {
  public:
    RunManifest(std::string command, json config);

    void add_output(const fs::path& path);
    void set_wall_time(std::chrono::duration<double> wall) { wall_seconds_ = wall.count(); }
    void set_extra(const std::string& key, json value) { extra_[key] = std::move(value); }

    json to_json(const fs::path& manifest_dir) const;
    /// Writes the manifest; returns its path.
    fs::path write(const fs::path& path, bool force) const;

  private:
    std::string command_;
    json config_;
    json extra_ = json::object();
    std::string timestamp_;
    double wall_seconds_ = 0.0;
    std::vector<fs::path> outputs_;
};

std::string tool_version();

} // namespace fracsearch::io
