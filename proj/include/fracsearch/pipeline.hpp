#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracsearch/analysis.hpp"
#include "fracsearch/classical_walk.hpp"
#include "fracsearch/lattice.hpp"
#include "fracsearch/quantum_walk.hpp"

namespace fracsearch {

namespace fs = std::filesystem;

/// Prefactor and exponent seeding the automatic step budget.
inline constexpr double kSeedQPrefactor = 3.79;
inline constexpr double kSeedQExponent = 0.5647;
inline constexpr double kPeriodsPerRun = 16.0;
inline constexpr std::int64_t kMinSteps = 64;

/// ceil(16 * 3.79 * N^0.5647) rounded up to a power of two, at least 64.
std::int64_t auto_steps(Stage stage);

/// 80% of physical memory.
std::uint64_t default_memory_budget();

struct SearchJob {
    Stage stage;
    std::optional<CellCoord> marked;
    /// nullopt selects auto_steps.
    std::optional<std::int64_t> steps;
    std::int64_t record_stride = 1;
    std::optional<std::int64_t> snapshot_step;
    fs::path out_dir;
    bool force = false;
    std::uint64_t memory_budget = default_memory_budget();
    /// Progress lines go here when set.
    std::ostream* log = nullptr;
};

struct SearchOutputs {
    SearchRun run;
    std::int64_t steps = 0;
    fs::path csv;
    fs::path manifest;
    std::optional<fs::path> snapshot;
};

/// Runs one search and writes search.csv, search_manifest.json and, when
/// requested, snapshot.csv into `out_dir`. The memory guard is evaluated
/// before anything is allocated.
SearchOutputs run_search_job(const SearchJob& job);

struct ClassicalJob {
    ClassicalConfig config;
    fs::path out_dir;
    bool force = false;
};

struct ClassicalOutputs {
    TimeSeries series;
    fs::path csv;
    fs::path manifest;
};

/// Writes classical.csv and classical_manifest.json into `out_dir`.
ClassicalOutputs run_classical_job(const ClassicalJob& job);

/// Default classical fit window: [100, T/2].
FitRange default_classical_window(std::int64_t steps);

struct PipelineSpec {
    std::vector<int> stages;
    /// Empty selects auto_steps for every stage; otherwise one entry per stage.
    std::vector<std::int64_t> steps;
    std::optional<CellCoord> marked;
    bool run_classical = true;
    ClassicalConfig classical{Stage{7}, std::nullopt, 20'000};
    std::optional<FitRange> classical_window;
    /// The P fit uses this many of the largest stages.
    std::size_t p_fit_stages = 4;
    fs::path out_dir;
    bool force = false;
    std::uint64_t memory_budget = default_memory_budget();
    std::ostream* log = nullptr;

    /// Throws DomainError on an invalid spec.
    void validate() const;
};

struct StageResult {
    int stage = 0;
    std::uint64_t vertex_count = 0;
    std::int64_t steps = 0;
    PeriodEstimate period;
    double mean_peak = 0.0;
    fs::path manifest;
};

struct PipelineResult {
    std::vector<StageResult> stages;
    PowerLawFit q_fit;
    PowerLawFit p_fit;
    std::optional<PowerLawFit> classical_fit;
    std::optional<Measured> spectral_dimension;
    std::optional<HypothesisReport> hypothesis;
    std::optional<InverseComparison> inverse;
    fs::path summary;
    nlohmann::json summary_json;
};

/// Per stage: search, period, mean peak. Then the Q-vs-N and P-vs-N fits,
/// the classical run and its spectral dimension, and the scaling-hypothesis
/// report, all recorded in summary.json. On failure, the summary is written
/// with status "failed" and the completed parts, and the error is rethrown.
PipelineResult run_pipeline(const PipelineSpec& spec);

} // namespace fracsearch
