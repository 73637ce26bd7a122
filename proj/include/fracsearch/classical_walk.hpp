#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracsearch/lattice.hpp"
#include "fracsearch/time_series.hpp"

namespace fracsearch {

/// How a classical walker moves.
///   Stay:     pick one of the 4 directions uniformly; a blocked pick stays put.
///   Neighbor: pick uniformly among the open links; isolated cells stay put.
enum class MoveRule { Stay, Neighbor };

enum class ClassicalMethod { Exact, MonteCarlo };

const char* to_string(MoveRule rule);
const char* to_string(ClassicalMethod method);
MoveRule parse_move_rule(const std::string& name);
ClassicalMethod parse_classical_method(const std::string& name);

struct Distribution {
    std::vector<double> probabilities;
    std::int64_t time = 0;

    double total() const;
};

struct ClassicalConfig {
    Stage stage;
    /// Defaults to the corner cell (0,0).
    std::optional<CellCoord> start;
    std::int64_t steps = 1;
    ClassicalMethod method = ClassicalMethod::Exact;
    std::uint64_t walkers = 1'000'000;
    std::uint64_t seed = 1;
    MoveRule rule = MoveRule::Stay;
    /// Memory budget for exact propagation, lattice included.
    std::uint64_t memory_limit_bytes = std::uint64_t{4} << 30;
};

/// Point mass at `v`.
Distribution point_mass(const CarpetLattice& lattice, VertexIndex v);

/// One step of the walk, as a pull over each vertex's neighbor entries.
Distribution step_distribution(const Distribution& dist, const CarpetLattice& lattice,
                               MoveRule rule = MoveRule::Stay);

/// Bytes needed by return_series_exact at `stage`.
std::uint64_t exact_memory_bytes(Stage stage);

/// P_c(start, t) for t = 0..steps by exact propagation. Throws ResourceError
/// if the stage does not fit the memory budget. `lattice` may be omitted, in
/// which case it is built here after the budget check.
TimeSeries return_series_exact(const ClassicalConfig& config, const CarpetLattice& lattice);
TimeSeries return_series_exact(const ClassicalConfig& config);

/// Monte Carlo estimate of the same series: the fraction of walkers sitting on
/// the start cell at each t. Walkers move on cell coordinates directly, so no
/// lattice is materialized and large stages are cheap. Walkers are split into
/// fixed blocks, each seeded from (seed, block index); the result is identical
/// for any thread count.
TimeSeries return_series_mc(const ClassicalConfig& config);

/// Walkers per Monte Carlo block.
inline constexpr std::uint64_t kWalkersPerBlock = 4096;

} // namespace fracsearch
