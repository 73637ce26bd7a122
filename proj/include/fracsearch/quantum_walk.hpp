#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fracsearch/lattice.hpp"
#include "fracsearch/time_series.hpp"

namespace fracsearch {

using Amplitude = std::complex<double>;

/// Switches for the two places where the marked vertex is treated specially.
/// Both default on; turning them off gives the bare flip-flop walk.
struct WalkOptions {
    bool oracle = true;
    bool marked_coin_identity = true;
};

/// Amplitudes a(v, l) over (vertex, link) pairs, stored vertex-major with the
/// four links of a vertex contiguous. Holds a non-owning reference to the
/// lattice, which must outlive the state.
class WalkState {
  public:
    explicit WalkState(const CarpetLattice& lattice);

    const CarpetLattice& lattice() const { return *lattice_; }
    std::size_t size() const { return amps_.size(); }

    Amplitude& at(VertexIndex v, Link l) { return amps_[v * kLinkCount + index_of(l)]; }
    const Amplitude& at(VertexIndex v, Link l) const {
        return amps_[v * kLinkCount + index_of(l)];
    }
    std::span<Amplitude> amplitudes() { return amps_; }
    std::span<const Amplitude> amplitudes() const { return amps_; }

    double norm_squared() const;
    /// Sum over links of |a(v, l)|^2.
    double vertex_probability(VertexIndex v) const;

  private:
    const CarpetLattice* lattice_;
    std::vector<Amplitude> amps_;
};

WalkState uniform_state(const CarpetLattice& lattice);

/// Negates the four amplitudes at the marked vertex.
void apply_oracle(WalkState& state);

/// Grover reflection c -> (2/4)(sum c) - c at every vertex; identity at the
/// marked vertex when `marked_coin_identity` is set.
void apply_coin(WalkState& state, const WalkOptions& opts = {});

/// Flip-flop shift: a(v, l) moves to (neighbor, reverse(l)); blocked links
/// keep their amplitude in place. Implemented as in-place pair swaps.
void apply_shift(WalkState& state);

/// One search step: oracle, then coin, then shift.
void search_step(WalkState& state, const WalkOptions& opts = {});

/// Per-vertex probabilities; sums to the squared norm.
std::vector<double> probability_distribution(const WalkState& state);

struct SearchConfig {
    std::int64_t steps = 0;
    std::int64_t record_stride = 1;
    /// Norm is checked every this many steps and after the last one.
    std::int64_t norm_check_interval = 256;
    double norm_tolerance = 1e-6;
    /// Capture probability_distribution after this step.
    std::optional<std::int64_t> snapshot_step;
    WalkOptions walk;
    /// Called after every step with (t, P(marked, t)).
    std::function<void(std::int64_t, double)> progress;
};

struct SearchRun {
    TimeSeries series;
    double final_norm_squared = 1.0;
    std::optional<std::vector<double>> snapshot;
};

/// Evolves the uniform state for `config.steps` steps, recording the
/// marked-vertex probability at t = 0, stride, 2*stride, ... (and always at
/// t = steps when it falls on the stride). Throws NumericIntegrityError when
/// |norm^2 - 1| exceeds the tolerance.
SearchRun evolve(const CarpetLattice& lattice, const SearchConfig& config);

/// Bytes needed for a search at `stage`: two amplitude buffers plus the
/// lattice.
std::uint64_t search_memory_bytes(Stage stage);

} // namespace fracsearch
