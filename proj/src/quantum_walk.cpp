#include "fracsearch/quantum_walk.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace fracsearch {

namespace {

// Vertex count below which the kernels stay single-threaded.
constexpr std::int64_t kParallelThreshold = 1 << 12;

inline void grover(Amplitude* c) {
    const Amplitude half_sum = 0.5 * (c[0] + c[1] + c[2] + c[3]);
    c[0] = half_sum - c[0];
    c[1] = half_sum - c[1];
    c[2] = half_sum - c[2];
    c[3] = half_sum - c[3];
}

inline void negate(Amplitude* c) {
    for (int l = 0; l < kLinkCount; ++l) c[l] = -c[l];
}

// Oracle and coin in a single pass over the vertices.
void oracle_and_coin(WalkState& state, const WalkOptions& opts) {
    Amplitude* amps = state.amplitudes().data();
    const auto n = static_cast<std::int64_t>(state.lattice().vertex_count());
    const auto marked = static_cast<std::int64_t>(state.lattice().marked());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::int64_t v = 0; v < n; ++v) {
        Amplitude* c = amps + v * kLinkCount;
        if (v == marked) {
            if (opts.oracle) negate(c);
            if (!opts.marked_coin_identity) grover(c);
        } else {
            grover(c);
        }
    }
}

} // namespace

WalkState::WalkState(const CarpetLattice& lattice)
    : lattice_(&lattice), amps_(lattice.vertex_count() * kLinkCount) {}

double WalkState::norm_squared() const {
    const auto n = static_cast<std::int64_t>(amps_.size());
    const Amplitude* a = amps_.data();
    double sum = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sum) if (n >= kParallelThreshold)
    for (std::int64_t k = 0; k < n; ++k) sum += std::norm(a[k]);
    return sum;
}

double WalkState::vertex_probability(VertexIndex v) const {
    double p = 0.0;
    for (Link l : kLinks) p += std::norm(at(v, l));
    return p;
}

WalkState uniform_state(const CarpetLattice& lattice) {
    WalkState state(lattice);
    const double amp =
        1.0 / std::sqrt(static_cast<double>(lattice.vertex_count()) * kLinkCount);
    for (Amplitude& a : state.amplitudes()) a = amp;
    return state;
}

void apply_oracle(WalkState& state) {
    negate(state.amplitudes().data() + state.lattice().marked() * std::size_t{kLinkCount});
}

void apply_coin(WalkState& state, const WalkOptions& opts) {
    WalkOptions coin_only = opts;
    coin_only.oracle = false;
    oracle_and_coin(state, coin_only);
}

void apply_shift(WalkState& state) {
    Amplitude* amps = state.amplitudes().data();
    const auto table = state.lattice().neighbor_table();
    const auto n = static_cast<std::int64_t>(table.size());
    // Every open link pairs (v, +x) with (w, -x) or (v, +y) with (w, -y), so
    // walking the positive directions visits each pair once.
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::int64_t v = 0; v < n; ++v) {
        for (Link l : {Link::PlusX, Link::PlusY}) {
            const VertexIndex w = table[v][index_of(l)];
            if (w == v) continue;
            std::swap(amps[v * kLinkCount + index_of(l)],
                      amps[std::int64_t{w} * kLinkCount + index_of(reverse(l))]);
        }
    }
}

void search_step(WalkState& state, const WalkOptions& opts) {
    oracle_and_coin(state, opts);
    apply_shift(state);
}

std::vector<double> probability_distribution(const WalkState& state) {
    const std::size_t n = state.lattice().vertex_count();
    std::vector<double> p(n);
    for (std::size_t v = 0; v < n; ++v) p[v] = state.vertex_probability(static_cast<VertexIndex>(v));
    return p;
}

SearchRun evolve(const CarpetLattice& lattice, const SearchConfig& config) {
    if (config.steps < 1) throw DomainError("search needs at least one step");
    if (config.record_stride < 1) throw DomainError("record stride must be positive");
    if (config.norm_check_interval < 1) throw DomainError("norm check interval must be positive");

    SearchRun run;
    WalkState state = uniform_state(lattice);
    const VertexIndex marked = lattice.marked();
    run.series.push_back(0, state.vertex_probability(marked));
    if (config.snapshot_step && *config.snapshot_step == 0) run.snapshot = probability_distribution(state);

    auto check_norm = [&](std::int64_t t) {
        const double norm2 = state.norm_squared();
        if (!(std::abs(norm2 - 1.0) <= config.norm_tolerance)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "norm drift at t=" << t << ": |psi|^2 = " << norm2 << " (stage "
                << lattice.stage().level << ", tolerance " << config.norm_tolerance << ")";
            throw NumericIntegrityError(msg.str());
        }
        return norm2;
    };

    for (std::int64_t t = 1; t <= config.steps; ++t) {
        search_step(state, config.walk);
        const double p = state.vertex_probability(marked);
        if (t % config.record_stride == 0) run.series.push_back(t, p);
        if (config.snapshot_step && *config.snapshot_step == t)
            run.snapshot = probability_distribution(state);
        if (t % config.norm_check_interval == 0) check_norm(t);
        if (config.progress) config.progress(t, p);
    }
    run.final_norm_squared = check_norm(config.steps);
    return run;
}

std::uint64_t search_memory_bytes(Stage stage) {
    const std::uint64_t amps = stage.vertex_count() * kLinkCount;
    return 2 * amps * sizeof(Amplitude) + CarpetLattice::estimated_bytes(stage);
}

} // namespace fracsearch
