#include "fracsearch/classical_walk.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <span>
#include <string>

namespace fracsearch {

namespace {

constexpr std::int64_t kParallelThreshold = 1 << 12;

constexpr std::array<std::array<std::int64_t, 2>, kLinkCount> kOffsets = {
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

bool open_cell(std::int64_t i, std::int64_t j, Stage stage, std::int64_t side) {
    return i >= 0 && j >= 0 && i < side && j < side && cell_present(i, j, stage);
}

std::vector<double> inverse_degrees(const CarpetLattice& lattice) {
    std::vector<double> inv(lattice.vertex_count());
    for (std::size_t v = 0; v < inv.size(); ++v) {
        const int deg = lattice.degree(static_cast<VertexIndex>(v));
        inv[v] = deg == 0 ? 0.0 : 1.0 / deg;
    }
    return inv;
}

void step_into(std::span<const double> src, std::span<double> dst, const CarpetLattice& lattice,
               MoveRule rule, std::span<const double> inv_degree) {
    const auto table = lattice.neighbor_table();
    const auto n = static_cast<std::int64_t>(table.size());
    if (rule == MoveRule::Stay) {
        // Blocked entries point back at v, so the pull picks up the mass that stayed.
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
        for (std::int64_t v = 0; v < n; ++v) {
            const auto& nb = table[v];
            dst[v] = 0.25 * (src[nb[0]] + src[nb[1]] + src[nb[2]] + src[nb[3]]);
        }
    } else {
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
        for (std::int64_t v = 0; v < n; ++v) {
            double acc = inv_degree[v] == 0.0 ? src[v] : 0.0;
            for (VertexIndex w : table[v])
                if (w != v) acc += src[w] * inv_degree[w];
            dst[v] = acc;
        }
    }
}

VertexIndex start_vertex(const ClassicalConfig& config, const CarpetLattice& lattice) {
    const CellCoord start = config.start.value_or(CellCoord{0, 0});
    const auto v = lattice.index_of(start);
    if (!v)
        throw DomainError("start cell (" + std::to_string(start.i) + "," +
                          std::to_string(start.j) + ") is not part of the carpet");
    return *v;
}

void check_steps(const ClassicalConfig& config) {
    if (config.steps < 1) throw DomainError("classical walk needs at least one step");
}

} // namespace

const char* to_string(MoveRule rule) { return rule == MoveRule::Stay ? "stay" : "neighbor"; }

const char* to_string(ClassicalMethod method) {
    return method == ClassicalMethod::Exact ? "exact" : "mc";
}

MoveRule parse_move_rule(const std::string& name) {
    if (name == "stay") return MoveRule::Stay;
    if (name == "neighbor") return MoveRule::Neighbor;
    throw DomainError("unknown move rule '" + name + "' (expected stay|neighbor)");
}

ClassicalMethod parse_classical_method(const std::string& name) {
    if (name == "exact") return ClassicalMethod::Exact;
    if (name == "mc") return ClassicalMethod::MonteCarlo;
    throw DomainError("unknown method '" + name + "' (expected exact|mc)");
}

double Distribution::total() const {
    return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
}

Distribution point_mass(const CarpetLattice& lattice, VertexIndex v) {
    if (v >= lattice.vertex_count()) throw DomainError("vertex index out of range");
    Distribution d;
    d.probabilities.assign(lattice.vertex_count(), 0.0);
    d.probabilities[v] = 1.0;
    return d;
}

Distribution step_distribution(const Distribution& dist, const CarpetLattice& lattice,
                               MoveRule rule) {
    if (dist.probabilities.size() != lattice.vertex_count())
        throw DomainError("distribution size does not match the lattice");
    Distribution next;
    next.probabilities.resize(dist.probabilities.size());
    next.time = dist.time + 1;
    const auto inv = rule == MoveRule::Neighbor ? inverse_degrees(lattice) : std::vector<double>{};
    step_into(dist.probabilities, next.probabilities, lattice, rule, inv);
    return next;
}

std::uint64_t exact_memory_bytes(Stage stage) {
    return 2 * stage.vertex_count() * sizeof(double) + CarpetLattice::estimated_bytes(stage);
}

TimeSeries return_series_exact(const ClassicalConfig& config, const CarpetLattice& lattice) {
    check_steps(config);
    if (exact_memory_bytes(lattice.stage()) > config.memory_limit_bytes)
        throw ResourceError("exact propagation at stage " + std::to_string(lattice.stage().level) +
                            " needs " + std::to_string(exact_memory_bytes(lattice.stage())) +
                            " bytes, budget is " + std::to_string(config.memory_limit_bytes));
    const VertexIndex start = start_vertex(config, lattice);
    const auto inv = config.rule == MoveRule::Neighbor ? inverse_degrees(lattice)
                                                       : std::vector<double>{};

    std::vector<double> cur(lattice.vertex_count(), 0.0);
    std::vector<double> next(lattice.vertex_count());
    cur[start] = 1.0;

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(config.steps) + 1);
    values.push_back(cur[start]);
    for (std::int64_t t = 1; t <= config.steps; ++t) {
        step_into(cur, next, lattice, config.rule, inv);
        cur.swap(next);
        values.push_back(cur[start]);
    }
    return TimeSeries::uniform(0, 1, std::move(values));
}

TimeSeries return_series_exact(const ClassicalConfig& config) {
    if (config.stage.level < 0) throw DomainError("negative stage");
    if (exact_memory_bytes(config.stage) > config.memory_limit_bytes)
        throw ResourceError("exact propagation at stage " + std::to_string(config.stage.level) +
                            " needs " + std::to_string(exact_memory_bytes(config.stage)) +
                            " bytes, budget is " + std::to_string(config.memory_limit_bytes));
    const CarpetLattice lattice = CarpetLattice::build(config.stage);
    return return_series_exact(config, lattice);
}

TimeSeries return_series_mc(const ClassicalConfig& config) {
    check_steps(config);
    if (config.walkers < 1) throw DomainError("Monte Carlo needs at least one walker");
    const Stage stage = config.stage;
    const std::int64_t side = stage.side();
    const CellCoord start = config.start.value_or(CellCoord{0, 0});
    if (!cell_present(start.i, start.j, stage))
        throw DomainError("start cell is not part of the carpet");

    const auto steps = static_cast<std::size_t>(config.steps);
    const std::uint64_t blocks = (config.walkers + kWalkersPerBlock - 1) / kWalkersPerBlock;
    std::vector<std::uint64_t> hits(steps + 1, 0);

#pragma omp parallel
    {
        std::vector<std::uint64_t> local(steps + 1, 0);
#pragma omp for schedule(dynamic)
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
            const auto block = static_cast<std::uint64_t>(b);
            std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                              static_cast<std::uint32_t>(config.seed >> 32),
                              static_cast<std::uint32_t>(block),
                              static_cast<std::uint32_t>(block >> 32)};
            std::mt19937_64 rng(seq);
            const std::uint64_t first = block * kWalkersPerBlock;
            const std::uint64_t count = std::min(kWalkersPerBlock, config.walkers - first);
            for (std::uint64_t w = 0; w < count; ++w) {
                std::int64_t i = start.i;
                std::int64_t j = start.j;
                ++local[0];
                for (std::size_t t = 1; t <= steps; ++t) {
                    if (config.rule == MoveRule::Stay) {
                        const auto& d = kOffsets[rng() >> 62];
                        if (open_cell(i + d[0], j + d[1], stage, side)) {
                            i += d[0];
                            j += d[1];
                        }
                    } else {
                        std::array<int, kLinkCount> open{};
                        int k = 0;
                        for (int l = 0; l < kLinkCount; ++l)
                            if (open_cell(i + kOffsets[l][0], j + kOffsets[l][1], stage, side))
                                open[k++] = l;
                        if (k > 0) {
                            const auto& d = kOffsets[open[rng() % static_cast<unsigned>(k)]];
                            i += d[0];
                            j += d[1];
                        }
                    }
                    if (i == start.i && j == start.j) ++local[t];
                }
            }
        }
#pragma omp critical
        for (std::size_t t = 0; t <= steps; ++t) hits[t] += local[t];
    }

    std::vector<double> values(steps + 1);
    const auto total = static_cast<double>(config.walkers);
    for (std::size_t t = 0; t <= steps; ++t) values[t] = static_cast<double>(hits[t]) / total;
    return TimeSeries::uniform(0, 1, std::move(values));
}

} // namespace fracsearch
