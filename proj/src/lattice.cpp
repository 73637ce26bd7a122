#include "fracsearch/lattice.hpp"

#include <algorithm>
#include <string>

namespace fracsearch {

namespace {

// Largest stage whose vertex count still fits a 32-bit dense index.
constexpr int kMaxBuildStage = 10;
// 3^39 is the largest power of three below 2^63.
constexpr int kMaxCoordStage = 39;

std::int64_t pow3(int n) {
    std::int64_t r = 1;
    for (int k = 0; k < n; ++k) r *= 3;
    return r;
}

} // namespace

const char* link_name(Link l) {
    switch (l) {
    case Link::PlusX: return "+x";
    case Link::MinusX: return "-x";
    case Link::PlusY: return "+y";
    case Link::MinusY: return "-y";
    }
    return "?";
}

std::int64_t Stage::side() const { return pow3(level); }

std::uint64_t Stage::vertex_count() const { return std::uint64_t{1} << (3 * level); }

CellCoord default_marked_cell(Stage stage) {
    if (stage.level <= 1) return {0, 0};
    const std::int64_t corner = pow3(stage.level - 1) - 1;
    return {corner, corner};
}

bool cell_present(std::int64_t i, std::int64_t j, Stage stage) {
    if (stage.level < 0 || stage.level > kMaxCoordStage)
        throw DomainError("stage " + std::to_string(stage.level) + " out of range");
    const std::int64_t side = stage.side();
    if (i < 0 || j < 0 || i >= side || j >= side)
        throw DomainError("cell (" + std::to_string(i) + "," + std::to_string(j) +
                          ") outside the " + std::to_string(side) + "x" + std::to_string(side) +
                          " grid");
    for (int d = 0; d < stage.level; ++d) {
        if (i % 3 == 1 && j % 3 == 1) return false;
        i /= 3;
        j /= 3;
    }
    return true;
}

CarpetLattice CarpetLattice::build(Stage stage, std::optional<CellCoord> marked) {
    if (stage.level < 0 || stage.level > kMaxBuildStage)
        throw DomainError("stage must lie in [0, " + std::to_string(kMaxBuildStage) + "], got " +
                          std::to_string(stage.level));
    const CellCoord mark = marked.value_or(default_marked_cell(stage));
    if (!cell_present(mark.i, mark.j, stage))
        throw DomainError("marked cell (" + std::to_string(mark.i) + "," +
                          std::to_string(mark.j) + ") is not part of the stage-" +
                          std::to_string(stage.level) + " carpet");

    CarpetLattice lat;
    lat.stage_ = stage;
    const std::int64_t side = stage.side();
    const auto n = static_cast<std::size_t>(stage.vertex_count());
    lat.coords_.reserve(n);
    lat.row_start_.reserve(static_cast<std::size_t>(side) + 1);
    for (std::int64_t j = 0; j < side; ++j) {
        lat.row_start_.push_back(static_cast<VertexIndex>(lat.coords_.size()));
        for (std::int64_t i = 0; i < side; ++i)
            if (cell_present(i, j, stage)) lat.coords_.push_back({i, j});
    }
    lat.row_start_.push_back(static_cast<VertexIndex>(lat.coords_.size()));

    lat.neighbors_.resize(lat.coords_.size());
    for (std::size_t v = 0; v < lat.coords_.size(); ++v) {
        const auto [i, j] = lat.coords_[v];
        const auto self = static_cast<VertexIndex>(v);
        auto lookup = [&](std::int64_t ni, std::int64_t nj) {
            if (ni < 0 || nj < 0 || ni >= side || nj >= side) return self;
            return lat.index_of({ni, nj}).value_or(self);
        };
        lat.neighbors_[v] = {lookup(i + 1, j), lookup(i - 1, j), lookup(i, j + 1),
                             lookup(i, j - 1)};
    }
    lat.marked_ = *lat.index_of(mark);
    return lat;
}

std::optional<VertexIndex> CarpetLattice::index_of(CellCoord c) const {
    const std::int64_t side = stage_.side();
    if (c.i < 0 || c.j < 0 || c.i >= side || c.j >= side) return std::nullopt;
    const auto row = static_cast<std::size_t>(c.j);
    const auto first = coords_.begin() + row_start_[row];
    const auto last = coords_.begin() + row_start_[row + 1];
    const auto it = std::lower_bound(first, last, c.i,
                                     [](const CellCoord& a, std::int64_t i) { return a.i < i; });
    if (it == last || it->i != c.i) return std::nullopt;
    return static_cast<VertexIndex>(it - coords_.begin());
}

int CarpetLattice::degree(VertexIndex v) const {
    const auto& row = neighbors_.at(v);
    return static_cast<int>(std::count_if(row.begin(), row.end(),
                                          [v](VertexIndex w) { return w != v; }));
}

std::map<int, std::size_t> CarpetLattice::degree_histogram() const {
    std::map<int, std::size_t> hist;
    for (std::size_t v = 0; v < neighbors_.size(); ++v) ++hist[degree(static_cast<VertexIndex>(v))];
    return hist;
}

std::uint64_t CarpetLattice::estimated_bytes(Stage stage) {
    const std::uint64_t n = stage.vertex_count();
    return n * (sizeof(CellCoord) + sizeof(std::array<VertexIndex, kLinkCount>)) +
           static_cast<std::uint64_t>(stage.side() + 1) * sizeof(VertexIndex);
}

} // namespace fracsearch
