#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fracsearch/errors.hpp"

namespace fracsearch {

using VertexIndex = std::uint32_t;

/// Link directions of the square carpet. Reversal pairs are adjacent
/// integers, so `reverse` is a single xor.
enum class Link : std::uint8_t { PlusX = 0, MinusX = 1, PlusY = 2, MinusY = 3 };

inline constexpr int kLinkCount = 4;
inline constexpr std::array<Link, kLinkCount> kLinks = {Link::PlusX, Link::MinusX, Link::PlusY,
                                                        Link::MinusY};

constexpr Link reverse(Link l) { return static_cast<Link>(static_cast<std::uint8_t>(l) ^ 1U); }
constexpr int index_of(Link l) { return static_cast<int>(l); }
const char* link_name(Link l);

/// Recursion depth of the carpet construction.
struct Stage {
    int level = 0;

    /// Number of cells along one side, 3^S.
    std::int64_t side() const;
    /// Number of retained cells, 8^S.
    std::uint64_t vertex_count() const;
};

/// Column `i`, row `j` on the 3^S x 3^S grid.
struct CellCoord {
    std::int64_t i = 0;
    std::int64_t j = 0;

    friend bool operator==(const CellCoord&, const CellCoord&) = default;
};

/// Default search target: the cell diagonally outside the lower-left corner
/// of the largest removed square, (3^(S-1) - 1, 3^(S-1) - 1). It is (0,0) for
/// S <= 1.
CellCoord default_marked_cell(Stage stage);

/// True iff no base-3 digit position holds a 1 in both coordinates.
/// Throws DomainError for coordinates outside the grid.
bool cell_present(std::int64_t i, std::int64_t j, Stage stage);

/// Stage-S Sierpinski carpet as a cell-adjacency graph.
///
/// Present cells get dense indices in row-major order (row j outer, column i
/// inner). Each vertex carries four neighbor entries; a blocked direction
/// (hole or outer boundary) stores the vertex's own index. The lattice is
/// immutable once built.
class CarpetLattice {
  public:
    /// Builds the carpet. `marked` defaults to default_marked_cell and must be
    /// a present cell.
    static CarpetLattice build(Stage stage, std::optional<CellCoord> marked = std::nullopt);

    Stage stage() const { return stage_; }
    std::size_t vertex_count() const { return coords_.size(); }
    VertexIndex marked() const { return marked_; }

    CellCoord coord_of(VertexIndex v) const { return coords_.at(v); }
    std::optional<VertexIndex> index_of(CellCoord c) const;

    VertexIndex neighbor(VertexIndex v, Link l) const { return neighbors_[v][index_of_link(l)]; }
    const std::array<VertexIndex, kLinkCount>& neighbors(VertexIndex v) const {
        return neighbors_[v];
    }
    std::span<const std::array<VertexIndex, kLinkCount>> neighbor_table() const {
        return neighbors_;
    }

    /// Number of non-blocked links at `v`.
    int degree(VertexIndex v) const;

    /// Degree -> vertex count.
    std::map<int, std::size_t> degree_histogram() const;

    /// Approximate resident size of a built lattice.
    static std::uint64_t estimated_bytes(Stage stage);

  private:
    static constexpr std::size_t index_of_link(Link l) { return static_cast<std::size_t>(l); }

    Stage stage_;
    std::vector<CellCoord> coords_;
    std::vector<std::array<VertexIndex, kLinkCount>> neighbors_;
    // row_start_[j] is the dense index of the first present cell of row j.
    std::vector<VertexIndex> row_start_;
    VertexIndex marked_ = 0;
};

} // namespace fracsearch
