#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "fracsearch/lattice.hpp"
#include "oracles.hpp"

using namespace fracsearch;

TEST_CASE("cell_present on small stages") {
    CHECK_FALSE(cell_present(1, 1, Stage{1}));
    CHECK(cell_present(0, 0, Stage{1}));
    CHECK_FALSE(cell_present(4, 4, Stage{2}));
    CHECK(cell_present(2, 4, Stage{2}));
    CHECK_FALSE(cell_present(3, 4, Stage{2}));
    CHECK(cell_present(0, 0, Stage{0}));
}

TEST_CASE("cell_present rejects coordinates off the grid") {
    CHECK_THROWS_AS(cell_present(3, 0, Stage{1}), DomainError);
    CHECK_THROWS_AS(cell_present(0, -1, Stage{1}), DomainError);
    CHECK_THROWS_AS(cell_present(0, 0, Stage{-1}), DomainError);
}

TEST_CASE("cell_present agrees with recursive subdivision") {
    for (int s = 0; s <= 5; ++s) {
        const auto grid = oracle::carpet_grid(s);
        const auto side = static_cast<std::int64_t>(grid.size());
        REQUIRE(side == Stage{s}.side());
        for (std::int64_t j = 0; j < side; ++j)
            for (std::int64_t i = 0; i < side; ++i)
                REQUIRE(cell_present(i, j, Stage{s}) == grid[j][i]);
    }
}

TEST_CASE("vertex counts") {
    CHECK(CarpetLattice::build(Stage{0}).vertex_count() == 1);
    CHECK(CarpetLattice::build(Stage{1}).vertex_count() == 8);

    std::size_t brute = 0;
    for (const auto& row : oracle::carpet_grid(2))
        for (bool b : row) brute += b;
    CHECK(brute == 64);
    CHECK(CarpetLattice::build(Stage{2}).vertex_count() == brute);
}

TEST_CASE("stage 0 is a single isolated cell") {
    const auto lat = CarpetLattice::build(Stage{0});
    for (Link l : kLinks) CHECK(lat.neighbor(0, l) == 0);
    CHECK(lat.degree(0) == 0);
}

TEST_CASE("stage-1 degrees") {
    const auto lat = CarpetLattice::build(Stage{1});
    const VertexIndex corner = *lat.index_of({0, 0});
    const VertexIndex edge = *lat.index_of({1, 0});
    CHECK(lat.degree(corner) == 2);
    CHECK(lat.degree(edge) == 2);
    CHECK(lat.neighbor(corner, Link::PlusX) == edge);
    CHECK(lat.neighbor(corner, Link::MinusX) == corner);
    CHECK(lat.neighbor(edge, Link::PlusY) == edge);  // (1,1) is the hole
    // Every stage-1 cell is on the ring around the hole.
    CHECK(lat.degree_histogram() == std::map<int, std::size_t>{{2, 8}});
}

TEST_CASE("dense indices are row-major") {
    const auto lat = CarpetLattice::build(Stage{2});
    for (VertexIndex v = 1; v < lat.vertex_count(); ++v) {
        const auto a = lat.coord_of(v - 1);
        const auto b = lat.coord_of(v);
        CHECK((a.j < b.j || (a.j == b.j && a.i < b.i)));
    }
    for (VertexIndex v = 0; v < lat.vertex_count(); ++v) CHECK(*lat.index_of(lat.coord_of(v)) == v);
    CHECK_FALSE(lat.index_of({4, 4}).has_value());
    CHECK_FALSE(lat.index_of({9, 0}).has_value());
}

TEST_CASE("neighbor table is symmetric and unit-step") {
    for (int s = 0; s <= 4; ++s) {
        const auto lat = CarpetLattice::build(Stage{s});
        for (VertexIndex v = 0; v < lat.vertex_count(); ++v) {
            for (Link l : kLinks) {
                const VertexIndex w = lat.neighbor(v, l);
                REQUIRE(w < lat.vertex_count());
                if (w == v) continue;
                REQUIRE(lat.neighbor(w, reverse(l)) == v);
                const auto a = lat.coord_of(v);
                const auto b = lat.coord_of(w);
                const bool horizontal = l == Link::PlusX || l == Link::MinusX;
                const std::int64_t di = b.i - a.i;
                const std::int64_t dj = b.j - a.j;
                if (horizontal) {
                    REQUIRE(dj == 0);
                    REQUIRE(di == (l == Link::PlusX ? 1 : -1));
                } else {
                    REQUIRE(di == 0);
                    REQUIRE(dj == (l == Link::PlusY ? 1 : -1));
                }
            }
        }
    }
}

TEST_CASE("blocked links are exactly the absent or off-grid neighbors") {
    const auto lat = CarpetLattice::build(Stage{3});
    const std::int64_t side = Stage{3}.side();
    const std::int64_t dx[4] = {1, -1, 0, 0};
    const std::int64_t dy[4] = {0, 0, 1, -1};
    for (VertexIndex v = 0; v < lat.vertex_count(); ++v) {
        const auto c = lat.coord_of(v);
        for (Link l : kLinks) {
            const std::int64_t ni = c.i + dx[index_of(l)];
            const std::int64_t nj = c.j + dy[index_of(l)];
            const bool open = ni >= 0 && nj >= 0 && ni < side && nj < side && cell_present(ni, nj, Stage{3});
            REQUIRE((lat.neighbor(v, l) != v) == open);
        }
    }
}

TEST_CASE("self-similarity: each retained subsquare is a translated lower stage") {
    for (int s = 1; s <= 4; ++s) {
        const std::int64_t sub = Stage{s - 1}.side();
        for (int bj = 0; bj < 3; ++bj)
            for (int bi = 0; bi < 3; ++bi) {
                if (bi == 1 && bj == 1) continue;
                for (std::int64_t j = 0; j < sub; ++j)
                    for (std::int64_t i = 0; i < sub; ++i)
                        REQUIRE(cell_present(bi * sub + i, bj * sub + j, Stage{s}) ==
                                cell_present(i, j, Stage{s - 1}));
            }
    }
}

TEST_CASE("link reversal is an involution") {
    for (Link l : kLinks) {
        CHECK(reverse(reverse(l)) == l);
        CHECK(reverse(l) != l);
    }
    CHECK(reverse(Link::PlusX) == Link::MinusX);
    CHECK(reverse(Link::PlusY) == Link::MinusY);
}

TEST_CASE("marked vertex") {
    CHECK(CarpetLattice::build(Stage{1}).coord_of(CarpetLattice::build(Stage{1}).marked()) ==
          CellCoord{0, 0});
    const auto lat = CarpetLattice::build(Stage{3});
    CHECK(lat.coord_of(lat.marked()) == CellCoord{8, 8});
    CHECK(lat.degree(lat.marked()) == 4);
    const auto custom = CarpetLattice::build(Stage{2}, CellCoord{3, 2});
    CHECK(custom.coord_of(custom.marked()) == CellCoord{3, 2});
    CHECK_THROWS_AS(CarpetLattice::build(Stage{2}, CellCoord{4, 4}), DomainError);
    CHECK_THROWS_AS(CarpetLattice::build(Stage{2}, CellCoord{9, 0}), DomainError);
    CHECK_THROWS_AS(CarpetLattice::build(Stage{-1}), DomainError);
}

TEST_CASE("default mark sits next to a hole corner at every stage") {
    for (int s = 2; s <= 6; ++s) {
        const CellCoord m = default_marked_cell(Stage{s});
        CHECK(cell_present(m.i, m.j, Stage{s}));
        CHECK_FALSE(cell_present(m.i + 1, m.j + 1, Stage{s}));
    }
}
