#pragma once

// Test-only reference constructions. They rebuild the carpet and the walk
// operators from their definitions without touching the library's kernels.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fracsearch/lattice.hpp"

namespace oracle {

/// Carpet by recursive subdivision: every retained square becomes a 3x3
/// block with its center cleared. Indexed [j][i].
inline std::vector<std::vector<bool>> carpet_grid(int stage) {
    std::vector<std::vector<bool>> grid{{true}};
    for (int s = 0; s < stage; ++s) {
        const std::size_t side = grid.size();
        std::vector<std::vector<bool>> next(3 * side, std::vector<bool>(3 * side, false));
        for (std::size_t bj = 0; bj < 3; ++bj)
            for (std::size_t bi = 0; bi < 3; ++bi) {
                if (bi == 1 && bj == 1) continue;
                for (std::size_t j = 0; j < side; ++j)
                    for (std::size_t i = 0; i < side; ++i)
                        next[bj * side + j][bi * side + i] = grid[j][i];
            }
        grid = std::move(next);
    }
    return grid;
}

/// Stage-1 search step (oracle, coin, shift) as a dense 32x32 matrix over the
/// basis (vertex, link), vertex in row-major order of the eight cells and
/// links ordered +x, -x, +y, -y. Geometry is hard-coded: a 3x3 block with the
/// center removed.
inline Eigen::MatrixXcd stage1_step_matrix(fracsearch::CellCoord marked = {0, 0},
                                           bool oracle = true, bool marked_identity = true) {
    std::vector<std::pair<int, int>> cells;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            if (!(i == 1 && j == 1)) cells.emplace_back(i, j);
    auto index = [&](int i, int j) -> int {
        for (int v = 0; v < 8; ++v)
            if (cells[v].first == i && cells[v].second == j) return v;
        return -1;
    };
    const int dim = 32;
    const int m = index(static_cast<int>(marked.i), static_cast<int>(marked.j));

    Eigen::MatrixXcd oracle_op = Eigen::MatrixXcd::Identity(dim, dim);
    if (oracle)
        for (int l = 0; l < 4; ++l) oracle_op(4 * m + l, 4 * m + l) = -1.0;

    Eigen::MatrixXcd coin = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::Matrix4cd grover = Eigen::Matrix4cd::Constant(0.5) - Eigen::Matrix4cd::Identity();
    for (int v = 0; v < 8; ++v) {
        if (v == m && marked_identity)
            coin.block(4 * v, 4 * v, 4, 4) = Eigen::Matrix4cd::Identity();
        else
            coin.block(4 * v, 4 * v, 4, 4) = grover;
    }

    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    const int rev[4] = {1, 0, 3, 2};
    Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(dim, dim);
    for (int v = 0; v < 8; ++v)
        for (int l = 0; l < 4; ++l) {
            const int w = index(cells[v].first + dx[l], cells[v].second + dy[l]);
            if (w < 0)
                shift(4 * v + l, 4 * v + l) = 1.0;
            else
                shift(4 * w + rev[l], 4 * v + l) = 1.0;
        }
    return shift * coin * oracle_op;
}

} // namespace oracle
