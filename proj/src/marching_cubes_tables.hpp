// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef DENSEPACK_MARCHING_CUBES_TABLES_HPP
#define DENSEPACK_MARCHING_CUBES_TABLES_HPP

namespace dp::mc {

// Bit i of the cube index is set when corner i is inside the surface.
// kEdgeTable gives the cut edges per cube index; kTriTable lists the
// triangles as edge-index triples terminated by -1.
extern const int kEdgeTable[256];
extern const int kTriTable[256][16];

// Edge e connects corners kEdgeCorners[e][0..1].
inline constexpr int kEdgeCorners[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
    {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

// Corner offsets in (x, y, z) grid steps, Bourke numbering.
inline constexpr int kCornerOffsets[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

}  // namespace dp::mc

#endif
