"""Embedded monochrome digit bitmaps.

One fixed 32x52 bitmap per digit, stored as ASCII art ('#' = ink). These are
the only glyph shapes the renderer knows, which makes the template-matching
reader exact on clean plates by construction.
"""

import numpy as np

GLYPH_W = 32
GLYPH_H = 52


_GLYPH_ART = {
    0: (
        ".............######.............",
        "...........##########...........",
        ".........##############.........",
        "........################........",
        ".......##################.......",
        "......####################......",
        ".....#########....#########.....",
        ".....#######........#######.....",
        "....#######..........#######....",
        "....######............######....",
        "...#######............#######...",
        "...######..............######...",
        "..#######..............#######..",
        "..######................######..",
        "..######................######..",
        ".######..................######.",
        ".######..................######.",
        ".######..................######.",
        ".######..................######.",
        ".######..................######.",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        ".######..................######.",
        ".######..................######.",
        ".######..................######.",
        ".######..................######.",
        ".######..................######.",
        "..######................######..",
        "..######................######..",
        "..#######..............#######..",
        "...######..............######...",
        "...#######............#######...",
        "....######............######....",
        "....#######..........#######....",
        ".....#######........#######.....",
        ".....#########....#########.....",
        "......####################......",
        ".......##################.......",
        "........################........",
        ".........##############.........",
        "...........##########...........",
        ".............######.............",
    ),
    1: (
        "...........########.............",
        "..........#########.............",
        ".........##########.............",
        "........###########.............",
        "......#############.............",
        ".....##############.............",
        "....########.######.............",
        "...########..######.............",
        "..#######....######.............",
        "..######.....######.............",
        "..#####......######.............",
        "..####.......######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        ".............######.............",
        "....########################....",
        "....########################....",
        "....########################....",
        "....########################....",
        "....########################....",
        "....########################....",
    ),
    2: (
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        ".........................#######",
        "........................########",
        ".......................#########",
        "......................#########.",
        ".....................#########..",
        "....................#########...",
        "...................#########....",
        "..................#########.....",
        ".................#########......",
        "................########........",
        "...............########.........",
        "..............########..........",
        ".............########...........",
        "............########............",
        "...........########.............",
        "..........########..............",
        ".........########...............",
        "........########................",
        "......#########.................",
        ".....#########..................",
        "....#########...................",
        "...#########....................",
        "..#########.....................",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
    ),
    3: (
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........######################",
        "..........######################",
        "..........######################",
        "..........######################",
        "..........######################",
        "..........######################",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
    ),
    4: (
        "....................########....",
        "....................########....",
        "...................#########....",
        "..................##########....",
        ".................###########....",
        ".................###########....",
        "................############....",
        "...............######.######....",
        "..............#######.######....",
        ".............#######..######....",
        ".............######...######....",
        "............######....######....",
        "...........######.....######....",
        "..........#######.....######....",
        "..........######......######....",
        ".........######.......######....",
        "........######........######....",
        ".......#######........######....",
        "......#######.........######....",
        "......######..........######....",
        ".....######...........######....",
        "....######............######....",
        "...#######............######....",
        "...######.............######....",
        "..######..............######....",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
        "......................######....",
    ),
    5: (
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
    ),
    6: (
        "######....########..............",
        "######...#########..............",
        "######.##########...............",
        "###############.................",
        "#############...................",
        "############....................",
        "##########......................",
        "#########.......................",
        "#######.........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "######..........................",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
    ),
    7: (
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        ".........................######.",
        "........................#######.",
        "........................######..",
        ".......................#######..",
        ".......................######...",
        ".......................######...",
        "......................#######...",
        "......................######....",
        ".....................#######....",
        ".....................#######....",
        ".....................######.....",
        "....................#######.....",
        "....................######......",
        "...................#######......",
        "...................#######......",
        "...................######.......",
        "..................#######.......",
        "..................######........",
        "..................######........",
        ".................#######........",
        ".................######.........",
        "................#######.........",
        "................######..........",
        "................######..........",
        "...............#######..........",
        "...............######...........",
        "..............#######...........",
        "..............######............",
        "..............######............",
        ".............#######............",
        ".............######.............",
        "............#######.............",
        "............#######.............",
        "............######..............",
        "...........#######..............",
        "...........######...............",
        "..........#######...............",
        "..........#######...............",
        "..........######................",
        ".........#######................",
        ".........######.................",
        ".........######.................",
        "........#######.................",
        "........######..................",
        ".......#######..................",
        ".......######...................",
    ),
    8: (
        "............########............",
        ".........##############.........",
        "........################........",
        "......####################......",
        ".....######################.....",
        "....#########......#########....",
        "....#######..........#######....",
        "...######..............######...",
        "..######................######..",
        "..######................######..",
        "..#####..................#####..",
        "..#####..................#####..",
        ".#####....................#####.",
        ".#####....................#####.",
        ".#####....................#####.",
        ".#####....................#####.",
        "..#####..................#####..",
        "..#####..................#####..",
        "..######................######..",
        "..######................######..",
        "...######..............######...",
        "....#######..........#######....",
        "....#########......#########....",
        ".....######################.....",
        "......####################......",
        ".......##################.......",
        ".........##############.........",
        ".......##################.......",
        ".....######################.....",
        "....########################....",
        "...#########........#########...",
        "..########............########..",
        "..######................######..",
        ".######..................######.",
        ".#####....................#####.",
        "######....................######",
        "#####......................#####",
        "#####......................#####",
        "#####......................#####",
        "#####......................#####",
        "#####......................#####",
        "######....................######",
        ".#####....................#####.",
        ".######..................######.",
        "..######................######..",
        "..########............########..",
        "...#########........#########...",
        "....########################....",
        ".....######################.....",
        ".......##################.......",
        ".........##############.........",
        "............########............",
    ),
    9: (
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "######....................######",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "################################",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "..........................######",
        "........................########",
        "......................##########",
        "....................############",
        "...................#############",
        ".................###############",
        "...............##########.######",
        ".............##########...######",
        "............##########....######",
        "............########......######",
    ),
}


def _parse(rows) -> np.ndarray:
    if len(rows) != GLYPH_H or any(len(r) != GLYPH_W for r in rows):
        raise ValueError("glyph art has wrong dimensions")
    return np.array([[ch == "#" for ch in row] for row in rows], dtype=bool)


GLYPH_MASKS = {d: _parse(art) for d, art in _GLYPH_ART.items()}


def glyph_mask(digit: int) -> np.ndarray:
    """Boolean (GLYPH_H, GLYPH_W) ink mask for one digit."""
    return GLYPH_MASKS[digit]
