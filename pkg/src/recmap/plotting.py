"""Byte-deterministic heatmap rendering.

Rasters are drawn cell by cell into a fixed-palette RGB buffer and written
through the in-tree PNG encoder, so identical inputs give identical files.
Color ramp endpoints: value 0 -> (16, 28, 78) deep blue, value 1 ->
(248, 220, 72) plate yellow; boundary overlay (220, 50, 47).
"""

import numpy as np

from .image import Image, write_png
from .recoverability import EvalTable, RecMap

CELL = 4
MARGIN_LEFT = 30
MARGIN_BOTTOM = 22
MARGIN_TOP = 6
MARGIN_RIGHT = 6

LOW_COLOR = (16, 28, 78)
HIGH_COLOR = (248, 220, 72)
BOUNDARY_COLOR = (220, 50, 47)
FRAME_COLOR = (60, 60, 60)
BG_COLOR = (255, 255, 255)
TEXT_COLOR = (30, 30, 30)

TABLE_CHANNELS = ("ocr_plate", "ocr_digit", "ssim_mean")

_FONT = {
    "0": ("01110", "10001", "10011", "10101", "11001", "10001", "01110"),
    "1": ("00100", "01100", "00100", "00100", "00100", "00100", "01110"),
    "2": ("01110", "10001", "00001", "00010", "00100", "01000", "11111"),
    "3": ("11110", "00001", "00001", "01110", "00001", "00001", "11110"),
    "4": ("00010", "00110", "01010", "10010", "11111", "00010", "00010"),
    "5": ("11111", "10000", "11110", "00001", "00001", "10001", "01110"),
    "6": ("00110", "01000", "10000", "11110", "10001", "10001", "01110"),
    "7": ("11111", "00001", "00010", "00100", "01000", "01000", "01000"),
    "8": ("01110", "10001", "10001", "01110", "10001", "10001", "01110"),
    "9": ("01110", "10001", "10001", "01111", "00001", "00010", "01100"),
    "a": ("00000", "00000", "01110", "00001", "01111", "10001", "01111"),
    "b": ("10000", "10000", "10110", "11001", "10001", "10001", "11110"),
    "e": ("00000", "00000", "01110", "10001", "11111", "10000", "01110"),
    "h": ("10000", "10000", "10110", "11001", "10001", "10001", "10001"),
    "l": ("01100", "00100", "00100", "00100", "00100", "00100", "01110"),
    "p": ("00000", "00000", "11110", "10001", "11110", "10000", "10000"),
    "t": ("01000", "01000", "11100", "01000", "01000", "01001", "00110"),
    " ": ("00000", "00000", "00000", "00000", "00000", "00000", "00000"),
}


def _draw_text(buf: np.ndarray, x: int, y: int, text: str, color=TEXT_COLOR):
    for ch in text:
        glyph = _FONT.get(ch)
        if glyph is None:
            continue
        for r, row in enumerate(glyph):
            for c, bit in enumerate(row):
                if bit == "1" and 0 <= y + r < buf.shape[0] and 0 <= x + c < buf.shape[1]:
                    buf[y + r, x + c] = color
        x += 6


def _draw_line(buf: np.ndarray, x0: float, y0: float, x1: float, y1: float, color):
    n = int(max(abs(x1 - x0), abs(y1 - y0)) * 2) + 1
    for i in range(n + 1):
        t = i / n
        x = int(round(x0 + t * (x1 - x0)))
        y = int(round(y0 + t * (y1 - y0)))
        if 0 <= y < buf.shape[0] and 0 <= x < buf.shape[1]:
            buf[y, x] = color


def _ramp(value: float):
    v = min(max(value, 0.0), 1.0)
    return tuple(
        int(np.floor(lo + v * (hi - lo) + 0.5)) for lo, hi in zip(LOW_COLOR, HIGH_COLOR)
    )


def render_heatmap(values: np.ndarray, boundary=None) -> Image:
    """Render an [alpha, beta]-indexed value grid (values in [0, 1]) with
    alpha on x, beta on y (increasing upward)."""
    n_a, n_b = values.shape
    grid_w, grid_h = n_a * CELL, n_b * CELL
    width = MARGIN_LEFT + grid_w + MARGIN_RIGHT
    height = MARGIN_TOP + grid_h + MARGIN_BOTTOM
    buf = np.empty((height, width, 3), dtype=np.uint8)
    buf[:, :] = BG_COLOR

    def cell_origin(a, b):
        x = MARGIN_LEFT + a * CELL
        y = MARGIN_TOP + (n_b - 1 - b) * CELL
        return x, y

    for a in range(n_a):
        for b in range(n_b):
            x, y = cell_origin(a, b)
            buf[y : y + CELL, x : x + CELL] = _ramp(float(values[a, b]))

    # frame
    buf[MARGIN_TOP - 1, MARGIN_LEFT - 1 : MARGIN_LEFT + grid_w + 1] = FRAME_COLOR
    buf[MARGIN_TOP + grid_h, MARGIN_LEFT - 1 : MARGIN_LEFT + grid_w + 1] = FRAME_COLOR
    buf[MARGIN_TOP - 1 : MARGIN_TOP + grid_h + 1, MARGIN_LEFT - 1] = FRAME_COLOR
    buf[MARGIN_TOP - 1 : MARGIN_TOP + grid_h + 1, MARGIN_LEFT + grid_w] = FRAME_COLOR

    if boundary is not None:
        beta_max, alpha_max = boundary

        def center(a, b):
            x, y = cell_origin(a, b)
            return x + CELL / 2.0, y + CELL / 2.0

        prev = None
        for a in range(n_a):
            if beta_max[a] < 0:
                prev = None
                continue
            cur = center(a, int(beta_max[a]))
            if prev is not None:
                _draw_line(buf, prev[0], prev[1], cur[0], cur[1], BOUNDARY_COLOR)
            prev = cur
        prev = None
        for b in range(n_b):
            if alpha_max[b] < 0:
                prev = None
                continue
            cur = center(int(alpha_max[b]), b)
            if prev is not None:
                _draw_line(buf, prev[0], prev[1], cur[0], cur[1], BOUNDARY_COLOR)
            prev = cur

    # ticks and axis labels
    for tick in (0, 30, 60, n_a - 1):
        if tick >= n_a:
            continue
        x, _ = cell_origin(tick, 0)
        _draw_text(buf, x, MARGIN_TOP + grid_h + 4, str(tick))
        _, y = cell_origin(0, tick)
        _draw_text(buf, 2, y, str(tick))
    _draw_text(buf, MARGIN_LEFT + grid_w // 2 - 15, height - 9, "alpha")
    _draw_text(buf, 2, MARGIN_TOP + grid_h // 2, "beta")
    return Image(buf)


def plot_table(table: EvalTable, channel: str, path):
    if channel not in TABLE_CHANNELS:
        raise ValueError(f"unknown channel {channel!r}; table channels: {TABLE_CHANNELS}")
    values = table.channel(channel if channel != "ocr_plate" else "ocr_plate")
    write_png(render_heatmap(values), path)


def plot_map(recmap: RecMap, path):
    values = recmap.grid.astype(np.float64)
    img = render_heatmap(values, boundary=(recmap.beta_max, recmap.alpha_max))
    write_png(img, path)
