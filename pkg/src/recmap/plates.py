"""Clean plate rendering: six digit glyphs on a yellow field with a fixed
slot layout, so every glyph's bounding box is known exactly."""

import re
from dataclasses import dataclass

import numpy as np

from .glyphs import GLYPH_H, GLYPH_W, glyph_mask
from .image import Box, Image

PLATE_W = 256
PLATE_H = 64
N_DIGITS = 6

BACKGROUND = (255, 221, 51)
GLYPH_COLOR = (16, 16, 16)

# Slot layout: fixed pitch with the glyph centered in each slot.
SLOT_PITCH = 40
LEFT_MARGIN = 10
_SLOT_X0 = LEFT_MARGIN + (SLOT_PITCH - GLYPH_W) // 2
_SLOT_Y0 = (PLATE_H - GLYPH_H) // 2

_DIGITS_RE = re.compile(r"^[0-9]{6}$")


@dataclass(frozen=True)
class CleanPlate:
    image: Image
    digits: str
    boxes: tuple


def digit_boxes() -> tuple:
    """The six glyph bounding boxes, left to right."""
    return tuple(
        Box(_SLOT_X0 + i * SLOT_PITCH, _SLOT_Y0, GLYPH_W, GLYPH_H) for i in range(N_DIGITS)
    )


def render_plate(digits: str) -> CleanPlate:
    """Render a 6-digit string; bit-identical output for identical input."""
    if not isinstance(digits, str) or not _DIGITS_RE.match(digits):
        raise ValueError(f"digits must match [0-9]{{6}}, got {digits!r}")
    pixels = np.empty((PLATE_H, PLATE_W, 3), dtype=np.uint8)
    pixels[:, :] = BACKGROUND
    boxes = digit_boxes()
    for ch, box in zip(digits, boxes):
        mask = glyph_mask(int(ch))
        slot = pixels[box.y : box.y + box.h, box.x : box.x + box.w]
        slot[mask] = GLYPH_COLOR
    return CleanPlate(image=Image(pixels), digits=digits, boxes=boxes)
