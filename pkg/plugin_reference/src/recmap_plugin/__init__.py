"""Reference restorer plugin for the recmap engine.

Implements the stdio frame protocol end to end with two modes: `echo`
(byte-transparent) and `median3` (3x3 per-channel median filter).
"""

__version__ = "0.1.0"
