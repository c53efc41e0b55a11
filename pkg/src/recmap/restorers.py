"""Restoration back-ends: classical baselines plus the subprocess plugin
protocol where external restorers attach.

Wire protocol (bit-exact): on startup the plugin prints the ASCII line
`RECMAP-PLUGIN 1\\n` on stdout. Afterwards frames flow both directions with
identical framing: 4-byte magic `IMG0`, then width, height, channels as
little-endian uint32, then width*height*channels raw bytes, row-major, RGB
order. One response frame per request frame; closing the plugin's stdin
shuts it down.
"""

import os
import select
import shlex
import struct
import subprocess
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .degradation import gaussian_blur
from .image import Image, iround

PROTOCOL_HANDSHAKE = b"RECMAP-PLUGIN 1\n"
FRAME_MAGIC = b"IMG0"
DEFAULT_PLUGIN_TIMEOUT = 30.0


class PluginError(Exception):
    """Base for everything that can go wrong on the plugin boundary."""


class PluginHandshakeError(PluginError):
    pass


class PluginFrameError(PluginError):
    pass


class PluginDimensionError(PluginError):
    pass


class PluginTimeoutError(PluginError):
    pass


class PluginCrashError(PluginError):
    pass


@dataclass(frozen=True)
class RestorerSpec:
    kind: str
    params: tuple = ()
    plugin_cmd: str = ""

    def __post_init__(self):
        if self.kind not in ("identity", "unsharp", "wiener", "plugin"):
            raise ValueError(f"unknown restorer kind {self.kind!r}")
        if (self.kind == "plugin") != bool(self.plugin_cmd):
            raise ValueError("plugin_cmd must be set exactly for kind='plugin'")

    def param_dict(self) -> dict:
        return dict(self.params)


def parse_restorer(text: str) -> RestorerSpec:
    """CLI selector: identity | unsharp[:k=v,...] | wiener[:k=v,...] |
    plugin:CMD ARGS."""
    if text.startswith("plugin:"):
        cmd = text[len("plugin:") :].strip()
        if not cmd:
            raise ValueError("empty plugin command")
        return RestorerSpec(kind="plugin", plugin_cmd=cmd)
    kind, _, rest = text.partition(":")
    params = []
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if not key or not value:
                raise ValueError(f"bad restorer parameter {item!r}")
            params.append((key.strip(), float(value)))
    return RestorerSpec(kind=kind, params=tuple(sorted(params)))


# --- built-ins ---------------------------------------------------------------


def restore_identity(img: Image) -> Image:
    return Image(img.pixels.copy())


def restore_unsharp(img: Image, amount: float = 1.0, sigma: float = 1.0) -> Image:
    if not 0.0 <= amount <= 3.0:
        raise ValueError(f"amount={amount} outside [0, 3]")
    if not 0.3 <= sigma <= 3.0:
        raise ValueError(f"sigma={sigma} outside [0.3, 3]")
    blurred = gaussian_blur(img, sigma).pixels.astype(np.float64)
    sharp = img.pixels.astype(np.float64)
    return Image(iround(sharp + amount * (sharp - blurred)))


def restore_wiener(img: Image, sigma_est: float = 1.0, nsr: float = 0.01) -> Image:
    """Frequency-domain deconvolution against a Gaussian PSF of sigma_est,
    gain H*/(|H|^2 + nsr), with edge padding. The mean is carried around the
    filter so flat fields pass through unchanged."""
    if sigma_est <= 0 or nsr <= 0:
        raise ValueError("sigma_est and nsr must be positive")
    taps = kernels.gaussian_taps(sigma_est)
    r = (len(taps) - 1) // 2
    psf2 = np.outer(taps, taps)
    p = img.pixels
    planes = p[:, :, None] if p.ndim == 2 else p
    out = np.empty_like(planes)
    h, w = planes.shape[:2]
    ph, pw = h + 2 * r, w + 2 * r
    kern = np.zeros((ph, pw))
    kern[: 2 * r + 1, : 2 * r + 1] = psf2
    kern = np.roll(kern, (-r, -r), axis=(0, 1))
    hfreq = np.fft.fft2(kern)
    gain = np.conj(hfreq) / (np.abs(hfreq) ** 2 + nsr)
    for ch in range(planes.shape[2]):
        plane = planes[:, :, ch].astype(np.float64)
        mean = float(plane.mean())
        padded = np.pad(plane - mean, r, mode="edge")
        rec = np.real(np.fft.ifft2(np.fft.fft2(padded) * gain))
        out[:, :, ch] = iround(rec[r : r + h, r : r + w] + mean)
    return Image(out[:, :, 0] if p.ndim == 2 else out)


# --- plugin host -------------------------------------------------------------


def write_frame(fh, pixels: np.ndarray) -> None:
    h, w = pixels.shape[:2]
    c = 1 if pixels.ndim == 2 else pixels.shape[2]
    fh.write(FRAME_MAGIC + struct.pack("<III", w, h, c) + pixels.tobytes())
    fh.flush()


class PluginHost:
    """One plugin subprocess with one in-flight frame at a time."""

    def __init__(self, cmd: str, timeout: float = DEFAULT_PLUGIN_TIMEOUT):
        self.cmd = cmd
        self.timeout = timeout
        self._proc = None
        self._spawn()

    def _spawn(self):
        try:
            self._proc = subprocess.Popen(
                shlex.split(self.cmd),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
            )
        except OSError as exc:
            raise PluginCrashError(f"cannot launch plugin {self.cmd!r}: {exc}") from exc
        line = self._read_line(limit=64)
        if line != PROTOCOL_HANDSHAKE:
            self.close()
            raise PluginHandshakeError(
                f"plugin {self.cmd!r} sent {line!r} instead of the protocol handshake"
            )

    def _read_line(self, limit: int) -> bytes:
        buf = b""
        while not buf.endswith(b"\n") and len(buf) < limit:
            buf += self._read_exact(1, "handshake")
        return buf

    def _read_exact(self, n: int, what: str) -> bytes:
        fd = self._proc.stdout.fileno()
        deadline = time.monotonic() + self.timeout
        chunks = b""
        while len(chunks) < n:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self.close()
                raise PluginTimeoutError(
                    f"plugin timed out after {self.timeout:.0f} s while sending {what}"
                )
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                continue
            chunk = os.read(fd, n - len(chunks))
            if not chunk:
                code = self._proc.poll()
                self.close()
                if not chunks and what == "response frame":
                    raise PluginCrashError(
                        f"plugin exited (status {code}) instead of answering a frame"
                    )
                raise PluginFrameError(f"plugin closed the stream mid-{what}")
            chunks += chunk
        return chunks

    def restore(self, img: Image) -> Image:
        if self._proc is None or self._proc.poll() is not None:
            raise PluginCrashError("plugin process is not running")
        try:
            write_frame(self._proc.stdin, img.pixels)
        except (BrokenPipeError, OSError) as exc:
            self.close()
            raise PluginCrashError(f"plugin rejected a frame: {exc}") from exc
        header = self._read_exact(16, "response frame")
        if header[:4] != FRAME_MAGIC:
            self.close()
            raise PluginFrameError(f"bad frame magic {header[:4]!r}")
        w, h, c = struct.unpack("<III", header[4:16])
        if (w, h, c) != (img.width, img.height, img.channels):
            self.close()
            raise PluginDimensionError(
                f"plugin returned {w}x{h}x{c} for a {img.width}x{img.height}x"
                f"{img.channels} request"
            )
        payload = self._read_exact(w * h * c, "response payload")
        pixels = np.frombuffer(payload, dtype=np.uint8)
        shape = (h, w) if c == 1 else (h, w, c)
        return Image(pixels.reshape(shape).copy())

    def close(self):
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            if proc.stdin:
                proc.stdin.close()
            proc.wait(timeout=2.0)
        except Exception:
            proc.kill()
            proc.wait()
        finally:
            if proc.stdout:
                proc.stdout.close()


# --- factory -----------------------------------------------------------------


class Restorer:
    """Uniform facade over built-ins and plugin hosts."""

    def __init__(self, spec: RestorerSpec, plugin_fresh=False, plugin_timeout=DEFAULT_PLUGIN_TIMEOUT):
        self.spec = spec
        self._fresh = plugin_fresh
        self._timeout = plugin_timeout
        self._host = None

    def restore(self, img: Image) -> Image:
        kind = self.spec.kind
        if kind == "identity":
            return restore_identity(img)
        if kind == "unsharp":
            return restore_unsharp(img, **self.spec.param_dict())
        if kind == "wiener":
            return restore_wiener(img, **self.spec.param_dict())
        if self._fresh:
            host = PluginHost(self.spec.plugin_cmd, timeout=self._timeout)
            try:
                return host.restore(img)
            finally:
                host.close()
        if self._host is None:
            self._host = PluginHost(self.spec.plugin_cmd, timeout=self._timeout)
        return self._host.restore(img)

    def close(self):
        if self._host is not None:
            self._host.close()
            self._host = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
