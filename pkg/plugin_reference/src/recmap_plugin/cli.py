"""Long-running plugin entry point: handshake, then frame loop on stdio."""

import argparse
import sys

from .filters import FILTERS
from .protocol import ProtocolError, read_frame, write_frame, write_handshake


def serve(mode: str, stdin=None, stdout=None) -> int:
    inp = stdin if stdin is not None else sys.stdin.buffer
    out = stdout if stdout is not None else sys.stdout.buffer
    apply_filter = FILTERS[mode]
    write_handshake(out)
    while True:
        try:
            frame = read_frame(inp)
        except ProtocolError as exc:
            print(f"recmap-reference-plugin: {exc}", file=sys.stderr)
            return 1
        if frame is None:
            return 0
        write_frame(out, apply_filter(frame))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="recmap-reference-plugin",
        description="Reference restorer plugin (stdio frame protocol)",
    )
    parser.add_argument("--mode", choices=sorted(FILTERS), default="echo")
    args = parser.parse_args(argv)
    return serve(args.mode)


if __name__ == "__main__":
    sys.exit(main())
