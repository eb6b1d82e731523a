"""Module entry point: `python -m minidrive {sim|map} ...`."""

import sys

from .cli import map_main, sim_main


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in ("sim", "map"):
        print("usage: python -m minidrive {sim,map} ...", file=sys.stderr)
        return 2
    tool, rest = argv[0], argv[1:]
    return sim_main(rest) if tool == "sim" else map_main(rest)


if __name__ == "__main__":
    raise SystemExit(main())
