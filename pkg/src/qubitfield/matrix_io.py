"""Plain-text matrix dumps and lattice field snapshots.

A matrix dump is a header line ``dims R C`` followed by R lines of C
whitespace-separated tokens ``re+imi`` (row-major).  A field snapshot is a
sequence of records, each a line ``t x j`` followed by one matrix dump.
"""
from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

_FLOAT = r"[+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|inf|nan)"
_TOKEN = re.compile(rf"^({_FLOAT})([+-](?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|inf|nan))i$")


class DumpFormatError(ValueError):
    pass


def format_entry(z: complex) -> str:
    re_, im = float(np.real(z)), float(np.imag(z))
    im_txt = repr(im)
    if not im_txt.startswith("-"):
        im_txt = "+" + im_txt
    return f"{re_!r}{im_txt}i"


def parse_entry(token: str) -> complex:
    m = _TOKEN.match(token)
    if m is None:
        raise DumpFormatError(f"bad matrix entry {token!r}")
    return complex(float(m.group(1)), float(m.group(2)))


def dump_matrix(a) -> str:
    a = np.atleast_2d(np.asarray(a))
    rows, cols = a.shape
    lines = [f"dims {rows} {cols}"]
    lines += [" ".join(format_entry(z) for z in row) for row in a]
    return "\n".join(lines) + "\n"


def _iter_dumps(lines: Iterator[str]) -> Iterator[np.ndarray]:
    for line in lines:
        parts = line.split()
        if not parts:
            continue
        if parts[0] != "dims" or len(parts) != 3:
            raise DumpFormatError(f"expected 'dims R C', got {line!r}")
        try:
            rows, cols = int(parts[1]), int(parts[2])
        except ValueError:
            raise DumpFormatError(f"bad dimensions in {line!r}") from None
        out = np.empty((rows, cols), dtype=complex)
        for r in range(rows):
            tokens = next(lines, None)
            if tokens is None:
                raise DumpFormatError(f"dump ends after {r} of {rows} rows")
            tokens = tokens.split()
            if len(tokens) != cols:
                raise DumpFormatError(f"row {r} has {len(tokens)} entries, expected {cols}")
            out[r] = [parse_entry(tok) for tok in tokens]
        yield out


def load_matrices(text: str) -> list[np.ndarray]:
    """Parse one or more concatenated matrix dumps."""
    return list(_iter_dumps(iter(text.splitlines())))


def load_matrix(text: str) -> np.ndarray:
    mats = load_matrices(text)
    if len(mats) != 1:
        raise DumpFormatError(f"expected exactly one matrix, found {len(mats)}")
    return mats[0]


def write_snapshot(path, q, sites: Iterable[tuple[int, int]] | None = None) -> None:
    """Write a lattice triple field ``q[t, x, j]`` as a text snapshot."""
    q = np.asarray(q)
    nt, nx = q.shape[:2]
    if sites is None:
        sites = ((t, x) for t in range(nt) for x in range(nx))
    with open(path, "w") as fh:
        for t, x in sites:
            for j in range(3):
                fh.write(f"{t} {x} {j + 1}\n")
                fh.write(dump_matrix(q[t, x, j]))


def read_snapshot(path) -> dict[tuple[int, int], np.ndarray]:
    """Read a snapshot into ``{(t, x): triple array (3, N, N)}``."""
    lines = iter(Path(path).read_text().splitlines())
    parts: dict[tuple[int, int], dict[int, np.ndarray]] = {}
    for line in lines:
        head = line.split()
        if not head:
            continue
        if len(head) != 3:
            raise DumpFormatError(f"expected 't x j', got {line!r}")
        t, x, j = map(int, head)
        if j not in (1, 2, 3):
            raise DumpFormatError(f"component index must be 1..3, got {j}")
        mat = next(_iter_dumps(lines))
        parts.setdefault((t, x), {})[j] = mat
    out = {}
    for site, comps in parts.items():
        if set(comps) != {1, 2, 3}:
            raise DumpFormatError(f"site {site} is missing components")
        out[site] = np.stack([comps[1], comps[2], comps[3]])
    return out


def snapshot_to_array(snap: dict[tuple[int, int], np.ndarray]) -> np.ndarray:
    """Pack a full-lattice snapshot into an ``(nt, nx, 3, N, N)`` array."""
    nt = 1 + max(t for t, _ in snap)
    nx = 1 + max(x for _, x in snap)
    if len(snap) != nt * nx:
        raise DumpFormatError("snapshot does not cover a full lattice")
    first = next(iter(snap.values()))
    out = np.empty((nt, nx) + first.shape, dtype=complex)
    for (t, x), trip in snap.items():
        out[t, x] = trip
    return out
