"""Text formats for point sets, metadata sidecars and scorecards.

All files use decimal integers and a fixed ordering, so writing the same
mathematical object twice produces byte-identical output.  A point set
file starts with a header line

    pointset 1 <p> <t> <n>

followed by one point per line as n+1 space-separated element codes.
Blank lines and lines starting with '#' are ignored.  Points may be given
by any projective representative; they are normalized and sorted on load.

A sidecar ``<stem>.meta.json`` next to ``<stem>.pts`` carries claims and
hypothesis flags as canonical JSON (sorted keys, trailing newline).
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import EmptyInputError, IoError, ParseError, RangeError
from .fields import make_field
from .projspace import PointSet, ProjectiveSpace, Subspace
from .spreads import spread_context

POINTSET_MAGIC = "pointset"
POINTSET_VERSION = 1


def meta_path(path: str) -> str:
    """Sidecar path: the .pts suffix (or any suffix) becomes .meta.json."""
    stem, _ = os.path.splitext(path)
    return stem + ".meta.json"


def space_for(p: int, t: int, n: int) -> ProjectiveSpace:
    return ProjectiveSpace(n, make_field(p, t))


def write_pointset(path: str, pts: PointSet, meta: dict | None = None):
    space = pts.space
    out = ["%s %d %d %d %d" % (POINTSET_MAGIC, POINTSET_VERSION,
                               space.field.p, space.field.t, space.n)]
    for row in pts.coords():
        out.append(" ".join(str(int(c)) for c in row))
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(out) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    if meta is not None:
        write_json(meta_path(path), meta)


def read_pointset(path: str, with_meta: bool = False):
    try:
        with open(path, "r", encoding="ascii") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    header = None
    rows = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if header is None:
            if parts[0] != POINTSET_MAGIC:
                raise ParseError(f"{path}:{lineno}: not a point set file")
            if len(parts) != 5:
                raise ParseError(f"{path}:{lineno}: header needs "
                                 "'pointset <version> <p> <t> <n>'")
            try:
                version, p, t, n = (int(x) for x in parts[1:])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-integer header "
                                 "field") from exc
            if version != POINTSET_VERSION:
                raise ParseError(f"{path}:{lineno}: unsupported version "
                                 f"{version}")
            header = (p, t, n)
            continue
        try:
            row = [int(x) for x in parts]
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: non-integer "
                             "coordinate") from exc
        if len(row) != header[2] + 1:
            raise ParseError(f"{path}:{lineno}: expected {header[2] + 1} "
                             f"coordinates, got {len(row)}")
        rows.append((lineno, row))
    if header is None:
        raise ParseError(f"{path}: empty file")
    p, t, n = header
    try:
        space = space_for(p, t, n)
    except Exception as exc:
        raise ParseError(f"{path}: bad space parameters "
                         f"p={p} t={t} n={n}: {exc}") from exc
    q = space.q
    ranks = []
    for lineno, row in rows:
        if any(c < 0 or c >= q for c in row):
            raise ParseError(f"{path}:{lineno}: element code outside "
                             f"0..{q - 1}")
        try:
            ranks.append(int(space.ranks_from_rows(
                np.asarray([row], dtype=np.int64))[0]))
        except EmptyInputError as exc:
            raise ParseError(f"{path}:{lineno}: zero vector") from exc
    pts = PointSet(space, ranks)
    if not with_meta:
        return pts
    side = meta_path(path)
    meta = read_json(side) if os.path.exists(side) else None
    return pts, meta


def write_json(path: str, obj):
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(json.dumps(obj, sort_keys=True, indent=2))
            fh.write("\n")
    except (OSError, TypeError, ValueError) as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_json(path: str):
    try:
        with open(path, "r", encoding="ascii") as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc


def witness_to_dict(witness) -> dict:
    """Serializable form of a linear-set witness: the defining subspace is
    stored by its basis rows on the small side of the field reduction."""
    big = witness.ctx.big
    return {
        "space": {"p": big.field.p, "t": big.field.t, "n": big.n},
        "rank": witness.rank,
        "rows": [[int(c) for c in row] for row in witness.pi.rows],
    }


def witness_from_dict(data: dict):
    from .linearsets import build_linear_set
    sp = data["space"]
    big = space_for(sp["p"], sp["t"], sp["n"])
    ctx = spread_context(big)
    rows = tuple(tuple(int(c) for c in row) for row in data["rows"])
    if len(rows) != data.get("rank", len(rows)):
        raise ParseError("witness rank disagrees with its basis rows")
    try:
        pi = Subspace(ctx.small, rows)
    except (RangeError, EmptyInputError) as exc:
        raise ParseError(f"bad witness basis: {exc}") from exc
    if pi.dim != len(rows) - 1:
        raise ParseError("witness basis rows are linearly dependent")
    return build_linear_set(ctx, pi)
