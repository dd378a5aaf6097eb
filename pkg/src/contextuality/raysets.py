"""Ray sets, their orthogonality graphs, and complete orthogonal bases.

Rays are stored unnormalized so that integer and Q(sqrt2) coordinates keep
exact inner products; projectors normalize on demand.

Text formats
------------
structured
    JSON object ``{"dimension": d, "labels": [...], "rays": [...]}``.  Each ray
    is a list of coordinates; a coordinate is a number, a string token
    (``"1/2"``, ``"sqrt2"``, ``"-1/2*sqrt2"``) or an ``[re, im]`` pair of
    those.  ``labels`` is optional.
plain
    One ray per line, whitespace-separated real coordinate tokens.  Blank
    lines and lines starting with ``#`` are skipped.
"""

from __future__ import annotations

import io
import itertools
import json
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from ._exact import ExactComplex, QSqrt2, format_real, parse_token
from .contexts import context_from_basis
from .errors import ParallelRayWarning, RaySetFormatError
from .hilbert import Ket, Tolerance, as_tolerance, inner_product, norm, norm_squared
from .valuations import (
    ConstraintStyle,
    GlobalValuationProblem,
    LocalValuation,
    ValuationMode,
)

__all__ = [
    "RaySet",
    "OrthogonalityGraph",
    "load_rayset",
    "save_rayset",
    "builtin_rayset",
    "BUILTIN_NAMES",
    "orthogonality_graph",
    "enumerate_bases",
    "problem_from_rayset",
    "local_valuations_from_witness",
]


@dataclass(frozen=True, eq=False)
class RaySet:
    dimension: int
    rays: tuple[Ket, ...]
    labels: tuple[str, ...] | None = None
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(self.rays))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != len(self.rays):
                raise RaySetFormatError("one label per ray required")
        for k, r in enumerate(self.rays):
            if r.dim != self.dimension:
                raise RaySetFormatError(f"ray {k} has dimension {r.dim}, expected {self.dimension}")
            if norm_squared(r) == 0:
                raise RaySetFormatError(f"ray {k} is the zero vector")

    def __len__(self):
        return len(self.rays)

    @property
    def is_exact(self) -> bool:
        return all(r.is_exact for r in self.rays)


@dataclass(frozen=True)
class OrthogonalityGraph:
    num_vertices: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def neighbors(self) -> list[set[int]]:
        nbrs: list[set[int]] = [set() for _ in range(self.num_vertices)]
        for i, j in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        return nbrs

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges


def _orthogonal(x: Ket, y: Ket, eps: float) -> bool:
    ov = inner_product(x, y)
    if isinstance(ov, ExactComplex):
        return ov.is_zero()
    return abs(ov) <= eps * norm(x) * norm(y)


def _parallel(x: Ket, y: Ket, eps: float) -> bool:
    ov = inner_product(x, y)
    if isinstance(ov, ExactComplex):
        return ov.abs2() == norm_squared(x) * norm_squared(y)
    return abs(ov) ** 2 >= (1.0 - eps) * float(norm_squared(x)) * float(norm_squared(y))


def _merge_parallel(rays: list[Ket], labels: list[str] | None, eps: float, where: str):
    kept: list[Ket] = []
    kept_labels: list[str] = []
    for k, r in enumerate(rays):
        dup = next((m for m, q in enumerate(kept) if _parallel(q, r, eps)), None)
        if dup is not None:
            warnings.warn(
                f"{where}: ray {k} is parallel to an earlier ray and was merged",
                ParallelRayWarning,
                stacklevel=3,
            )
            continue
        kept.append(r)
        if labels is not None:
            kept_labels.append(labels[k])
    return kept, (kept_labels if labels is not None else None)


def _coerce_coord(value, where: str):
    if isinstance(value, bool):
        raise RaySetFormatError(f"{where}: booleans are not coordinates")
    if isinstance(value, (int, float)):
        if isinstance(value, float) and not np.isfinite(value):
            raise RaySetFormatError(f"{where}: non-finite coordinate")
        return int(value) if float(value).is_integer() else value
    if isinstance(value, str):
        try:
            return parse_token(value)
        except ValueError as exc:
            raise RaySetFormatError(f"{where}: {exc}") from None
    if isinstance(value, list) and len(value) == 2:
        re_, im_ = (_coerce_coord(v, where) for v in value)
        if isinstance(re_, float) or isinstance(im_, float):
            return complex(float(re_), float(im_))
        return ExactComplex(re_, im_)
    raise RaySetFormatError(f"{where}: malformed coordinate {value!r}")


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def load_rayset(
    source, format: str = "plain", *, source_name: str = "<input>", tol: Tolerance | float | None = None
) -> RaySet:
    """Parse a ray set from bytes, text or a file object.

    ``format`` is ``"structured"`` (JSON), ``"plain"`` or ``"auto"`` (JSON when
    the text starts with ``{``).  Parallel rays are merged with a
    :class:`ParallelRayWarning`, keeping the first occurrence.
    """
    text = _read_text(source)
    if format == "auto":
        format = "structured" if text.lstrip().startswith("{") else "plain"
    eps = as_tolerance(tol).eps
    labels: list[str] | None = None
    if format == "structured":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RaySetFormatError(f"{source_name}: invalid JSON: {exc}") from None
        if not isinstance(doc, dict) or "dimension" not in doc or "rays" not in doc:
            raise RaySetFormatError(f"{source_name}: expected an object with 'dimension' and 'rays'")
        dim = doc["dimension"]
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise RaySetFormatError(f"{source_name}: dimension must be a positive integer")
        if not isinstance(doc["rays"], list):
            raise RaySetFormatError(f"{source_name}: 'rays' must be a list")
        rays = []
        for k, raw in enumerate(doc["rays"]):
            where = f"{source_name}: ray {k}"
            if not isinstance(raw, list):
                raise RaySetFormatError(f"{where}: expected a list of coordinates")
            if len(raw) != dim:
                raise RaySetFormatError(f"{where}: has {len(raw)} coordinates, expected {dim}")
            rays.append([_coerce_coord(v, where) for v in raw])
        if doc.get("labels") is not None:
            labels = [str(s) for s in doc["labels"]]
            if len(labels) != len(rays):
                raise RaySetFormatError(f"{source_name}: {len(labels)} labels for {len(rays)} rays")
    elif format == "plain":
        rays = []
        dim = None
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            where = f"{source_name}: line {lineno}"
            try:
                coords = [parse_token(t) for t in line.split()]
            except ValueError as exc:
                raise RaySetFormatError(f"{where}: {exc}") from None
            if dim is None:
                dim = len(coords)
            elif len(coords) != dim:
                raise RaySetFormatError(f"{where}: has {len(coords)} coordinates, expected {dim}")
            rays.append(coords)
        if dim is None:
            raise RaySetFormatError(f"{source_name}: no rays found (dimension unknown)")
    else:
        raise ValueError(f"unknown ray-set format {format!r}")

    kets = []
    for k, coords in enumerate(rays):
        r = Ket(coords)
        if norm_squared(r) == 0:
            raise RaySetFormatError(f"{source_name}: ray {k} is the zero vector")
        kets.append(r)
    kets, labels = _merge_parallel(kets, labels, eps, source_name)
    return RaySet(dim, tuple(kets), tuple(labels) if labels is not None else None, source_name)


def _coord_json(c):
    """JSON form of one coordinate: int, string token, float, or [re, im]."""
    if isinstance(c, ExactComplex):
        re_, im_ = _real_json(c.re), _real_json(c.im)
        return re_ if c.im.is_zero() else [re_, im_]
    if c.imag == 0:
        return float(c.real)
    return [float(c.real), float(c.imag)]


def _real_json(q: QSqrt2):
    if q.b == 0 and q.a.denominator == 1:
        return int(q.a)
    return format_real(q)


def _ray_coords(r: Ket) -> list:
    if r.exact is not None:
        return list(r.exact)
    return list(r.components)


def save_rayset(rs: RaySet, format: str = "structured") -> str:
    """Serialize ``rs``; ``load_rayset(save_rayset(rs))`` reproduces it.

    Field order is dimension, labels (when present), rays.  Floats use the
    shortest repr that round-trips.
    """
    if format == "structured":
        doc: dict = {"dimension": rs.dimension}
        if rs.labels is not None:
            doc["labels"] = list(rs.labels)
        doc["rays"] = [[_coord_json(c) for c in _ray_coords(r)] for r in rs.rays]
        rays_txt = ",\n    ".join(json.dumps(r) for r in doc["rays"])
        head = [f'  "dimension": {rs.dimension}']
        if rs.labels is not None:
            head.append(f'  "labels": {json.dumps(doc["labels"])}')
        head.append(f'  "rays": [\n    {rays_txt}\n  ]' if rs.rays else '  "rays": []')
        return "{\n" + ",\n".join(head) + "\n}\n"
    if format == "plain":
        lines = []
        for r in rs.rays:
            toks = []
            for c in _ray_coords(r):
                if isinstance(c, ExactComplex):
                    if not c.im.is_zero():
                        raise RaySetFormatError("plain format cannot hold complex coordinates")
                    toks.append(format_real(c.re))
                else:
                    if c.imag != 0:
                        raise RaySetFormatError("plain format cannot hold complex coordinates")
                    toks.append(repr(float(c.real)))
            lines.append(" ".join(toks))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown ray-set format {format!r}")


_S = QSqrt2(0, 1)

# Cabello-Estebaranz-Garcia-Alcaine set: 9 bases of 4 rays, each ray in 2 bases.
_CABELLO_BASES = [
    [(0, 0, 0, 1), (0, 0, 1, 0), (1, 1, 0, 0), (1, -1, 0, 0)],
    [(0, 0, 0, 1), (0, 1, 0, 0), (1, 0, 1, 0), (1, 0, -1, 0)],
    [(1, -1, 1, -1), (1, -1, -1, 1), (1, 1, 0, 0), (0, 0, 1, 1)],
    [(1, -1, 1, -1), (1, 1, 1, 1), (1, 0, -1, 0), (0, 1, 0, -1)],
    [(0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 0, -1)],
    [(1, -1, -1, 1), (1, 1, 1, 1), (1, 0, 0, -1), (0, 1, -1, 0)],
    [(1, 1, -1, 1), (1, 1, 1, -1), (1, -1, 0, 0), (0, 0, 1, 1)],
    [(1, 1, -1, 1), (-1, 1, 1, 1), (1, 0, 1, 0), (0, 1, 0, -1)],
    [(1, 1, 1, -1), (-1, 1, 1, 1), (1, 0, 0, 1), (0, 1, -1, 0)],
]


def _cabello18() -> RaySet:
    rays: list[tuple[int, ...]] = []
    for basis in _CABELLO_BASES:
        for r in basis:
            if r not in rays:
                rays.append(r)
    return RaySet(4, tuple(Ket(r) for r in rays), None, "builtin:cabello18")


def _canonical_sign(coords: tuple) -> tuple:
    first = next(c for c in coords if c != 0)
    return coords if float(first) > 0 else tuple(-c for c in coords)


def _peres33() -> RaySet:
    """Peres' 33 rays: every sign and coordinate permutation of
    (1,0,0), (1,1,0), (1,sqrt2,0) and (1,1,sqrt2), up to overall sign."""
    seeds = [(1, 0, 0), (1, 1, 0), (1, _S, 0), (1, 1, _S)]
    rays: list[tuple] = []
    for seed in seeds:
        for perm in itertools.permutations(seed):
            for signs in itertools.product((1, -1), repeat=3):
                r = _canonical_sign(tuple(s * c for s, c in zip(signs, perm)))
                if r not in rays:
                    rays.append(r)
    return RaySet(3, tuple(Ket(r) for r in rays), None, "builtin:peres33")


_BUILTINS = {"cabello18": _cabello18, "peres33": _peres33}
BUILTIN_NAMES = tuple(_BUILTINS)


def builtin_rayset(name: str) -> RaySet:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown built-in ray set {name!r}; known: {', '.join(BUILTIN_NAMES)}") from None


def orthogonality_graph(rs: RaySet, tol: Tolerance | float | None = None) -> OrthogonalityGraph:
    """Edge (i, j) iff rays i and j are orthogonal (exactly, for exact rays)."""
    eps = as_tolerance(tol).eps
    edges = {
        (i, j)
        for i, j in itertools.combinations(range(len(rs.rays)), 2)
        if _orthogonal(rs.rays[i], rs.rays[j], eps)
    }
    return OrthogonalityGraph(len(rs.rays), frozenset(edges))


def _maximal_cliques(nbrs: list[set[int]]) -> list[tuple[int, ...]]:
    """Bron-Kerbosch with pivoting; vertices visited in increasing order."""
    out: list[tuple[int, ...]] = []

    def expand(r: list[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(sorted(p | x), key=lambda u: len(nbrs[u] & p))
        for v in sorted(p - nbrs[pivot]):
            expand(r + [v], p & nbrs[v], x & nbrs[v])
            p = p - {v}
            x = x | {v}

    expand([], set(range(len(nbrs))), set())
    return out


def enumerate_bases(g: OrthogonalityGraph, d: int) -> list[tuple[int, ...]]:
    """All cliques of exactly ``d`` vertices, as sorted tuples in lexicographic order.

    In an exact orthogonality graph no clique exceeds ``d``; larger maximal
    cliques (possible only with a loose tolerance) contribute all their
    ``d``-subsets.
    """
    found: set[tuple[int, ...]] = set()
    for clique in _maximal_cliques(g.neighbors()):
        if len(clique) == d:
            found.add(clique)
        elif len(clique) > d:
            found.update(itertools.combinations(clique, d))
    return sorted(found)


def problem_from_rayset(
    rs: RaySet,
    style: ConstraintStyle = ConstraintStyle.BASES_PLUS_PAIRS,
    tol: Tolerance | float | None = None,
) -> GlobalValuationProblem:
    """One-hot valuation problem over the complete bases of ``rs``.

    ``pairs`` always lists every orthogonal pair; only BASES_PLUS_PAIRS
    enforces them.
    """
    g = orthogonality_graph(rs, tol)
    bases = enumerate_bases(g, rs.dimension)
    pairs = sorted(g.edges) if style is ConstraintStyle.BASES_PLUS_PAIRS else []
    return GlobalValuationProblem(len(rs.rays), rs.dimension, tuple(bases), tuple(pairs), style, rs)


def local_valuations_from_witness(
    rs: RaySet, problem: GlobalValuationProblem, witness: Sequence[int]
) -> list[LocalValuation]:
    """Restrict a global assignment to each basis as a FUNC local valuation."""
    out = []
    for b in problem.bases:
        ctx = context_from_basis([rs.rays[i].normalized() for i in b])
        # context order differs from basis order; match projectors back to rays
        values = []
        for p in ctx.projectors:
            u = p.unit_vector()
            k = max(b, key=lambda i: abs(inner_product(u, rs.rays[i].normalized())))
            values.append(witness[k])
        out.append(LocalValuation(ctx, tuple(values), ValuationMode.FUNC))
    return out


def rays_from_kets(kets: Iterable[Ket], source: str = "") -> RaySet:
    kets = tuple(kets)
    if not kets:
        raise RaySetFormatError("empty ray list")
    return RaySet(kets[0].dim, kets, None, source)


def as_stream(text: str) -> io.StringIO:
    return io.StringIO(text)
