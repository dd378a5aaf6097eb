"""Local valuations on contexts and the search for global {0,1} valuations.

Two semantics are supported for a valuation on a context with projectors
P_1..P_n:

* ``VR_ONLY``: each projector independently gets a value in its spectrum
  {0, 1}, giving 2**n assignments.
* ``FUNC``: additionally v(f(A)) == f(v(A)).  Applied to the generator
  C = sum_i i*P_i this forces exactly one projector to 1 (one-hot), giving
  n assignments on a maximal context.

The global search uses the FUNC semantics, which is where non-colorability
lives: every complete orthogonal basis must contain exactly one ray valued 1.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .contexts import Context, expand_in_context, projectors_equal
from .errors import (
    DimensionMismatchError,
    IncompleteAssignmentError,
    MalformedProblemError,
    NotMaximalError,
)
from .hilbert import Tolerance, as_tolerance, inner_product
from .operators import HermitianOperator, apply_function, spectral_decompose

__all__ = [
    "ValuationMode",
    "ConstraintStyle",
    "Status",
    "LocalValuation",
    "GlobalValuationProblem",
    "SearchResult",
    "enumerate_local_valuations",
    "valuation_value",
    "check_value_rule",
    "check_func",
    "check_compatibility",
    "search_global_valuation",
    "verify_witness",
    "parity_certificate",
    "to_dimacs",
]


class ValuationMode(enum.Enum):
    VR_ONLY = "vr"
    FUNC = "func"


class ConstraintStyle(enum.Enum):
    BASES_ONLY = "bases-only"
    BASES_PLUS_PAIRS = "bases-plus-pairs"


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"


@dataclass(frozen=True, eq=False)
class LocalValuation:
    """Values assigned to the projectors of one context, in context order.

    VR_ONLY values are not restricted at construction so that
    :func:`check_value_rule` can reject out-of-spectrum values.
    """

    context: Context
    values: tuple
    mode: ValuationMode = ValuationMode.FUNC

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != len(self.context.projectors):
            raise ValueError(
                f"{len(self.values)} values for {len(self.context.projectors)} projectors"
            )
        if self.mode is ValuationMode.FUNC and self.context.maximal:
            if sorted(self.values) != [0] * (len(self.values) - 1) + [1]:
                raise ValueError("a FUNC valuation on a maximal context is one-hot")


def enumerate_local_valuations(ctx: Context, mode: ValuationMode = ValuationMode.FUNC) -> list[LocalValuation]:
    """All local valuations of ``ctx``: 2**n in VR_ONLY mode, n one-hot ones in FUNC mode."""
    n = len(ctx.projectors)
    if mode is ValuationMode.VR_ONLY:
        return [LocalValuation(ctx, bits, mode) for bits in itertools.product((0, 1), repeat=n)]
    if not ctx.maximal:
        raise NotMaximalError("FUNC enumeration is defined on maximal contexts")
    return [
        LocalValuation(ctx, tuple(1 if k == i else 0 for k in range(n)), mode) for i in range(n)
    ]


def valuation_value(v: LocalValuation, A: HermitianOperator, tol: Tolerance | float | None = None) -> float:
    """Linear extension ``v(A) = sum_i c_i v(P_i)`` for ``A = sum_i c_i P_i``."""
    coeffs = expand_in_context(v.context, A, tol)
    return float(sum(c * x for c, x in zip(coeffs, v.values)))


def check_value_rule(v: LocalValuation, A: HermitianOperator, tol: Tolerance | float | None = None) -> bool:
    """Value rule: v(A) lies in the spectrum of A.

    In VR_ONLY mode only the projector values are checked against {0, 1}.
    """
    coeffs = expand_in_context(v.context, A, tol)
    if v.mode is ValuationMode.VR_ONLY:
        return all(x in (0, 1) for x in v.values)
    value = float(sum(c * x for c, x in zip(coeffs, v.values)))
    eps = max(as_tolerance(tol).eps, 1e-10)
    spectrum = spectral_decompose(A, tol).eigenvalues
    return any(abs(value - a) <= eps * (1.0 + abs(a)) for a in spectrum)


def check_func(
    v: LocalValuation,
    A: HermitianOperator,
    f: Callable[[float], float],
    tol: Tolerance | float | None = None,
) -> bool:
    """FUNC: the value of f(A) equals f applied to the value of A.

    Evaluated through the linear extension of ``v`` whatever its mode, so a
    VR_ONLY assignment can be tested for FUNC consistency.
    """
    lhs = valuation_value(v, apply_function(A, f, tol), tol)
    rhs = float(f(valuation_value(v, A, tol)))
    eps = max(as_tolerance(tol).eps, 1e-10)
    return abs(lhs - rhs) <= eps * (1.0 + abs(rhs))


def check_compatibility(vi: LocalValuation, vj: LocalValuation, tol: Tolerance | float | None = None) -> bool:
    """Agreement on every projector the two contexts share (vacuous if none)."""
    if vi.context.dim != vj.context.dim:
        raise DimensionMismatchError("valuations live on different dimensions")
    for p, a in zip(vi.context.projectors, vi.values):
        for q, b in zip(vj.context.projectors, vj.values):
            if projectors_equal(p, q, tol) and a != b:
                return False
    return True


@dataclass(frozen=True, eq=False)
class GlobalValuationProblem:
    """One-hot constraints over rays, one per complete orthogonal basis.

    ``bases`` are index tuples of length ``dimension``; ``pairs`` are
    orthogonal index pairs, enforced as at-most-one constraints in
    BASES_PLUS_PAIRS style.  ``rayset`` is optional and, when present, is
    used to check that the listed constraints really are orthogonal.
    """

    num_rays: int
    dimension: int
    bases: tuple[tuple[int, ...], ...]
    pairs: tuple[tuple[int, int], ...] = ()
    style: ConstraintStyle = ConstraintStyle.BASES_PLUS_PAIRS
    rayset: Any = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bases", tuple(tuple(int(i) for i in b) for b in self.bases))
        object.__setattr__(self, "pairs", tuple(tuple(int(i) for i in p) for p in self.pairs))
        if self.num_rays < 0 or self.dimension < 1:
            raise MalformedProblemError("need num_rays >= 0 and dimension >= 1")
        for b in self.bases:
            if len(b) != self.dimension:
                raise MalformedProblemError(f"basis {b} does not have {self.dimension} rays")
            if len(set(b)) != len(b):
                raise MalformedProblemError(f"basis {b} repeats a ray")
            if any(not 0 <= i < self.num_rays for i in b):
                raise MalformedProblemError(f"basis {b} references an unknown ray")
        for p in self.pairs:
            if len(p) != 2 or p[0] == p[1]:
                raise MalformedProblemError(f"pair {p} is not two distinct rays")
            if any(not 0 <= i < self.num_rays for i in p):
                raise MalformedProblemError(f"pair {p} references an unknown ray")
        if self.rayset is not None:
            self._check_orthogonality()

    def _check_orthogonality(self) -> None:
        rays = self.rayset.rays
        if len(rays) != self.num_rays:
            raise MalformedProblemError("ray set size does not match num_rays")
        checked = set()
        for b in self.bases:
            checked.update(itertools.combinations(sorted(b), 2))
        checked.update(tuple(sorted(p)) for p in self.pairs)
        for i, j in checked:
            ov = inner_product(rays[i], rays[j])
            if not (ov.is_zero() if hasattr(ov, "is_zero") else abs(ov) <= 1e-9):
                raise MalformedProblemError(f"rays {i} and {j} are not orthogonal")

    def active_pairs(self) -> tuple[tuple[int, int], ...]:
        return self.pairs if self.style is ConstraintStyle.BASES_PLUS_PAIRS else ()


@dataclass(frozen=True)
class SearchResult:
    status: Status
    witness: tuple[int, ...] | None
    nodes_explored: int
    proof_note: str | None = None


def parity_certificate(problem: GlobalValuationProblem) -> str | None:
    """Counting obstruction to a one-hot assignment, if there is one.

    If every ray lies in an even number of bases, summing the one-hot
    constraints counts each ray's value an even number of times, so the
    number of bases must be even.  An odd basis count is then impossible.
    """
    counts = [0] * problem.num_rays
    for b in problem.bases:
        for i in b:
            counts[i] += 1
    if problem.bases and len(problem.bases) % 2 == 1 and all(c % 2 == 0 for c in counts):
        return (
            f"parity: {len(problem.bases)} bases (odd) but every ray occurs in an even "
            f"number of bases"
        )
    return None


class _Search:
    """Backtracking over ray values with unit propagation.

    Constraints are "exactly one" (bases) and "at most one" (orthogonal
    pairs).  Branching takes the unassigned ray of highest constraint degree,
    lowest index first, trying 1 before 0.
    """

    def __init__(self, problem: GlobalValuationProblem):
        self.n = problem.num_rays
        self.constraints: list[tuple[bool, tuple[int, ...]]] = [(True, b) for b in problem.bases]
        self.constraints += [(False, p) for p in problem.active_pairs()]
        self.occurs: list[list[int]] = [[] for _ in range(self.n)]
        for c, (_, members) in enumerate(self.constraints):
            for i in members:
                self.occurs[i].append(c)
        self.order = sorted(range(self.n), key=lambda i: (-len(self.occurs[i]), i))
        self.value = [-1] * self.n
        self.trail: list[int] = []
        self.nodes = 0

    def _set(self, i: int, val: int, queue: list[int]) -> bool:
        if self.value[i] == -1:
            self.value[i] = val
            self.trail.append(i)
            queue.append(i)
            return True
        return self.value[i] == val

    def _check(self, c: int, queue: list[int]) -> bool:
        exactly_one, members = self.constraints[c]
        ones = 0
        free = []
        for i in members:
            v = self.value[i]
            if v == 1:
                ones += 1
            elif v == -1:
                free.append(i)
        if ones > 1:
            return False
        if ones == 1:
            return all(self._set(i, 0, queue) for i in free)
        if exactly_one:
            if not free:
                return False
            if len(free) == 1:
                return self._set(free[0], 1, queue)
        return True

    def _propagate(self, queue: list[int]) -> bool:
        while queue:
            i = queue.pop()
            for c in self.occurs[i]:
                if not self._check(c, queue):
                    return False
        return True

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.value[self.trail.pop()] = -1

    def _pick(self) -> int | None:
        for i in self.order:
            if self.value[i] == -1:
                return i
        return None

    def run(self) -> bool:
        queue: list[int] = []
        if not all(self._check(c, queue) for c in range(len(self.constraints))):
            return False
        if not self._propagate(queue):
            return False
        frames: list[list[int]] = []  # [ray, values tried, trail mark]
        while True:
            var = self._pick()
            if var is None:
                return True
            frames.append([var, 0, len(self.trail)])
            while frames:
                frame = frames[-1]
                self._undo(frame[2])
                if frame[1] == 2:
                    frames.pop()
                    continue
                val = 1 - frame[1]
                frame[1] += 1
                self.nodes += 1
                queue = []
                if self._set(frame[0], val, queue) and self._propagate(queue):
                    break
            else:
                return False


def search_global_valuation(problem: GlobalValuationProblem) -> SearchResult:
    """Decide whether the one-hot constraints of ``problem`` admit a {0,1} assignment.

    Deterministic: the SAT witness is the first one reached by the branching
    order, and ``nodes_explored`` counts branching decisions.
    """
    search = _Search(problem)
    if search.run():
        return SearchResult(Status.SAT, tuple(search.value), search.nodes)
    note = parity_certificate(problem)
    tail = f"search tree exhausted after {search.nodes} nodes"
    return SearchResult(Status.UNSAT, None, search.nodes, f"{note}; {tail}" if note else tail)


def verify_witness(problem: GlobalValuationProblem, assignment: Sequence[int] | Mapping[int, int]) -> bool:
    """Check an assignment against every constraint directly."""
    if isinstance(assignment, Mapping):
        missing = [i for i in range(problem.num_rays) if i not in assignment]
        if missing:
            raise IncompleteAssignmentError(f"no value for rays {missing}")
        values = [assignment[i] for i in range(problem.num_rays)]
    else:
        values = list(assignment)
        if len(values) != problem.num_rays or any(v is None for v in values):
            raise IncompleteAssignmentError(
                f"assignment covers {len(values)} of {problem.num_rays} rays"
            )
    if any(v not in (0, 1) for v in values):
        return False
    for b in problem.bases:
        if sum(values[i] for i in b) != 1:
            return False
    for i, j in problem.active_pairs():
        if values[i] + values[j] > 1:
            return False
    return True


def to_dimacs(problem: GlobalValuationProblem) -> str:
    """DIMACS CNF: per basis one at-least-one clause plus pairwise at-most-one
    clauses; per active orthogonal pair one binary negative clause.  Variable
    k+1 is ray k.  Duplicate clauses are emitted once."""
    clauses: dict[tuple[int, ...], None] = {}
    for b in problem.bases:
        clauses[tuple(i + 1 for i in b)] = None
        for i, j in itertools.combinations(b, 2):
            clauses[(-(min(i, j) + 1), -(max(i, j) + 1))] = None
    for i, j in problem.active_pairs():
        clauses[(-(min(i, j) + 1), -(max(i, j) + 1))] = None
    lines = [
        f"c one-hot valuation problem: {problem.num_rays} rays, {len(problem.bases)} bases, "
        f"style {problem.style.value}",
        f"p cnf {problem.num_rays} {len(clauses)}",
    ]
    lines += [" ".join(map(str, c)) + " 0" for c in clauses]
    return "\n".join(lines) + "\n"
