"""Balanced incomplete block design verification.

A design is a point set ``{1..n}`` plus a multiset of nonempty blocks. It is
an ``(n, k, lambda)``-BIBD when ``n > k >= 2``, every block has ``k`` points
and every pair of distinct points lies in exactly ``lambda`` blocks. Any such
design also has a constant replication ``r`` with ``r(k-1) = lambda(n-1)``
and ``bk = nr``.

Everything here is exact: counts are Python ints and derived parameters are
:class:`fractions.Fraction`. No floating point is involved.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any

from .errors import BadParameters, MalformedDesign, NotApplicable
from .occurrence import count_bruteforce, occurrence_matrix
from .splitter import SplitConfig, hv_splits, validate_config

Rational = Fraction


@dataclass(frozen=True)
class Design:
    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise MalformedDesign(f"design needs at least one point, got n = {self.n}")
        blocks = []
        for pos, block in enumerate(self.blocks, start=1):
            labels = tuple(sorted(block))
            if not labels:
                raise MalformedDesign(f"block {pos} is empty")
            if len(set(labels)) != len(labels):
                raise MalformedDesign(f"block {pos} repeats a point: {labels}")
            if labels[0] < 1 or labels[-1] > self.n:
                raise MalformedDesign(f"block {pos} = {labels} is not a subset of 1..{self.n}")
            blocks.append(labels)
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def points(self) -> range:
        return range(1, self.n + 1)

    def to_text(self) -> str:
        lines = [f"n {self.n}"]
        lines.extend(" ".join(map(str, b)) for b in self.blocks)
        return "\n".join(lines) + "\n"


def parse_design(text: str) -> Design:
    """Parse the text design format.

    The first meaningful line is ``n <count>``; each later line lists one
    block as space-separated 1-based labels. ``#`` starts a comment.
    """
    n = None
    blocks: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if fields[0] != "n" or len(fields) != 2:
                raise MalformedDesign(f"line {lineno}: expected 'n <count>', got {raw!r}")
            try:
                n = int(fields[1])
            except ValueError:
                raise MalformedDesign(f"line {lineno}: bad point count {fields[1]!r}") from None
            continue
        try:
            blocks.append(tuple(int(f) for f in fields))
        except ValueError:
            raise MalformedDesign(f"line {lineno}: non-integer label in {raw!r}") from None
    if n is None:
        raise MalformedDesign("missing 'n <count>' header")
    return Design(n=n, blocks=tuple(blocks))


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.detail}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Violation:
        d = dict(d)
        kind = d.pop("kind")
        return cls(kind=kind, detail=_untuple(d))


def _untuple(d: dict[str, Any]) -> dict[str, Any]:
    # JSON turns tuples into lists; normalize back so round-trips compare equal
    out = {}
    for key, value in d.items():
        if isinstance(value, list):
            value = tuple(tuple(x) if isinstance(x, list) else x for x in value)
        out[key] = value
    return out


@dataclass(frozen=True)
class BibdReport:
    n: int
    k: int | None
    b: int
    r: int | None
    lam: int | None
    is_bibd: bool
    violations: tuple[Violation, ...] = ()
    identities: dict[str, bool] = field(default_factory=dict)

    @property
    def params(self) -> tuple[int, int | None, int, int | None, int | None]:
        return (self.n, self.k, self.b, self.r, self.lam)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "b": self.b,
            "r": self.r,
            "lambda": self.lam,
            "is_bibd": self.is_bibd,
            "identities": dict(self.identities),
            "violations": [v.to_dict() for v in self.violations],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> BibdReport:
        return cls(
            n=d["n"],
            k=d["k"],
            b=d["b"],
            r=d["r"],
            lam=d["lambda"],
            is_bibd=d["is_bibd"],
            violations=tuple(Violation.from_dict(v) for v in d["violations"]),
            identities=dict(d["identities"]),
        )


def _first_mismatch(counts: list[int]) -> tuple[int, int] | None:
    """0-based positions of the first element and the first one differing from it."""
    for pos, c in enumerate(counts):
        if c != counts[0]:
            return 0, pos
    return None


def verify_bibd(design: Design) -> BibdReport:
    """Check Definition-style BIBD conditions and collect witnesses.

    All conditions are checked (block size, incompleteness, replication,
    pair balance) so a failing report lists every kind of violation found,
    each with concrete offending blocks, points or pairs.
    """
    n, blocks = design.n, design.blocks
    b = len(blocks)
    violations: list[Violation] = []

    if b == 0:
        violations.append(Violation("no_blocks", {}))

    sizes = [len(blk) for blk in blocks]
    k: int | None = None
    mismatch = _first_mismatch(sizes) if sizes else None
    if mismatch is not None:
        p, q = mismatch
        violations.append(
            Violation(
                "block_size_mismatch",
                {"blocks": (blocks[p], blocks[q]), "positions": (p + 1, q + 1), "sizes": (sizes[p], sizes[q])},
            )
        )
    elif sizes:
        k = sizes[0]
        if k < 2:
            violations.append(Violation("block_size_too_small", {"k": k}))
        if n <= k:
            violations.append(Violation("not_incomplete", {"n": n, "k": k}))

    replication = [0] * n
    pairs: Counter[tuple[int, int]] = Counter()
    for blk in blocks:
        for p in blk:
            replication[p - 1] += 1
        pairs.update(combinations(blk, 2))

    r: int | None = None
    mismatch = _first_mismatch(replication)
    if mismatch is not None:
        p, q = mismatch
        violations.append(
            Violation(
                "replication_mismatch",
                {"points": (p + 1, q + 1), "counts": (replication[p], replication[q])},
            )
        )
    else:
        r = replication[0]

    lam: int | None = None
    if n >= 2:
        all_pairs = list(combinations(range(1, n + 1), 2))
        pair_counts = [pairs[pq] for pq in all_pairs]
        mismatch = _first_mismatch(pair_counts)
        if mismatch is not None:
            p, q = mismatch
            violations.append(
                Violation(
                    "pair_count_mismatch",
                    {"pairs": (all_pairs[p], all_pairs[q]), "counts": (pair_counts[p], pair_counts[q])},
                )
            )
        else:
            lam = pair_counts[0]
            if lam == 0:
                violations.append(Violation("pairs_never_covered", {"lambda": 0}))
    else:
        violations.append(Violation("too_few_points", {"n": n}))

    identities: dict[str, bool] = {}
    if k is not None and r is not None:
        identities["bk=nr"] = b * k == n * r
    if k is not None and r is not None and lam is not None:
        identities["r(k-1)=lambda(n-1)"] = r * (k - 1) == lam * (n - 1)

    is_bibd = not violations
    if is_bibd and not all(identities.values()):
        # unreachable for a genuine BIBD; kept as a hard guard on the counting above
        raise AssertionError(f"BIBD identities failed: {identities}")
    return BibdReport(
        n=n, k=k, b=b, r=r, lam=lam, is_bibd=is_bibd,
        violations=tuple(violations), identities=identities,
    )


def forced_params(n: int, k: int, b: int) -> tuple[Fraction, Fraction]:
    """Replication and pair count a BIBD with ``(n, k, b)`` would have to have."""
    if not (n > k >= 2 and b >= 1):
        raise BadParameters(f"need n > k >= 2 and b >= 1, got (n, k, b) = ({n}, {k}, {b})")
    r = Fraction(b * k, n)
    return r, r * (k - 1) / (n - 1)


def hv_bibd_candidate(n: int, v: int) -> tuple[Fraction, Fraction, bool]:
    """The ``(x, y)`` an hv-block design would need as ``(r, lambda)``.

    The design has ``k = 2v+1`` and ``b = n-2v``; when either value is not an
    integer no BIBD with those dimensions exists.
    """
    if v < 1 or n < 2 * v + 2:
        raise BadParameters(f"need v >= 1 and n >= 2v+2, got (n, v) = ({n}, {v})")
    x = Fraction((n - 2 * v) * (2 * v + 1), n)
    y = Fraction(2 * v * (n - 2 * v) * (2 * v + 1), n * (n - 1))
    return x, y, x.denominator == 1 and y.denominator == 1


def hv_design(n: int, v: int) -> Design:
    """Design whose blocks are the hv-block test sets."""
    cfg = validate_config(SplitConfig(n=n, v=v), "counting")
    return Design(n=n, blocks=tuple(s.test for s in hv_splits(cfg)))


def _spread_witness(values: list[int], labels: list[Any]) -> dict[str, Any] | None:
    lo = min(range(len(values)), key=values.__getitem__)
    hi = max(range(len(values)), key=values.__getitem__)
    if values[lo] == values[hi]:
        return None
    return {"at": (labels[lo], labels[hi]), "values": (values[lo], values[hi])}


@dataclass(frozen=True)
class NotBibdCertificate:
    """Three independent reasons an hv-block design is not a BIBD.

    ``e1`` is the integrality test on the forced parameters, ``e2`` the
    closed-form occurrence counts, ``e3`` the brute-force counts. Each entry
    carries a ``conclusive`` flag.
    """

    n: int
    v: int
    e1: dict[str, Any]
    e2: dict[str, Any]
    e3: dict[str, Any]

    @property
    def conclusive(self) -> bool:
        return self.e1["conclusive"] or self.e2["conclusive"] or self.e3["conclusive"]

    def to_dict(self) -> dict[str, Any]:
        e1 = dict(self.e1)
        e1["x"], e1["y"] = str(e1["x"]), str(e1["y"])
        return {"n": self.n, "v": self.v, "conclusive": self.conclusive, "e1": e1, "e2": self.e2, "e3": self.e3}


def not_bibd_certificate(n: int, v: int) -> NotBibdCertificate:
    if v == 0:
        raise NotApplicable(
            "degenerate design (h-block): singleton blocks, k=1 < 2, not a BIBD by k >= 2"
        )
    if v < 0 or n < 2 * v + 2:
        raise BadParameters(f"need v >= 1 and n >= 2v+2, got (n, v) = ({n}, {v})")

    x, y, integral = hv_bibd_candidate(n, v)
    e1 = {"x": x, "y": y, "integral": integral, "conclusive": not integral}

    analytic = occurrence_matrix(n, v)
    points = list(range(1, n + 1))
    pair_labels = list(combinations(points, 2))
    r_wit = _spread_witness([int(c) for c in analytic.r], points)
    lam_wit = _spread_witness([int(analytic.lam[i - 1, j - 1]) for i, j in pair_labels], pair_labels)
    e2 = {"r": r_wit, "lambda": lam_wit, "conclusive": r_wit is not None or lam_wit is not None}

    brute = count_bruteforce(SplitConfig(n=n, v=v))
    b_wit = _spread_witness([int(c) for c in brute.r], points)
    agrees = brute == analytic
    e3 = {"r": b_wit, "agrees_with_analytic": agrees, "conclusive": b_wit is not None}

    return NotBibdCertificate(n=n, v=v, e1=e1, e2=e2, e3=e3)
