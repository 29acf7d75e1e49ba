"""Scaled covers and their validation.

A scaled cover of a space at scale (lam, control) is a list of
families; each family is a set of clusters (point sets).  A cover is
valid when every point lies in some cluster, distinct clusters of the
same family sit at set distance strictly greater than lam, and each
cluster has diameter at most control.  The dimension at a scale is one
less than the fewest families of any valid cover, so the validator here
is the ground truth the search code is checked against: it recomputes
every condition from raw distances and shares no logic with the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .spaces import FiniteMetricSpace, ScalePair

CERTIFICATE_HEADER = "scaled-cover 1"


@dataclass(frozen=True)
class ScaledCover:
    """An immutable cover: families of clusters at a fixed scale."""

    scale: ScalePair
    families: tuple[tuple[frozenset, ...], ...]

    @staticmethod
    def of(lam: int, control: int,
           families: Iterable[Iterable[Iterable[int]]]) -> "ScaledCover":
        norm = []
        for fam in families:
            clusters = []
            for cluster in fam:
                cl = frozenset(int(p) for p in cluster)
                if not cl:
                    raise ValueError("clusters must be nonempty")
                clusters.append(cl)
            clusters.sort(key=min)
            norm.append(tuple(clusters))
        return ScaledCover(ScalePair(lam, control), tuple(norm))

    def point_count(self) -> int:
        return len({p for fam in self.families for cl in fam for p in cl})


@dataclass(frozen=True)
class Violation:
    """One broken cover condition with a concrete witness.

    kind is one of "uncovered-point", "family-separation", or
    "cluster-diameter".  witness identifies the offending points or
    clusters; value is the measured distance or diameter.
    """

    kind: str
    witness: tuple
    value: int

    def describe(self) -> str:
        if self.kind == "uncovered-point":
            return f"point {self.witness[0]} is in no cluster"
        if self.kind == "family-separation":
            f, c1, c2, p, q = self.witness
            return (f"family {f}: clusters {c1} and {c2} are {self.value} "
                    f"apart at points ({p},{q}), need strictly more than lam")
        f, c, p, q = self.witness
        return (f"family {f} cluster {c}: points ({p},{q}) are {self.value} "
                f"apart, over the control")


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.ok:
            return "valid cover"
        return "; ".join(v.describe() for v in self.violations)


def _cluster_arrays(fam: Sequence[frozenset]) -> list[np.ndarray]:
    return [np.fromiter(sorted(cl), dtype=np.intp, count=len(cl)) for cl in fam]


def validate_cover(space: FiniteMetricSpace, cover: ScaledCover,
                   *, max_violations: int = 16) -> ValidationReport:
    """Check a cover against a space point by point.

    Out-of-range point indices are usage errors and raise ValueError;
    everything else is reported as Violation entries (up to
    max_violations of them, coverage first, then separation, then
    diameters).
    """
    lam = cover.scale.lam
    control = cover.scale.control
    violations: list[Violation] = []

    covered = np.zeros(space.size, dtype=bool)
    for fam in cover.families:
        for cl in fam:
            for p in cl:
                if not (0 <= p < space.size):
                    raise ValueError(f"cover point {p} out of range for "
                                     f"size {space.size}")
                covered[p] = True
    for p in np.flatnonzero(~covered):
        violations.append(Violation("uncovered-point", (int(p),), 0))
        if len(violations) >= max_violations:
            return ValidationReport(tuple(violations))

    for f, fam in enumerate(cover.families):
        arrays = _cluster_arrays(fam)
        for c1 in range(len(arrays)):
            for c2 in range(c1 + 1, len(arrays)):
                best = None
                for p in arrays[c1]:
                    row = space.dist_row(int(p), arrays[c2])
                    k = int(row.argmin())
                    if best is None or int(row[k]) < best[0]:
                        best = (int(row[k]), int(p), int(arrays[c2][k]))
                if best is not None and best[0] <= lam:
                    violations.append(Violation(
                        "family-separation", (f, c1, c2, best[1], best[2]),
                        best[0]))
                    if len(violations) >= max_violations:
                        return ValidationReport(tuple(violations))
        for c, pts in enumerate(arrays):
            worst = None
            for p in pts:
                row = space.dist_row(int(p), pts)
                k = int(row.argmax())
                if worst is None or int(row[k]) > worst[0]:
                    worst = (int(row[k]), int(p), int(pts[k]))
            if worst is not None and worst[0] > control:
                violations.append(Violation(
                    "cluster-diameter", (f, c, worst[1], worst[2]), worst[0]))
                if len(violations) >= max_violations:
                    return ValidationReport(tuple(violations))
    return ValidationReport(tuple(violations))


def shrink_to_partition(space: FiniteMetricSpace,
                        cover: ScaledCover) -> ScaledCover:
    """Remove overlaps: each point keeps only its lowest (family, cluster)
    slot.  Validity is preserved (clusters only shrink, so separations
    grow and diameters fall) and the family count is unchanged.  Covers
    that are already partitions come back equal.
    """
    report = validate_cover(space, cover)
    if not report.ok:
        raise ValueError(f"cannot shrink an invalid cover: {report.describe()}")
    seen: set[int] = set()
    fams = []
    for fam in cover.families:
        new_fam = []
        for cl in fam:
            kept = frozenset(p for p in sorted(cl) if p not in seen)
            seen.update(kept)
            if kept:
                new_fam.append(kept)
        fams.append(new_fam)
    return ScaledCover.of(cover.scale.lam, cover.scale.control, fams)


# -- certificate files ------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """A cover plus the identity of the space it certifies."""

    label: str
    size: int
    cover: ScaledCover


def format_certificate(cert: Certificate) -> str:
    lines = [CERTIFICATE_HEADER,
             f"label: {cert.label}",
             f"size: {cert.size}",
             f"lambda: {cert.cover.scale.lam}",
             f"control: {cert.cover.scale.control}",
             f"families: {len(cert.cover.families)}"]
    for f, fam in enumerate(cert.cover.families):
        lines.append(f"family {f}")
        for cl in fam:
            lines.append("cluster " + " ".join(str(p) for p in sorted(cl)))
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Certificate:
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    if not lines or lines[0].strip() != CERTIFICATE_HEADER:
        raise ValueError(f"not a certificate file (expected "
                         f"{CERTIFICATE_HEADER!r} on line 1)")

    fields = {}
    pos = 1
    for key in ("label", "size", "lambda", "control", "families"):
        if pos >= len(lines) or not lines[pos].startswith(key + ":"):
            raise ValueError(f"certificate line {pos + 1}: expected {key!r} field")
        fields[key] = lines[pos][len(key) + 1:].strip()
        pos += 1
    try:
        size = int(fields["size"])
        lam = int(fields["lambda"])
        control = int(fields["control"])
        nfam = int(fields["families"])
    except ValueError:
        raise ValueError("certificate header fields must be integers") from None

    families: list[list[list[int]]] = []
    current: Optional[list[list[int]]] = None
    for ln in lines[pos:]:
        ln = ln.strip()
        if ln.startswith("family"):
            current = []
            families.append(current)
        elif ln.startswith("cluster"):
            if current is None:
                raise ValueError("certificate: cluster before any family line")
            try:
                pts = [int(t) for t in ln.split()[1:]]
            except ValueError:
                raise ValueError(f"certificate: bad cluster line {ln!r}") from None
            if not pts:
                raise ValueError("certificate: empty cluster line")
            current.append(pts)
        else:
            raise ValueError(f"certificate: unrecognised line {ln!r}")
    if len(families) != nfam:
        raise ValueError(f"certificate: header says {nfam} families, "
                         f"found {len(families)}")
    cover = ScaledCover.of(lam, control, families)
    return Certificate(fields["label"], size, cover)


def write_certificate(path, cert: Certificate) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_certificate(cert))


def read_certificate(path) -> Certificate:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_certificate(fh.read())
