"""Certificate-checked identities between classes of structured complexes.

The ambient group for a certificate is spanned by structures with a fixed
tuple of homotopy scalars, supported in degrees ``[0, ceiling]``, modulo
the relations generated by short exact rows, contractible objects,
equivariant isomorphisms and suspension pairs.  A certificate names its
objects in a registry, lists evidence steps, and claims that a particular
integer combination of registered classes is zero.

``check_certificate`` trusts nothing: every structure is re-validated,
every arrow is re-checked (chain map, equivariance, exactness of rows,
contractions, invertibility), and the claim is accepted only if it equals
the exact accumulation of the verified relations.  The check is one-sided:
acceptance proves the identity, rejection carries no information beyond
the recorded reason.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .complexes import (
    ChainMap, check_ses, find_contraction, identity_map, is_contraction,
)
from .constructions import (
    cone_same, direct_sum, glue_extension, identity_cone_contraction,
    mapping_cone, peel_to_disks, peel_top, suspend,
)
from .exactalg import Matrix
from .fold import coefficient_block, disk_fold_iso, fold_general, fold_map
from .structures import (
    HomotopyStructure, check_structure, is_equivariant, restrict,
)


@dataclass(frozen=True)
class Slot:
    """The class group a certificate works in: scalar tuple plus ceiling."""

    scalars: tuple
    ceiling: int


@dataclass(frozen=True)
class ClassExpr:
    """Integer combination of registered names, kept sorted and reduced."""

    terms: tuple  # ((name, coefficient), ...)

    @staticmethod
    def build(pairs) -> "ClassExpr":
        acc: dict = {}
        for name, coeff in pairs:
            acc[name] = acc.get(name, 0) + coeff
        return ClassExpr(tuple(sorted((k, v) for k, v in acc.items() if v)))

    def as_dict(self) -> dict:
        return dict(self.terms)


@dataclass(frozen=True)
class ExactRow:
    """sub >--> total -->> quotient; adds mult * ([total] - [sub] - [quotient])."""

    sub: str
    total: str
    quotient: str
    include: ChainMap
    project: ChainMap
    mult: int = 1


@dataclass(frozen=True)
class Contractible:
    """A contraction of the named object; adds mult * [name]."""

    name: str
    contraction: ChainMap
    mult: int = 1


@dataclass(frozen=True)
class Isomorphism:
    """Equivariant degreewise isomorphism; adds mult * ([source] - [target])."""

    source: str
    target: str
    iso: ChainMap
    mult: int = 1


@dataclass(frozen=True)
class SuspensionPair:
    """shifted == suspend(base); adds mult * ([shifted] + [base]).

    Sound because base >--> cone(id) -->> shifted is exact with a
    contractible middle, provided the cone still fits under the ceiling.
    """

    base: str
    shifted: str
    mult: int = 1


@dataclass(frozen=True)
class Rescale:
    """Move every live term along [M] -> [restrict(M, factors)].

    Changes the slot scalars; ``pairs`` maps old names to names of their
    rescaled counterparts, and must cover every term carried so far.
    """

    factors: tuple
    pairs: tuple  # ((old_name, new_name), ...)


@dataclass(frozen=True)
class Widen:
    """Raise the ceiling; classes embed along the evident inclusion."""

    ceiling: int


@dataclass(frozen=True)
class Certificate:
    slot: Slot
    registry: tuple  # ((name, HomotopyStructure), ...)
    steps: tuple
    claim: ClassExpr


@dataclass(frozen=True)
class CheckResult:
    accepted: bool
    reason: Optional[str] = None
    step: Optional[int] = None


def _support(m: HomotopyStructure):
    degs = [i for i in m.complex.degrees() if m.complex.rank(i) > 0]
    if not degs:
        return None
    return min(degs), max(degs)


def _fits(m: HomotopyStructure, slot: Slot, ring) -> Optional[str]:
    want = tuple(ring.normalize(s) for s in slot.scalars)
    if m.scalars != want:
        return "scalars do not match the slot"
    span = _support(m)
    if span is not None and (span[0] < 0 or span[1] > slot.ceiling):
        return "support leaves the slot window"
    return None


def check_certificate(cert: Certificate) -> CheckResult:
    reg: dict = {}
    ring = None
    for name, m in cert.registry:
        if not isinstance(name, str) or name in reg:
            return CheckResult(False, f"bad or duplicate name {name!r}")
        problems = check_structure(m)
        if problems:
            return CheckResult(False, f"{name}: {problems[0]}")
        if ring is None:
            ring = m.complex.ring
        elif m.complex.ring != ring:
            return CheckResult(False, "registry mixes ground rings")
        reg[name] = m
    if ring is None:
        return CheckResult(False, "empty registry")

    slot = cert.slot
    expr: dict = {}

    def fail(idx, why):
        return CheckResult(False, why, idx)

    def lookup(idx, *names):
        for name in names:
            if name not in reg:
                return None
        return [reg[name] for name in names]

    for idx, step in enumerate(cert.steps):
        if isinstance(step, ExactRow):
            got = lookup(idx, step.sub, step.total, step.quotient)
            if got is None:
                return fail(idx, "row references an unregistered name")
            msub, mtot, mquot = got
            for m in got:
                why = _fits(m, slot, ring)
                if why:
                    return fail(idx, why)
            if (step.include.source != msub.complex
                    or step.include.target != mtot.complex
                    or step.project.source != mtot.complex
                    or step.project.target != mquot.complex):
                return fail(idx, "row arrows do not connect the named objects")
            if not step.include.is_chain_map() or not step.project.is_chain_map():
                return fail(idx, "row arrow is not a chain map")
            if not is_equivariant(step.include, msub, mtot):
                return fail(idx, "row inclusion is not equivariant")
            if not is_equivariant(step.project, mtot, mquot):
                return fail(idx, "row projection is not equivariant")
            if check_ses(step.include, step.project):
                return fail(idx, "row is not exact")
            expr[step.total] = expr.get(step.total, 0) + step.mult
            expr[step.sub] = expr.get(step.sub, 0) - step.mult
            expr[step.quotient] = expr.get(step.quotient, 0) - step.mult
        elif isinstance(step, Contractible):
            got = lookup(idx, step.name)
            if got is None:
                return fail(idx, "contraction references an unregistered name")
            m = got[0]
            why = _fits(m, slot, ring)
            if why:
                return fail(idx, why)
            h = step.contraction
            if h.source != m.complex or h.target != m.complex or h.shift != 1:
                return fail(idx, "contraction does not live on the named object")
            if not is_contraction(h):
                return fail(idx, "contraction identity fails")
            expr[step.name] = expr.get(step.name, 0) + step.mult
        elif isinstance(step, Isomorphism):
            got = lookup(idx, step.source, step.target)
            if got is None:
                return fail(idx, "isomorphism references an unregistered name")
            msrc, mtgt = got
            for m in got:
                why = _fits(m, slot, ring)
                if why:
                    return fail(idx, why)
            f = step.iso
            if f.source != msrc.complex or f.target != mtgt.complex or f.shift != 0:
                return fail(idx, "isomorphism does not connect the named objects")
            if not f.is_chain_map():
                return fail(idx, "isomorphism is not a chain map")
            if not f.is_degreewise_invertible():
                return fail(idx, "isomorphism is not invertible")
            if not is_equivariant(f, msrc, mtgt):
                return fail(idx, "isomorphism is not equivariant")
            expr[step.source] = expr.get(step.source, 0) + step.mult
            expr[step.target] = expr.get(step.target, 0) - step.mult
        elif isinstance(step, SuspensionPair):
            got = lookup(idx, step.base, step.shifted)
            if got is None:
                return fail(idx, "suspension references an unregistered name")
            mbase, mshift = got
            for m in got:
                why = _fits(m, slot, ring)
                if why:
                    return fail(idx, why)
            if mshift != suspend(mbase, 1):
                return fail(idx, "shifted object is not the suspension of the base")
            span = _support(mbase)
            if span is not None and span[1] + 1 > slot.ceiling:
                return fail(idx, "suspension cone would leave the slot window")
            expr[step.shifted] = expr.get(step.shifted, 0) + step.mult
            expr[step.base] = expr.get(step.base, 0) + step.mult
        elif isinstance(step, Rescale):
            if len(step.factors) != len(slot.scalars):
                return fail(idx, "rescale factor count mismatch")
            pairs = dict(step.pairs)
            if len(pairs) != len(step.pairs):
                return fail(idx, "rescale maps a name twice")
            news = set(pairs.values())
            if len(news) != len(pairs):
                return fail(idx, "rescale collapses two names")
            for name, coeff in expr.items():
                if coeff and name not in pairs:
                    return fail(idx, f"rescale does not cover live term {name!r}")
            for old, new in pairs.items():
                got = lookup(idx, old, new)
                if got is None:
                    return fail(idx, "rescale references an unregistered name")
                if got[1] != restrict(got[0], step.factors):
                    return fail(idx, f"{new!r} is not the stated rescale of {old!r}")
            expr = {pairs[name]: coeff for name, coeff in expr.items() if coeff}
            slot = Slot(
                tuple(ring.normalize(ring.mul(ring.normalize(s), ring.normalize(f)))
                      for s, f in zip(slot.scalars, step.factors)),
                slot.ceiling)
        elif isinstance(step, Widen):
            if step.ceiling < slot.ceiling:
                return fail(idx, "widening cannot lower the ceiling")
            slot = replace(slot, ceiling=step.ceiling)
        else:
            return fail(idx, f"unknown step kind {type(step).__name__}")

    for name, coeff in cert.claim.terms:
        if name not in reg:
            return CheckResult(False, f"claim references unregistered {name!r}")
        why = _fits(reg[name], slot, ring)
        if why:
            return CheckResult(False, f"claim term {name!r}: {why}")
    got = {name: coeff for name, coeff in expr.items() if coeff}
    if got != cert.claim.as_dict():
        return CheckResult(False, "accumulated relations do not match the claim")
    return CheckResult(True)


# ---------------------------------------------------------------------------
# Certificate builders.  Each returns a Certificate that check_certificate
# accepts; none of them is trusted by the checker.


def _squared(m: HomotopyStructure) -> tuple:
    ring = m.complex.ring
    return tuple(ring.mul(s, s) for s in m.scalars)


def sum_certificate(ma: HomotopyStructure, mb: HomotopyStructure,
                    ceiling: int) -> Certificate:
    """[A + B] = [A] + [B] through the split exact row."""
    ds = direct_sum(ma, mb)
    registry = (("left", ma), ("right", mb), ("sum", ds.structure))
    row = ExactRow("left", "sum", "right", ds.include[0], ds.project[1])
    claim = ClassExpr.build([("sum", 1), ("left", -1), ("right", -1)])
    return Certificate(Slot(ma.scalars, ceiling), registry, (row,), claim)


def extension_certificate(include: ChainMap, project: ChainMap,
                          m_sub: HomotopyStructure,
                          m_total: HomotopyStructure,
                          m_quot: HomotopyStructure,
                          ceiling: int) -> Certificate:
    """[total] = [sub] + [quotient] for any exact row of structures."""
    registry = (("sub", m_sub), ("total", m_total), ("quotient", m_quot))
    row = ExactRow("sub", "total", "quotient", include, project)
    claim = ClassExpr.build([("total", 1), ("sub", -1), ("quotient", -1)])
    return Certificate(Slot(m_total.scalars, ceiling), registry, (row,), claim)


def fold_row_certificates(m: HomotopyStructure, n: int):
    """The two exact rows of the fold construction, certified separately.

    First the coefficient row (shifted exterior block into the comparison
    cone onto the rescaled input), then the disk row (top disk into the
    comparison cone onto the fold).
    """
    data = fold_general(m, n)
    slot = Slot(_squared(m), n)
    reg_a = (("coefficient", data.coefficient_end),
             ("cone", data.cone),
             ("base", data.base_end))
    row_a = ExactRow("coefficient", "cone", "base",
                     data.coefficient_include, data.base_project)
    cert_a = Certificate(slot, reg_a, (row_a,), ClassExpr.build(
        [("cone", 1), ("coefficient", -1), ("base", -1)]))
    reg_b = (("top_disk", data.disk_end),
             ("cone", data.cone),
             ("fold", data.structure))
    row_b = ExactRow("top_disk", "cone", "fold",
                     data.disk_include, data.fold_project)
    cert_b = Certificate(slot, reg_b, (row_b,), ClassExpr.build(
        [("cone", 1), ("top_disk", -1), ("fold", -1)]))
    return cert_a, cert_b


def fold_defect_certificate(m: HomotopyStructure, n: int) -> Certificate:
    """[rescaled input] - [fold] - (-1)^(n-d) [coefficient block] = 0.

    Works for any structure supported in degrees within [0, n]; the
    coefficient block is taken on the degree n part of the input.
    """
    x = m.complex
    ring = x.ring
    d = m.ngens
    data = fold_general(m, n)
    p = x.rank(n)
    block = coefficient_block(ring, p, m.scalars)
    shifts = [suspend(block, j) for j in range(n - d)]
    top_name = f"block_up_{n - d - 1}"
    registry = [("base", data.base_end),
                ("fold", data.structure),
                ("cone", data.cone),
                ("top_disk", data.disk_end)]
    registry += [(f"block_up_{j}", shifts[j]) for j in range(n - d)]
    if shifts[n - d - 1] != data.coefficient_end:
        raise AssertionError("coefficient row is not the expected shift")

    steps = [
        ExactRow(top_name, "cone", "base",
                 data.coefficient_include, data.base_project, mult=-1),
        ExactRow("top_disk", "cone", "fold",
                 data.disk_include, data.fold_project, mult=1),
    ]
    h = find_contraction(data.disk_end.complex)
    if h is None:
        raise AssertionError("top disk has no contraction")
    steps.append(Contractible("top_disk", h, mult=1))
    coeff = 1
    for j in range(n - d - 2, -1, -1):
        steps.append(SuspensionPair(f"block_up_{j}", f"block_up_{j + 1}",
                                    mult=-coeff))
        coeff = -coeff
    claim = ClassExpr.build([("base", 1), ("fold", -1), ("block_up_0", coeff)])
    return Certificate(Slot(_squared(m), n), tuple(registry),
                       tuple(steps), claim)


def fold_identity_certificate(m: HomotopyStructure, n: int) -> Certificate:
    """Below the ceiling the fold is plain rescaling: [fold] = [base].

    Requires the input to be supported in degrees within [0, n - 1]; the
    certificate lives one ceiling lower than the fold was taken at.
    """
    x = m.complex
    ring = x.ring
    if x.rank(n) != 0:
        raise ValueError("input reaches the ceiling; no identity holds")
    data = fold_general(m, n)
    base = restrict(m, m.scalars)
    g = data.structure.complex
    mats = tuple(Matrix.build(ring, base.complex.rank(i), g.rank(i),
                              lambda r, c: ring.one() if r == c else ring.zero())
                 for i in range(g.min_degree, g.min_degree + len(g.ranks)))
    iso = ChainMap(g, base.complex, 0, mats)
    registry = (("fold", data.structure), ("base", base))
    step = Isomorphism("fold", "base", iso)
    claim = ClassExpr.build([("fold", 1), ("base", -1)])
    return Certificate(Slot(_squared(m), n - 1), registry, (step,), claim)


def disk_transport_certificate(ring, rank: int, n: int, scalars) -> Certificate:
    """The folded disk is the shifted coefficient block, by explicit iso.

    Requires ``n >= len(scalars) + 1`` so the shifted block stays in
    nonnegative degrees.
    """
    d = len(scalars)
    if n < d + 1:
        raise ValueError("ceiling too low for a nonnegative shifted block")
    data, target, iso = disk_fold_iso(ring, rank, n, scalars)
    registry = (("fold", data.structure), ("shifted_block", target))
    step = Isomorphism("fold", "shifted_block", iso)
    claim = ClassExpr.build([("fold", 1), ("shifted_block", -1)])
    return Certificate(Slot(data.structure.scalars, n - 1), registry,
                       (step,), claim)


def peel_chain_certificate(m: HomotopyStructure, ceiling: int) -> Certificate:
    """A contractible structure is the sum of the disks peeled off its top.

    Splits one disk off the top at a time; each split is an exact row, so
    the telescoping sum expresses [input] as the sum of the disk classes
    once the zero-ranked remainder is discharged.
    """
    steps = []
    registry = []
    chain = peel_to_disks(m)
    registry.append(("stage_0", m))
    claim_terms = [("stage_0", 1)]
    for k, peel in enumerate(chain):
        registry.append((f"disk_{k}", peel.disk))
        registry.append((f"stage_{k + 1}", peel.quotient))
        steps.append(ExactRow(f"disk_{k}", f"stage_{k}", f"stage_{k + 1}",
                              peel.include, peel.project))
        claim_terms.append((f"disk_{k}", -1))
    last = chain[-1].quotient if chain else m
    h = find_contraction(last.complex)
    if h is None:
        raise AssertionError("peel remainder has no contraction")
    steps.append(Contractible(f"stage_{len(chain)}", h, mult=1))
    claim = ClassExpr.build(claim_terms)
    return Certificate(Slot(m.scalars, ceiling), tuple(registry),
                       tuple(steps), claim)


def structure_independence_certificate(m1: HomotopyStructure,
                                       m2: HomotopyStructure,
                                       n: int) -> Certificate:
    """Two structures on one complex agree after rescaling by scalars cubed.

    Claims [restrict(m1, s^3)] = [restrict(m2, s^3)] at ceiling ``n``.  Both
    sides are glued onto the contractible cone of the identity, folded below
    ``n + 1``, and compared through the shared quotient; the folded cones
    are then emptied out against the same folded top disk.
    """
    x = m1.complex
    if m2.complex != x:
        raise ValueError("the structures must live on the same complex")
    if m1.scalars != m2.scalars:
        raise ValueError("the structures must share their scalars")
    if x.min_degree < 0 or x.top_degree > n:
        raise ValueError("complex leaves the slot window")
    s = m1.scalars
    ceiling = n + 1

    _, incl, proj = mapping_cone(identity_map(x))
    glued = glue_extension(incl, proj, m1, suspend(m2))
    left = restrict(m1, s)
    right = restrict(m2, s)
    shared = suspend(right, 1)
    plain = cone_same(identity_map(x), right, right)

    f_left = fold_general(left, ceiling)
    f_right = fold_general(right, ceiling)
    f_shared = fold_general(shared, ceiling)
    f_glued = fold_general(glued, ceiling)
    f_plain = fold_general(plain.structure, ceiling)

    h_cone = identity_cone_contraction(x)
    peel_g = peel_top(glued, h_cone)
    peel_p = peel_top(plain.structure, h_cone)
    if peel_g.disk != peel_p.disk:
        raise AssertionError("the two peels disagree on the top disk")
    f_disk = fold_general(peel_g.disk, ceiling)
    f_tail_g = fold_general(peel_g.quotient, ceiling)
    f_tail_p = fold_general(peel_p.quotient, ceiling)

    registry = (
        ("left_end", f_left.structure),
        ("right_end", f_right.structure),
        ("shared_quotient", f_shared.structure),
        ("glued_fold", f_glued.structure),
        ("cone_fold", f_plain.structure),
        ("disk_fold", f_disk.structure),
        ("tail_glued", f_tail_g.structure),
        ("tail_cone", f_tail_p.structure),
    )

    steps = [
        ExactRow("left_end", "glued_fold", "shared_quotient",
                 fold_map(incl, f_left, f_glued, ceiling),
                 fold_map(proj, f_glued, f_shared, ceiling), mult=-1),
        ExactRow("right_end", "cone_fold", "shared_quotient",
                 fold_map(plain.include, f_right, f_plain, ceiling),
                 fold_map(plain.project, f_plain, f_shared, ceiling), mult=1),
        ExactRow("disk_fold", "glued_fold", "tail_glued",
                 fold_map(peel_g.include, f_disk, f_glued, ceiling),
                 fold_map(peel_g.project, f_glued, f_tail_g, ceiling), mult=1),
        ExactRow("disk_fold", "cone_fold", "tail_cone",
                 fold_map(peel_p.include, f_disk, f_plain, ceiling),
                 fold_map(peel_p.project, f_plain, f_tail_p, ceiling), mult=-1),
    ]
    for name, struct, mult in (("tail_glued", f_tail_g.structure, 1),
                               ("tail_cone", f_tail_p.structure, -1)):
        h = find_contraction(struct.complex)
        if h is None:
            raise AssertionError(f"{name} has no contraction")
        steps.append(Contractible(name, h, mult=mult))

    claim = ClassExpr.build([("left_end", 1), ("right_end", -1)])
    return Certificate(Slot(f_left.structure.scalars, n), tuple(registry),
                       tuple(steps), claim)
