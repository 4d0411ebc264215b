"""Certificate kernel semantics, builder acceptance, mutation rejection."""

import random

import pytest

from homcert.complexes import ChainMap, GradedFreeComplex, identity_map
from homcert.constructions import direct_sum, disk, suspend
from homcert.exactalg import Matrix, ZZ
from homcert.certificates import (
    Certificate,
    ClassExpr,
    Contractible,
    ExactRow,
    Isomorphism,
    Rescale,
    Slot,
    SuspensionPair,
    Widen,
    check_certificate,
    fold_defect_certificate,
    fold_identity_certificate,
    fold_row_certificates,
    peel_chain_certificate,
    structure_independence_certificate,
    sum_certificate,
)
from homcert.koszul import koszul
from homcert.randgen import (
    contractible_structure,
    disk_pile,
    lift_pair,
    mutate_certificate,
    offset_cone,
    random_structure,
)
from homcert.structures import restrict


def test_sum_certificate_accepted():
    rng = random.Random(1)
    ma = disk_pile(rng, ZZ, 3, (2,))
    mb = disk_pile(rng, ZZ, 3, (2,))
    cert = sum_certificate(ma, mb, 4)
    res = check_certificate(cert)
    assert res.accepted, res.reason


def test_kernel_rejects_wrong_claim():
    rng = random.Random(2)
    cert = sum_certificate(disk_pile(rng, ZZ, 2, (3,)),
                           disk_pile(rng, ZZ, 2, (3,)), 3)
    bad = Certificate(cert.slot, cert.registry, cert.steps,
                      ClassExpr.build([("sum", 1), ("left", -1)]))
    res = check_certificate(bad)
    assert not res.accepted
    assert "claim" in res.reason or "match" in res.reason


def test_kernel_rejects_scalar_mismatch():
    rng = random.Random(3)
    cert = sum_certificate(disk_pile(rng, ZZ, 2, (3,)),
                           disk_pile(rng, ZZ, 2, (3,)), 3)
    bad = Certificate(Slot((ZZ.from_int(5),), 3), cert.registry,
                      cert.steps, cert.claim)
    res = check_certificate(bad)
    assert not res.accepted
    assert res.step == 0


def test_kernel_rejects_support_above_ceiling():
    rng = random.Random(4)
    cert = sum_certificate(disk_pile(rng, ZZ, 4, (2,)),
                           disk_pile(rng, ZZ, 4, (2,)), 3)
    res = check_certificate(cert)
    assert not res.accepted
    assert "window" in res.reason


def test_contractible_step_and_tamper():
    rng = random.Random(5)
    m = contractible_structure(rng, ZZ, 3, (6,))
    from homcert.complexes import find_contraction
    h = find_contraction(m.complex)
    cert = Certificate(
        Slot(m.scalars, 3), (("thing", m),),
        (Contractible("thing", h),),
        ClassExpr.build([("thing", 1)]))
    assert check_certificate(cert).accepted
    wrong = h.mats[0]
    bumped = wrong.with_entry(0, 0, ZZ.add(wrong.entries[0][0], ZZ.one()))
    bad_h = ChainMap(h.source, h.target, 1, (bumped,) + h.mats[1:])
    bad = Certificate(cert.slot, cert.registry,
                      (Contractible("thing", bad_h),), cert.claim)
    res = check_certificate(bad)
    assert not res.accepted and res.step == 0


def test_isomorphism_step_requires_invertibility():
    m = disk(ZZ, 2, 2, (2,))
    ident = identity_map(m.complex)
    cert = Certificate(
        Slot(m.scalars, 2), (("a", m), ("b", m)),
        (Isomorphism("a", "b", ident),),
        ClassExpr.build([("a", 1), ("b", -1)]))
    assert check_certificate(cert).accepted
    squash = ChainMap(m.complex, m.complex, 0,
                      tuple(mat.scale(ZZ.from_int(2)) for mat in ident.mats))
    bad = Certificate(cert.slot, cert.registry,
                      (Isomorphism("a", "b", squash),), cert.claim)
    res = check_certificate(bad)
    assert not res.accepted and "invertible" in res.reason


def test_suspension_pair_window_guard():
    base = disk(ZZ, 1, 2, (2,))
    up = suspend(base, 1)
    registry = (("base", base), ("up", up))
    step = SuspensionPair("base", "up")
    claim = ClassExpr.build([("up", 1), ("base", 1)])
    ok = Certificate(Slot(base.scalars, 3), registry, (step,), claim)
    assert check_certificate(ok).accepted
    tight = Certificate(Slot(base.scalars, 2), registry, (step,), claim)
    res = check_certificate(tight)
    assert not res.accepted and "window" in res.reason


def test_rescale_moves_the_slot():
    m = disk(ZZ, 1, 1, (2,))
    m4 = restrict(m, (2,))
    n4 = restrict(m, (2,))
    registry = (("a", m), ("b", m), ("a4", m4), ("b4", n4))
    steps = (
        Isomorphism("a", "b", identity_map(m.complex)),
        Rescale((ZZ.from_int(2),), (("a", "a4"), ("b", "b4"))),
    )
    claim = ClassExpr.build([("a4", 1), ("b4", -1)])
    cert = Certificate(Slot(m.scalars, 2), registry, steps, claim)
    assert check_certificate(cert).accepted
    partial = Rescale((ZZ.from_int(2),), (("a", "a4"),))
    bad = Certificate(cert.slot, registry, (steps[0], partial), claim)
    res = check_certificate(bad)
    assert not res.accepted and "cover" in res.reason


def test_widen_permits_higher_suspension():
    base = disk(ZZ, 1, 3, (2,))
    up = suspend(base, 1)
    registry = (("base", base), ("up", up))
    claim = ClassExpr.build([("up", 1), ("base", 1)])
    without = Certificate(Slot(base.scalars, 3), registry,
                          (SuspensionPair("base", "up"),), claim)
    assert not check_certificate(without).accepted
    widened = Certificate(Slot(base.scalars, 3), registry,
                          (Widen(4), SuspensionPair("base", "up")), claim)
    assert check_certificate(widened).accepted
    lowered = Certificate(Slot(base.scalars, 3), registry,
                          (Widen(2),), ClassExpr.build([]))
    assert not check_certificate(lowered).accepted


def test_fold_row_certificates_accepted():
    rng = random.Random(6)
    cases = [
        disk_pile(rng, ZZ, 3, (2,)),
        offset_cone(rng, ZZ, 3, 2, 3),
        suspend(koszul(ZZ, (2, 3)), 1),
    ]
    for m in cases:
        n = m.complex.top_degree
        cert_a, cert_b = fold_row_certificates(m, n)
        res_a = check_certificate(cert_a)
        res_b = check_certificate(cert_b)
        assert res_a.accepted, res_a.reason
        assert res_b.accepted, res_b.reason


def test_fold_defect_certificate_accepted():
    rng = random.Random(7)
    cases = [
        (disk_pile(rng, ZZ, 3, (2,)), 3),
        (offset_cone(rng, ZZ, 4, 3, 2), 4),
        (suspend(koszul(ZZ, (2, 3)), 2), 4),
        (disk_pile(rng, ZZ, 2, (5,)), 3),      # below the ceiling
        (random_structure(rng, ZZ, 3, (2, 3)), 3),
    ]
    for m, n in cases:
        cert = fold_defect_certificate(m, n)
        res = check_certificate(cert)
        assert res.accepted, (res.reason, res.step)


def test_fold_identity_certificate_accepted():
    rng = random.Random(8)
    m = disk_pile(rng, ZZ, 2, (3,))
    cert = fold_identity_certificate(m, 4)
    res = check_certificate(cert)
    assert res.accepted, res.reason
    assert cert.slot.ceiling == 3


def test_peel_chain_certificate_accepted():
    rng = random.Random(9)
    m = contractible_structure(rng, ZZ, 3, (4,))
    cert = peel_chain_certificate(m, 3)
    res = check_certificate(cert)
    assert res.accepted, res.reason
    rows = [s for s in cert.steps if isinstance(s, ExactRow)]
    assert len(rows) == len(m.complex.ranks) - 1
    assert dict(cert.claim.terms)["stage_0"] == 1
    assert all(c == -1 for name, c in cert.claim.terms if name.startswith("disk_"))
    assert len(cert.claim.terms) == len(rows) + 1


def test_structure_independence_certificate_accepted():
    rng = random.Random(10)
    m1, m2 = lift_pair(rng, 2)
    assert m1.ops != m2.ops
    cert = structure_independence_certificate(m1, m2, 3)
    res = check_certificate(cert)
    assert res.accepted, (res.reason, res.step)


def test_mutations_rejected_smoke():
    rng = random.Random(11)
    m1, m2 = lift_pair(rng, 2)
    pool = [
        sum_certificate(disk_pile(rng, ZZ, 3, (2,)),
                        disk_pile(rng, ZZ, 3, (2,)), 3),
        fold_defect_certificate(disk_pile(rng, ZZ, 3, (2,)), 3),
        fold_identity_certificate(disk_pile(rng, ZZ, 2, (3,)), 4),
        peel_chain_certificate(contractible_structure(rng, ZZ, 3, (4,)), 3),
        structure_independence_certificate(m1, m2, 3),
    ]
    for cert in pool:
        assert check_certificate(cert).accepted
    for k in range(20):
        cert = pool[k % len(pool)]
        mutant, what = mutate_certificate(rng, cert)
        res = check_certificate(mutant)
        assert not res.accepted, f"mutation survived: {what}"
