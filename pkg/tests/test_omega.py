import math

import numpy as np
import pytest

from schrocex.counterexample import ConstraintViolation, CounterexampleParams, full_sum
from schrocex.expsum import good_bounds, good_floor, naive_sum
from schrocex.omega import (
    TWO_PI,
    BoxSystem,
    CapExceeded,
    ExplicitBoxes,
    NoAdmissibleShift,
    OmegaPoint,
    OmegaSpec,
    build_omega,
    choose_t,
    map_to_omega_star,
    measure_report,
    overlap_census,
    overlap_census_bruteforce,
    point_in_union,
    shift_counts,
    to_rescaled,
    union_measure_exact,
    union_measure_mc,
    union_measure_sweep,
    verify_lower_bound,
)
from schrocex.precision import power_phases

from conftest import desk_params, omega_system

WINDOWS = [((0.0, 0.0), (0.03, 0.01)), ((3.0, 0.0), (3.04, 0.002)), ((0.2, 0.2), (0.25, 0.205))]


def explicit(spec, rows):
    by_q = {}
    for q, *a in rows:
        by_q.setdefault(q, []).append(a)
    return BoxSystem(spec, sorted(by_q), {q: ExplicitBoxes(q, spec.n, np.array(v)) for q, v in by_q.items()})


def test_build_rejects_small_q():
    with pytest.raises(ConstraintViolation) as e:
        build_omega(1024, 2, 2)
    assert e.value.name == "Q_size"
    with pytest.raises(ConstraintViolation) as e:
        build_omega(2048, 2, 2, c4=0.1)
    assert e.value.name == "c4_c5"


def test_counts_and_good_set_floor():
    S = omega_system(2048, 2)
    assert S.primes[0] >= 1024 and S.primes[-1] <= 2048
    for q, c in S.counts.items():
        assert c >= good_floor(2, 2, q)
    assert S.box_count == sum(S.counts.values())
    # recorded, not bounded by any stated constant
    assert 1 <= S.count_spread < 8


def test_sampled_centres_are_good():
    S = omega_system(2048, 3)
    lo, hi = good_bounds(3, 2, 1031)
    rng = np.random.default_rng(0)
    checked = 0
    for q, t in S.window((0.5, 0.0), (0.52, 2 * math.pi - 1e-9)).iter_boxes():
        for a in t[rng.permutation(len(t))[:3]]:
            v = abs(naive_sum(3, int(a[0]), int(a[1]), q))
            lo, hi = good_bounds(3, 2, q)
            assert lo * (1 - 1e-9) <= v <= hi * (1 + 1e-9)
            checked += 1
    assert checked > 50


def test_box_geometry():
    spec = OmegaSpec(2048, 2, 3)
    S = omega_system(2048, 3)
    q, t = next(S.iter_boxes())
    b = S.box(q, t[0])
    assert all(0 <= c < TWO_PI for c in b.center)
    assert b.half_widths == pytest.approx((spec.c4 / q, spec.c5 / q**2))
    assert b.measure == pytest.approx(4 * spec.c4 * spec.c5 / q**3)
    with pytest.raises(KeyError):
        S.box(q, (0, 1))  # a1 = 0 is never good


def test_single_and_disjoint_union():
    spec = OmegaSpec(2048, 2, 2)
    one = explicit(spec, [(1031, 5, 7)])
    assert union_measure_exact(one) == pytest.approx(float(spec.box_measure(1031)))
    two = explicit(spec, [(1031, 5, 7), (1033, 900, 3)])
    assert union_measure_exact(two) == pytest.approx(float(spec.box_measure(1031) + spec.box_measure(1033)))
    assert overlap_census(two).pairs == 2


def test_cross_prime_overlap_detected():
    spec = OmegaSpec(2048, 2, 2)
    # 0/q coincide in the second coordinate and 5/1031 ~ 5/1033 in the first
    sys_ = explicit(spec, [(1031, 5, 0), (1033, 5, 0)])
    rep = overlap_census(sys_)
    assert rep.cross_pairs == 1 and rep.pairs == 4
    assert union_measure_exact(sys_) == pytest.approx(union_measure_sweep(sys_), rel=1e-12)
    assert union_measure_exact(sys_) < sys_.total_measure


def test_same_prime_boxes_never_meet():
    S = omega_system(2048, 2)
    sub = S.window((0.0, 0.0), (0.012, 2 * math.pi - 1e-9))
    sub = BoxSystem(sub.spec, [1031], {1031: sub.sources[1031]})
    assert sub.box_count > 1000
    rep = overlap_census_bruteforce(sub)
    assert rep.cross_pairs == 0 and rep.pairs == rep.boxes


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("win", WINDOWS)
def test_census_matches_bruteforce(k, win):
    sub = omega_system(2048, k).window(*win)
    assert 0 < sub.box_count <= 3000
    a, b = overlap_census(sub), overlap_census_bruteforce(sub)
    assert (a.pairs, a.cross_pairs, a.boxes) == (b.pairs, b.cross_pairs, b.boxes)


@pytest.mark.parametrize("win", WINDOWS)
def test_exact_union_matches_plain_sweep_and_mc(win):
    sub = omega_system(2048, 2).window(*win)
    ex = union_measure_exact(sub)
    assert ex == pytest.approx(union_measure_sweep(sub), rel=1e-10)
    mc = union_measure_mc(sub, 200_000, seed=4)
    assert mc.ci[0] <= ex <= mc.ci[1]


def test_mc_bernoulli_single_box():
    spec = OmegaSpec(2048, 2, 2, c4=1 / 32, c5=1 / 32)
    one = explicit(spec, [(1031, 500, 600)])
    c = TWO_PI * np.array([500, 600]) / 1031
    h = spec.half_widths(1031)
    # a domain in which the box fills a fraction near 1e-3
    pad = h * math.sqrt(1000)
    dom = BoxSystem(spec, one.primes, one.sources, (tuple(c - pad), tuple(c + pad)))
    est = union_measure_mc(dom, 10**6, seed=1)
    truth = float(spec.box_measure(1031))
    half = (est.ci[1] - est.ci[0]) / 2
    assert abs(est.estimate - truth) <= 3 * half
    assert est.hits / est.samples == pytest.approx(1e-3, rel=0.2)


def test_mc_deterministic_and_thread_independent():
    sub = omega_system(2048, 3).window(*WINDOWS[0])
    a = union_measure_mc(sub, 300_000, seed=9)
    b = union_measure_mc(sub, 300_000, seed=9, threads=3)
    assert a == b


def test_point_in_union_matches_box_membership():
    sub = omega_system(2048, 2).window(*WINDOWS[2])
    qs, ts = sub.materialize()
    centres = TWO_PI * ts / qs[:, None]
    assert point_in_union(sub, centres).all()
    assert not point_in_union(sub, centres + np.array([0.0, 1.0])).any()


def test_cap_exceeded_and_materialize():
    S = omega_system(2048, 2)
    with pytest.raises(CapExceeded):
        S.materialize(cap=1000)
    with pytest.raises(CapExceeded):
        union_measure_exact(S, cap=10)


def test_lines_round_trip():
    sub = omega_system(2048, 3).window(*WINDOWS[1])
    text = sub.to_lines()
    back = BoxSystem.from_lines(sub.spec, "# q a1 a2\n" + text)
    assert back.box_count == sub.box_count
    assert back.to_lines() == text
    assert len(sub.to_lines(limit=5).splitlines()) == 5
    with pytest.raises(ValueError):
        BoxSystem.from_lines(sub.spec, "1031 1 2 3\n")


def test_measure_report_fields():
    sub = omega_system(2048, 2).window(*WINDOWS[0])
    rep = measure_report(sub, mc_samples=20_000, seed=1)
    d = rep.to_dict()
    for key in ("Q", "n", "k", "c4", "c5", "exact", "mc", "mc_ci", "boxes", "pairs", "C1"):
        assert key in d
    assert rep.exact >= rep.overlap_floor


# -- physical representatives ------------------------------------------------


@pytest.mark.parametrize("k", [2, 3])
def test_representatives(k):
    p = desk_params(k)
    pts = map_to_omega_star(omega_system(2048, k), p, 40, seed=5, jitter=0.9)
    assert len(pts) == 40
    c1 = p.constants.c1
    for pt in pts:
        assert -c1 < pt.x[0] <= -c1 / 2
        assert all(abs(v) <= c1 for v in pt.x[1:])
        back = to_rescaled(pt.x, p)
        assert max(min(abs(u - v) % TWO_PI, TWO_PI - abs(u - v) % TWO_PI) for u, v in zip(back, pt.y)) < 1e-12
        counts = shift_counts(pt.y, p)
        with_m = [p.M1, p.M2]
        for c, M in zip(counts, with_m):
            assert c >= math.floor(float(M) * c1 / (4 * math.pi))
        assert set(pt.to_dict()) == {"q", "a", "y", "x", "shifts"}


def test_no_admissible_shift():
    p = CounterexampleParams(2, 2, 100.0, 4096.0, 64.0, 2048)
    with pytest.raises(NoAdmissibleShift):
        map_to_omega_star(omega_system(2048, 2), p, 1)


def test_choose_t_centre_case():
    p = desk_params(2)
    pt = map_to_omega_star(omega_system(2048, 2), p, 1, seed=3, jitter=0.0)[0]
    ch = choose_t(pt, p)
    assert abs(ch.s) < 1e-15 and abs(float(ch.tau)) < 1e-30
    assert ch.t > 0
    assert float(ch.t) == pytest.approx(float(-pt.x[0] / (p.k * p.R_mp ** (p.k - 1))), rel=1e-12)
    m = np.arange(10**6, 10**6 + 3 * pt.q, dtype=np.int64)
    ph = power_phases(m, p.k, ch.top)
    assert np.array_equal(ph[: pt.q], ph[pt.q : 2 * pt.q])


@pytest.mark.parametrize("k", [2, 3])
def test_choose_t_windows(k):
    p = desk_params(k)
    for pt in map_to_omega_star(omega_system(2048, k), p, 30, seed=8, jitter=0.99):
        ch = choose_t(pt, p)
        assert abs(ch.tau) <= p.tau_max
        assert 0 < ch.t <= p.t_max


def test_choose_t_rejects_outside_box():
    p = desk_params(2)
    pt = map_to_omega_star(omega_system(2048, 2), p, 1, seed=3)[0]
    y1 = pt.y[0] + 2 * p.constants.c4 / pt.q
    moved = OmegaPoint(pt.q, pt.a, (y1,) + pt.y[1:], pt.x, pt.shifts)
    with pytest.raises(ConstraintViolation) as e:
        choose_t(moved, p)
    assert e.value.name == "y1_box"


@pytest.mark.parametrize("k", [2, 3])
def test_lower_bound_on_representatives(k):
    p = desk_params(k)
    for pt in map_to_omega_star(omega_system(2048, k), p, 25, seed=21, jitter=0.9):
        ch = choose_t(pt, p)
        rep = verify_lower_bound(pt, ch, p)
        assert rep.passed and rep.decomposition_ok
        assert rep.S == pytest.approx(abs(full_sum(pt.x[1:], ch.t, p, ch.top)), rel=1e-9)


def test_adversarial_point_recorded():
    # y2 moved off centre by twice the half-width: the bound may fail, so only record it
    p = desk_params(3)
    pt = map_to_omega_star(omega_system(2048, 3), p, 1, seed=6)[0]
    h2 = p.constants.c5 * pt.q ** -2.0
    y = (pt.y[0], (pt.y[1] + 2 * h2) % TWO_PI)
    import schrocex.omega as om

    x, shifts = om._to_physical(y, p)
    off = OmegaPoint(pt.q, pt.a, y, x, shifts)
    rep = verify_lower_bound(off, choose_t(off, p), p)
    assert math.isfinite(rep.S)
    print(f"adversarial point: |S|/floor = {rep.S / rep.floor:.3f}, passed={rep.passed}")
