import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dehnfill.errors import CompleteStructureError, DegenerateLevelError, DomainError
from dehnfill.levelsets import f_value, level_point, real_radius, imag_radius
from dehnfill.moduli import (OMEGA0, RegionId, classify, classify_many, fiber_partner,
                             locus_point, omega, region_index, region_kind, rotate6,
                             solve_many, solve_parallelogram, special_points)

import oracles

levels = st.floats(min_value=0.02, max_value=0.98)
angles = st.floats(min_value=0.0, max_value=2 * math.pi, exclude_max=True)


def _point(s, theta):
    return complex(level_point(s, theta))


@pytest.mark.parametrize("c", [0.3 + 0.2j, 2.633916, 2j * math.pi / 3, -1 + 2.5j, 5 - 0.3j,
                               0.01 + 0.02j, -0.4 - 3.0j])
def test_parallelogram_against_graph_oracle(c):
    got = solve_parallelogram(c)
    assert got.c1 == pytest.approx(oracles.parallelogram_c1(c), abs=1e-12)


def test_moduli_point_invariants():
    mp = solve_parallelogram(0.7 - 1.9j)
    assert mp.c1 == mp.c + mp.c2
    assert mp.omega.imag > 0
    assert mp.residual < 1e-9
    assert mp.s == pytest.approx(f_value(mp.c))
    for z in (mp.c1, mp.c2):
        assert abs(z.imag) < math.pi
    # counterclockwise angular order c, c1, c2
    a = [cmath.phase(z / mp.c) % (2 * math.pi) for z in (mp.c1, mp.c2)]
    assert 0 < a[0] < a[1] < math.pi


def test_small_c_is_hexagonal():
    assert abs(omega(1e-3) - cmath.exp(1j * math.pi / 3)) < 1e-2
    assert OMEGA0 == pytest.approx(cmath.exp(1j * math.pi / 3))


def test_hexagonal_limit_monotone_along_rays():
    rays = np.exp(1j * np.linspace(0, 2 * math.pi, 36, endpoint=False))
    errs = [np.abs(solve_many(r * rays).omega - OMEGA0) for r in (1e-1, 1e-2, 1e-3, 1e-4)]
    for a, b in zip(errs, errs[1:]):
        assert np.all(b < a)


def test_real_c_has_half_real_part():
    # axis symmetry forces Re(c1) = Re(c)/2; oracle is the graph intersection
    for s in (0.1, 0.5, 0.9):
        c = float(real_radius(s))
        w = omega(c)
        assert w.real == pytest.approx(0.5, abs=1e-9)
        assert oracles.parallelogram_c1(c).real == pytest.approx(c / 2, abs=1e-9)


def test_imaginary_c_has_half_real_part():
    c = 2j * math.pi / 3
    assert omega(c).real == pytest.approx(0.5, abs=1e-9)
    assert oracles.parallelogram_c1(c).imag == pytest.approx(c.imag / 2, abs=1e-9)


def test_errors():
    with pytest.raises(CompleteStructureError):
        solve_parallelogram(0)
    with pytest.raises(DomainError):
        solve_parallelogram(1 + 3.2j)
    with pytest.raises(DomainError):
        solve_parallelogram(complex("nan"))
    with pytest.raises(DomainError):
        solve_many([0.1], grid=32)
    with pytest.raises(DomainError):
        fiber_partner(0)
    with pytest.raises(DomainError):
        locus_point(13, 0.5)
    with pytest.raises(DegenerateLevelError):
        special_points(0.0)
    with pytest.raises(DomainError):
        classify(3.5j)


def test_fiber_partner():
    assert fiber_partner(1.0) == -1.0
    assert fiber_partner(2j * math.pi / 3) == -2j * math.pi / 3


@settings(max_examples=60, deadline=None)
@given(levels, angles)
def test_fiber_partner_same_omega(s, theta):
    c = _point(s, theta)
    assert abs(omega(fiber_partner(c)) - omega(c)) < 1e-9


def test_rotate6_maps_p1_to_p3():
    pts = special_points(0.5)
    assert rotate6(pts[0]) == pytest.approx(pts[2], abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(levels, angles)
def test_rotate6_orbit(s, theta):
    c = _point(s, theta)
    z = c
    orbit = [z]
    for _ in range(6):
        z = rotate6(z)
        orbit.append(z)
    assert abs(orbit[3] + c) < 1e-6 * abs(c)
    assert abs(orbit[6] - c) < 1e-6 * abs(c)
    # the orbit is the hexagon c, c1, c2, -c, -c1, -c2
    mp = solve_parallelogram(c)
    assert orbit[1] == pytest.approx(mp.c1, abs=1e-12)
    assert orbit[2] == pytest.approx(mp.c2, abs=1e-9)


def test_special_points_closed_forms():
    pts = special_points(0.5)
    assert pts[0] == pytest.approx(2 * math.log(2 + math.sqrt(3)), abs=1e-14)
    assert pts[3] == pytest.approx(2j * math.pi / 3, abs=1e-14)


@pytest.mark.parametrize("s", [1e-6, 0.1, 0.5, 0.9, 0.9999])
def test_special_points_match_parallelogram_definition(s):
    pts = special_points(s)
    p1, p10 = float(real_radius(s)), -1j * float(imag_radius(s))
    a, b = solve_parallelogram(p1), solve_parallelogram(p10)
    tol = 1e-12 * max(1.0, abs(p1))
    assert pts[2] == pytest.approx(a.c1, abs=tol)
    assert pts[4] == pytest.approx(a.c2, abs=tol)
    assert pts[11] == pytest.approx(b.c1, abs=tol)
    assert pts[1] == pytest.approx(b.c2, abs=tol)
    for i in range(6):
        assert pts[i + 6] == -pts[i]
    # counterclockwise from the positive real axis
    args = [cmath.phase(p) % (2 * math.pi) for p in pts]
    args[0] = 0.0
    assert all(x < y for x, y in zip(args, args[1:]))
    assert np.all(np.abs(f_value(np.array(pts)) - s) < 1e-12)


def test_chord_bisection_identity():
    pts = special_points(0.5)
    assert pts[2] + pts[10] == pytest.approx(pts[0], abs=1e-9)


def test_locus_points():
    s = 0.3
    assert locus_point(1, s) == pytest.approx(real_radius(s))
    assert locus_point(4, s) == pytest.approx(1j * imag_radius(s))
    # equilateral limit of l3
    assert cmath.phase(locus_point(3, 1e-8)) == pytest.approx(math.pi / 3, abs=1e-6)


def test_classify_examples():
    assert classify(0.01) is RegionId.l1
    assert classify(0.5j) is RegionId.l4
    assert classify(0) is RegionId.ORIGIN
    assert classify(-0.3) is RegionId.l7
    assert region_kind(RegionId.C3) == "C" and region_index(RegionId.C3) == 3
    assert region_kind(RegionId.ORIGIN) == "ORIGIN" and region_index(RegionId.ORIGIN) == 0


def test_classify_on_every_locus_and_arc():
    s = 0.6
    pts = special_points(s)
    assert [classify(p).value for p in pts] == [f"l{j}" for j in range(1, 13)]
    ang = [cmath.phase(p) % (2 * math.pi) for p in pts] + [2 * math.pi]
    ang[0] = 0.0
    for k in range(12):
        mid = _point(s, 0.5 * (ang[k] + ang[k + 1]))
        assert classify(mid).value == f"C{k + 1}"
    assert solve_parallelogram(_point(s, 0.5 * (ang[0] + ang[1]))).region is RegionId.C1


def test_tie_tolerance_goes_to_locus():
    s = 0.4
    p3 = special_points(s)[2]
    phi = cmath.phase(p3)
    assert classify(_point(s, phi + 5e-10)) is RegionId.l3
    assert classify(_point(s, phi + 1e-7)) is RegionId.C3


def _shift(region, k):
    kind, idx = region_kind(region), region_index(region)
    return RegionId(f"{kind}{(idx - 1 + k) % 12 + 1}")


def _mirror(region):
    # conjugation reverses orientation: C_k -> C_{1-k}, l_j -> l_{2-j} (mod 12)
    kind, idx = region_kind(region), region_index(region)
    new = (1 - idx) if kind == "C" else (2 - idx)
    return RegionId(f"{kind}{(new - 1) % 12 + 1}")


@settings(max_examples=60, deadline=None)
@given(levels, angles)
def test_dihedral_shift_under_rotate6(s, theta):
    c = _point(s, theta)
    assert classify(rotate6(c)) is _shift(classify(c), 2)


@settings(max_examples=60, deadline=None)
@given(levels, angles)
def test_dihedral_reflection_under_conjugation(s, theta):
    c = _point(s, theta)
    assert classify(c.conjugate()) is _mirror(classify(c))


def test_dihedral_on_grid():
    x, y = np.meshgrid(np.linspace(-5.5, 5.5, 23), np.linspace(-3.0, 3.0, 13))
    c = (x + 1j * y).ravel()
    c = c[c != 0]
    base = classify_many(c)
    rot = classify_many(solve_many(c).c1)
    conj = classify_many(c.conjugate())
    for b, r, m in zip(base, rot, conj):
        assert r is _shift(b, 2)
        assert m is _mirror(b)


def test_batch_matches_single():
    rng = np.random.default_rng(3)
    c = level_point(rng.uniform(0.05, 0.95, 30), rng.uniform(0, 2 * math.pi, 30))
    sol = solve_many(c)
    for k in (0, 7, 29):
        assert sol.omega[k] == solve_parallelogram(c[k]).omega
    assert np.all(sol.roots == 2)
    assert classify_many(c) == [classify(z) for z in c]


def test_residual_bound_on_samples():
    rng = np.random.default_rng(5)
    c = level_point(rng.uniform(0.05, 0.95, 1000), rng.uniform(0, 2 * math.pi, 1000))
    sol = solve_many(c)
    assert np.max(np.abs(f_value(sol.c1) - sol.s)) < 1e-9
    assert np.max(np.abs(f_value(sol.c2) - sol.s)) < 1e-9
    assert np.all(sol.omega.imag > 0)
