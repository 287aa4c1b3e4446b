import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import random_valid_angles
from hsvol.fixtures import boundary_of_4simplex, disphenoid_with_cross_angle, dihedral_angles, single_tetrahedron
from hsvol.simplexgeom import (
    EDGES,
    AngleSystem,
    SimplexTag,
    classify_simplex,
    edge_coshes,
    flip_array,
    gram_determinant,
    regular_angles,
)
from hsvol.triangulation import build
from hsvol.volume import (
    QuadratureOptions,
    VolumeConvergenceError,
    WrongTypeError,
    base_euclidean_point,
    euclidean_crossings,
    integrate_schlafli,
    integrate_schlafli_path,
    schlafli_form,
    schlafli_weight_array,
    simplex_volume,
    total_gradient,
    total_volume,
    volume_doubly_flipped_euclidean,
    volume_flipped_euclidean,
)

PI = math.pi
EUC = math.acos(1 / 3)
BASE = base_euclidean_point().as_array()


def system(a):
    return AngleSystem(tuple(float(x) for x in a))


@st.composite
def valid_systems(draw):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_valid_angles(np.random.default_rng(seed), 1)[0]


# --------------------------------------------------------------------------
# the Schläfli form


def test_form_examples():
    assert np.all(schlafli_form(system(regular_angles(EUC))).as_array() == 0.0)
    assert schlafli_form(system(regular_angles(PI / 2))).as_array() == pytest.approx(np.full(6, PI / 4))
    w = schlafli_form(system(flip_array(regular_angles(EUC), (0,))))
    for e in EDGES:
        assert w[e] == (PI / 2 if 0 in e else 0.0)


@given(valid_systems())
def test_batch_weights_match_form(a):
    assert schlafli_weight_array(a) == pytest.approx(schlafli_form(system(a)).as_array(), abs=1e-12)


def test_base_point():
    b = base_euclidean_point()
    assert b.angles == pytest.approx((1.2309594,) * 6, abs=1e-7)
    assert classify_simplex(b).tag is SimplexTag.EUCLIDEAN
    assert simplex_volume(b) == 0.0


# --------------------------------------------------------------------------
# simplex volumes


def test_regular_spherical_volumes():
    assert simplex_volume(system(regular_angles(PI / 2))) == pytest.approx(PI ** 2 / 8, abs=1e-12)
    assert simplex_volume(system(regular_angles(2 * PI / 3))) == pytest.approx(2 * PI ** 2 / 5, abs=1e-12)


@pytest.mark.parametrize("theta", [0.3, 1.0, PI / 2, 2.0, 3.0])
def test_wedge_simplex(theta):
    """Two coordinate half-spaces plus a wedge of angle θ: V = θ/(2π) · (2π²/4)."""
    a = np.full(6, PI / 2)
    a[5] = theta  # edge {2, 3} is where faces 0 and 1 meet
    assert simplex_volume(system(a)) == pytest.approx(PI * theta / 4, abs=1e-11)


def test_flipped_euclidean_examples():
    fe = system(flip_array(regular_angles(EUC), (0,)))
    assert volume_flipped_euclidean(fe) == pytest.approx(0.5 * PI * (3 * EUC - PI), abs=1e-14)
    assert volume_flipped_euclidean(fe) == pytest.approx(0.8659574, abs=1e-7)
    dfe = system(flip_array(regular_angles(EUC), (0, 1)))
    assert volume_doubly_flipped_euclidean(dfe) == pytest.approx(0.5 * PI * (4 * (PI - EUC) - 2 * PI), abs=1e-14)
    assert volume_doubly_flipped_euclidean(dfe) == pytest.approx(2.1352583, abs=1e-7)


def test_flipped_corner_tetrahedron():
    """Right angles at the flipped vertex: V = (π/2)(3π/2 - π) = π²/4."""
    corner = dihedral_angles([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert corner[:3] == pytest.approx([PI / 2] * 3)
    a = system(flip_array(corner, (0,)))
    assert volume_flipped_euclidean(a) == pytest.approx(PI ** 2 / 4, abs=1e-12)
    assert integrate_schlafli(BASE, a.as_array())[0] == pytest.approx(PI ** 2 / 4, abs=1e-9)


def test_doubly_flipped_symmetric_example():
    """Cross angles 3π/4 after flipping: V = (π/2)(3π - 2π) = π²/2."""
    a = system(flip_array(disphenoid_with_cross_angle(PI / 4), (0, 1)))
    assert classify_simplex(a).tag is SimplexTag.DOUBLY_FLIPPED_EUCLIDEAN
    assert volume_doubly_flipped_euclidean(a) == pytest.approx(PI ** 2 / 2, abs=1e-12)
    assert integrate_schlafli(BASE, a.as_array())[0] == pytest.approx(PI ** 2 / 2, abs=1e-9)


def test_closed_forms_reject_other_types():
    with pytest.raises(WrongTypeError):
        volume_flipped_euclidean(system(regular_angles(PI / 2)))
    with pytest.raises(WrongTypeError):
        volume_doubly_flipped_euclidean(system(flip_array(regular_angles(EUC), (0,))))


def test_euclidean_simplices_have_zero_volume(rng):
    for _ in range(20):
        assert simplex_volume(system(oracles.random_euclidean(rng))) == 0.0


def test_convergence_failure_reported():
    with pytest.raises(VolumeConvergenceError) as info:
        simplex_volume(system(regular_angles(2 * PI / 3)), QuadratureOptions(abs_tol=1e-300, max_subdivisions=2))
    assert info.value.estimate == pytest.approx(2 * PI ** 2 / 5, rel=1e-3)


@pytest.mark.parametrize("kw", [{"abs_tol": 0.0}, {"abs_tol": -1.0}, {"max_subdivisions": 0}])
def test_quadrature_options_validated(kw):
    with pytest.raises(ValueError):
        QuadratureOptions(**kw)


def test_hyperbolic_volumes_positive(rng):
    a = random_valid_angles(rng, 400)
    hyp = [x for x in a if classify_simplex(system(x)).coarse.value == "HyperbolicType"][:30]
    assert len(hyp) == 30
    assert all(simplex_volume(system(x)) > 0 for x in hyp)


def test_regular_hyperbolic_approaches_ideal():
    # the regular ideal tetrahedron has volume 3Л(π/3) = 1.0149416064...
    vols = [simplex_volume(system(regular_angles(PI / 3 + d))) for d in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert vols == sorted(vols)
    assert vols[-1] < 1.0149416064
    assert vols[-1] == pytest.approx(1.0149416064, abs=5e-3)


# --------------------------------------------------------------------------
# integration along paths


@settings(max_examples=50)
@given(valid_systems(), valid_systems())
def test_path_independence(b, m):
    q = QuadratureOptions()
    straight = integrate_schlafli(BASE, b, q)[0]
    two_leg = integrate_schlafli_path([BASE, m, b], q)[0]
    assert abs(straight - two_leg) <= 2 * q.abs_tol


@settings(max_examples=50)
@given(valid_systems(), valid_systems())
def test_segment_reversal_and_additivity(a, b):
    fwd = integrate_schlafli(a, b)[0]
    back = integrate_schlafli(b, a)[0]
    assert fwd == pytest.approx(-back, abs=1e-9)
    assert simplex_volume(system(b)) - simplex_volume(system(a)) == pytest.approx(fwd, abs=1e-9)


def test_zero_segment():
    assert integrate_schlafli(BASE, BASE) == (0.0, 0.0)


def test_crossings_found(rng):
    a = random_valid_angles(rng, 2000)
    det = gram_determinant(a)
    s, h = a[det > 1e-2][0], a[det < -1e-2][0]
    ts = euclidean_crossings(s, h)
    assert len(ts) >= 1
    for t in ts:
        assert abs(gram_determinant(s + t * (h - s))) < 1e-12


def test_continuity_across_the_euclidean_locus(rng):
    a = random_valid_angles(rng, 2000)
    det = gram_determinant(a)
    s, h = a[det > 1e-2][0], a[det < -1e-2][0]
    d = h - s
    (t0, *_) = euclidean_crossings(s, h)
    V = lambda t: simplex_volume(system(s + t * d))
    for delta in (1e-4, 1e-6, 1e-8):
        assert abs(V(t0 + delta) - V(t0 - delta)) <= 10 * delta * np.abs(d).sum()
    # one-sided derivatives agree with ω on both sides of the crossing
    for side in (-1, 1):
        t = t0 + side * 1e-3
        k = 1e-6
        fd = (V(t + k) - V(t - k)) / (2 * k)
        assert fd == pytest.approx(schlafli_weight_array(s + t * d) @ d, rel=1e-6, abs=1e-9)


# --------------------------------------------------------------------------
# totals over triangulations


def test_boundary_4simplex_total():
    T = build(boundary_of_4simplex())
    theta = np.full(30, 2 * PI / 3)
    assert total_volume(T, theta) == pytest.approx(2 * PI ** 2, abs=1e-10)
    g = total_gradient(T, theta)
    assert np.ptp(g) < 1e-12
    l = np.arccos(edge_coshes(regular_angles(2 * PI / 3))[0])
    assert g[0] == pytest.approx(l / 2, abs=1e-12)


def test_single_tetrahedron_total(rng):
    T = build(single_tetrahedron())
    for a in random_valid_angles(rng, 5):
        assert total_volume(T, a) == simplex_volume(system(a))
        assert total_gradient(T, a) == pytest.approx(schlafli_weight_array(a))


def test_all_euclidean_total_is_zero(rng):
    T = build(boundary_of_4simplex())
    theta = np.concatenate([oracles.random_euclidean(rng) for _ in range(5)])
    assert total_volume(T, theta) == 0.0
    assert np.all(total_gradient(T, theta) == 0.0)
