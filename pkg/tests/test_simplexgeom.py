import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from conftest import random_valid_angles
from hsvol.geomlib import LengthClass
from hsvol.simplexgeom import (
    EDGES,
    AngleSystem,
    AngleSystemError,
    CoarseType,
    SimplexTag,
    classify_simplex,
    classify_simplices,
    edge_cosh_pairs,
    edge_coshes,
    edge_index,
    edge_lengths,
    face_angles,
    flip,
    flip_array,
    gram_determinant,
    opposite_edge,
    regular_angles,
    two_face_discrepancy,
    valid_mask,
    validate_angle_system,
    vertex_edges,
)

PI = math.pi
EUC = math.acos(1 / 3)
COARSE_CLASSES = {
    CoarseType.SPHERICAL_TYPE: {LengthClass.IMAGINARY_OPEN},
    CoarseType.HYPERBOLIC_TYPE: {LengthClass.NEGATIVE_REAL, LengthClass.I_PI_PLUS_POSITIVE},
    CoarseType.EUCLIDEAN_TYPE: {LengthClass.ZERO, LengthClass.I_PI},
}


@st.composite
def valid_systems(draw):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_valid_angles(np.random.default_rng(seed), 1)[0]


def test_edge_bookkeeping():
    assert EDGES == tuple(oracles.EDGE_LIST)
    for e, (i, j) in enumerate(EDGES):
        assert edge_index(i, j) == edge_index(j, i) == e
        assert set(EDGES[opposite_edge(e)]) == set(range(4)) - {i, j}
    for v in range(4):
        assert sorted(vertex_edges(v)) == [e for e, p in enumerate(EDGES) if v in p]


# --------------------------------------------------------------------------
# validation


@pytest.mark.parametrize("x", [PI / 2, EUC, 2 * PI / 3])
def test_regular_systems_valid(x):
    assert validate_angle_system([x] * 6).angles == (x,) * 6


def test_small_angles_rejected_with_all_violations():
    with pytest.raises(AngleSystemError) as info:
        validate_angle_system([PI / 6] * 6)
    kinds = [v.kind for v in info.value.violations]
    assert kinds.count("vertex_sum") == 4
    assert {v.vertex for v in info.value.violations} == {0, 1, 2, 3}


def test_range_and_triangle_inequality_violations():
    with pytest.raises(AngleSystemError) as info:
        validate_angle_system([0.0, 1.0, 1.0, 1.0, 1.0, PI])
    assert "range" in {v.kind for v in info.value.violations}
    # at vertex 0: α01 + π < α02 + α03
    bad = [0.1, 2.0, 2.0, 2.0, 2.0, 2.0]
    with pytest.raises(AngleSystemError) as info:
        validate_angle_system(bad)
    assert any(v.kind == "triangle_inequality" and v.vertex == 0 for v in info.value.violations)


def test_mapping_input():
    a = validate_angle_system({(j, i): 1.0 + 0.1 * e for e, (i, j) in enumerate(EDGES)})
    assert a[(0, 1)] == 1.0 and a[(3, 2)] == pytest.approx(1.5)
    with pytest.raises(ValueError):
        validate_angle_system({(0, 1): 1.0})


@given(st.lists(st.floats(0.0, PI), min_size=6, max_size=6))
def test_valid_mask_agrees_with_validator(a):
    ok = bool(valid_mask(np.array(a)))
    try:
        validate_angle_system(a)
        assert ok
    except AngleSystemError:
        assert not ok


# --------------------------------------------------------------------------
# face angles and lengths


@pytest.mark.parametrize("x, beta", [(EUC, PI / 3), (PI / 2, PI / 2), (2 * PI / 3, math.acos(-1 / 3))])
def test_face_angle_examples(x, beta):
    B = face_angles(AngleSystem((x,) * 6))
    assert len(B.beta) == 12
    assert all(b == pytest.approx(beta, abs=1e-12) for b in B.beta.values())


def test_face_angle_value_matches_oracle(rng):
    for a in random_valid_angles(rng, 50):
        B = face_angles(AngleSystem(tuple(a)))
        for (i, (j, k)), b in B.beta.items():
            assert b == pytest.approx(oracles.link_face_angle(a, i, j, k), abs=1e-12)


def test_edge_length_examples():
    L = edge_lengths(AngleSystem((EUC,) * 6))
    assert all(L[e].length_class() is LengthClass.ZERO for e in EDGES)
    L = edge_lengths(AngleSystem((PI / 2,) * 6))
    assert all(L[e].im == pytest.approx(PI / 2) for e in EDGES)
    L = edge_lengths(AngleSystem(tuple(flip_array(regular_angles(EUC), (0,)))))
    for e in EDGES:
        want = LengthClass.I_PI if 0 in e else LengthClass.ZERO
        assert L[e].length_class() is want


@given(valid_systems())
def test_well_defined_lengths(a):
    assert two_face_discrepancy(edge_cosh_pairs(a)).max() <= 1e-9


@given(valid_systems())
def test_both_faces_match_cosine_law(a):
    pairs = edge_cosh_pairs(a)
    for e, (i, j) in enumerate(EDGES):
        ref = oracles.cosine_law_edge_cosh(a, i, j)
        got = sorted(pairs[e])
        assert got == pytest.approx(sorted(ref), rel=1e-8, abs=1e-8)


# --------------------------------------------------------------------------
# classification


@pytest.mark.parametrize("a, tag, flipped", [
    (regular_angles(2 * PI / 3), SimplexTag.SPHERICAL, set()),
    (regular_angles(EUC), SimplexTag.EUCLIDEAN, set()),
    (flip_array(regular_angles(EUC), (0,)), SimplexTag.FLIPPED_EUCLIDEAN, {0}),
    (flip_array(regular_angles(EUC), (0, 1)), SimplexTag.DOUBLY_FLIPPED_EUCLIDEAN, {0, 1}),
    (regular_angles(1.1), SimplexTag.HYPERBOLIC, set()),
    (flip_array(regular_angles(1.1), (2,)), SimplexTag.FLIPPED_HYPERBOLIC, {2}),
    # flipping at {1, 3} is the same as flipping at {0, 2}; the pair through 0 is reported
    (flip_array(regular_angles(1.1), (1, 3)), SimplexTag.DOUBLY_FLIPPED_HYPERBOLIC, {0, 2}),
])
def test_classification_examples(a, tag, flipped):
    st_ = classify_simplex(AngleSystem(tuple(a)))
    assert st_.tag is tag
    assert set(st_.flipped_vertices) == flipped


@given(valid_systems())
def test_classification_matches_brute_force(a):
    ref = oracles.brute_simplex(a, 1e-8)
    assume(ref is not None)
    assert ref[0] != "?"
    got = classify_simplex(AngleSystem(tuple(a)))
    assert got.tag.value == ref[0]
    F = set(got.flipped_vertices)
    assert F == set(ref[1]) or (len(F) == 2 and F == set(range(4)) - set(ref[1]))


@given(valid_systems())
def test_coarse_type_uniform(a):
    st_ = classify_simplex(AngleSystem(tuple(a)))
    L = edge_lengths(AngleSystem(tuple(a)))
    assert {L[e].length_class() for e in EDGES} <= COARSE_CLASSES[st_.coarse]


@given(valid_systems())
def test_edge_pattern_matches_tag(a):
    st_ = classify_simplex(AngleSystem(tuple(a)))
    c = edge_coshes(a)
    flipped_edges = {e for e in range(6) if c[e] < 0} if st_.coarse is not CoarseType.SPHERICAL_TYPE else set()
    F = st_.flipped_vertices
    if len(F) == 1:
        (v,) = F
        assert flipped_edges == set(vertex_edges(v))
    elif len(F) == 2:
        e = edge_index(*sorted(F))
        assert flipped_edges == set(range(6)) - {e, opposite_edge(e)}
    else:
        assert not flipped_edges


@given(valid_systems())
def test_gram_determinant_sign_gives_coarse_type(a):
    det = float(gram_determinant(a))
    assume(abs(det) > 1e-8)
    st_ = classify_simplex(AngleSystem(tuple(a)))
    assert st_.coarse is (CoarseType.SPHERICAL_TYPE if det > 0 else CoarseType.HYPERBOLIC_TYPE)


def test_batch_and_single_agree(rng):
    a = random_valid_angles(rng, 200)
    assert classify_simplices(a) == [classify_simplex(AngleSystem(tuple(x))) for x in a]


def test_near_locus_rows_with_split_faces_are_decided():
    """Just off the Euclidean locus some faces fall in the band and others not."""
    rng = np.random.default_rng(5)
    for _ in range(50):
        e = oracles.random_euclidean(rng)
        d = rng.standard_normal(6)
        for s in (1e-9, 3e-9, 1e-8):
            classify_simplex(AngleSystem(tuple(e + s * d)))  # must not raise


# --------------------------------------------------------------------------
# flips


def test_flip_examples():
    right = AngleSystem((PI / 2,) * 6)
    assert flip(right, 0) == right
    fe = flip(AngleSystem((EUC,) * 6), 0)
    assert fe.as_array() == pytest.approx(flip_array(regular_angles(EUC), (0,)))
    assert classify_simplex(fe).tag is SimplexTag.FLIPPED_EUCLIDEAN


def test_flip_is_an_involution(rng):
    for a in random_valid_angles(rng, 1000):
        v = int(rng.integers(4))
        b = flip(flip(AngleSystem(tuple(a)), v), v)
        assert b.as_array() == pytest.approx(a, abs=1e-15)


FLIP_MAP = {
    SimplexTag.HYPERBOLIC: SimplexTag.FLIPPED_HYPERBOLIC,
    SimplexTag.EUCLIDEAN: SimplexTag.FLIPPED_EUCLIDEAN,
}


def test_flip_moves_between_types(rng):
    seen = set()
    for a in random_valid_angles(rng, 3000):
        t0 = classify_simplex(AngleSystem(tuple(a)))
        v = int(rng.integers(4))
        t1 = classify_simplex(flip(AngleSystem(tuple(a)), v))
        if t0.tag is SimplexTag.HYPERBOLIC:
            assert t1.tag is SimplexTag.FLIPPED_HYPERBOLIC and t1.flipped_vertices == {v}
        elif t0.tag is SimplexTag.FLIPPED_HYPERBOLIC:
            (w,) = t0.flipped_vertices
            if v == w:
                assert t1.tag is SimplexTag.HYPERBOLIC
            else:
                assert t1.tag is SimplexTag.DOUBLY_FLIPPED_HYPERBOLIC
        elif t0.tag is SimplexTag.SPHERICAL:
            assert t1.tag is SimplexTag.SPHERICAL
        seen.add(t0.tag)
    assert {SimplexTag.HYPERBOLIC, SimplexTag.FLIPPED_HYPERBOLIC, SimplexTag.SPHERICAL} <= seen
    for _ in range(100):
        e = oracles.random_euclidean(rng)
        assert classify_simplex(flip(AngleSystem(tuple(e)), int(rng.integers(4)))).tag is SimplexTag.FLIPPED_EUCLIDEAN


def test_invalid_flip_result_rejected():
    # flipping maps valid systems to valid systems, so only invalid input can fail
    with pytest.raises(AngleSystemError):
        flip(AngleSystem((PI / 6,) * 6), 0)


def test_transition_through_euclidean():
    """A segment from a spherical to a hyperbolic sample crosses cosh = 1."""
    rng = np.random.default_rng(11)
    a = random_valid_angles(rng, 2000)
    det = gram_determinant(a)
    sph = a[det > 1e-3][:20]
    hyp = a[(det < -1e-3)]
    hyp = hyp[[classify_simplex(AngleSystem(tuple(x))).tag is SimplexTag.HYPERBOLIC for x in hyp]][:20]
    ts = np.linspace(0, 1, 201)
    for s, h in zip(sph, hyp):
        path = s[None, :] + ts[:, None] * (h - s)[None, :]
        r = edge_coshes(path)[:, 0] - 1.0
        assert r[0] < 0 < r[-1]
        k = int(np.argmax(r > 0))
        lo, hi = ts[k - 1], ts[k]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if edge_coshes(s + mid * (h - s))[0] - 1.0 > 0:
                hi = mid
            else:
                lo = mid
        assert classify_simplex(AngleSystem(tuple(s + hi * (h - s)))).coarse is CoarseType.EUCLIDEAN_TYPE
