"""Evolution families: builders, gluing, conjugation, duality, chains."""

import math

import numpy as np
import pytest

from evofam import (Compose, Custom, DomainError, EvolutionFamily, GridSpec,
                    Identity, IntervalMismatch, InversionFailure, Mobius,
                    RangeError, ReverseFamily, Scale, Trajectory,
                    conjugate_to_fix_origin, default_spec, ef2_residual,
                    from_loewner_chain, glue, hamel_family, lu_distance,
                    make_corrupted, make_radial, make_rotation, reverse_dual,
                    semigroup_residual, time_value)

PTS = np.array([0.3, -0.2 + 0.4j, 0.55j, -0.61, 0.25 - 0.5j])


def compose_gap(family, s, u, t, reverse=False):
    if reverse:
        through = family.at(s, u).eval_many(family.at(u, t).eval_many(PTS))
    else:
        through = family.at(u, t).eval_many(family.at(s, u).eval_many(PTS))
    return float(np.max(np.abs(through - family.at(s, t).eval_many(PTS))))


def test_time_value_duck_typing():
    class Tick:
        real_value = 0.75

    assert time_value(0.5) == 0.5
    assert time_value(2) == 2.0
    assert time_value(Tick()) == 0.75


def test_radial_family_closed_form():
    fam = make_radial(0.0, 2.0)
    m = fam.at(0.5, 1.7)
    assert isinstance(m, Scale)
    assert m.factor == pytest.approx(math.exp(-1.2))
    assert fam.at(1.0, 1.0).eval(0.4j) == 0.4j


def test_at_validates_parameter_order():
    fam = make_radial(0.0, 1.0)
    with pytest.raises(DomainError):
        fam.at(0.7, 0.3)
    with pytest.raises(DomainError):
        fam.at(-0.1, 0.5)
    with pytest.raises(DomainError):
        fam.at(0.5, 1.2)


def test_interval_must_be_nondegenerate():
    with pytest.raises(DomainError):
        make_radial(1.0, 1.0)
    with pytest.raises(DomainError):
        make_rotation(2.0, -1.0, lambda t: t)


def test_sample_times_uniform_and_hooked():
    fam = make_radial(0.0, 1.0)
    times = fam.sample_times(5)
    assert times == (0.0, 0.25, 0.5, 0.75, 1.0)
    hooked = EvolutionFamily(0.0, 1.0, lambda s, t: Identity(),
                             times_hook=lambda n: (0.0, 0.1, 1.0))
    assert hooked.sample_times(7) == (0.0, 0.1, 1.0)
    with pytest.raises(DomainError):
        fam.sample_times(1)


@pytest.mark.parametrize("builder", [
    lambda: make_radial(0.0, 1.0),
    lambda: make_rotation(0.0, 1.0, lambda t: t * t, label="rotation:quadratic"),
])
def test_builders_satisfy_composition_law(builder):
    fam = builder()
    for s, u, t in [(0.0, 0.3, 0.9), (0.1, 0.1, 0.8), (0.2, 0.6, 1.0)]:
        assert compose_gap(fam, s, u, t) < 1e-14


def test_corrupted_family_breaks_composition_visibly():
    fam = make_corrupted(0.0, 2.0)
    assert fam.at(1.0, 1.0).eval(0.5) == 0.5  # diagonal still clean
    assert compose_gap(fam, 0.0, 1.0, 2.0) > 0.05


# ---------------------------------------------------------------------------
# glue
# ---------------------------------------------------------------------------

def test_glue_requires_matching_seam():
    with pytest.raises(IntervalMismatch):
        glue(make_radial(0.0, 0.5), make_radial(0.6, 1.0))


def test_glue_delegates_and_straddles():
    seam = 0.5
    glued = glue(make_radial(0.0, seam), make_rotation(seam, 1.0, lambda t: t))
    assert glued.label == "glued:radial+rotation"
    # inside a sub-square the original transition comes back untouched
    inside = glued.at(0.1, 0.4)
    assert isinstance(inside, Scale)
    # across the seam it is the second map after the first
    m = glued.at(0.2, 0.8)
    expected = Compose(glued.at(seam, 0.8), glued.at(0.2, seam))
    assert lu_distance(m, expected, 0.9) == 0.0
    for s, u, t in [(0.0, 0.5, 1.0), (0.2, 0.4, 0.9), (0.1, 0.7, 0.8)]:
        assert compose_gap(glued, s, u, t) < 1e-14


def test_glued_radials_equal_one_radial():
    glued = glue(make_radial(0.0, 0.5), make_radial(0.5, 1.0))
    whole = make_radial(0.0, 1.0)
    assert lu_distance(glued.at(0.1, 0.9), whole.at(0.1, 0.9), 0.9) < 1e-15


# ---------------------------------------------------------------------------
# conjugation
# ---------------------------------------------------------------------------

def test_conjugation_fixes_origin_exactly():
    # Recentering by the transition's own image of the orbit point makes the
    # numerator vanish literally, not just to rounding.
    fam, orbit = conjugate_to_fix_origin(make_radial(0.0, 1.0), 0.5)
    for s, t in [(0.0, 1.0), (0.2, 0.7), (0.4, 0.4)]:
        assert fam.at(s, t).eval(0j) == 0j
    assert orbit(0.0) == pytest.approx(0.5)


def test_conjugation_derivative_identity():
    """The origin derivative of the conjugated family factors through the
    orbit: (1-|c(s)|^2)/(1-|c(t)|^2) times the original derivative along
    the orbit.  The chain rule must reproduce this without being told."""
    base = make_radial(0.0, 1.0)
    fam, orbit = conjugate_to_fix_origin(base, 0.5)
    for s, t in [(0.0, 1.0), (0.1, 0.7), (0.3, 0.95)]:
        cs, ct = orbit(s), orbit(t)
        expected = (1 - abs(cs) ** 2) / (1 - abs(ct) ** 2) * base.at(s, t).deriv(cs)
        assert fam.at(s, t).deriv(0j) == pytest.approx(expected, rel=1e-12)


def test_conjugated_family_keeps_composition_law():
    fam, _ = conjugate_to_fix_origin(make_radial(0.0, 1.0), 0.3 + 0.2j)
    for s, u, t in [(0.0, 0.5, 1.0), (0.1, 0.2, 0.6)]:
        assert compose_gap(fam, s, u, t) < 1e-14


def test_trajectory_validation():
    traj = Trajectory(0.0, 1.0, lambda t: 0.5 * t)
    assert traj(0.8) == 0.4
    with pytest.raises(DomainError):
        traj(1.5)
    escape = Trajectory(0.0, 1.0, lambda t: 1.0 + t)
    with pytest.raises(RangeError):
        escape(0.5)


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------

def test_reverse_dual_pairs_reflected_parameters():
    fam = make_radial(0.0, 1.0)
    dual = reverse_dual(fam)
    assert isinstance(dual, ReverseFamily)
    assert (time_value(dual.a), time_value(dual.b)) == (-1.0, 0.0)
    assert lu_distance(dual.at(-0.8, -0.2), fam.at(0.2, 0.8), 0.9) == 0.0
    assert dual.label == "reverse:radial"


def test_reverse_dual_round_trip_is_exact():
    fam = make_radial(0.0, 1.0)
    back = reverse_dual(reverse_dual(fam))
    assert isinstance(back, EvolutionFamily)
    for s, t in [(0.0, 1.0), (0.25, 0.75)]:
        assert lu_distance(back.at(s, t), fam.at(s, t), 0.9) == 0.0


def test_reverse_family_satisfies_flipped_composition():
    base, _ = conjugate_to_fix_origin(make_radial(0.0, 1.0), 0.4)
    dual = reverse_dual(base)
    # non-commuting transitions: only the flipped order closes
    assert compose_gap(dual, -0.9, -0.5, -0.1, reverse=True) < 1e-14
    assert compose_gap(dual, -0.9, -0.5, -0.1, reverse=False) > 1e-6


# ---------------------------------------------------------------------------
# Loewner chains
# ---------------------------------------------------------------------------

def test_chain_recovers_radial_family():
    chain = lambda t: Scale(math.exp(-(1.0 - t)))
    low = from_loewner_chain(0.0, 1.0, chain)
    rad = make_radial(0.0, 1.0)
    assert low.at(0.3, 0.3) == Identity()
    for s, t in [(0.0, 1.0), (0.2, 0.7), (0.55, 0.9)]:
        assert lu_distance(low.at(s, t), rad.at(s, t), 0.9) < 1e-12


def test_chain_derivative_matches_closed_form():
    low = from_loewner_chain(0.0, 1.0, lambda t: Scale(math.exp(-(1.0 - t))))
    m = low.at(0.2, 0.8)
    for z in (0.1 + 0.3j, -0.5, 0.7j):
        assert m.deriv(z) == pytest.approx(math.exp(-0.6), rel=1e-10)


def test_chain_with_mobius_targets():
    def chain(t):
        return Mobius(0.35 * complex(math.cos(0.8 * t), math.sin(0.8 * t)))

    low = from_loewner_chain(0.0, 1.0, chain)
    for s, u, t in [(0.0, 0.4, 1.0), (0.1, 0.6, 0.9)]:
        assert compose_gap(low, s, u, t) < 1e-9


def test_chain_rejects_collapsing_probe():
    with pytest.raises(DomainError):
        from_loewner_chain(0.0, 1.0, lambda t: Scale(0.0))


def test_chain_detects_non_monotone_ranges():
    # ranges shrink with t, so forward transitions leave the disk
    low = from_loewner_chain(0.0, 1.0, lambda t: Scale(math.exp(-t)))
    with pytest.raises(RangeError):
        low.at(0.0, 0.5).eval(0.9)


def test_chain_inversion_failure_diagnosed():
    # complex conjugation is not holomorphic; Newton cannot converge
    def chain(t):
        scale = math.exp(-(1.0 - t))
        return Custom(lambda z, s=scale: np.conj(z) * s,
                      lambda z, s=scale: (z * 0) + s,
                      label="antiholomorphic", vector_ok=True)

    low = from_loewner_chain(0.0, 1.0, chain)
    with pytest.raises(InversionFailure):
        low.at(0.0, 1.0).eval(0.5 + 0.2j)


def test_chain_validates_arguments():
    with pytest.raises(DomainError):
        from_loewner_chain(1.0, 0.0, lambda t: Scale(0.5))
    with pytest.raises(DomainError):
        from_loewner_chain(0.0, 1.0, lambda t: Scale(0.5), inversion_tol=0.0)


# ---------------------------------------------------------------------------
# cross-builder budgets
# ---------------------------------------------------------------------------

_BUILDERS = [
    lambda: make_radial(0.0, 1.0),
    lambda: make_rotation(0.0, 1.0, lambda t: t * t / 2, label="rotation:half-quadratic"),
    lambda: glue(make_radial(0.0, 0.5), make_rotation(0.5, 1.0, lambda t: t)),
    lambda: conjugate_to_fix_origin(make_radial(0.0, 1.0), 0.3 + 0.2j)[0],
    lambda: reverse_dual(conjugate_to_fix_origin(make_radial(0.0, 1.0), 0.3 + 0.2j)[0]),
    lambda: from_loewner_chain(0.0, 1.0, lambda t: Scale(math.exp(-(1.0 - t)))),
    lambda: hamel_family(*default_spec()),
]


@pytest.mark.parametrize("builder", _BUILDERS,
                         ids=lambda b: b().label)
def test_every_builder_meets_residual_budgets(builder):
    """Diagonal maps are the identity to 1e-12 and the composition gap stays
    under 1e-10 (1e-8 for iteratively inverted chains) for every builder,
    including the time-reversed one with its flipped composition order."""
    fam = builder()
    assert ef2_residual(fam) < 1e-12
    budget = 1e-8 if "loewner" in fam.label else 1e-10
    assert semigroup_residual(fam, GridSpec()) < budget


def test_conjugation_origin_and_residual_match_base():
    base = make_radial(0.0, 1.0)
    conj, _ = conjugate_to_fix_origin(base, 0.4 + 0.25j)
    times = [0.0, 0.125, 0.3, 0.625, 0.875, 1.0]
    for s in times:
        for t in times:
            if s <= t:
                assert conj.at(s, t).eval(0j) == 0j
    gap = abs(semigroup_residual(conj, GridSpec())
              - semigroup_residual(base, GridSpec()))
    assert gap < 1e-10


def test_glue_returns_subinterval_trees_unchanged():
    first = make_radial(0.0, 0.5)
    second = make_rotation(0.5, 1.0, lambda t: t)
    glued = glue(first, second)
    for s, t in [(0.0, 0.5), (0.1, 0.3), (0.5, 1.0), (0.6, 0.95)]:
        part = first if t <= 0.5 else second
        assert glued.at(s, t) == part.at(s, t)
