"""Core filter algebra and limit-structure axioms, checked against
brute-force oracles that enumerate filters as explicit up-set families."""

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from limitspace.core import (
    Carrier,
    CarrierMismatch,
    LimitSpace,
    PointMap,
    PrincipalFilter,
    RawConvergenceTable,
    close,
    compose,
    continuity_defect,
    converges,
    filter_image,
    filter_meet,
    identity_map,
    is_continuous,
    is_finer,
    is_pretopological,
    is_pseudotopological,
    map_from_names,
    neighborhood,
    point_filter,
    space_from_names,
    subsets_of,
)

from conftest import NAMES, all_spaces, random_map, random_raw, random_space, space


# --- oracle helpers --------------------------------------------------------


def up_set(carrier: Carrier, gen: int) -> frozenset:
    """The filter [gen] as an explicit family of subsets."""
    return frozenset(s for s in subsets_of(carrier.full_mask) if s & gen == gen)


def family_min(family) -> int:
    """Generator of a principal family = its unique minimal member."""
    best = None
    for s in family:
        if best is None or s & best == s:
            best = s if best is None else s & best
    return best


def closure_oracle(raw: RawConvergenceTable) -> list[frozenset]:
    """Iterate the three axioms over explicit subset families to a fixpoint."""
    fams = [set(g for g in raw.gens[i] if g) for i in range(len(raw.carrier))]
    for i in range(len(raw.carrier)):
        fams[i].add(1 << i)
    changed = True
    while changed:
        changed = False
        for fam in fams:
            new = set()
            for a, b in itertools.product(fam, repeat=2):
                if a | b not in fam:
                    new.add(a | b)  # filter intersection = generator union
            for a in fam:
                for s in subsets_of(a):
                    if s not in fam:
                        new.add(s)  # finer filters = nonempty subsets
            if new:
                fam |= new
                changed = True
    return [frozenset(f) for f in fams]


# --- principal filter algebra ---------------------------------------------


def test_meet_trivial_cases():
    c = Carrier(("a", "b", "c"))
    fa, fb = point_filter(c, "a"), point_filter(c, "b")
    assert filter_meet(fa, fb).generator == c.mask_of("ab")
    assert filter_meet(fa, fa) == fa


def test_meet_matches_up_set_intersection():
    c = Carrier(("a", "b", "c"))
    f1 = PrincipalFilter(c, c.mask_of("ab"))
    f2 = PrincipalFilter(c, c.mask_of("bc"))
    expected = family_min(up_set(c, f1.generator) & up_set(c, f2.generator))
    got = filter_meet(f1, f2)
    assert got.generator == expected == c.mask_of("abc")


def test_meet_rejects_carrier_mismatch():
    f1 = point_filter(Carrier(("a",)), "a")
    f2 = point_filter(Carrier(("b",)), "b")
    with pytest.raises(CarrierMismatch):
        filter_meet(f1, f2)


def test_image_constant_and_identity():
    s2 = space([0, 0])
    s1 = space_from_names(["c"], {"c": ["c"]})
    const = PointMap(s2, s1, (0, 0))
    f = PrincipalFilter(s2.carrier, 0b11)
    assert filter_image(f, const).generator == 1
    ident = identity_map(s2)
    assert filter_image(point_filter(s2.carrier, "p0"), ident).generator == 1


def test_image_matches_generated_family():
    dom = space([0, 0])
    cod = space([0, 0])
    m = PointMap(dom, cod, (1, 0))  # p0 -> p1, p1 -> p0
    f = PrincipalFilter(dom.carrier, 0b11)
    img = filter_image(f, m)
    # the generated family: supersets of images of members
    images = {m.image_mask(a) for a in up_set(dom.carrier, f.generator)}
    generated = {s for s in subsets_of(cod.carrier.full_mask)
                 if any(s & i == i for i in images)}
    assert up_set(cod.carrier, img.generator) == frozenset(generated)


def test_is_finer():
    c = Carrier(("a", "b"))
    fa = point_filter(c, "a")
    fab = PrincipalFilter(c, 0b11)
    assert is_finer(fa, fab)
    assert not is_finer(fab, fa)
    assert is_finer(fab, fab)


# --- closure ---------------------------------------------------------------


def test_close_point_alone():
    raw = RawConvergenceTable(Carrier(("a",)), ((),))
    assert close(raw).vmax == (1,)


def test_close_spec_examples():
    c = Carrier(("a", "b"))
    raw = RawConvergenceTable(c, ((0b11,), ()))
    s = close(raw)
    assert s.v("a") == ("a", "b") and s.v("b") == ("b",)

    c3 = Carrier(("a", "b", "c"))
    raw3 = RawConvergenceTable(c3, ((0b010, 0b100), (), ()))
    assert close(raw3).v("a") == ("a", "b", "c")


def exhaustive_raws(n):
    full = (1 << n) - 1
    singles = [()] + [(g,) for g in range(1, full + 1)] + \
        [(g1, g2) for g1 in range(1, full + 1) for g2 in range(g1 + 1, full + 1)]
    for gens in itertools.product(singles, repeat=n):
        yield RawConvergenceTable(Carrier(NAMES[:n]), gens)


@pytest.mark.parametrize("n", [1, 2])
def test_close_matches_axiom_fixpoint_exhaustive(n):
    for raw in exhaustive_raws(n):
        got = close(raw)
        fams = closure_oracle(raw)
        for i in range(n):
            assert fams[i] == frozenset(subsets_of(got.vmax[i]))


def test_close_matches_axiom_fixpoint_sampled(rng):
    for _ in range(300):
        raw = random_raw(rng, rng.randrange(1, 5))
        got = close(raw)
        fams = closure_oracle(raw)
        for i in range(len(raw.carrier)):
            assert fams[i] == frozenset(subsets_of(got.vmax[i]))


def test_close_idempotent_sampled(rng):
    for _ in range(300):
        raw = random_raw(rng, rng.randrange(1, 5))
        once = close(raw)
        again = close(RawConvergenceTable(once.carrier, tuple((v,) for v in once.vmax)))
        assert once == again


# --- convergence, neighborhoods, predicates --------------------------------


def test_converges_examples():
    s = space([0b10, 0])  # V(p0) = {p0,p1}
    c = s.carrier
    assert converges(s, point_filter(c, "p1"), "p0")
    assert not converges(space([0, 0]), PrincipalFilter(c, 0b11), "p0")
    meet = filter_meet(PrincipalFilter(c, 0b11), point_filter(c, "p0"))
    assert converges(s, meet, "p0")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_neighborhood_is_intersection_of_convergent_filters(n):
    for s in all_spaces(n):
        for i, p in enumerate(s.carrier.points):
            families = [up_set(s.carrier, a) for a in subsets_of(s.vmax[i])]
            inter = frozenset.intersection(*families)
            assert family_min(inter) == neighborhood(s, p).generator


def test_filter_with_point_lemma_exhaustive_small():
    for n in (1, 2, 3):
        for s in all_spaces(n):
            for a in subsets_of(s.carrier.full_mask):
                f = PrincipalFilter(s.carrier, a)
                for p in s.carrier.points:
                    lhs = converges(s, f, p)
                    rhs = converges(s, filter_meet(f, point_filter(s.carrier, p)), p)
                    assert lhs == rhs


def test_filter_with_point_lemma_sampled(rng):
    for _ in range(400):
        s = random_space(rng, rng.randrange(4, 6))
        a = rng.getrandbits(len(s)) or 1
        f = PrincipalFilter(s.carrier, a & s.carrier.full_mask or 1)
        p = rng.choice(s.carrier.points)
        assert converges(s, f, p) == converges(
            s, filter_meet(f, point_filter(s.carrier, p)), p)


def brute_pseudotopological(s: LimitSpace) -> bool:
    """Literal ultrafilter test: point filters are the finite ultrafilters."""
    c = s.carrier
    for p in c.points:
        for a in subsets_of(c.full_mask):
            every_point = all(converges(s, PrincipalFilter(c, 1 << i), p)
                              for i in range(len(c)) if a >> i & 1)
            if every_point and not converges(s, PrincipalFilter(c, a), p):
                return False
    return True


def test_finite_collapse_exhaustive_n_le_4():
    for n in (1, 2, 3, 4):
        for s in all_spaces(n):
            assert is_pretopological(s)
            assert is_pseudotopological(s)
            assert brute_pseudotopological(s)


def test_finite_collapse_random_n10(rng):
    for _ in range(100):
        s = random_space(rng, 10)
        assert is_pretopological(s) and is_pseudotopological(s)


# --- continuity ------------------------------------------------------------


def brute_continuous(m: PointMap) -> bool:
    """Definitional check over every convergent filter, not just maximal ones."""
    dom, cod = m.domain, m.codomain
    for i, p in enumerate(dom.carrier.points):
        for a in subsets_of(dom.vmax[i]):
            img = m.image_mask(a)
            if img & ~cod.vmax[m.table[i]]:
                return False
    return True


def test_continuity_trivial_cases(cyc8):
    assert is_continuous(identity_map(cyc8))
    one = space_from_names(["c"], {"c": ["c"]})
    assert is_continuous(PointMap(cyc8, one, (0,) * 8))


def test_continuity_witness():
    dom = space([0b10, 0])
    cod = space([0, 0])
    m = PointMap(dom, cod, (0, 1))
    defect = continuity_defect(m)
    assert defect is not None
    assert defect.point == "p0" and defect.filter.generator == 0b11


def test_continuity_agrees_with_brute_force(rng):
    for _ in range(400):
        dom = random_space(rng, rng.randrange(1, 5))
        cod = random_space(rng, rng.randrange(1, 5))
        m = random_map(rng, dom, cod)
        assert is_continuous(m) == brute_continuous(m)


@given(st.integers(0, 10 ** 9))
@settings(max_examples=60, deadline=None)
def test_composition_of_continuous_is_continuous(seed):
    rng = random.Random(seed)
    a = random_space(rng, rng.randrange(1, 4))
    b = random_space(rng, rng.randrange(1, 4))
    c = random_space(rng, rng.randrange(1, 4))
    for _ in range(20):
        f = random_map(rng, a, b)
        g = random_map(rng, b, c)
        if is_continuous(f) and is_continuous(g):
            assert is_continuous(compose(g, f))
            return


def test_empty_carrier_is_vacuously_fine():
    empty = LimitSpace(Carrier(()), ())
    assert is_pretopological(empty) and is_pseudotopological(empty)


def test_map_from_names_roundtrip(cyc8):
    m = map_from_names(cyc8, cyc8, {f"v{i}": f"v{(i + 1) % 8}" for i in range(8)})
    assert m("v7") == "v0" and is_continuous(m)
