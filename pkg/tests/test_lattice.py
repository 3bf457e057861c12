from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from adez.lattice import (
    DEFAULT_SPECS,
    EnumerationLimitError,
    LatticeSpec,
    cartan_matrix,
    count_upper_bound,
    determinant,
    discriminant_data,
    enumerate_norms,
    enumerate_shifted,
    fundamental_weights,
    parse_spec,
    rational_inverse,
)
from oracles import box_norm_counts

E8_CARTAN = (
    (2, 0, -1, 0, 0, 0, 0, 0),
    (0, 2, 0, -1, 0, 0, 0, 0),
    (-1, 0, 2, -1, 0, 0, 0, 0),
    (0, -1, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, -1),
    (0, 0, 0, 0, 0, 0, -1, 2),
)

small_specs = st.sampled_from([s for s in DEFAULT_SPECS if s.rank <= 5])


def test_parse_spec_variants():
    assert parse_spec("E8") == LatticeSpec("E", 8)
    assert parse_spec(" d_5 ") == LatticeSpec("D", 5)
    assert str(parse_spec("a4")) == "A4"


@pytest.mark.parametrize("text", ["Q9", "E9", "D2", "A0", "", "A", "8E"])
def test_parse_spec_rejects(text):
    with pytest.raises(ValueError):
        parse_spec(text)


def test_parse_error_names_families():
    with pytest.raises(ValueError, match="A, D, E"):
        parse_spec("Q9")


def test_rank_ceiling():
    with pytest.raises(ValueError, match="ceiling"):
        LatticeSpec("A", 25)


def test_e8_cartan_bourbaki():
    assert cartan_matrix(LatticeSpec("E", 8)) == E8_CARTAN
    assert determinant(E8_CARTAN) == 1


def test_a2_cartan_and_weights():
    spec = LatticeSpec("A", 2)
    assert cartan_matrix(spec) == ((2, -1), (-1, 2))
    w = fundamental_weights(spec)
    assert w == ((Fraction(2, 3), Fraction(1, 3)), (Fraction(1, 3), Fraction(2, 3)))


@pytest.mark.parametrize("spec", DEFAULT_SPECS, ids=str)
def test_weights_invert_cartan(spec):
    g = cartan_matrix(spec)
    w = rational_inverse(g)
    n = spec.rank
    for i in range(n):
        for j in range(n):
            assert sum(g[i][m] * w[m][j] for m in range(n)) == (1 if i == j else 0)


@pytest.mark.parametrize("name,l,group", [
    ("A4", 5, "cyclic(5)"), ("D4", 4, "klein_four"), ("D5", 4, "cyclic(4)"),
    ("E6", 3, "cyclic(3)"), ("E7", 2, "cyclic(2)"), ("E8", 1, "cyclic(1)"),
])
def test_discriminant_group(name, l, group):
    data = discriminant_data(parse_spec(name))
    assert data.l == l
    assert data.group_tag == group
    assert len(data.cosets) == l


def test_e7_and_e8_cosets():
    e7 = discriminant_data(parse_spec("E7"))
    assert e7.labels == ("0", "w7")
    assert e7.coset_norm(1) == Fraction(3, 2)
    assert discriminant_data(parse_spec("E8")).cosets == ((Fraction(0),) * 8,)


@pytest.mark.parametrize("name,norms", [
    ("A2", ["0", "2/3", "2/3"]),
    ("D5", ["0", "5/4", "1", "5/4"]),
    ("E6", ["0", "4/3", "4/3"]),
])
def test_coset_norms(name, norms):
    data = discriminant_data(parse_spec(name))
    assert [data.coset_norm(a) for a in range(data.l)] == [Fraction(x) for x in norms]


@pytest.mark.parametrize("n", [5, 7])
def test_d_odd_ordering_is_cyclic(n):
    # class a is a times class 1
    data = discriminant_data(LatticeSpec("D", n))
    w1 = data.cosets[1]
    for a in range(data.l):
        assert data.coset_of([a * c for c in w1]) == a


def test_a2_root_count_example():
    data = discriminant_data(parse_spec("A2"))
    assert dict(enumerate_norms(data, 0, 2)) == {Fraction(2): 6}


def test_e8_root_count_example():
    data = discriminant_data(parse_spec("E8"))
    assert dict(enumerate_norms(data, 0, 2)) == {Fraction(2): 240}


@pytest.mark.parametrize("name,coset,bound", [
    ("A2", 1, 8), ("A3", 2, 6), ("D4", 3, 6), ("D5", 1, 5), ("E6", 1, 4), ("E7", 1, 4), ("A5", 3, 4),
])
def test_enumeration_matches_box_oracle(name, coset, bound):
    data = discriminant_data(parse_spec(name))
    got = dict(enumerate_norms(data, coset, bound))
    ref = box_norm_counts(data.gram, data.cosets[coset], bound)
    ref.pop(Fraction(0), None)
    assert got == ref


def test_zero_vector_excluded_only_for_trivial_coset():
    data = discriminant_data(parse_spec("A1"))
    assert Fraction(0) not in dict(enumerate_norms(data, 0, 8))
    raw = enumerate_shifted(data.gram, data.cosets[0], 8)
    assert raw[Fraction(0)] == 1


def test_truncation_reuses_cache():
    data = discriminant_data(parse_spec("D4"))
    big = enumerate_norms(data, 1, 10)
    small = enumerate_norms(data, 1, 4)
    assert small.bound == 4
    assert dict(small) == {x: c for x, c in big if x <= 4}


def test_vector_ceiling():
    data = discriminant_data(parse_spec("E8"))
    with pytest.raises(EnumerationLimitError):
        enumerate_shifted(data.gram, data.cosets[0], 10, limit=1000)
    with pytest.raises(EnumerationLimitError):
        enumerate_norms(data, 0, 10_000, limit=1000)


def test_ceiling_from_environment(monkeypatch):
    monkeypatch.setenv("ADEZ_MAX_VECTORS", "50")
    data = discriminant_data(parse_spec("D7"))
    with pytest.raises(EnumerationLimitError):
        enumerate_shifted(data.gram, data.cosets[2], 6)


def test_bad_arguments():
    data = discriminant_data(parse_spec("A2"))
    with pytest.raises(ValueError):
        enumerate_norms(data, 5, 2)
    with pytest.raises(ValueError):
        enumerate_norms(data, 0, 0)


@settings(max_examples=25, deadline=None)
@given(small_specs, st.data())
def test_negated_coset_has_same_spectrum(spec, draw):
    data = discriminant_data(spec)
    a = draw.draw(st.integers(0, data.l - 1))
    b = data.negation_index(a)
    assert dict(enumerate_norms(data, a, 6)) == dict(enumerate_norms(data, b, 6))


@settings(max_examples=25, deadline=None)
@given(small_specs, st.integers(1, 12), st.data())
def test_counts_respect_volume_bound(spec, bound, draw):
    data = discriminant_data(spec)
    a = draw.draw(st.integers(0, data.l - 1))
    total = enumerate_norms(data, a, bound).total + (1 if a == 0 else 0)
    assert total <= count_upper_bound(data, bound)


@settings(max_examples=25, deadline=None)
@given(small_specs, st.data())
def test_norms_lie_in_coset_class(spec, draw):
    # every norm is congruent to the coset norm modulo 2
    data = discriminant_data(spec)
    a = draw.draw(st.integers(0, data.l - 1))
    for x, _ in enumerate_norms(data, a, 8):
        assert (x - data.coset_norm(a)) % 2 == 0
