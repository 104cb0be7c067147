import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sandbox_game import errors
from sandbox_game.core import (
    AMStrategy,
    MStrategy,
    NaturalStrategy,
    SettingClass,
    WorldSetting,
    classify_setting,
    load_setting,
    natural_strategy,
    save_setting,
    setting_from_dict,
    utility_am,
    utility_m,
    validate_setting,
)

THREE = ([0.1, 0.2, 0.7], [0.07, 0.14, 0.21])


def outcome_tree(s, Pi, rho):
    """Utilities by walking every (real type, sandbox) branch explicitly."""
    u_am = u_m = 0.0
    for r in range(s.n):
        e_r, d_r = s.existence[r], s.defended[r]
        u_m += (e_r - d_r) * rho[r]
        no_box = 1.0 - sum(Pi[r])
        for m in range(s.n + 1):
            p = no_box if m == s.n else Pi[r][m]
            caught = 0.0 if m == s.n else rho[m]
            u_am += d_r * p * caught
            u_am += d_r * p * (1 - caught) * (1 - rho[r])
            u_m += d_r * p * (1 - caught) * rho[r]
    return u_am, u_m


def test_validation_rescales_tiny_drift():
    s = validate_setting([0.4, 0.6 + 5e-7], [0.4, 0.3])
    assert s.existence.sum() == pytest.approx(1.0, abs=1e-15)
    # both vectors are divided by the same factor
    assert s.defended[0] / s.existence[0] == pytest.approx(1.0)


@pytest.mark.parametrize("e, d, exc", [
    ([], [], errors.EmptyUniverse),
    ([0.5, 0.6], [0.1, 0.1], errors.ExistenceNotNormalized),
    ([0.5, 0.5], [-0.1, 0.1], errors.NegativeEntry),
    ([0.5, 0.5], [0.6, 0.1], errors.DefendedExceedsExistence),
    ([1.0, 0.0], [0.5, 0.0], errors.ZeroExistence),
    ([0.5, 0.5], [0.1], errors.DimensionMismatch),
])
def test_validation_errors(e, d, exc):
    with pytest.raises(exc):
        validate_setting(e, d)


def test_validation_errors_are_value_errors():
    with pytest.raises(ValueError):
        validate_setting([0.5, 0.5], [0.6, 0.1])


def test_setting_is_read_only():
    s = validate_setting(*THREE)
    with pytest.raises(ValueError):
        s.existence[0] = 0.5


@pytest.mark.parametrize("e, d, cls", [
    ([0.4, 0.6], [0.4, 0.6], SettingClass.FULLY_DEFENDED),
    ([1.0], [1.0], SettingClass.FULLY_DEFENDED),
    (*THREE, SettingClass.AT_MOST_HALF),
    ([0.5, 0.5], [0.25, 0.25], SettingClass.AT_MOST_HALF),
    ([0.6, 0.4], [0.6, 0.0], SettingClass.SINGLE_TYPE_DEFENDED),
    ([0.5, 0.5], [0.45, 0.35], SettingClass.HARD),
])
def test_classify(e, d, cls):
    assert classify_setting(validate_setting(e, d)) is cls


def test_two_type_direct_utilities():
    s = validate_setting([0.4, 0.6], [0.4, 0.6])
    # AM always emulates B, M attacks only A
    assert utility_am(s, [0.0, 1.0], [1.0, 0.0]) == pytest.approx(0.6, abs=1e-12)
    assert utility_m(s, [0.0, 1.0], [1.0, 0.0]) == pytest.approx(0.4, abs=1e-12)
    # Existence against the same M: 0.6 undefended-by-M plus 0.4 * 0.4 caught
    assert utility_am(s, [0.4, 0.6], [1.0, 0.0]) == pytest.approx(0.76, abs=1e-12)
    assert utility_m(s, [0.4, 0.6], [1.0, 0.0]) == pytest.approx(0.24, abs=1e-12)


def test_identity_matrix_utilities():
    s = validate_setting([0.3, 0.7], [0.3, 0.7])
    am = AMStrategy.sophisticated(np.eye(2))
    assert utility_am(s, am, [0.5, 0.5]) == pytest.approx(0.75, abs=1e-12)
    assert utility_m(s, am, [0.5, 0.5]) == pytest.approx(0.25, abs=1e-12)


def test_three_type_natural_strategies():
    s = validate_setting(*THREE)
    got = {ns: natural_strategy(s, ns).pi for ns in NaturalStrategy}
    np.testing.assert_allclose(got[NaturalStrategy.EXISTENCE], [0.1, 0.2, 0.7])
    np.testing.assert_allclose(got[NaturalStrategy.DEFENDED], [1 / 6, 1 / 3, 1 / 2])
    np.testing.assert_allclose(got[NaturalStrategy.UNDEFENDED], np.array([0.03, 0.06, 0.49]) / 0.58)
    np.testing.assert_allclose(got[NaturalStrategy.PCT_DEFENDED], np.array([0.7, 0.7, 0.3]) / 1.7)
    np.testing.assert_allclose(got[NaturalStrategy.PCT_UNDEFENDED], np.array([0.3, 0.3, 0.7]) / 1.3)
    np.testing.assert_allclose(got[NaturalStrategy.MAJORITY], [0, 0, 1])
    np.testing.assert_allclose(got[NaturalStrategy.UNIFORM], [1 / 3] * 3)


def test_majority_tie_goes_to_first_type():
    s = validate_setting([0.5, 0.5], [0.5, 0.5])
    np.testing.assert_array_equal(natural_strategy(s, "majority").pi, [1.0, 0.0])


def test_undefended_needs_undefended_mass():
    s = validate_setting([0.4, 0.6], [0.4, 0.6])
    with pytest.raises(errors.UndefinedStrategy):
        natural_strategy(s, "undefended")


def test_strategy_validation():
    with pytest.raises(errors.ValidationError):
        AMStrategy.naive([0.7, 0.7])
    with pytest.raises(errors.ValidationError):
        MStrategy([1.2, 0.0])
    with pytest.raises(errors.DimensionMismatch):
        AMStrategy.sophisticated(np.ones((2, 3)) / 3)
    assert MStrategy([0.0, 1.0]).is_deterministic
    assert AMStrategy.naive([0.2, 0.3]).expanded().as_naive().pi.tolist() == [0.2, 0.3]


def test_json_round_trip(tmp_path):
    s = validate_setting(*THREE, labels=["A", "B", "C"])
    path = tmp_path / "s.json"
    save_setting(s, path)
    back = load_setting(path)
    np.testing.assert_array_equal(back.existence, s.existence)
    np.testing.assert_array_equal(back.defended, s.defended)
    assert back.labels == ["A", "B", "C"]


def test_json_missing_field():
    with pytest.raises(errors.ValidationError):
        setting_from_dict({"existence": [1.0]})


@st.composite
def instances(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    raw = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n)))
    e = raw / raw.sum()
    d = e * np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n)))
    rows = np.array(draw(st.lists(st.lists(st.floats(0.01, 1.0), min_size=n + 1, max_size=n + 1),
                                  min_size=n, max_size=n)))
    Pi = (rows / rows.sum(axis=1, keepdims=True))[:, :n]
    rho = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n)))
    return WorldSetting(e, d), Pi, rho


@settings(max_examples=200, deadline=None)
@given(instances())
def test_utilities_match_outcome_tree(inst):
    s, Pi, rho = inst
    am = AMStrategy.sophisticated(Pi)
    want_am, want_m = outcome_tree(s, Pi, rho)
    assert utility_am(s, am, rho) == pytest.approx(want_am, abs=1e-12)
    assert utility_m(s, am, rho) == pytest.approx(want_m, abs=1e-12)
    assert -1e-12 <= utility_am(s, am, rho) <= s.total_defended + 1e-12


@settings(max_examples=100, deadline=None)
@given(instances())
def test_naive_vector_equals_repeated_rows(inst):
    s, Pi, rho = inst
    pi = Pi[0]
    assert utility_am(s, AMStrategy.naive(pi), rho) == pytest.approx(
        utility_am(s, AMStrategy.sophisticated(np.tile(pi, (s.n, 1))), rho), abs=1e-14)
