import json
from importlib import resources

import numpy as np
import pytest

from toeplitz_chains.correlation_matrix import fixture_char_poly
from toeplitz_chains.errors import ValidationError
from toeplitz_chains.smith_fixtures import (
    REFERENCE_PARAMS,
    build_fixture,
    fixture_from_document,
    gorodetsky_ratio,
    load_fixture,
    smith_identity_residual,
    write_reference_fixtures,
)

NAMES = sorted(REFERENCE_PARAMS)


@pytest.mark.parametrize("name", NAMES)
def test_shipped_files_match_builders(name, tmp_path):
    written = write_reference_fixtures(tmp_path)
    assert len(written) == len(NAMES)
    family, params = REFERENCE_PARAMS[name]
    fresh = build_fixture(family, **params)
    shipped = load_fixture(name)
    assert shipped.model == fresh.model
    for N in (1, 3, 6):
        for lam in (0.3, 0.8 + 0.1j):
            assert abs(gorodetsky_ratio(shipped, N, lam) - gorodetsky_ratio(fresh, N, lam)) \
                <= 1e-12 * abs(gorodetsky_ratio(fresh, N, lam))


@pytest.mark.parametrize("name", ["ab_sextic_mixed", "aiii_b_quartic"])
def test_other_fixtures_against_numeric_char_poly(name):
    fix = load_fixture(name)
    rng = np.random.default_rng(3)
    for lam in rng.uniform(-1.2, 1.2, 6) + 0.3j * rng.normal(size=6):
        for N in (0, 2, 5, 9):
            ref = fixture_char_poly(fix, N, lam)
            assert abs(gorodetsky_ratio(fix, N, lam) - ref) <= 1e-8 * abs(ref)


def test_mixed_fixture_identity_holds_in_backward_sense():
    res = smith_identity_residual(load_fixture("ab_sextic_mixed"), samples=20)
    assert res.backward < 1e-12


def test_unknown_fixture_and_schema():
    with pytest.raises(ValidationError):
        load_fixture("nope")
    doc = json.loads((resources.files("toeplitz_chains") / "data" / "b_quartic_inside.json").read_text())
    doc["schema"] = 99
    with pytest.raises(ValidationError):
        fixture_from_document(doc)
