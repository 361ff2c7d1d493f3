import json
import math

import numpy as np
import pytest

from tlsc.codec import (CodeTooLargeError, CyclicLayer, GridLayer, Label, TorusCode, assemble,
                        build_grid_code, build_quotient_code, derived_beta, normalize)
from tlsc.geometry import embed
from tlsc.layering import permutation_layers, polygon2d_layers
from tlsc.lattice import named_basis


def spherical_perturb(x, rng, norm):
    v = rng.standard_normal(len(x))
    v -= v.dot(x) * x
    v *= norm / np.linalg.norm(v)
    return normalize(x + v)


@pytest.fixture(scope="module")
def d4_code():
    return build_quotient_code(permutation_layers(4, 0.5), named_basis("d4"))


def test_label_text_round_trip():
    lab = Label(3, (5, 0, 12))
    assert str(lab) == "3:5,0,12"
    assert Label.parse(str(lab)) == lab
    assert Label(0, (1,)) < Label(1, (0,))
    with pytest.raises(ValueError):
        Label.parse("3-5")


def test_zero_label_is_box_origin(code03):
    for i, lay in enumerate(code03.layers):
        zero = Label(i, (0,) * len(lay.moduli))
        np.testing.assert_allclose(code03.encode(zero), embed(lay.radius.array, np.zeros(2)),
                                   atol=1e-15)


def test_cyclic_layer_points_are_orbit(code03):
    lay = next(lay for lay in code03.layers if isinstance(lay, CyclicLayer))
    M = lay.cardinality
    g1, g2 = lay.code.generators
    c = lay.radius.array
    for i in (1, 7, M - 1):
        # flat coordinates are angle times radius
        expect = embed(c, -2 * math.pi * c * np.array([g1, g2]) * i / M)
        np.testing.assert_allclose(lay.point((i,)), expect, atol=1e-12)


def test_code_sizes(code03, code05):
    assert code03.total_M == 798
    assert [lay.cardinality for lay in code03.layers] == [20, 146, 233, 233, 146, 20]
    assert code05.total_M == 172
    assert len(code03) == 798


def test_full_scan_distance(code03, code05):
    assert code03.min_distance() >= 0.3 - 1e-12
    assert code05.min_distance() >= 0.5 - 1e-12


def test_codewords_unit_and_read_only(code03):
    P = code03.codewords()
    np.testing.assert_allclose(np.linalg.norm(P, axis=1), 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        P[0, 0] = 2.0
    labels = list(code03.labels())
    assert len(set(labels)) == 798
    for k in (0, 19, 20, 500, 797):
        assert labels[k] == code03.label_at(k)
        np.testing.assert_array_equal(P[k], code03.encode(labels[k]))


def test_noiseless_round_trip(code03):
    for lab in code03.labels():
        for mode in ("fast", "ml"):
            r = code03.decode(code03.encode(lab), mode)
            assert r.label == lab and r.distance < 1e-12 and r.ml_certified


def test_perturbed_recovery(code03):
    rng = np.random.default_rng(11)
    for lab in code03.labels():
        x = code03.encode(lab)
        y = spherical_perturb(x, rng, 0.1485)
        assert code03.decode(y).label == lab


@pytest.mark.parametrize("fixture", ["code03", "code05"])
def test_ml_equals_brute_force(fixture, request):
    code = request.getfixturevalue(fixture)
    rng = np.random.default_rng(5)
    for _ in range(2000):
        x = normalize(rng.standard_normal(4))
        a, b = code.decode(x), code.brute_force_ml(x)
        assert a.distance == pytest.approx(b.distance, abs=1e-12)
        assert a.tori_examined <= len(code.layers)
        if abs(a.distance - b.distance) > 1e-13:
            continue
        assert a.label == b.label or np.allclose(a.codeword, b.codeword)


def test_fast_never_beats_ml(code03):
    rng = np.random.default_rng(6)
    for _ in range(500):
        x = rng.standard_normal(4)
        f, m = code03.decode(x, "fast"), code03.decode(x, "ml")
        assert m.distance <= f.distance + 1e-12
        assert f.tori_examined == 1


def test_decode_is_scale_invariant(code03):
    rng = np.random.default_rng(7)
    for _ in range(100):
        x = rng.standard_normal(4)
        assert code03.decode(x).label == code03.decode(37.5 * x).label


def test_degenerate_input_flagged(code03):
    r = code03.decode([1.0, 0.0, 0.0, 0.0])
    assert r.label.layer_index in range(6)
    r = code03.decode([0.3, 0.4, 0.0, 0.0])
    assert r.degenerate


def test_decode_errors(code03):
    with pytest.raises(ValueError):
        code03.decode(np.zeros(4))
    with pytest.raises(ValueError):
        code03.decode(np.ones(6))
    with pytest.raises(ValueError):
        code03.decode(np.ones(4), "exact")
    with pytest.raises(ValueError):
        code03.encode(Label(9, (0,)))
    with pytest.raises(ValueError):
        code03.encode(Label(2, (233,)))
    with pytest.raises(ValueError):
        code03.encode(Label(2, (1, 1)))


def test_assemble_checks():
    fam = polygon2d_layers(0.5)
    with pytest.raises(ValueError):
        assemble(fam, [])
    grid = build_grid_code(fam)
    with pytest.raises(ValueError):
        assemble(fam, grid.layers[:-1])
    with pytest.raises(ValueError):
        assemble(fam, list(reversed(grid.layers)))


def test_grid_code(code05):
    grid = build_grid_code(polygon2d_layers(0.5))
    assert grid.total_M == 144
    assert all(isinstance(lay, GridLayer) for lay in grid.layers)
    assert grid.min_distance() >= 0.5 - 1e-12
    assert grid.total_M <= code05.total_M


def test_json_round_trip(tmp_path, code03, d4_code):
    for code in (code03, d4_code):
        path = tmp_path / "code.json"
        code.save(path)
        back = TorusCode.load(path)
        assert back.total_M == code.total_M
        np.testing.assert_allclose(back.codewords(), code.codewords(), atol=1e-15)
        assert back.dumps() == code.dumps()
    obj = json.loads(code03.dumps())
    assert obj["total_M"] == "798" and obj["schema"] == 1


def test_random_label_uniform(code05):
    rng = np.random.default_rng(8)
    counts = np.zeros(len(code05.layers))
    n = 20000
    for _ in range(n):
        counts[code05.random_label(rng).layer_index] += 1
    sizes = np.array([lay.cardinality for lay in code05.layers])
    expect = n * sizes / sizes.sum()
    chi2 = float(((counts - expect) ** 2 / expect).sum())
    assert chi2 < 20


def test_small_quotient_code(d4_code):
    assert d4_code.total_M == 1280
    assert d4_code.min_distance() >= 0.5 - 1e-12
    rng = np.random.default_rng(9)
    for _ in range(100):
        x = normalize(rng.standard_normal(8))
        a, b = d4_code.decode(x), d4_code.brute_force_ml(x)
        assert a.distance == pytest.approx(b.distance, abs=1e-12)
        assert not a.suboptimal
    for k in range(0, 1280, 37):
        lab = d4_code.label_at(k)
        assert d4_code.decode(d4_code.encode(lab)).label == lab


def test_derived_beta_guard():
    with pytest.raises(ValueError):
        derived_beta(polygon2d_layers(0.5))


def test_leech_round_trip(leech_code):
    assert leech_code.total_M == 24 * 11 * 2 ** 105
    rng = np.random.default_rng(10)
    for _ in range(10):
        lab = leech_code.random_label(rng)
        x = leech_code.encode(lab)
        assert np.linalg.norm(x) == pytest.approx(1.0)
        r = leech_code.decode(x)
        assert r.label == lab and r.distance < 1e-9
    with pytest.raises(CodeTooLargeError):
        leech_code.brute_force_ml(np.ones(48))
    with pytest.raises(CodeTooLargeError):
        leech_code.codewords()


def test_leech_noisy_decode_is_labelled(leech_code):
    rng = np.random.default_rng(12)
    lab = leech_code.random_label(rng)
    y = spherical_perturb(leech_code.encode(lab), rng, 0.06)
    r = leech_code.decode(y)
    assert r.distance > 0
    if not r.ml_certified:
        assert r.suboptimal
