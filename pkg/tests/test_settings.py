import itertools
import math

import numpy as np
import pytest

from witkit import linalg, pauli, settings, states, witnesses

INV_ROOT2 = 1.0 / math.sqrt(2.0)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)
AX = {1: SX, 2: SY, 3: SZ}


def random_setting(rng, n_parties=3):
    vecs = rng.standard_normal((n_parties, 3))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    weights = rng.standard_normal((2,) * n_parties)
    return settings.setting(vecs, weights)


def test_direction_canonicalization():
    d1 = settings.direction([0.0, 0.0, -1.0])
    d2 = settings.direction([0.0, 0.0, 1.0])
    assert d1 == d2
    d3 = settings.direction([-2.0, 1.0, 0.0])
    assert d3.components[0] > 0
    assert abs(np.linalg.norm(d3.vector) - 1.0) < 1e-14
    with pytest.raises(ValueError):
        settings.direction([0.0, 0.0, 0.0])


def test_setting_canonicalization_preserves_operator():
    rng = np.random.default_rng(4)
    weights = rng.standard_normal((2, 2))
    plain = settings.setting([[0, 0, 1.0], [1.0, 0, 0]], weights)
    flipped = settings.setting([[0, 0, -1.0], [-1.0, 0, 0]],
                               weights[::-1, ::-1])
    assert np.abs(settings.setting_operator(plain)
                  - settings.setting_operator(flipped)).max() < 1e-14


def test_setting_operator_projector_case():
    w = np.zeros((2, 2))
    w[0, 0] = 1.0
    op = settings.setting_operator(
        settings.setting([[0, 0, 1.0], [0, 0, 1.0]], w))
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    assert np.abs(op - expected).max() < 1e-14


def test_setting_operator_parity_weights():
    # oracle: expand the product of (identity +/- sigma_z)/2 projectors
    w = np.zeros((2, 2, 2))
    for bits in np.ndindex(w.shape):
        w[bits] = (-1.0) ** sum(bits) / 8.0
    op = settings.setting_operator(settings.setting([[0, 0, 1.0]] * 3, w))
    expected = linalg.kron_all([SZ, SZ, SZ]) / 8.0
    assert np.abs(op - expected).max() < 1e-14


def test_setting_operator_diagonal_direction():
    d = np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
    w = np.zeros((2, 2, 2))
    for bits in np.ndindex(w.shape):
        w[bits] = (-1.0) ** sum(bits) * math.sqrt(2.0) / 8.0
    op = settings.setting_operator(settings.setting([d] * 3, w))
    expected = linalg.kron_all([SX + SY] * 3) / 16.0
    assert np.abs(op - expected).max() < 1e-12


def test_setting_operator_commutes_with_local_observables():
    rng = np.random.default_rng(15)
    for _ in range(10):
        s = random_setting(rng)
        op = settings.setting_operator(s)
        for p, d in enumerate(s.directions):
            n_sigma = d.vector[0] * SX + d.vector[1] * SY + d.vector[2] * SZ
            factors = [I2, I2, I2]
            factors[p] = n_sigma
            local = linalg.kron_all(factors)
            comm = op @ local - local @ op
            assert np.abs(comm).max() < 1e-12


def test_setting_slices_are_rank_one():
    rng = np.random.default_rng(16)
    for _ in range(25):
        s = random_setting(rng)
        c = pauli.to_pauli(settings.setting_operator(s))
        for pairing in pauli.PAIRINGS_3:
            fam = pauli.slice_family(c, pairing)
            assert linalg.numerical_rank(fam.matrices) <= 1


@pytest.mark.parametrize("name,count,target_op", [
    ("anton", 3, lambda: witnesses.witness_w0().operator),
    ("ghz", 4, lambda: witnesses.witness_ghz().operator),
    ("w1", 5, lambda: witnesses.witness_w1().operator),
    ("w2", 4, lambda: witnesses.witness_w2().operator),
])
def test_catalog_decompositions(name, count, target_op):
    dec = settings.catalog_decomposition(name)
    assert dec.n_settings == count
    assert dec.residual < 1e-12
    assert np.abs(dec.operator() - target_op()).max() < 1e-12


def test_anton_general_parameters():
    for alpha, beta in ((INV_ROOT2, INV_ROOT2), (0.6, 0.8), (0.96, -0.28)):
        dec = settings.catalog_decomposition("anton", alpha, beta)
        target = witnesses.witness_phi(alpha, beta).operator
        assert np.linalg.norm(dec.operator() - target) < 1e-12
        assert dec.n_settings == 3
        assert dec.n_projectors == 6
    # a product projector collapses to the single zz setting
    dec = settings.catalog_decomposition("anton", 1.0, 0.0)
    assert dec.n_settings == 1


def test_sanpera5_decomposition():
    for alpha, beta in ((0.6, 0.8), (INV_ROOT2, INV_ROOT2), (0.3, math.sqrt(0.91))):
        dec = settings.catalog_decomposition("sanpera5", alpha, beta)
        assert dec.n_settings == 4
        assert dec.n_projectors == 5
        assert dec.residual < 1e-12
    with pytest.raises(ValueError):
        settings.catalog_decomposition("sanpera5", INV_ROOT2, -INV_ROOT2)
    with pytest.raises(KeyError):
        settings.catalog_decomposition("nope")


def test_w2_catalog_reproduces_value():
    dec = settings.catalog_decomposition("w2")
    ghz = states.ghz_state().projector()
    val = float(np.real(np.trace(dec.operator() @ ghz)))
    assert abs(val + 0.5) < 1e-12


def test_verify_decomposition_reports_residual():
    dec = settings.catalog_decomposition("ghz")
    res = settings.verify_decomposition(dec, witnesses.witness_ghz().operator)
    assert res < 1e-12
    res_wrong = settings.verify_decomposition(dec, np.eye(8))
    assert res_wrong > 1.0
    assert not dec.verified


def brute_force_min_cover(cover_sets, universe):
    for size in range(1, len(cover_sets) + 1):
        for combo in itertools.combinations(range(len(cover_sets)), size):
            if frozenset().union(*(cover_sets[j] for j in combo)) >= universe:
                return size
    raise AssertionError("no cover")


def axis_candidates(n_parties):
    axes = [settings.AXES["x"], settings.AXES["y"], settings.AXES["z"]]
    return [axes] * n_parties


def test_group_pauli_terms_w0():
    c = pauli.to_pauli(witnesses.witness_w0().operator)
    dec = settings.group_pauli_terms(c, axis_candidates(2))
    assert dec.n_settings == 3
    assert dec.residual < 1e-12


def test_group_pauli_terms_ghz_matches_brute_force():
    c = pauli.to_pauli(witnesses.witness_ghz().operator)
    dec = settings.group_pauli_terms(c, axis_candidates(3))
    assert dec.residual < 1e-12
    # oracle: exhaustive cover over all axis settings
    support = c.support()
    combos = list(itertools.product(range(3), repeat=3))
    cover_sets = []
    for combo in combos:
        covered = frozenset(
            term for term in support
            if all(i == 0 or i == combo[p] + 1 for p, i in enumerate(term)))
        cover_sets.append(covered)
    assert dec.n_settings == brute_force_min_cover(cover_sets, frozenset(support))
    assert dec.n_settings == 5
    dir_sets = {tuple(np.argmax(np.abs(d.vector)) for d in s.directions)
                for s in dec.settings}
    assert dir_sets == {(2, 2, 2), (0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)}


def test_group_pauli_terms_identity_and_errors():
    c = pauli.to_pauli(np.eye(8), 3)
    dec = settings.group_pauli_terms(c, axis_candidates(3))
    assert dec.n_settings == 1
    c_ghz = pauli.to_pauli(witnesses.witness_ghz().operator)
    xz_only = [[settings.AXES["x"], settings.AXES["z"]]] * 3
    with pytest.raises(ValueError):
        settings.group_pauli_terms(c_ghz, xz_only)


def test_group_pauli_terms_greedy_still_verifies():
    c = pauli.to_pauli(witnesses.witness_w1().operator)
    exact = settings.group_pauli_terms(c, axis_candidates(3))
    greedy = settings.group_pauli_terms(c, axis_candidates(3), exact=False)
    assert exact.residual < 1e-12 and greedy.residual < 1e-12
    assert exact.n_settings <= greedy.n_settings


def test_decomposition_search_ghz():
    c = pauli.to_pauli(witnesses.witness_ghz().operator)
    result = settings.decomposition_search(c, max_settings=4, restarts=200, seed=7)
    assert result.success
    assert result.residual < 1e-8
    assert result.decomposition.n_settings <= 4
    assert np.linalg.norm(result.decomposition.operator()
                          - witnesses.witness_ghz().operator) < 1e-8


def test_decomposition_search_w0_limits():
    c = pauli.to_pauli(witnesses.witness_w0().operator)
    ok = settings.decomposition_search(c, max_settings=3, restarts=50, seed=2)
    assert ok.success and ok.residual < 1e-8
    # two settings cannot reproduce a rank-three reduced block
    fail = settings.decomposition_search(c, max_settings=2, restarts=50, seed=2)
    assert not fail.success
    assert fail.decomposition is None
    assert fail.residual > 1e-8


def test_decomposition_search_single_projector():
    psi = states.random_product_state(3, seed=5)
    c = pauli.to_pauli(psi.projector())
    result = settings.decomposition_search(c, max_settings=1, restarts=50, seed=1)
    assert result.success and result.residual < 1e-10


def test_decomposition_search_deterministic():
    c = pauli.to_pauli(witnesses.witness_w0().operator)
    r1 = settings.decomposition_search(c, max_settings=3, restarts=20, seed=11)
    r2 = settings.decomposition_search(c, max_settings=3, restarts=20, seed=11)
    assert r1.residual == r2.residual
    assert r1.restarts_used == r2.restarts_used
    if r1.success:
        for s1, s2 in zip(r1.decomposition.settings, r2.decomposition.settings):
            assert np.array_equal(s1.weights, s2.weights)
            assert s1.directions == s2.directions


def test_json_round_trip():
    dec = settings.catalog_decomposition("ghz")
    data = settings.decomposition_to_json_dict(dec)
    assert data["target"] == "ghz"
    assert len(data["settings"]) == 4
    for entry in data["settings"]:
        assert len(entry["directions"]) == 3
        for bits in entry["weights"]:
            assert len(bits) == 3 and set(bits) <= {"0", "1"}
    back = settings.decomposition_from_json_dict(data)
    res = settings.verify_decomposition(back, witnesses.witness_ghz().operator)
    assert res < 1e-12


def test_group_count_never_below_certified_bound():
    from witkit import certify
    for name, wit in (("anton", witnesses.witness_w0()),
                      ("ghz", witnesses.witness_ghz()),
                      ("w1", witnesses.witness_w1())):
        c = pauli.to_pauli(wit.operator)
        dec = settings.group_pauli_terms(c, axis_candidates(wit.n_qubits))
        cert = certify.lower_bound(wit, restarts=100, seed=1)
        assert dec.n_settings >= cert.bound
