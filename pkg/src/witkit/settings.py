"""Local von Neumann measurement settings and witness decompositions.

One measurement setting is a choice of a Bloch direction per party plus
a real weight for each outcome bitstring; its operator is the weighted
sum of the product eigenprojectors and is exactly what one collective
setting of local measurement devices can estimate.  A decomposition is a
list of settings whose operators sum to a target witness; the number of
settings is the quantity the catalog entries and the randomized search
minimize.

Directions are canonicalized so that n and -n describe the same setting
(the weight tensor absorbs the outcome relabeling).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg, pauli, witnesses
from .rng import stream

VERIFY_TOL = 1e-10
SEARCH_TOL = 1e-8

AXES = {
    "x": np.array([1.0, 0.0, 0.0]),
    "y": np.array([0.0, 1.0, 0.0]),
    "z": np.array([0.0, 0.0, 1.0]),
}
_AXIS_VECTORS = (AXES["x"], AXES["y"], AXES["z"])


def canonical_direction(vec):
    """Unit vector with the first nonzero component positive, plus a flip flag."""
    v = np.asarray(vec, dtype=float).ravel()
    if v.size != 3:
        raise ValueError("a direction is a real 3-vector")
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        raise ValueError("direction vector must be nonzero")
    v = v / norm
    flip = False
    for comp in v:
        if abs(comp) > 1e-12:
            flip = comp < 0.0
            break
    return (-v if flip else v), flip


@dataclass(frozen=True)
class Direction:
    """Unit Bloch 3-vector in canonical sign convention."""

    components: tuple

    def __post_init__(self):
        v = np.asarray(self.components, dtype=float)
        if v.size != 3 or abs(float(np.linalg.norm(v)) - 1.0) > 1e-12:
            raise ValueError("Direction needs a unit 3-vector")
        canon, flip = canonical_direction(v)
        if flip:
            raise ValueError("Direction components must be in canonical sign")
        object.__setattr__(self, "components", tuple(float(c) for c in v))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.components)


def direction(vec) -> Direction:
    """Canonicalize an arbitrary nonzero 3-vector into a Direction."""
    canon, _ = canonical_direction(vec)
    return Direction(tuple(canon))


def eigenbasis(vec):
    """(plus, minus) eigenvectors of n . sigma for a Bloch direction n."""
    v = np.asarray(vec, dtype=float).ravel()
    nx, ny, nz = v / np.linalg.norm(v)
    theta = math.acos(min(1.0, max(-1.0, nz)))
    st = math.sin(theta)
    phase = complex(nx, ny) / st if st > 1e-12 else 1.0
    plus = np.array([math.cos(theta / 2.0), phase * math.sin(theta / 2.0)])
    minus = np.array([math.sin(theta / 2.0), -phase * math.cos(theta / 2.0)])
    return plus, minus


@dataclass
class MeasurementSetting:
    """One Bloch direction per party plus per-outcome weights.

    ``weights`` has shape (2,)*n_parties; entry [r, s, ...] weighs the
    outcome where each party sees its +1 (bit 0) or -1 (bit 1) projector.
    Build instances through :func:`setting`, which canonicalizes the
    directions and relabels outcomes consistently.
    """

    directions: tuple
    weights: np.ndarray

    def __post_init__(self):
        n = len(self.directions)
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (2,) * n:
            raise ValueError(f"weights must have shape {(2,) * n}")
        self.directions = tuple(self.directions)
        self.weights = w

    @property
    def n_parties(self) -> int:
        return len(self.directions)


def setting(direction_vectors, weights) -> MeasurementSetting:
    """Build a MeasurementSetting from raw direction vectors and weights."""
    vecs = list(direction_vectors)
    w = np.asarray(weights, dtype=float).reshape((2,) * len(vecs)).copy()
    dirs = []
    for p, vec in enumerate(vecs):
        if isinstance(vec, Direction):
            dirs.append(vec)
            continue
        canon, flip = canonical_direction(vec)
        if flip:
            w = np.flip(w, axis=p)
        dirs.append(Direction(tuple(canon)))
    return MeasurementSetting(tuple(dirs), w)


def setting_operator(s: MeasurementSetting) -> np.ndarray:
    """Weighted sum of product eigenprojectors; commutes with every n . sigma."""
    projs = []
    for d in s.directions:
        plus, minus = eigenbasis(d.vector)
        projs.append((np.outer(plus, plus.conj()), np.outer(minus, minus.conj())))
    dim = 2 ** s.n_parties
    op = np.zeros((dim, dim), dtype=complex)
    for bits in np.ndindex(s.weights.shape):
        c = s.weights[bits]
        if c == 0.0:
            continue
        op += c * linalg.kron_all([projs[p][b] for p, b in enumerate(bits)])
    return op


def weights_from_masks(n_parties: int, mask_terms: dict) -> np.ndarray:
    """Outcome weights realizing ``sum_m g_m * prod_{p in m} (n_p . sigma)``.

    ``mask_terms`` maps 0/1 tuples (which parties carry the direction
    operator rather than identity) to real coefficients.
    """
    w = np.zeros((2,) * n_parties)
    for bits in np.ndindex(w.shape):
        total = 0.0
        for mask, coeff in mask_terms.items():
            parity = sum(b & m for b, m in zip(bits, mask))
            total += coeff * (-1.0 if parity % 2 else 1.0)
        w[bits] = total
    return w


@dataclass
class LocalDecomposition:
    """A list of settings reconstructing a target operator."""

    target_label: str
    settings: list
    residual: float = math.nan

    @property
    def n_settings(self) -> int:
        return len(self.settings)

    @property
    def n_projectors(self) -> int:
        """Number of weighted product projectors across all settings."""
        return int(sum(np.count_nonzero(np.abs(s.weights) > 1e-12)
                       for s in self.settings))

    def operator(self) -> np.ndarray:
        if not self.settings:
            raise ValueError("decomposition has no settings")
        return sum(setting_operator(s) for s in self.settings)

    @property
    def verified(self) -> bool:
        return self.residual == self.residual and self.residual < VERIFY_TOL


def verify_decomposition(dec: LocalDecomposition, target) -> float:
    """Frobenius distance between the summed settings and the target."""
    t = linalg.as_matrix(getattr(target, "operator", target))
    residual = float(np.linalg.norm(dec.operator() - t))
    dec.residual = residual
    return residual


# --- catalog decompositions -------------------------------------------------

def _drop_empty(setts):
    return [s for s in setts if np.abs(s.weights).max() > 1e-15]


def _anton(alpha: float, beta: float, label: str) -> LocalDecomposition:
    # three paired axis settings: zz carries the diagonal part, xx and yy
    # together reproduce the |01><10| + |10><01| coherence
    if abs(alpha ** 2 + beta ** 2 - 1.0) > 1e-10:
        raise ValueError("alpha^2 + beta^2 must equal 1")
    ab = alpha * beta
    zz = np.zeros((2, 2))
    zz[0, 0] = alpha ** 2
    zz[1, 1] = beta ** 2
    xx = np.zeros((2, 2))
    xx[0, 0] = xx[1, 1] = ab
    yy = np.zeros((2, 2))
    yy[0, 1] = yy[1, 0] = -ab
    setts = [
        setting([AXES["z"], AXES["z"]], zz),
        setting([AXES["x"], AXES["x"]], xx),
        setting([AXES["y"], AXES["y"]], yy),
    ]
    dec = LocalDecomposition(label, _drop_empty(setts))
    verify_decomposition(dec, witnesses.witness_phi(alpha, beta))
    return dec


def _ghz_settings(identity_weight: float):
    d_plus = np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
    d_minus = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
    zzz = weights_from_masks(3, {
        (0, 0, 0): identity_weight,
        (0, 1, 1): -1.0 / 8.0,
        (1, 0, 1): -1.0 / 8.0,
        (1, 1, 0): -1.0 / 8.0,
    })
    xxx = weights_from_masks(3, {(1, 1, 1): -2.0 / 8.0})
    diag = weights_from_masks(3, {(1, 1, 1): math.sqrt(2.0) / 8.0})
    return [
        setting([AXES["z"]] * 3, zzz),
        setting([AXES["x"]] * 3, xxx),
        setting([d_plus] * 3, diag),
        setting([d_minus] * 3, diag),
    ]


def _ghz() -> LocalDecomposition:
    dec = LocalDecomposition("ghz", _ghz_settings(5.0 / 8.0))
    verify_decomposition(dec, witnesses.witness_ghz())
    return dec


def _w2() -> LocalDecomposition:
    # same four settings, identity weight lowered by 1/4
    dec = LocalDecomposition("w2", _ghz_settings(5.0 / 8.0 - 0.25))
    verify_decomposition(dec, witnesses.witness_w2())
    return dec


def _w1() -> LocalDecomposition:
    zzz = weights_from_masks(3, {
        (0, 0, 0): 17.0 / 24.0,
        (1, 1, 1): 7.0 / 24.0,
        (1, 0, 0): 3.0 / 24.0,
        (0, 1, 0): 3.0 / 24.0,
        (0, 0, 1): 3.0 / 24.0,
        (1, 1, 0): 5.0 / 24.0,
        (1, 0, 1): 5.0 / 24.0,
        (0, 1, 1): 5.0 / 24.0,
    })
    setts = [setting([AXES["z"]] * 3, zzz)]
    root2 = math.sqrt(2.0)
    for u in (AXES["x"], -AXES["x"], AXES["y"], -AXES["y"]):
        tilted = (AXES["z"] + u) / root2
        w = np.zeros((2, 2, 2))
        for bits in np.ndindex(w.shape):
            factors = [1.0 + root2 * (-1.0 if b else 1.0) for b in bits]
            w[bits] = -(1.0 / 24.0) * factors[0] * factors[1] * factors[2]
        setts.append(setting([tilted] * 3, w))
    dec = LocalDecomposition("w1", setts)
    verify_decomposition(dec, witnesses.witness_w1())
    return dec


def _sanpera5(alpha: float, beta: float, label: str) -> LocalDecomposition:
    """Five product projectors grouped into four settings.

    Valid for strictly positive Schmidt coefficients only; the
    construction degenerates when alpha * beta <= 0.
    """
    if abs(alpha ** 2 + beta ** 2 - 1.0) > 1e-10:
        raise ValueError("alpha^2 + beta^2 must equal 1")
    if alpha * beta <= 0.0:
        raise ValueError(
            "the five-projector decomposition requires alpha, beta > 0 "
            "(nonnegative Schmidt coefficient convention)")
    c = math.sqrt(alpha / (alpha + beta))
    s = math.sqrt(beta / (alpha + beta))
    cs = c * s
    cz = c * c - s * s
    root3 = math.sqrt(3.0)
    bloch = [
        np.array([-cs, -root3 * cs, cz]),
        np.array([-cs, root3 * cs, cz]),
        np.array([2.0 * cs, 0.0, cz]),
    ]
    weight = (alpha + beta) ** 2 / 3.0
    setts = []
    for vec in bloch:
        w = np.zeros((2, 2))
        w[0, 0] = weight
        setts.append(setting([vec, vec], w))
    zz = np.zeros((2, 2))
    zz[0, 1] = zz[1, 0] = -alpha * beta
    setts.append(setting([AXES["z"], AXES["z"]], zz))
    dec = LocalDecomposition(label, setts)
    verify_decomposition(dec, witnesses.witness_phi(alpha, beta))
    return dec


INV_ROOT2 = 1.0 / math.sqrt(2.0)

CATALOG_NAMES = ("anton", "ghz", "w1", "w2", "sanpera5")


def catalog_decomposition(name: str, alpha: float | None = None,
                          beta: float | None = None) -> LocalDecomposition:
    """Curated decompositions by name: anton, ghz, w1, w2, sanpera5.

    ``anton`` (three axis settings) and ``sanpera5`` (five product
    projectors in four settings) take Schmidt parameters and default to
    the w0 witness angles ``alpha = -beta = 1/sqrt(2)`` and to
    ``alpha = beta = 1/sqrt(2)`` respectively.
    """
    if name == "anton":
        a = INV_ROOT2 if alpha is None else alpha
        b = -INV_ROOT2 if beta is None else beta
        label = "w0" if (abs(a - INV_ROOT2) < 1e-12 and abs(b + INV_ROOT2) < 1e-12) \
            else f"phi({a:g},{b:g})"
        return _anton(a, b, label)
    if name == "ghz":
        return _ghz()
    if name == "w1":
        return _w1()
    if name == "w2":
        return _w2()
    if name == "sanpera5":
        a = INV_ROOT2 if alpha is None else alpha
        b = INV_ROOT2 if beta is None else beta
        return _sanpera5(a, b, f"phi({a:g},{b:g})")
    raise KeyError(f"unknown decomposition {name!r}; pick one of {CATALOG_NAMES}")


# --- grouping fixed Pauli terms into settings --------------------------------

def _covered_axis(d: Direction) -> int | None:
    """Axis index 1..3 the direction is parallel to, if any."""
    for a, axis_vec in enumerate(_AXIS_VECTORS, start=1):
        if abs(float(np.dot(d.vector, axis_vec))) > 1.0 - 1e-9:
            return a
    return None


def _greedy_cover(cover_sets, universe):
    chosen = []
    covered = set()
    while covered != universe:
        best = max(range(len(cover_sets)),
                   key=lambda j: len(cover_sets[j] - covered))
        if not cover_sets[best] - covered:
            raise ValueError("cover is infeasible")
        chosen.append(best)
        covered |= cover_sets[best]
    return sorted(chosen)


def _exact_min_cover(cover_sets, universe):
    # branch and bound; instances here have tiny universes, so exactness
    # is affordable and the counts quoted by callers stay trustworthy
    best = _greedy_cover(cover_sets, universe)
    best_size = len(best)

    def covering(elem):
        return [j for j in range(len(cover_sets)) if elem in cover_sets[j]]

    def dfs(covered, chosen):
        nonlocal best, best_size
        if covered == universe:
            if len(chosen) < best_size:
                best = sorted(chosen)
                best_size = len(chosen)
            return
        if len(chosen) + 1 >= best_size:
            return
        rem = universe - covered
        maxcov = max(len(s & rem) for s in cover_sets)
        if maxcov == 0:
            return
        if len(chosen) + math.ceil(len(rem) / maxcov) >= best_size:
            return
        elem = min(sorted(rem), key=lambda e: len(covering(e)))
        options = covering(elem)
        options.sort(key=lambda j: -len(cover_sets[j] & rem))
        for j in options:
            dfs(covered | cover_sets[j], chosen + [j])

    dfs(frozenset(), [])
    return best


def group_pauli_terms(c: pauli.PauliCoefficients, candidates,
                      exact: bool = True) -> LocalDecomposition:
    """Cover the fixed Pauli support of an operator with candidate settings.

    ``candidates`` lists, per party, the admissible measurement
    directions.  A term is covered by a candidate setting when each of
    its non-identity factors is parallel to that party's direction; the
    minimum-cardinality cover is found exactly (set ``exact=False`` for
    the greedy heuristic).  Because coefficients cannot be recombined
    across directions, the result upper-bounds the true minimal setting
    count without necessarily reaching it.
    """
    n = c.n_qubits
    if len(candidates) != n:
        raise ValueError(f"need one candidate list per party ({n} parties)")
    cand_dirs = []
    for party_cands in candidates:
        dirs = []
        for vec in party_cands:
            d = vec if isinstance(vec, Direction) else direction(vec)
            if all(d != prev for prev in dirs):
                dirs.append(d)
        cand_dirs.append(dirs)

    support = c.support()
    if not support:
        raise ValueError("operator has empty Pauli support")

    axis_of = [{id(d): _covered_axis(d) for d in dirs} for dirs in cand_dirs]
    cand_settings = list(itertools.product(*cand_dirs))
    cover_sets = []
    for combo in cand_settings:
        covered = frozenset(
            term for term in support
            if all(i == 0 or axis_of[p][id(combo[p])] == i
                   for p, i in enumerate(term)))
        cover_sets.append(covered)

    universe = frozenset(support)
    missing = universe - frozenset().union(*cover_sets)
    if missing:
        term = sorted(missing)[0]
        raise ValueError(
            f"term {pauli.index_string(term)} is not coverable by the "
            f"candidate directions")

    keep = [j for j in range(len(cand_settings)) if cover_sets[j]]
    cand_settings = [cand_settings[j] for j in keep]
    cover_sets = [cover_sets[j] for j in keep]

    solver = _exact_min_cover if exact else _greedy_cover
    chosen = solver(cover_sets, universe)

    assigned = {j: [] for j in chosen}
    for term in support:
        for j in chosen:
            if term in cover_sets[j]:
                assigned[j].append(term)
                break

    setts = []
    for j in chosen:
        combo = cand_settings[j]
        mask_terms: dict = {}
        for term in assigned[j]:
            mask = tuple(1 if i else 0 for i in term)
            sign = 1.0
            for p, i in enumerate(term):
                if i:
                    sign *= round(float(np.dot(combo[p].vector,
                                               _AXIS_VECTORS[i - 1])))
            key = mask
            mask_terms[key] = mask_terms.get(key, 0.0) + sign * float(c.coeffs[term])
        setts.append(MeasurementSetting(combo, weights_from_masks(n, mask_terms)))

    dec = LocalDecomposition("cover", setts)
    verify_decomposition(dec, pauli.from_pauli(c))
    return dec


# --- randomized search for few-setting decompositions ------------------------

@dataclass
class SearchResult:
    success: bool
    decomposition: LocalDecomposition | None
    residual: float
    restarts_used: int


def _mask_slices(n):
    masks = list(itertools.product((0, 1), repeat=n))
    index = {}
    for mask in masks:
        index[mask] = tuple(slice(1, 4) if m else 0 for m in mask)
    return masks, index


def _outer_all(vectors):
    out = np.array(1.0)
    for v in vectors:
        out = np.multiply.outer(out, v)
    return out


def _als_restart(target, n, k, rng, tol, max_iter):
    masks, slices = _mask_slices(n)
    blocks = {m: np.asarray(target[slices[m]], dtype=float).ravel() for m in masks}
    parties_of = {m: [p for p, b in enumerate(m) if b] for m in masks}
    scale = math.sqrt(2.0 ** n)
    ridge = 1e-14 * np.eye(k)

    dirs = np.empty((k, n, 3))
    for s_i in range(k):
        for p in range(n):
            if rng.random() < 0.5:
                dirs[s_i, p] = _AXIS_VECTORS[rng.integers(3)]
            else:
                v = rng.standard_normal(3)
                dirs[s_i, p] = v / np.linalg.norm(v)
    g = {m: np.zeros(k) for m in masks}
    outer = {}

    def refresh_outer(s_i, mask):
        ps = parties_of[mask]
        outer[s_i, mask] = np.atleast_1d(
            _outer_all([dirs[s_i, p] for p in ps])).ravel()

    for s_i in range(k):
        for mask in masks:
            refresh_outer(s_i, mask)

    def residual():
        total = 0.0
        for mask in masks:
            model = sum(g[mask][s_j] * outer[s_j, mask] for s_j in range(k))
            total += float(np.sum(np.square(blocks[mask] - model)))
        return scale * math.sqrt(total)

    history: list = []
    for it in range(max_iter):
        # weights: exact least squares per support class, directions fixed
        for mask in masks:
            design = np.stack([outer[s_j, mask] for s_j in range(k)], axis=1)
            ata = design.T @ design
            g[mask] = np.linalg.solve(ata + ridge, design.T @ blocks[mask])
        # directions: closed-form update per (setting, party), norm folded
        # back into the weights
        for s_i in range(k):
            for p in range(n):
                num = np.zeros(3)
                den = 0.0
                for mask in masks:
                    if not mask[p]:
                        continue
                    ps = parties_of[mask]
                    rest = blocks[mask] - sum(
                        g[mask][s_j] * outer[s_j, mask]
                        for s_j in range(k) if s_j != s_i)
                    b = np.moveaxis(rest.reshape((3,) * len(ps)),
                                    ps.index(p), 0).reshape(3, -1)
                    a = g[mask][s_i] * np.atleast_1d(
                        _outer_all([dirs[s_i, q] for q in ps if q != p])).ravel()
                    num += b @ a
                    den += float(a @ a)
                if den < 1e-30:
                    continue
                v = num / den
                norm_v = float(np.linalg.norm(v))
                if norm_v < 1e-14:
                    continue
                dirs[s_i, p] = v / norm_v
                for mask in masks:
                    if mask[p]:
                        g[mask][s_i] *= norm_v
                        refresh_outer(s_i, mask)
        res = residual()
        if res < tol:
            break
        # abandon the restart once even the recent linear trend could not
        # reach the tolerance within the remaining iterations
        history.append(res)
        if len(history) >= 13:
            gain = history[-13] - res
            remaining = max_iter - it - 1
            if gain * (remaining / 12.0) < res - tol:
                break
    return residual(), dirs, g


def decomposition_search(c: pauli.PauliCoefficients, max_settings: int,
                         restarts: int = 200, seed: int = 0,
                         tol: float = SEARCH_TOL,
                         max_iter: int = 300) -> SearchResult:
    """Randomized alternating least squares over directions and weights.

    Each restart draws fresh directions (axes or random unit vectors),
    then alternates exact weight solves with per-party direction updates.
    Success means the operator Frobenius residual dropped below ``tol``;
    failure is reported, not raised.  Deterministic given the seed, and
    restart ``i`` uses substream ``(seed, i)`` so parallel evaluation
    merged by (residual, restart index) matches a sequential run.
    """
    if max_settings < 1:
        raise ValueError("max_settings must be at least 1")
    n = c.n_qubits
    target = c.coeffs
    res, dirs, g, used = math.inf, None, None, restarts
    for r in range(restarts):
        trial_res, trial_dirs, trial_g = _als_restart(
            target, n, max_settings, stream(seed, r), tol, max_iter)
        if trial_res < res:
            res, dirs, g = trial_res, trial_dirs, trial_g
        if res < tol:
            used = r + 1
            break
    if res >= tol or dirs is None:
        return SearchResult(False, None, float(res), restarts)

    masks, _ = _mask_slices(n)
    gmax = max(float(np.abs(g[m]).max()) for m in masks)
    setts = []
    for s_i in range(max_settings):
        mask_terms = {m: float(g[m][s_i]) for m in masks
                      if abs(g[m][s_i]) > 1e-13 * max(1.0, gmax)}
        if not mask_terms:
            continue
        setts.append(setting(list(dirs[s_i]), weights_from_masks(n, mask_terms)))
    dec = LocalDecomposition("search", setts)
    verify_decomposition(dec, pauli.from_pauli(c))
    if dec.residual >= tol:
        return SearchResult(False, None, float(dec.residual), used)
    return SearchResult(True, dec, float(dec.residual), used)


# --- JSON wire format ---------------------------------------------------------

def decomposition_to_json_dict(dec: LocalDecomposition) -> dict:
    """Schema: {target, settings: [{directions: [[dx,dy,dz], ...], weights: {bits: w}}]}."""
    out_settings = []
    for s in dec.settings:
        weights = {}
        for bits in np.ndindex(s.weights.shape):
            w = float(s.weights[bits])
            if w != 0.0:
                weights["".join(str(b) for b in bits)] = w
        out_settings.append({
            "directions": [[float(x) for x in d.vector] for d in s.directions],
            "weights": weights,
        })
    return {"target": dec.target_label, "settings": out_settings}


def decomposition_from_json_dict(data: dict) -> LocalDecomposition:
    """Parse the wire format; residual is unset until verified."""
    setts = []
    for entry in data["settings"]:
        vecs = [np.asarray(v, dtype=float) for v in entry["directions"]]
        n = len(vecs)
        w = np.zeros((2,) * n)
        for bits_str, value in entry["weights"].items():
            if len(bits_str) != n or any(ch not in "01" for ch in bits_str):
                raise ValueError(f"bad outcome bitstring {bits_str!r}")
            w[tuple(int(ch) for ch in bits_str)] = float(value)
        setts.append(setting(vecs, w))
    return LocalDecomposition(str(data.get("target", "unknown")), setts)
