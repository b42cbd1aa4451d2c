"""Shot-limited simulation of measuring a decomposed witness.

Each setting is sampled from the exact outcome distribution of its
product eigenbasis; the witness estimate adds the per-setting weighted
frequencies.  Setting ``i`` draws from the Philox substream keyed by
(seed, i), so simulating settings in parallel reproduces a sequential
run bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg, settings
from .rng import stream

ALLOCATIONS = ("uniform", "weighted")


@dataclass
class SettingReport:
    setting_index: int
    shots: int
    counts: np.ndarray
    contribution: float
    variance: float


@dataclass
class EstimateReport:
    """Witness estimate with per-setting outcome statistics.

    ``estimate`` sums the weighted outcome frequencies over settings;
    ``std_error`` combines the plug-in sample variances, which carry an
    O(1/shots) bias that is negligible at 1000 shots and beyond.
    """

    estimate: float
    std_error: float
    per_setting: list

    def to_json_dict(self) -> dict:
        out = []
        for rep in self.per_setting:
            n_parties = int(math.log2(rep.counts.size))
            counts = {}
            for outcome, count in enumerate(rep.counts):
                bits = format(outcome, f"0{n_parties}b")
                counts[bits] = int(count)
            out.append({
                "setting": rep.setting_index,
                "shots": rep.shots,
                "counts": counts,
                "contribution": rep.contribution,
                "variance": rep.variance,
            })
        return {"estimate": self.estimate, "std_error": self.std_error,
                "per_setting": out}


def outcome_probabilities(rho, s: settings.MeasurementSetting) -> np.ndarray:
    """Born probabilities of the 2^n product outcomes of a setting.

    Depends on the directions only; rescaling the setting weights leaves
    the distribution unchanged.  Tiny negative values from roundoff are
    clamped to zero.
    """
    mat = linalg.as_matrix(getattr(rho, "matrix", rho))
    dim = 2 ** s.n_parties
    if mat.shape[0] != dim:
        raise ValueError("state and setting dimensions do not match")
    bases = [settings.eigenbasis(d.vector) for d in s.directions]
    probs = np.empty(dim)
    for outcome, bits in enumerate(np.ndindex((2,) * s.n_parties)):
        vec = np.array([1.0], dtype=complex)
        for p, b in enumerate(bits):
            vec = np.kron(vec, bases[p][b])
        probs[outcome] = float(np.real(vec.conj() @ mat @ vec))
    if probs.min() < -1e-12:
        raise ValueError("state produced a significantly negative probability")
    probs = np.clip(probs, 0.0, None)
    if abs(float(probs.sum()) - 1.0) > 1e-10:
        raise ValueError("outcome probabilities do not sum to 1")
    return probs


def sample_counts(p, shots: int, seed: int) -> np.ndarray:
    """Multinomial outcome counts, deterministic given the seed."""
    probs = np.asarray(p, dtype=float)
    if probs.min() < 0.0 or abs(float(probs.sum()) - 1.0) > 1e-8:
        raise ValueError("probabilities must be nonnegative and sum to 1")
    if shots < 0:
        raise ValueError("shots must be nonnegative")
    if shots == 0:
        return np.zeros(probs.size, dtype=np.int64)
    rng = stream(seed)
    return rng.multinomial(shots, probs / probs.sum())


def _shot_allocation(dec: settings.LocalDecomposition, shots_per_setting: int,
                     allocation: str):
    k = dec.n_settings
    if allocation == "uniform":
        return [int(shots_per_setting)] * k
    if allocation != "weighted":
        raise ValueError(f"allocation must be one of {ALLOCATIONS}")
    # shots proportional to each setting's total absolute weight, with a
    # floor of one shot so every contribution stays estimable
    budget = int(shots_per_setting) * k
    sizes = np.array([float(np.abs(s.weights).sum()) for s in dec.settings])
    if sizes.sum() == 0.0:
        return [int(shots_per_setting)] * k
    raw = budget * sizes / sizes.sum()
    alloc = np.maximum(np.floor(raw).astype(int), 1)
    order = np.argsort(-(raw - np.floor(raw)), kind="stable")
    j = 0
    while alloc.sum() < budget:
        alloc[order[j % k]] += 1
        j += 1
    big = np.argsort(-alloc, kind="stable")
    j = 0
    while alloc.sum() > budget:
        if alloc[big[j % k]] > 1:
            alloc[big[j % k]] -= 1
        j += 1
    return [int(a) for a in alloc]


def estimate_witness(rho, dec: settings.LocalDecomposition,
                     shots_per_setting: int, seed: int,
                     allocation: str = "uniform") -> EstimateReport:
    """Unbiased shot-noise estimate of the witness expectation.

    Requires a verified decomposition (residual below 1e-10).  The
    returned estimate averages, per setting, the outcome weights over the
    sampled frequencies and sums the settings.
    """
    if not dec.verified:
        raise ValueError("decomposition is not verified against its target")
    if shots_per_setting < 1:
        raise ValueError("shots_per_setting must be positive")
    shots = _shot_allocation(dec, shots_per_setting, allocation)
    reports = []
    estimate = 0.0
    var_total = 0.0
    for i, s in enumerate(dec.settings):
        probs = outcome_probabilities(rho, s)
        rng = stream(seed, i)
        counts = rng.multinomial(shots[i], probs / probs.sum())
        freqs = counts / shots[i]
        w = s.weights.ravel()
        contribution = float(w @ freqs)
        variance = float(freqs @ np.square(w - contribution))
        reports.append(SettingReport(i, shots[i], counts, contribution, variance))
        estimate += contribution
        var_total += variance / shots[i]
    return EstimateReport(estimate, math.sqrt(var_total), reports)
