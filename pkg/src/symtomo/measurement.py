"""Pauli-basis measurement simulation and frequency extraction.

A *setting* is a string over ``XYZ`` naming the single-qubit basis measured
on each qubit (qubit 0 = leftmost character).  Outcomes are big-endian
bitstrings; bit ``0`` records the +1 eigenvalue.  An *observable* is a string
over ``IXYZ``; its operator is the tensor product of +1 eigenprojectors on
the non-identity slots, so its expectation under a state is the probability
of reading all-+1 outcomes on those slots.

Frequencies can come from multinomial sampling at finite shot count or from
exact Born probabilities ("analytic mode", histograms with ``shots=None``
whose counts hold probabilities).  For permutation-invariant states,
estimates may be pooled over all permutations of an observable and every
compatible measured setting.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .operators import HADAMARD, PAULI_I, as_matrix, num_qubits, tensor
from .symmetry import SymmetricBasis

RANK_TOL = 1e-9  # singular values below this do not count toward map rank

_AXES = "XYZ"
_OBS_LETTERS = "IXYZ"

# Unitaries mapping each axis' eigenbasis onto the computational basis
# (rows are the bra vectors of the +1 and -1 eigenstates, in that order).
_BASIS_ROTATIONS = {
    "X": HADAMARD,
    "Y": np.array([[1.0, -1.0j], [1.0, 1.0j]], dtype=complex) / np.sqrt(2.0),
    "Z": PAULI_I,
}

# +1 eigenprojectors of the three Pauli axes; identity for an "I" slot.
_PLUS_PROJECTORS = {
    "I": PAULI_I,
    "X": np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex),
    "Y": np.array([[0.5, -0.5j], [0.5j, 0.5]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex),
}


def check_setting(setting: str, n_qubits: int | None = None) -> str:
    if not setting or any(c not in _AXES for c in setting):
        raise ValueError(f"invalid measurement setting {setting!r}")
    if n_qubits is not None and len(setting) != n_qubits:
        raise ValueError(f"setting {setting!r} does not address {n_qubits} qubits")
    return setting


def check_observable(ops: str, n_qubits: int | None = None) -> str:
    if not ops or any(c not in _OBS_LETTERS for c in ops):
        raise ValueError(f"invalid observable string {ops!r}")
    if n_qubits is not None and len(ops) != n_qubits:
        raise ValueError(f"observable {ops!r} does not address {n_qubits} qubits")
    return ops


@dataclass(frozen=True, eq=False)
class OutcomeHistogram:
    """Counts per outcome bitstring for one measurement setting.

    ``shots`` is the total number of samples; ``shots=None`` marks an exact
    (analytic) record whose counts are Born probabilities summing to one.
    """

    setting: str
    counts: dict
    shots: int | None

    def __post_init__(self):
        check_setting(self.setting)
        n = len(self.setting)
        total = 0.0
        for outcome, count in self.counts.items():
            if len(outcome) != n or any(b not in "01" for b in outcome):
                raise ValueError(f"invalid outcome {outcome!r} for setting {self.setting!r}")
            if count < 0:
                raise ValueError(f"negative count for outcome {outcome!r}")
            total += count
        if self.shots is None:
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"exact histogram probabilities sum to {total!r}, not 1")
        else:
            if self.shots <= 0:
                raise ValueError("shots must be positive")
            if round(total) != self.shots or any(
                int(c) != c for c in self.counts.values()
            ):
                raise ValueError(
                    f"counts sum {total!r} does not match shots {self.shots}"
                )

    @property
    def n_qubits(self) -> int:
        return len(self.setting)


@dataclass(frozen=True, eq=False)
class ObservableRecord:
    """One observable with (optionally) an estimated frequency attached."""

    ops: str
    projector: np.ndarray
    frequency: float | None
    measured: bool


def pi_settings(n_qubits: int) -> list[str]:
    """Canonical settings for permutation-invariant states.

    One representative per multiset of axes: the letters sorted with
    X < Y < Z.  There are (n+1)(n+2)/2 of them.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    return [
        "".join(combo)
        for combo in itertools.combinations_with_replacement(_AXES, n_qubits)
    ]


def full_settings(n_qubits: int) -> list[str]:
    """All 3^n product settings, lexicographic."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    return ["".join(p) for p in itertools.product(_AXES, repeat=n_qubits)]


def _by_identity_count(strings) -> list[str]:
    return sorted(strings, key=lambda s: (s.count("I"), s))


def pi_observables(n_qubits: int) -> list[str]:
    """Canonical observable family for permutation-invariant estimation.

    One representative per multiset over I, X, Y, Z -- non-identity letters
    sorted first, identities trailing -- ordered by identity count and then
    lexicographically.  The family has (n+1)(n+2)(n+3)/6 members, matching
    the dimension of the permutation symmetry algebra.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    reps = []
    for combo in itertools.combinations_with_replacement("XYZI", n_qubits):
        non_i = sorted(c for c in combo if c != "I")
        reps.append("".join(non_i) + "I" * (n_qubits - len(non_i)))
    return _by_identity_count(reps)


def full_observables(n_qubits: int) -> list[str]:
    """All 4^n observable strings, ordered by identity count then lexicographically."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    return _by_identity_count(
        "".join(p) for p in itertools.product(_OBS_LETTERS, repeat=n_qubits)
    )


def marginal_observables(settings) -> list[str]:
    """Observables with at least one identity slot obtainable from the settings.

    Every returned string agrees with at least one setting on its non-identity
    slots, so its frequency can be computed from that setting's histogram by
    marginalization.
    """
    found = set()
    for setting in settings:
        n = len(check_setting(setting))
        for mask in itertools.product((False, True), repeat=n):
            if not any(mask):
                continue
            found.add("".join("I" if m else c for m, c in zip(mask, setting)))
    return _by_identity_count(found)


def setting_rotation(setting: str) -> np.ndarray:
    """Unitary rotating the setting's product eigenbasis onto the computational basis."""
    check_setting(setting)
    return tensor(*(_BASIS_ROTATIONS[c] for c in setting))


def observable_projector(ops: str) -> np.ndarray:
    """Tensor of +1 eigenprojectors (identity on ``I`` slots)."""
    check_observable(ops)
    return tensor(*(_PLUS_PROJECTORS[c] for c in ops))


def born_probabilities(rho, setting: str) -> np.ndarray:
    """Outcome distribution of measuring ``rho`` in the given product basis.

    Entry ``b`` is tr(P_b rho) for the rank-one product projector labeled by
    bitstring ``b``; tiny negative values from roundoff are clipped and the
    vector is renormalized.
    """
    rho = as_matrix(rho)
    check_setting(setting, num_qubits(rho.shape[0]))
    u = setting_rotation(setting)
    probs = np.real(np.einsum("ij,jk,ik->i", u, rho, u.conj()))
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def bit_labels(n_qubits: int) -> list[str]:
    return [format(i, f"0{n_qubits}b") for i in range(2**n_qubits)]


def sample_histogram(probs, shots: int, seed, setting: str) -> OutcomeHistogram:
    """Multinomial sample of an outcome distribution.

    ``seed`` may be an integer or a ``numpy.random.Generator`` (passed by
    value in the sense that an integer always reproduces the same draw).
    """
    probs = np.asarray(probs, dtype=float)
    if shots <= 0:
        raise ValueError("shots must be positive")
    if probs.ndim != 1 or abs(probs.sum() - 1.0) > 1e-9 or probs.min() < -1e-12:
        raise ValueError("probs must be a nonnegative vector summing to 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    draws = rng.multinomial(shots, np.clip(probs, 0.0, None) / probs.sum())
    labels = bit_labels(len(setting))
    counts = {lab: int(c) for lab, c in zip(labels, draws) if c > 0}
    return OutcomeHistogram(setting=setting, counts=counts, shots=int(shots))


def exact_histogram(rho, setting: str) -> OutcomeHistogram:
    """Analytic-mode histogram: counts hold exact Born probabilities."""
    probs = born_probabilities(rho, setting)
    labels = bit_labels(len(setting))
    counts = {lab: float(p) for lab, p in zip(labels, probs) if p > 0.0}
    return OutcomeHistogram(setting=setting, counts=counts, shots=None)


def sample_state(rho, settings, shots: int | None, seed=0) -> list[OutcomeHistogram]:
    """Measure a state in several settings; ``shots=None`` gives analytic records."""
    if shots is None:
        return [exact_histogram(rho, s) for s in settings]
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return [
        sample_histogram(born_probabilities(rho, s), shots, rng, s) for s in settings
    ]


def _distinct_permutations(ops: str) -> list[str]:
    return sorted({"".join(p) for p in itertools.permutations(ops)})


def _marginal_estimate(hist: OutcomeHistogram, ops: str) -> float | None:
    """All-+1 frequency of ``ops`` from one histogram, or None if incompatible."""
    slots = [i for i, c in enumerate(ops) if c != "I"]
    if any(hist.setting[i] != ops[i] for i in slots):
        return None
    total = sum(
        count
        for outcome, count in hist.counts.items()
        if all(outcome[i] == "0" for i in slots)
    )
    denom = 1.0 if hist.shots is None else float(hist.shots)
    return float(total) / denom


def extract_frequencies(histograms, targets, pi_mode: bool = False) -> list[ObservableRecord]:
    """Estimate each target observable's frequency from measured histograms.

    For every target, each histogram contributes one estimate per compatible
    observable string (the target itself, or -- in ``pi_mode`` -- any
    permutation of it); the recorded frequency is the unweighted mean of all
    contributions.  A target no histogram can estimate raises ``ValueError``.
    """
    histograms = list(histograms)
    if not histograms:
        raise ValueError("no histograms supplied")
    n = histograms[0].n_qubits
    records = []
    for ops in targets:
        check_observable(ops, n)
        variants = _distinct_permutations(ops) if pi_mode else [ops]
        estimates = [
            est
            for hist in histograms
            for variant in variants
            if (est := _marginal_estimate(hist, variant)) is not None
        ]
        if not estimates:
            raise ValueError(f"no measured setting can estimate observable {ops!r}")
        records.append(
            ObservableRecord(
                ops=ops,
                projector=observable_projector(ops),
                frequency=float(np.mean(estimates)),
                measured=True,
            )
        )
    return records


def unmeasured_records(targets) -> list[ObservableRecord]:
    """Projector-only records for observables that carry no data."""
    return [
        ObservableRecord(
            ops=check_observable(ops),
            projector=observable_projector(ops),
            frequency=None,
            measured=False,
        )
        for ops in targets
    ]


def _setting_response(basis: SymmetricBasis, setting: str) -> np.ndarray:
    """Linear map rows from basis coefficients to this setting's outcome probabilities."""
    u = setting_rotation(setting)
    rotated = np.einsum("ij,njk,lk->nil", u, basis.elements, u.conj())
    return np.real(np.einsum("nii->in", rotated))  # (2^n, r)


def select_settings(basis: SymmetricBasis, candidates, k: int) -> list[str]:
    """Greedy measurement-design: pick ``k`` settings for a symmetric family.

    At each step the candidate maximizing the rank of the stacked
    coefficients-to-probabilities map is chosen; ties fall to the candidate
    minimizing the map's condition number, then to lexicographic order.
    """
    candidates = sorted({check_setting(s, basis.n_qubits) for s in candidates})
    if not 0 < k <= len(candidates):
        raise ValueError(f"cannot pick {k} settings from {len(candidates)} candidates")
    responses = {s: _setting_response(basis, s) for s in candidates}
    chosen: list[str] = []
    rows = np.zeros((0, basis.size))
    for _ in range(k):
        best = None
        best_key = None
        for s in candidates:
            if s in chosen:
                continue
            sv = np.linalg.svd(np.vstack([rows, responses[s]]), compute_uv=False)
            rank = int((sv > RANK_TOL).sum())
            cond = float(sv[0] / sv[rank - 1]) if rank else np.inf
            key = (-rank, cond)
            if best_key is None or key < best_key:
                best, best_key = s, key
        chosen.append(best)
        rows = np.vstack([rows, responses[best]])
    return chosen


def response_rank(basis: SymmetricBasis, settings) -> int:
    """Rank of the stacked coefficients-to-probabilities map for given settings."""
    rows = np.vstack([_setting_response(basis, s) for s in settings])
    sv = np.linalg.svd(rows, compute_uv=False)
    return int((sv > RANK_TOL).sum())


# ---------------------------------------------------------------------------
# Histogram persistence
# ---------------------------------------------------------------------------

def save_histograms(path, histograms, n_qubits: int | None = None) -> None:
    histograms = list(histograms)
    if not histograms:
        raise ValueError("no histograms to save")
    n = n_qubits if n_qubits is not None else histograms[0].n_qubits
    records = []
    for h in histograms:
        if h.n_qubits != n:
            raise ValueError("histograms address differing qubit counts")
        if h.shots is None:
            raise ValueError("analytic histograms are in-memory only; sample to persist")
        records.append({"setting": h.setting, "shots": h.shots, "counts": dict(h.counts)})
    payload = {"n_qubits": n, "records": records}
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def ingest_histograms(path) -> list[OutcomeHistogram]:
    """Load and validate a histogram file, reporting which record is broken."""
    payload = json.loads(Path(path).read_text())
    if not isinstance(payload, dict) or "n_qubits" not in payload or "records" not in payload:
        raise ValueError("histogram file must be an object with 'n_qubits' and 'records'")
    n = payload["n_qubits"]
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n_qubits must be a positive integer, got {n!r}")
    out = []
    for pos, rec in enumerate(payload["records"]):
        where = f"records[{pos}]"
        if not isinstance(rec, dict):
            raise ValueError(f"{where}: expected an object")
        missing = {"setting", "shots", "counts"} - rec.keys()
        if missing:
            raise ValueError(f"{where}: missing fields {sorted(missing)}")
        try:
            hist = OutcomeHistogram(
                setting=str(rec["setting"]),
                counts={str(k): int(v) for k, v in rec["counts"].items()},
                shots=int(rec["shots"]),
            )
            check_setting(hist.setting, n)
        except (ValueError, TypeError) as exc:
            raise ValueError(f"{where} (setting {rec.get('setting')!r}): {exc}") from exc
        out.append(hist)
    return out
