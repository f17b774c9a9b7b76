"""Third beam splitter: why it cannot add distinguishable outcomes.

After BS2 a phase ``eta`` is applied on ``psi3`` and the beams recombine on
BS3. Letting ``eta`` take values ``eta1, eta2`` and ``phi`` take
``phi1, phi2`` gives four states ``psi_ij``. Encoding more than two path
outcomes needs at least three of them mutually orthogonal; the scan below
checks every quadruple on a phase grid (plus the analytic solutions of the
orthogonality constraints) and finds at most two.

Only the path factor matters: the spin state is a common tensor factor, so
Gram matrices are computed on the 2-dim (psi5, psi6) amplitudes.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import optics
from .hilbert import StateVector, apply, inner, ket, tensor

TWO_PI = 2.0 * math.pi
SCAN_TOL = 1e-9
DEFAULT_GRID_STEPS = 24

FAMILY_LABELS = ("psi11", "psi12", "psi21", "psi22")
# index pairs into FAMILY_LABELS
PAIRS = tuple(itertools.combinations(range(4), 2))
SUBSETS = tuple(
    s for r in (4, 3, 2, 1) for s in itertools.combinations(range(4), r)
)


def canonical_phase(x: float) -> float:
    y = math.fmod(x, TWO_PI)
    if y < 0:
        y += TWO_PI
    return 0.0 if y >= TWO_PI else y


@dataclass(frozen=True)
class PhaseQuadruple:
    eta1: float
    eta2: float
    phi1: float
    phi2: float

    def __post_init__(self):
        for name in ("eta1", "eta2", "phi1", "phi2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, canonical_phase(value))

    def pairs(self):
        """``(label, eta, phi)`` for psi11, psi12, psi21, psi22."""
        etas, phis = (self.eta1, self.eta2), (self.phi1, self.phi2)
        for i, j in itertools.product(range(2), range(2)):
            yield f"psi{i + 1}{j + 1}", etas[i], phis[j]

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.eta1, self.eta2, self.phi1, self.phi2)


def path_amplitudes(eta, phi) -> np.ndarray:
    """(psi5, psi6) amplitudes after BS3; broadcasts over array inputs."""
    ee = np.exp(1j * np.asarray(eta, dtype=float))
    ep = np.exp(1j * np.asarray(phi, dtype=float))
    c5 = -ee * (1 + ep) + (1 - ep)
    c6 = 1j * (ee * (1 + ep) + (1 - ep))
    return np.stack([c5, c6], axis=-1) / (2.0 * math.sqrt(2.0))


def bs3_state(eta: float, phi: float, chi: StateVector) -> StateVector:
    """Closed-form state leaving BS3, with spin factor ``chi``."""
    path = StateVector(path_amplitudes(eta, phi), optics.path_space(optics.STAGES[3]))
    return tensor(path, chi)


def bs3_pipeline(eta: float, phi: float, chi: StateVector) -> StateVector:
    """Same state by composing BS1, PS(phi), BS2, PS(eta), BS3 (SR left at 0)."""
    start = tensor(ket(optics.path_space(optics.STAGES[0]), optics.SOURCE_PORT), chi)
    return apply(optics.extended_interferometer(0.0, phi, eta), start)


def state_family(q: PhaseQuadruple, chi: StateVector) -> dict[str, StateVector]:
    return {label: bs3_state(eta, phi, chi) for label, eta, phi in q.pairs()}


@dataclass(frozen=True, eq=False)
class GramMatrix:
    entries: np.ndarray
    labels: tuple[str, ...] = FAMILY_LABELS

    def __post_init__(self):
        g = np.array(self.entries, dtype=complex)
        if g.shape != (len(self.labels),) * 2:
            raise ValueError("Gram matrix shape does not match labels")
        if np.max(np.abs(g - g.conj().T)) > 1e-12:
            raise ValueError("Gram matrix must be Hermitian")
        if np.max(np.abs(np.diag(g) - 1)) > 1e-12:
            raise ValueError("Gram matrix must have unit diagonal")
        g.setflags(write=False)
        object.__setattr__(self, "entries", g)

    def __getitem__(self, key: tuple[str, str]) -> complex:
        a, b = key
        return complex(self.entries[self.labels.index(a), self.labels.index(b)])


def gram(states) -> GramMatrix:
    """Pairwise inner products; ``states`` is a label->state mapping or a sequence."""
    if isinstance(states, dict):
        labels, vecs = tuple(states), list(states.values())
    else:
        vecs = list(states)
        labels = FAMILY_LABELS if len(vecs) == 4 else tuple(f"s{k}" for k in range(len(vecs)))
    g = np.array([[inner(a, b) for b in vecs] for a in vecs])
    return GramMatrix(g, labels)


def path_gram(q: PhaseQuadruple) -> GramMatrix:
    """Gram matrix of the family computed from path amplitudes only."""
    basis = optics.path_space(optics.STAGES[3])
    vecs = [StateVector(path_amplitudes(eta, phi), basis) for _, eta, phi in q.pairs()]
    return gram(vecs)


@dataclass(frozen=True)
class OrthogonalityReport:
    max_subset_size: int
    witness: tuple[str, ...]
    tolerance: float
    quadruple: PhaseQuadruple | None = None


def max_orthogonal_subset(
    g: GramMatrix, tol: float = SCAN_TOL, quadruple: PhaseQuadruple | None = None
) -> OrthogonalityReport:
    """Largest pairwise-orthogonal subset, by trying every subset."""
    n = len(g.labels)
    mags = np.abs(g.entries)
    for r in range(n, 0, -1):
        for subset in itertools.combinations(range(n), r):
            if all(mags[a, b] <= tol for a, b in itertools.combinations(subset, 2)):
                witness = tuple(g.labels[k] for k in subset)
                return OrthogonalityReport(r, witness, tol, quadruple)
    raise AssertionError("unreachable: singletons are always orthogonal")


def _grid(steps: int) -> np.ndarray:
    return TWO_PI * np.arange(steps) / steps


def grid_quadruples(steps: int) -> np.ndarray:
    """All (eta1, eta2, phi1, phi2) on the uniform grid, in lexicographic index order."""
    g = _grid(steps)
    mesh = np.meshgrid(g, g, g, g, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def corner_quadruples(steps: int) -> np.ndarray:
    """Analytic solutions of <psi11|psi12> = 0 = <psi11|psi21>.

    Both vanish exactly when ``phi2 - phi1 = pi``, ``eta2 - eta1 = pi`` and
    ``cos(phi1) = 0``; the grid alone misses these unless ``steps % 4 == 0``.
    """
    g = _grid(steps)
    rows = []
    for phi1 in (math.pi / 2, 3 * math.pi / 2):
        for eta1 in g:
            for phi2 in list(g) + [phi1 + math.pi]:
                rows.append((eta1, eta1 + math.pi, phi1, phi2))
            for eta2 in g:
                rows.append((eta1, eta2, phi1, phi1 + math.pi))
    q = np.array(rows)
    return np.mod(q, TWO_PI)


def family_overlaps(quads: np.ndarray) -> np.ndarray:
    """|<psi_a|psi_b>| for each quadruple row and each index pair in PAIRS."""
    e1, e2, p1, p2 = quads.T
    states = np.stack(
        [
            path_amplitudes(e1, p1),
            path_amplitudes(e1, p2),
            path_amplitudes(e2, p1),
            path_amplitudes(e2, p2),
        ],
        axis=1,
    )
    return np.stack(
        [np.abs(np.sum(states[:, a].conj() * states[:, b], axis=-1)) for a, b in PAIRS],
        axis=1,
    )


def subset_sizes(overlaps: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized max orthogonal subset: ``(sizes, index into SUBSETS of a witness)``."""
    edge = overlaps <= tol
    pair_col = {p: k for k, p in enumerate(PAIRS)}
    sizes = np.zeros(len(overlaps), dtype=int)
    witness = np.full(len(overlaps), len(SUBSETS) - 1, dtype=int)
    # walk SUBSETS backwards so the kept witness is the first-listed of maximal size
    for k in range(len(SUBSETS) - 1, -1, -1):
        subset = SUBSETS[k]
        ok = np.ones(len(overlaps), dtype=bool)
        for pair in itertools.combinations(subset, 2):
            ok &= edge[:, pair_col[pair]]
        better = ok & (len(subset) >= sizes)
        sizes[better] = len(subset)
        witness[better] = k
    return sizes, witness


@dataclass
class ScanReport:
    grid_steps: int
    tolerance: float
    evaluated: int
    max_subset_size: int
    size_histogram: dict[int, int]
    size2_quadruples: np.ndarray = field(repr=False)
    witnesses: list[OrthogonalityReport] = field(default_factory=list)
    phase_pi_witness: OrthogonalityReport | None = None
    constrained_points: int = 0
    constrained_min_overlap: float | None = None

    @property
    def size2_count(self) -> int:
        return len(self.size2_quadruples)

    @property
    def distinguishable_outcomes(self) -> int:
        # two spin settings times the orthogonal path states
        return 2 * self.max_subset_size

    @property
    def passed(self) -> bool:
        return self.max_subset_size <= 2 and (
            self.constrained_min_overlap is None
            or self.constrained_min_overlap >= 1 - SCAN_TOL
        )


def _scan_chunk(quads: np.ndarray, tol: float):
    overlaps = family_overlaps(quads)
    sizes, witness = subset_sizes(overlaps, tol)
    # psi11-psi12 is pair 0, psi11-psi21 pair 1, psi12-psi21 pair 3
    constrained = (overlaps[:, 0] <= tol) & (overlaps[:, 1] <= tol)
    return sizes, witness, overlaps[constrained, 3]


def _chunks(quads: np.ndarray, workers: int) -> list[np.ndarray]:
    return np.array_split(quads, max(1, workers))


def scan(
    grid_steps: int = DEFAULT_GRID_STEPS,
    tol: float = SCAN_TOL,
    workers: int = 1,
    n_witnesses: int = 5,
) -> ScanReport:
    """Exhaustive orthogonality scan over grid plus corner quadruples.

    Results are merged in quadruple order, so any ``workers`` count yields
    the same report.
    """
    if grid_steps < 8:
        raise ValueError("grid_steps must be at least 8")
    quads = np.concatenate([grid_quadruples(grid_steps), corner_quadruples(grid_steps)])
    chunks = _chunks(quads, workers)
    if len(chunks) == 1:
        parts = [_scan_chunk(chunks[0], tol)]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(_scan_chunk, chunks, [tol] * len(chunks)))
    sizes = np.concatenate([p[0] for p in parts])
    witness = np.concatenate([p[1] for p in parts])
    constrained = np.concatenate([p[2] for p in parts])

    def report(row: int) -> OrthogonalityReport:
        subset = SUBSETS[witness[row]]
        return OrthogonalityReport(
            int(sizes[row]),
            tuple(FAMILY_LABELS[k] for k in subset),
            tol,
            PhaseQuadruple(*quads[row]),
        )

    top = int(sizes.max())
    size2_rows = np.flatnonzero(sizes == 2)
    dphi = np.mod(quads[size2_rows, 3] - quads[size2_rows, 2], TWO_PI)
    at_pi = size2_rows[np.abs(dphi - math.pi) <= 1e-12]
    hist = {k: int(np.sum(sizes == k)) for k in range(1, 5)}

    return ScanReport(
        grid_steps=grid_steps,
        tolerance=tol,
        evaluated=len(quads),
        max_subset_size=top,
        size_histogram=hist,
        size2_quadruples=quads[size2_rows],
        witnesses=[report(r) for r in np.flatnonzero(sizes == top)[:n_witnesses]],
        phase_pi_witness=report(at_pi[0]) if len(at_pi) else None,
        constrained_points=len(constrained),
        constrained_min_overlap=float(constrained.min()) if len(constrained) else None,
    )


def psi_overlap_same_eta(phi1: float, phi2: float) -> complex:
    """``<psi11|psi12>`` when both share eta: ``(1 + e^{i(phi2-phi1)})/2``."""
    return 0.5 * (1 + cmath.exp(1j * (phi2 - phi1)))
