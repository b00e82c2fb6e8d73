# -*- encoding: utf-8 -*-
"""
Potential catalog - named builders for the potentials used across the toolkit.

Builders:
    free                 B = 0
    constant             B(n) = B0
    periodic / dimer     period-p pattern (dimer: period 2)
    decaying             B0 n^{-alpha}
    sparse_bumps         B0 at sites 1, 2, 4, 8, ... (gap multiplier ``growth``)
    anderson             i.i.d. uniform symmetric entries, keyed by seed
    eventually_periodic  explicit head followed by a periodic tail
    diagonal             d decoupled scalar channels given site by site

Usage:
    from matrix_weyl.catalog import build_potential, CATALOG, dimer

    spec = build_potential("eventually-dimer")
    spec = dimer(1.0, -1.0, support=Support.WHOLE_LINE)
"""

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from matrix_weyl.errors import InvalidInputError
from matrix_weyl.potentials import (
    PotentialKind,
    PotentialSpec,
    Support,
    freeze_matrix,
)

MatrixLike = Union[float, Sequence, np.ndarray]


def _matrix(m: MatrixLike) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(m, dtype=float))
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"potential value must be square, got shape {arr.shape}")
    return arr


def _bound(mats: Sequence[np.ndarray], bound: Optional[float]) -> float:
    if bound is not None:
        return bound
    top = max((float(np.linalg.norm(m, ord=2)) for m in mats), default=0.0)
    return top if top > 0 else 1.0


def free(dim: int = 1, support: Support = Support.HALF_LINE, bound: float = 1.0) -> PotentialSpec:
    return PotentialSpec(dim=dim, bound=bound, support=support)


def constant(
    b0: MatrixLike, support: Support = Support.HALF_LINE, bound: Optional[float] = None,
) -> PotentialSpec:
    m = _matrix(b0)
    return PotentialSpec(
        dim=m.shape[0], bound=_bound([m], bound), support=support,
        kind=PotentialKind.CONSTANT, matrices=(freeze_matrix(m),),
    )


def periodic(
    pattern: Sequence[MatrixLike],
    support: Support = Support.HALF_LINE,
    bound: Optional[float] = None,
) -> PotentialSpec:
    """B(n) = pattern[n mod p], anchored at site 0."""
    mats = [_matrix(m) for m in pattern]
    if not mats:
        raise InvalidInputError("periodic pattern is empty")
    return PotentialSpec(
        dim=mats[0].shape[0], bound=_bound(mats, bound), support=support,
        kind=PotentialKind.PERIODIC, matrices=tuple(freeze_matrix(m) for m in mats),
    )


def dimer(
    p: MatrixLike, q: MatrixLike,
    support: Support = Support.HALF_LINE,
    bound: Optional[float] = None,
) -> PotentialSpec:
    """Period-2 potential P, Q, P, Q, ... (B(0) = P)."""
    return periodic([p, q], support=support, bound=bound)


def decaying(
    b0: MatrixLike,
    alpha: float = 1.0,
    support: Support = Support.HALF_LINE,
    bound: Optional[float] = None,
) -> PotentialSpec:
    m = _matrix(b0)
    return PotentialSpec(
        dim=m.shape[0], bound=_bound([m], bound), support=support,
        kind=PotentialKind.DECAYING, matrices=(freeze_matrix(m),), alpha=alpha,
    )


def sparse_bumps(
    b0: MatrixLike,
    growth: int = 2,
    support: Support = Support.HALF_LINE,
    bound: Optional[float] = None,
) -> PotentialSpec:
    """Bumps B0 at sites 1, 2, 2 + growth, ... (sites 2^k for growth 2)."""
    m = _matrix(b0)
    return PotentialSpec(
        dim=m.shape[0], bound=_bound([m], bound), support=support,
        kind=PotentialKind.SPARSE, matrices=(freeze_matrix(m),), gaps=(1, 1), growth=growth,
    )


def anderson(
    dim: int = 1,
    seed: int = 0,
    amplitude: float = 2.0,
    support: Support = Support.HALF_LINE,
) -> PotentialSpec:
    """Symmetrized uniform(-amplitude, amplitude) entries, reproducible per (seed, site)."""
    return PotentialSpec(
        dim=dim, bound=max(amplitude * dim, 1e-12), support=support,
        kind=PotentialKind.RANDOM, seed=seed, amplitude=amplitude,
    )


def eventually_periodic(
    head: Union[Mapping[int, MatrixLike], Sequence[MatrixLike]],
    tail: Sequence[MatrixLike],
    tail_start: int,
    support: Support = Support.HALF_LINE,
    bound: Optional[float] = None,
) -> PotentialSpec:
    """
    Explicit values up to tail_start, then tail[(n - tail_start) mod p].

    ``head`` is a site -> matrix mapping, or a sequence read as sites 1, 2, ...
    """
    items = head.items() if isinstance(head, Mapping) else enumerate(head, start=1)
    table = [(int(site), _matrix(m)) for site, m in items]
    mats = [_matrix(m) for m in tail]
    if not mats:
        raise InvalidInputError("tail pattern is empty")
    if any(site >= tail_start for site, _ in table):
        raise InvalidInputError("explicit head overlaps the periodic tail")
    return PotentialSpec(
        dim=mats[0].shape[0],
        bound=_bound(mats + [m for _, m in table], bound),
        support=support,
        kind=PotentialKind.EXPLICIT,
        table=tuple((site, freeze_matrix(m)) for site, m in table),
        matrices=tuple(freeze_matrix(m) for m in mats),
        tail_start=tail_start,
    )


def diagonal(
    channels: Sequence[Sequence[float]],
    support: Support = Support.HALF_LINE,
    bound: Optional[float] = None,
) -> PotentialSpec:
    """
    B(n) = diag(channels[0][n-1], channels[1][n-1], ...) for n = 1..len, zero beyond.

    Channels shorter than the longest one are padded with zeros.
    """
    if not channels:
        raise InvalidInputError("diagonal potential needs at least one channel")
    length = max(len(ch) for ch in channels)
    values = np.zeros((length, len(channels)))
    for k, ch in enumerate(channels):
        values[:len(ch), k] = ch
    table = [
        (n + 1, np.diag(values[n])) for n in range(length) if np.any(values[n] != 0.0)
    ]
    return PotentialSpec(
        dim=len(channels),
        bound=_bound([m for _, m in table], bound),
        support=support,
        kind=PotentialKind.EXPLICIT,
        table=tuple((site, freeze_matrix(m)) for site, m in table),
    )


# ── Catalog ──────────────────────────────────────────────────────────


@dataclass
class CatalogEntry:
    """Catalog entry describing a named potential."""
    name: str
    description: str
    builder: Callable[[], PotentialSpec]

    def build(self) -> PotentialSpec:
        return self.builder()


CATALOG: dict[str, CatalogEntry] = {
    "free": CatalogEntry(
        "free", "zero potential, d = 1", lambda: free(1),
    ),
    "free-2": CatalogEntry(
        "free-2", "zero potential, d = 2", lambda: free(2),
    ),
    "split-channels": CatalogEntry(
        "split-channels",
        "constant diag(0, 10): one channel in [-2, 2], one in [8, 12]",
        lambda: constant(np.diag([0.0, 10.0])),
    ),
    "dimer": CatalogEntry(
        "dimer", "period-2 potential 1, -1, 1, -1, ...", lambda: dimer(1.0, -1.0),
    ),
    "eventually-dimer": CatalogEntry(
        "eventually-dimer",
        "explicit head on sites 1..9, then the period-2 tail 1, -1 from site 10",
        lambda: eventually_periodic(
            [0.5, -0.3, 0.8, 0.0, 0.2, -0.7, 0.4, 0.1, -0.5], [1.0, -1.0], tail_start=10,
        ),
    ),
    "eventually-constant": CatalogEntry(
        "eventually-constant",
        "explicit head on sites 1..4, then B(n) = 0.5 from site 10",
        lambda: eventually_periodic([0.3, -0.4, 0.9, 0.1], [0.5], tail_start=10),
    ),
    "decaying": CatalogEntry(
        "decaying", "B(n) = 1/n", lambda: decaying(1.0, alpha=1.0),
    ),
    "sparse": CatalogEntry(
        "sparse", "bumps of height 3 at sites 2^k", lambda: sparse_bumps(3.0),
    ),
    "anderson": CatalogEntry(
        "anderson", "Anderson model, amplitude 2, seed 7", lambda: anderson(1, seed=7),
    ),
}


def build_potential(name: str) -> PotentialSpec:
    """
    Build a catalog potential by name.

    Raises:
        KeyError: If name is not in the catalog
    """
    if name not in CATALOG:
        raise KeyError(
            f"Unknown potential '{name}'. "
            f"Available: {', '.join(CATALOG.keys())}"
        )
    return CATALOG[name].build()


def build_all_potentials() -> dict[str, PotentialSpec]:
    return {name: entry.build() for name, entry in CATALOG.items()}
