"""Seeded random instances: families, grids, operators, DSFs and nets.

Instance ``i`` of a corpus draws from ``numpy.random.default_rng([seed, i])``
so corpora are reproducible and any slice can be regenerated on its own.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .covers import r_chain
from .intervals import Family, Interval
from .nest import BlockOperator, GridInterval, NestGrid
from .nets import NetChain
from .seminorms import DSF, node_forms

CORPUS_KINDS = ("families", "grids", "operators", "dsfs", "chain_nets")


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    dim: int = 8
    cut_count: int = 4
    r: int = 0
    tol: float = 1e-9
    corpus_size: int = 100

    def __post_init__(self):
        if self.corpus_size < 1:
            raise ValueError("corpus_size must be at least 1")
        if not 1 <= self.cut_count <= self.dim:
            raise ValueError("need between 1 and dim atoms")
        if not 0 <= self.r < self.dim:
            raise ValueError("r must lie in [0, dim)")

    def rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, index])


def random_connected_family(rng: np.random.Generator, grid_size: int = 64) -> tuple[Family, Interval]:
    """A family whose union is ``(0, G/q)``, on at most ``grid_size`` endpoints.

    A spine of overlapping intervals ``(c_{i-1}, c_{i+1})`` makes the union
    connected and puts a member at each end; a few random extra members are
    added inside.  Integer endpoints are finally divided by a random ``q``.
    """
    G = int(rng.integers(4, grid_size))
    s = int(rng.integers(1, min(24, G // 2) + 1))
    inner = sorted(int(c) for c in rng.choice(np.arange(1, G), size=s - 1, replace=False))
    c = [0] + inner + [G]
    if s <= 2:
        spine = [(0, G)]
    else:
        spine = [(c[i - 1], c[i + 1]) for i in range(1, s)]
    extras = []
    for _ in range(int(rng.integers(0, 6))):
        u = int(rng.integers(0, G))
        v = int(rng.integers(u + 1, min(G, u + max(2, G // 4)) + 1))
        extras.append((u, v))
    q = int(rng.choice([1, 2, 3, 4, 5, 7]))
    members = tuple(Interval(Fraction(u, q), Fraction(v, q)) for u, v in spine + extras)
    return Family(members), Interval(Fraction(0), Fraction(G, q))


def family_with_chain(rng: np.random.Generator, lo: int = 1, hi: int = 12,
                      grid_size: int = 64) -> tuple[Family, Interval, int]:
    """Redraw until the chain length lies in ``[lo, hi]``."""
    while True:
        P, base = random_connected_family(rng, grid_size)
        n = len(r_chain(P, base))
        if lo <= n <= hi:
            return P, base, n


def random_grid(rng: np.random.Generator, max_atoms: int = 6, max_atom_size: int = 3,
                min_atoms: int = 1) -> NestGrid:
    k = int(rng.integers(min_atoms, max_atoms + 1))
    sizes = rng.integers(1, max_atom_size + 1, size=k)
    cuts = [0] + np.cumsum(sizes).tolist()
    return NestGrid(int(cuts[-1]), tuple(int(x) for x in cuts))


def grid_with(rng: np.random.Generator, dim: int, atoms: int) -> NestGrid:
    inner = sorted(int(c) for c in rng.choice(np.arange(1, dim), size=atoms - 1, replace=False)) if atoms > 1 else []
    return NestGrid(dim, tuple([0] + inner + [dim]))


def random_operator(rng: np.random.Generator, grid: NestGrid, complex_entries: bool = False) -> BlockOperator:
    """Gaussian entries with heavy-ish scale variation, projected onto the algebra."""
    shape = (grid.dim, grid.dim)
    X = rng.normal(size=shape) * rng.exponential(size=shape)
    if complex_entries:
        X = X + 1j * rng.normal(size=shape)
    return BlockOperator.project(grid, X)


def random_dsf(rng: np.random.Generator, grid: NestGrid) -> DSF:
    kinds = []
    for n in range(grid.k + 1):
        forms = node_forms(n, grid.k)
        kinds.append(forms[int(rng.integers(len(forms)))])
    return DSF(grid, tuple(kinds))


def random_grid_family(rng: np.random.Generator, grid: NestGrid, size: int) -> tuple[GridInterval, ...]:
    out = set()
    for _ in range(size):
        s = int(rng.integers(0, grid.k))
        t = int(rng.integers(s + 1, grid.k + 1))
        out.add(GridInterval(s, t))
    return tuple(sorted(out))


def random_partition(rng: np.random.Generator, grid: NestGrid, blocks: int) -> tuple[GridInterval, ...]:
    """A partition of the atoms into ``blocks`` consecutive runs."""
    blocks = max(1, min(blocks, grid.k))
    inner = sorted(int(c) for c in rng.choice(np.arange(1, grid.k), size=blocks - 1, replace=False)) if blocks > 1 else []
    edges = [0] + inner + [grid.k]
    return tuple(GridInterval(a, b) for a, b in zip(edges, edges[1:]))


def refine_once(rng: np.random.Generator, P: tuple[GridInterval, ...]) -> tuple[GridInterval, ...]:
    """Keep, drop, or shrink each member, so the result refines ``P``."""
    out = []
    for E in P:
        roll = rng.random()
        if roll < 0.15:
            continue
        if roll < 0.6 or E.stop - E.start == 1:
            out.append(E)
            continue
        s = int(rng.integers(E.start, E.stop))
        t = int(rng.integers(s + 1, E.stop + 1))
        out.append(GridInterval(s, t))
        if rng.random() < 0.5 and t < E.stop:
            out.append(GridInterval(t, E.stop))
    return tuple(sorted(set(out)))


def random_chain_net(rng: np.random.Generator, grid: NestGrid, length: int = 3) -> NetChain:
    fams = [random_grid_family(rng, grid, int(rng.integers(1, 2 * grid.k + 1)))]
    for _ in range(length - 1):
        fams.append(refine_once(rng, fams[-1]))
    return NetChain(grid, tuple(fams))


def generate_corpus(cfg: ExperimentConfig, kind: str) -> list:
    if kind not in CORPUS_KINDS:
        raise ValueError(f"unknown corpus kind {kind!r}; expected one of {CORPUS_KINDS}")
    out = []
    for i in range(cfg.corpus_size):
        rng = cfg.rng(i)
        if kind == "families":
            P, base, _ = family_with_chain(rng)
            out.append({"family": P, "base": base})
            continue
        grid = grid_with(rng, cfg.dim, cfg.cut_count)
        if kind == "grids":
            out.append(grid)
        elif kind == "operators":
            out.append(random_operator(rng, grid))
        elif kind == "dsfs":
            out.append(random_dsf(rng, grid))
        else:
            out.append(random_chain_net(rng, grid, int(rng.integers(1, 5))))
    return out
