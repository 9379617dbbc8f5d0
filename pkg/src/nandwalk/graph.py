"""Site graphs for the slide + runway + NAND-tree lattice.

Sites carry 1-based global indices.  Components are built locally (indices
starting at 1) and relabelled by :func:`assemble_system`: slide sites first,
then the runway, then the tree in breadth-first order with the root first.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

REGIONS = ("slide", "runway", "tree")
SLIDE_VARIANTS = ("odd_chain", "even_chain")


@dataclass(frozen=True)
class NandTreeSpec:
    """Balanced binary NAND tree of ``depth`` layers fed by ``2**depth`` bits."""

    depth: int
    inputs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(int(b) for b in self.inputs))
        if self.depth < 1:
            raise ValueError(f"tree depth must be >= 1, got {self.depth}")
        if len(self.inputs) != 2**self.depth:
            raise ValueError(
                f"depth {self.depth} needs {2**self.depth} input bits, got {len(self.inputs)}"
            )
        if any(b not in (0, 1) for b in self.inputs):
            raise ValueError(f"inputs must be bits, got {self.inputs}")

    @classmethod
    def from_bits(cls, bits: Sequence[int] | str) -> "NandTreeSpec":
        if isinstance(bits, str):
            bits = [int(c) for c in bits if c in "01"]
        n = len(bits)
        if n < 2 or n & (n - 1):
            raise ValueError(f"input length must be a power of two >= 2, got {n}")
        return cls(depth=n.bit_length() - 1, inputs=tuple(bits))

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    @property
    def site_count(self) -> int:
        return 2 ** (self.depth + 1) - 1 + sum(self.inputs)

    @property
    def bits(self) -> str:
        return "".join(str(b) for b in self.inputs)


@dataclass(frozen=True)
class CouplingGraph:
    """Weighted undirected graph with named regions.

    ``edges`` holds ``(a, b, coupling)`` with ``a < b``; couplings are in mm^-1.
    ``attach_site`` is the runway site the tree root couples to (``None`` when
    there is no runway).  ``root`` is the tree root, if a tree is present.
    """

    sites: tuple[int, ...]
    edges: tuple[tuple[int, int, float], ...]
    regions: Mapping[str, frozenset[int]]
    attach_site: int | None = None
    root: int | None = None
    _index: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.sites)
        if tuple(self.sites) != tuple(range(1, n + 1)):
            raise ValueError("sites must be 1..n in order")
        seen = set()
        for a, b, c in self.edges:
            if a == b:
                raise ValueError(f"self-loop at site {a}")
            if not (1 <= a <= n and 1 <= b <= n):
                raise ValueError(f"edge ({a}, {b}) references unknown site")
            if a > b:
                raise ValueError(f"edge ({a}, {b}) must be stored with a < b")
            if (a, b) in seen:
                raise ValueError(f"duplicate edge ({a}, {b})")
            if not c > 0:
                raise ValueError(f"edge ({a}, {b}) has non-positive coupling {c}")
            seen.add((a, b))
        covered: set[int] = set()
        for name, members in self.regions.items():
            if name not in REGIONS:
                raise ValueError(f"unknown region {name!r}")
            if covered & members:
                raise ValueError(f"region {name!r} overlaps another region")
            covered |= members
        if covered != set(self.sites):
            raise ValueError("regions must cover every site exactly once")
        if self.attach_site is not None and self.attach_site not in self.regions.get("runway", ()):
            raise ValueError("attach_site must lie on the runway")
        if self.root is not None and self.root not in self.regions.get("tree", ()):
            raise ValueError("root must lie in the tree region")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def region(self, name: str) -> list[int]:
        """Sorted site indices of region ``name`` (empty if absent)."""
        return sorted(self.regions.get(name, ()))

    def region_of(self, site: int) -> str:
        if not self._index:
            for name, members in self.regions.items():
                for s in members:
                    self._index[s] = name
        return self._index[site]

    def degree(self, site: int) -> int:
        return sum(1 for a, b, _ in self.edges if site in (a, b))

    def is_connected(self) -> bool:
        if not self.sites:
            return True
        adj: dict[int, list[int]] = {s: [] for s in self.sites}
        for a, b, _ in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        stack, seen = [self.sites[0]], {self.sites[0]}
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(self.sites)

    def to_dict(self) -> dict:
        return {
            "sites": list(self.sites),
            "edges": [[a, b, c] for a, b, c in self.edges],
            "regions": {name: sorted(self.regions[name]) for name in REGIONS if name in self.regions},
            "attach_site": self.attach_site,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _chain_edges(couplings: Sequence[float], offset: int = 0) -> tuple[tuple[int, int, float], ...]:
    return tuple((offset + i + 1, offset + i + 2, float(c)) for i, c in enumerate(couplings))


def build_runway(L_rw: int, J: float) -> CouplingGraph:
    """Uniform chain of ``L_rw`` sites; the tree attaches at its middle site."""
    if L_rw < 1:
        raise ValueError(f"runway length must be positive, got {L_rw}")
    if L_rw % 2 == 0:
        raise ValueError(
            f"runway length must be odd so the middle site (L_rw+1)/2 is a site; got {L_rw}"
        )
    sites = tuple(range(1, L_rw + 1))
    return CouplingGraph(
        sites=sites,
        edges=_chain_edges([J] * (L_rw - 1)),
        regions={"runway": frozenset(sites)},
        attach_site=(L_rw + 1) // 2,
    )


def slide_couplings(L_qs: int, J: float, variant: str = "odd_chain") -> list[float]:
    """Couplings J_1..J_{L_qs-1} of the parabolic slide.

    ``odd_chain`` is half of a parabolic chain of 2*L_qs - 1 sites and ends
    exactly at ``J``; ``even_chain`` uses the J/L_qs * sqrt(r(2L_qs - r)) profile.
    """
    if L_qs < 2:
        raise ValueError(f"slide needs at least 2 sites, got {L_qs}")
    rs = range(1, L_qs)
    if variant == "odd_chain":
        return [J * math.sqrt(r * (2 * L_qs - 2 - r)) / (L_qs - 1) for r in rs]
    if variant == "even_chain":
        return [J / L_qs * math.sqrt(r * (2 * L_qs - r)) for r in rs]
    raise ValueError(f"unknown slide variant {variant!r}; expected one of {SLIDE_VARIANTS}")


def build_slide(L_qs: int, J: float, variant: str = "odd_chain") -> CouplingGraph:
    couplings = slide_couplings(L_qs, J, variant)
    sites = tuple(range(1, L_qs + 1))
    return CouplingGraph(
        sites=sites,
        edges=_chain_edges(couplings),
        regions={"slide": frozenset(sites)},
    )


def parabolic_chain(L: int, scale: float = 1.0) -> CouplingGraph:
    """Full perfect-transfer chain with couplings scale * sqrt(i(L-i))."""
    if L < 2:
        raise ValueError(f"parabolic chain needs at least 2 sites, got {L}")
    sites = tuple(range(1, L + 1))
    return CouplingGraph(
        sites=sites,
        edges=_chain_edges([scale * math.sqrt(i * (L - i)) for i in range(1, L)]),
        regions={"slide": frozenset(sites)},
    )


def build_nand_tree(spec: NandTreeSpec, J: float) -> CouplingGraph:
    # breadth-first: root = 1, layer k occupies 2**k .. 2**(k+1) - 1
    edges = []
    for node in range(2, 2 ** (spec.depth + 1)):
        edges.append((node // 2, node, float(J)))
    next_site = 2 ** (spec.depth + 1)
    first_last_layer = 2**spec.depth
    for i, bit in enumerate(spec.inputs):
        if bit:
            edges.append((first_last_layer + i, next_site, float(J)))
            next_site += 1
    sites = tuple(range(1, next_site))
    return CouplingGraph(
        sites=sites,
        edges=tuple(edges),
        regions={"tree": frozenset(sites)},
        root=1,
    )


def assemble_system(
    slide: CouplingGraph | None,
    runway: CouplingGraph,
    tree: CouplingGraph | None,
    J: float,
) -> CouplingGraph:
    """Join the components into one graph with global indices."""
    if runway.attach_site is None:
        raise ValueError("runway graph has no attach site")
    edges: list[tuple[int, int, float]] = []
    regions: dict[str, frozenset[int]] = {}
    offset = 0
    if slide is not None:
        edges.extend(slide.edges)
        regions["slide"] = frozenset(slide.sites)
        offset = slide.n_sites
        edges.append((offset, offset + 1, float(J)))

    edges.extend((a + offset, b + offset, c) for a, b, c in runway.edges)
    regions["runway"] = frozenset(s + offset for s in runway.sites)
    attach = runway.attach_site + offset
    offset += runway.n_sites

    root = None
    if tree is not None:
        if tree.root is None:
            raise ValueError("tree graph has no root")
        edges.extend((a + offset, b + offset, c) for a, b, c in tree.edges)
        regions["tree"] = frozenset(s + offset for s in tree.sites)
        root = tree.root + offset
        edges.append((attach, root, float(J)))
        offset += tree.n_sites

    edges.sort(key=lambda e: (e[0], e[1]))
    return CouplingGraph(
        sites=tuple(range(1, offset + 1)),
        edges=tuple(edges),
        regions=regions,
        attach_site=attach,
        root=root,
    )


def build_system(
    L_qs: int,
    L_rw: int,
    J: float,
    tree: NandTreeSpec | None = None,
    variant: str = "odd_chain",
) -> CouplingGraph:
    """Convenience wrapper; ``L_qs == 0`` means no slide."""
    slide = build_slide(L_qs, J, variant) if L_qs else None
    tree_graph = build_nand_tree(tree, J) if tree is not None else None
    return assemble_system(slide, build_runway(L_rw, J), tree_graph, J)
