"""
Sampled compact spaces: intervals, circles and latitude-longitude spheres,
with adjacency, oriented plaquettes and named regions.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BadGrid

logger = logging.getLogger(__name__)

KINDS = ("interval", "circle", "sphere")


@dataclass(frozen=True, eq=False)
class SpaceGrid:
    """
    Points of a sampled space.

    ``plaquettes`` are 4-cycles of point indices, oriented counterclockwise
    seen from outside; polar plaquettes repeat a corner. ``regions`` maps a
    name to a sorted array of point indices; every grid has the region "X"
    covering all points.
    """

    kind: str
    points: np.ndarray
    edges: np.ndarray
    plaquettes: np.ndarray
    resolution: Tuple[int, ...]
    regions: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def region(self, name: str) -> np.ndarray:
        if name not in self.regions:
            raise BadGrid(f"grid has no region {name!r}; known: {sorted(self.regions)}")
        return self.regions[name]

    def components(self, indices: Optional[np.ndarray] = None) -> np.ndarray:
        """Connected-component label per point of ``indices`` (default all points)."""
        if indices is None:
            indices = np.arange(self.size)
        indices = np.asarray(indices, dtype=np.int64)
        local = np.full(self.size, -1, dtype=np.int64)
        local[indices] = np.arange(indices.size)
        inside = (local[self.edges[:, 0]] >= 0) & (local[self.edges[:, 1]] >= 0)
        rows = local[self.edges[inside, 0]]
        cols = local[self.edges[inside, 1]]
        graph = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(indices.size, indices.size))
        _, labels = connected_components(graph, directed=False)
        return labels


def with_regions(grid: SpaceGrid, regions: Mapping[str, Sequence[int]]) -> SpaceGrid:
    merged = dict(grid.regions)
    for name, members in regions.items():
        idx = np.unique(np.asarray(members, dtype=np.int64))
        if idx.size and (idx[0] < 0 or idx[-1] >= grid.size):
            raise BadGrid(f"region {name!r} refers to points outside the grid")
        merged[name] = idx
    return replace(grid, regions=merged)


def _edges_from_pairs(pairs: np.ndarray) -> np.ndarray:
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    return np.unique(np.sort(pairs, axis=1), axis=0)


def interval_grid(coords: Sequence[float]) -> SpaceGrid:
    """Interval sampled at the ascending coordinates ``coords``."""
    xs = np.asarray(coords, dtype=np.float64)
    if xs.ndim != 1 or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise BadGrid("interval coordinates must be ascending with at least 2 points")
    m = xs.size
    edges = np.column_stack([np.arange(m - 1), np.arange(1, m)])
    return SpaceGrid(
        kind="interval",
        points=xs.reshape(m, 1),
        edges=edges,
        plaquettes=np.zeros((0, 4), dtype=np.int64),
        resolution=(m,),
        regions={"X": np.arange(m)},
    )


def circle_grid(points: int) -> SpaceGrid:
    """``points`` equally spaced angles 2πj/points; point 0 is the basepoint (1, 0)."""
    if points < 3:
        raise BadGrid(f"a circle needs at least 3 points, got {points}")
    angles = 2.0 * np.pi * np.arange(points) / points
    idx = np.arange(points)
    edges = _edges_from_pairs(np.column_stack([idx, (idx + 1) % points]))
    return SpaceGrid(
        kind="circle",
        points=np.column_stack([np.cos(angles), np.sin(angles)]),
        edges=edges,
        plaquettes=np.zeros((0, 4), dtype=np.int64),
        resolution=(points,),
        regions={"X": idx, "basepoint": np.array([0])},
    )


def circle_angles(grid: SpaceGrid) -> np.ndarray:
    if grid.kind != "circle":
        raise BadGrid(f"expected a circle grid, got {grid.kind}")
    return 2.0 * np.pi * np.arange(grid.size) / grid.size


def sphere_grid(n_theta: int, n_phi: int) -> SpaceGrid:
    """
    Latitude-longitude mesh of the unit sphere with ``n_theta`` bands and
    ``n_phi`` meridians. Ring 0 is the north pole, ring ``n_theta`` the south
    pole. Plaquettes run ring_i[j], ring_{i+1}[j], ring_{i+1}[j+1], ring_i[j+1].

    For even ``n_theta`` the regions "Y" (northern hemisphere), "Z" (southern)
    and "K" (the equator, their intersection) are defined.
    """
    if n_theta < 2 or n_phi < 3:
        raise BadGrid(f"sphere mesh needs n_theta ≥ 2 and n_phi ≥ 3, got {n_theta}×{n_phi}")
    thetas = np.pi * np.arange(1, n_theta) / n_theta
    phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    ring_points = np.column_stack([
        (np.sin(tt) * np.cos(pp)).ravel(),
        (np.sin(tt) * np.sin(pp)).ravel(),
        np.cos(tt).ravel(),
    ])
    points = np.vstack([[0.0, 0.0, 1.0], ring_points, [0.0, 0.0, -1.0]])
    south = points.shape[0] - 1

    def index(i: np.ndarray, j: np.ndarray) -> np.ndarray:
        inner = 1 + (i - 1) * n_phi + (j % n_phi)
        return np.where(i == 0, 0, np.where(i == n_theta, south, inner))

    ii, jj = np.meshgrid(np.arange(n_theta), np.arange(n_phi), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    plaquettes = np.column_stack([
        index(ii, jj),
        index(ii + 1, jj),
        index(ii + 1, jj + 1),
        index(ii, jj + 1),
    ]).astype(np.int64)
    sides = np.concatenate([plaquettes[:, [k, (k + 1) % 4]] for k in range(4)])

    rings = np.concatenate([[0], np.repeat(np.arange(1, n_theta), n_phi), [n_theta]])
    regions = {"X": np.arange(points.shape[0])}
    if n_theta % 2 == 0:
        equator = n_theta // 2
        regions["Y"] = np.flatnonzero(rings <= equator)
        regions["Z"] = np.flatnonzero(rings >= equator)
        regions["K"] = np.flatnonzero(rings == equator)
    logger.debug(f"Sphere mesh {n_theta}×{n_phi}: {points.shape[0]} points, {plaquettes.shape[0]} plaquettes")
    return SpaceGrid(
        kind="sphere",
        points=points,
        edges=_edges_from_pairs(sides),
        plaquettes=plaquettes,
        resolution=(n_theta, n_phi),
        regions=regions,
    )


def directed_sides(grid: SpaceGrid) -> np.ndarray:
    """Non-degenerate plaquette sides as (from, to) rows."""
    sides = np.concatenate([grid.plaquettes[:, [k, (k + 1) % 4]] for k in range(4)])
    return sides[sides[:, 0] != sides[:, 1]]


def build_grid(kind: str, resolution: Sequence[int], coords: Optional[Sequence[float]] = None) -> SpaceGrid:
    """Rebuild a grid from its descriptor."""
    if kind == "interval":
        if coords is None:
            raise BadGrid("an interval grid descriptor needs its coordinates")
        return interval_grid(coords)
    if kind == "circle" and len(resolution) == 1:
        return circle_grid(int(resolution[0]))
    if kind == "sphere" and len(resolution) == 2:
        return sphere_grid(int(resolution[0]), int(resolution[1]))
    raise BadGrid(f"unknown grid descriptor {kind!r} {list(resolution)}")
