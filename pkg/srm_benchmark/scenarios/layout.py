"""
Cell layout, pathloss and cell-edge UE dropping.

Cells are pointy-top hexagons of circumradius R. Adjacent cells share an edge, so their BSs
sit R*sqrt(3) apart; the first BS is at the origin and the others take the neighbouring
hexagons at 0, 60, 120, ... degrees, which for K=3 gives three mutually adjacent cells.
"""
import math
from dataclasses import dataclass

import numpy as np

from srm_benchmark.errors import InvalidArgumentError, RegionUnreachableError

MAX_CELLS = 7
CHUNK = 256


def pathloss_db(distance):
    """Pathloss 36.3 + 37.6 log10(d) with d in meters."""
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0):
        raise InvalidArgumentError("distance has to be positive")
    loss = 36.3 + 37.6 * np.log10(distance)
    return float(loss) if loss.ndim == 0 else loss


@dataclass(frozen=True, eq=False)
class NetworkLayout:
    cell_count: int = 3
    cell_radius: float = 250.0

    def __post_init__(self):
        if not 2 <= self.cell_count <= MAX_CELLS:
            raise InvalidArgumentError(f"cell_count has to be in [2, {MAX_CELLS}]")
        if self.cell_radius <= 0:
            raise InvalidArgumentError("cell_radius has to be positive")

    @property
    def bs_positions(self):
        spacing = self.cell_radius * math.sqrt(3.0)
        positions = [(0.0, 0.0)]
        for n in range(self.cell_count - 1):
            angle = math.radians(60.0 * n)
            positions.append((spacing * math.cos(angle), spacing * math.sin(angle)))
        return np.array(positions)

    def inside_cell(self, points, cell):
        """True for the points that lie in the hexagon of the given cell."""
        offset = np.atleast_2d(points) - self.bs_positions[cell]
        x = np.abs(offset[:, 0])
        y = np.abs(offset[:, 1])
        half_width = self.cell_radius * math.sqrt(3.0) / 2.0
        return (x <= half_width) & (y + x / math.sqrt(3.0) <= self.cell_radius)

    def distances(self, points):
        """(N, K) distances from every point to every BS."""
        points = np.atleast_2d(points)
        return np.linalg.norm(points[:, None, :] - self.bs_positions[None, :, :], axis=2)


def edge_margin_db(alpha_db, cell):
    """alpha_ii - max_{j != i} alpha_ij for rows of large-scale gains of UE i."""
    alpha_db = np.atleast_2d(alpha_db)
    others = np.delete(alpha_db, cell, axis=1)
    return alpha_db[:, cell] - others.max(axis=1)


def _check_region(region):
    rho_min, rho_max = (float(v) for v in region)
    if not rho_min < rho_max:
        raise InvalidArgumentError(f"empty cell-edge region ({rho_min}, {rho_max})")
    return rho_min, rho_max


def sample_ue_positions(layout, region, rng, shadowing_std_db=8.0, attempt_cap=10**6):
    """
    Drop one UE per cell, uniformly inside its hexagon, until its large-scale gains land in the
    cell-edge region rho_min <= alpha_ii - max_{j != i} alpha_ij < rho_max.

    Parameters:
        layout(NetworkLayout): the cells
        region((float,float)): (rho_min, rho_max) in dB
        rng(np.random.Generator): the random source
        shadowing_std_db(float): log-normal shadowing standard deviation, per link
        attempt_cap(int): drops allowed per UE

    Returns:
        (float[][], float[][]): the K positions and the K x K large-scale gains in dB where
        row i holds the gains from every BS to UE i
    """
    rho_min, rho_max = _check_region(region)
    size = layout.cell_count
    positions = np.zeros((size, 2))
    alpha_db = np.zeros((size, size))
    for cell in range(size):
        attempts = 0
        while True:
            if attempts >= attempt_cap:
                raise RegionUnreachableError(
                    f"no drop in cell {cell} reached ({rho_min}, {rho_max}) dB in {attempt_cap} attempts")
            chunk = min(CHUNK, attempt_cap - attempts)
            attempts += chunk
            candidates = layout.bs_positions[cell] + rng.uniform(-1.0, 1.0, (chunk, 2)) * layout.cell_radius
            shadowing = rng.normal(0.0, shadowing_std_db, (chunk, size))
            inside = layout.inside_cell(candidates, cell)
            distances = np.maximum(layout.distances(candidates), np.finfo(float).tiny)
            gains = -pathloss_db(distances) + shadowing
            margin = edge_margin_db(gains, cell)
            hits = np.flatnonzero(inside & (margin >= rho_min) & (margin < rho_max))
            if hits.size:
                positions[cell] = candidates[hits[0]]
                alpha_db[cell] = gains[hits[0]]
                break
    return positions, alpha_db
