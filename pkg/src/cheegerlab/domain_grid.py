"""Raster domains and discrete geometry: masks, norms, gradient energies, TV.

Conventions, fixed across the package:

* Cell-centered uniform grid. A named shape of extent L is rasterized with
  ``spacing = L / n`` and cell centers at ``(i - margin + 0.5) * spacing``.
* A two-cell zero margin surrounds every mask, so zero extension of a field
  to the whole plane is built in; gradients across the mask boundary land on
  the margin and carry the boundary jump.
* ``inside`` is the boolean mask (cell centers inside the shape). ``coverage``
  is an anti-aliased weight in [0, 1] per cell (fraction of the cell covered
  by the shape, linearized through the signed distance); it refines the box
  constraint of the variational solvers on curved boundaries and agrees with
  ``inside`` wherever the boundary runs along cell edges.
* All differences are forward differences; the x index is axis 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage
from skimage import measure as _sk_measure

__all__ = [
    "GridDomain",
    "ScalarField",
    "BinaryRegion",
    "build_domain",
    "measure_region",
    "inner_region",
    "lq_norm",
    "grad_energy_p",
    "total_variation",
    "indicator",
    "mollified_indicator",
    "save_mask",
    "load_mask",
]

_MARGIN = 2
_PERIMETER_SIGMA = 1.0  # presmoothing (cells) before contour extraction


@dataclass(frozen=True)
class GridDomain:
    """Immutable raster domain: geometry, boolean mask, anti-aliased coverage."""

    nx: int
    ny: int
    spacing: float
    inside: np.ndarray
    coverage: np.ndarray
    shape_tag: str
    convex: bool

    def __post_init__(self) -> None:
        if self.spacing <= 0.0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if self.inside.shape != (self.nx, self.ny):
            raise ValueError("inside mask shape does not match (nx, ny)")
        if self.coverage.shape != (self.nx, self.ny):
            raise ValueError("coverage shape does not match (nx, ny)")
        if not self.inside.any():
            raise ValueError("inside mask is empty")
        border = (
            self.inside[0, :].any()
            or self.inside[-1, :].any()
            or self.inside[:, 0].any()
            or self.inside[:, -1].any()
        )
        if border:
            raise ValueError("mask touches the raster border; a zero margin is required")
        self.inside.setflags(write=False)
        self.coverage.setflags(write=False)

    @property
    def area(self) -> float:
        """Cell-counting area of the inside mask."""
        return float(self.inside.sum()) * self.spacing**2

    def zeros(self) -> np.ndarray:
        """Fresh zero raster of the domain's shape."""
        return np.zeros((self.nx, self.ny))


@dataclass(frozen=True)
class ScalarField:
    """Real-valued field on a GridDomain, zero outside the inside mask."""

    values: np.ndarray
    domain: GridDomain

    def __post_init__(self) -> None:
        if self.values.shape != (self.domain.nx, self.domain.ny):
            raise ValueError("field shape does not match domain raster")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")
        if np.any(self.values[~self.domain.inside] != 0.0):
            raise ValueError("field is nonzero outside the inside mask")
        self.values.setflags(write=False)


@dataclass(frozen=True)
class BinaryRegion:
    """Subset of a domain's inside mask."""

    mask: np.ndarray
    domain: GridDomain

    def __post_init__(self) -> None:
        if self.mask.shape != (self.domain.nx, self.domain.ny):
            raise ValueError("region shape does not match domain raster")
        if np.any(self.mask & ~self.domain.inside):
            raise ValueError("region extends outside the domain mask")
        self.mask.setflags(write=False)


def _cell_centers(n: int, spacing: float) -> np.ndarray:
    return (np.arange(n + 2 * _MARGIN) - _MARGIN + 0.5) * spacing


def build_domain(shape_tag: str, n: int, **size) -> GridDomain:
    """Rasterize a named shape at resolution ``n`` cells across its extent.

    Parameters
    ----------
    shape_tag : str
        One of ``square`` (side, default 1), ``disk`` (radius, default 1),
        ``rectangle`` (a, b), ``lshape`` (side, default 1), ``mask``
        (mask=2D boolean array, spacing=float).
    n : int
        Cells across the shape extent, at least 16.
    **size
        Shape parameters as keyword arguments, see above.

    Returns
    -------
    GridDomain
    """
    if n < 16:
        raise ValueError(f"resolution must be >= 16, got {n}")

    if shape_tag == "square":
        side = float(size.pop("side", 1.0))
        if side <= 0.0:
            raise ValueError("side must be positive")
        _reject_extra(size)
        h = side / n
        x = _cell_centers(n, h)
        X, Y = np.meshgrid(x, x, indexing="ij")
        inside = (X > 0) & (X < side) & (Y > 0) & (Y < side)
        return GridDomain(len(x), len(x), h, inside, inside.astype(float), "square", True)

    if shape_tag == "disk":
        radius = float(size.pop("radius", 1.0))
        if radius <= 0.0:
            raise ValueError("radius must be positive")
        _reject_extra(size)
        h = 2.0 * radius / n
        x = _cell_centers(n, h)
        X, Y = np.meshgrid(x, x, indexing="ij")
        r = np.hypot(X - radius, Y - radius)
        coverage = np.clip(0.5 + (radius - r) / h, 0.0, 1.0)
        inside = r < radius
        return GridDomain(len(x), len(x), h, inside, coverage, "disk", True)

    if shape_tag == "rectangle":
        a = float(size.pop("a", 2.0))
        b = float(size.pop("b", 1.0))
        if a <= 0.0 or b <= 0.0:
            raise ValueError("rectangle sides must be positive")
        _reject_extra(size)
        h = max(a, b) / n
        x = _cell_centers(int(round(a / h)), h)
        y = _cell_centers(int(round(b / h)), h)
        X, Y = np.meshgrid(x, y, indexing="ij")
        inside = (X > 0) & (X < a) & (Y > 0) & (Y < b)
        return GridDomain(len(x), len(y), h, inside, inside.astype(float), "rectangle", True)

    if shape_tag == "lshape":
        side = float(size.pop("side", 1.0))
        if side <= 0.0:
            raise ValueError("side must be positive")
        _reject_extra(size)
        h = side / n
        x = _cell_centers(n, h)
        X, Y = np.meshgrid(x, x, indexing="ij")
        inside = (X > 0) & (X < side) & (Y > 0) & (Y < side)
        inside &= ~((X > side / 2) & (Y > side / 2))
        return GridDomain(len(x), len(x), h, inside, inside.astype(float), "lshape", False)

    if shape_tag == "mask":
        mask = np.asarray(size.pop("mask"), dtype=bool)
        spacing = float(size.pop("spacing", 1.0))
        _reject_extra(size)
        if mask.ndim != 2 or not mask.any():
            raise ValueError("custom mask must be a nonempty 2D boolean array")
        padded = np.pad(mask, _MARGIN)
        return GridDomain(
            padded.shape[0], padded.shape[1], spacing, padded, padded.astype(float), "custom", False
        )

    raise ValueError(f"unknown shape tag {shape_tag!r}")


def _reject_extra(size: dict) -> None:
    if size:
        raise ValueError(f"unexpected size parameters: {sorted(size)}")


def _contour_length(field: np.ndarray, level: float, spacing: float) -> float:
    total = 0.0
    for contour in _sk_measure.find_contours(field, level):
        d = np.diff(contour, axis=0)
        total += float(np.sqrt((d**2).sum(axis=1)).sum())
    return total * spacing


def measure_region(region: BinaryRegion) -> tuple[float, float]:
    """Area and perimeter of a raster region.

    Area is cell counting. Perimeter is the marching-squares contour length of
    the mask presmoothed by a one-cell Gaussian, which restores sub-cell
    boundary positions and keeps staircase bias below about one percent for
    smooth shapes at n >= 256.
    """
    h = region.domain.spacing
    count = int(region.mask.sum())
    if count == 0:
        return 0.0, 0.0
    smooth = ndimage.gaussian_filter(region.mask.astype(float), _PERIMETER_SIGMA, mode="constant")
    return count * h * h, _contour_length(smooth, 0.5, h)


def inner_region(domain: GridDomain, r: float) -> BinaryRegion:
    """Cells of the domain at distance greater than ``r`` from the complement.

    Distances are exact Euclidean distances between cell centers, corrected by
    half a spacing so that the mask wall (which runs along cell edges) is the
    zero level.
    """
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    dist = ndimage.distance_transform_edt(domain.inside, sampling=domain.spacing)
    mask = dist - 0.5 * domain.spacing > r
    return BinaryRegion(mask & domain.inside, domain)


def lq_norm(u: ScalarField, q: float) -> float:
    """(sum |u|^q spacing^2)^(1/q) for finite q > 0; max |u| for q = inf.

    For 0 < q < 1 this is the usual defective "norm" (positively homogeneous,
    no triangle inequality); the formula is the same.
    """
    if q == math.inf:
        return float(np.abs(u.values).max())
    if not q > 0.0:
        raise ValueError(f"q must be positive or inf, got {q}")
    vals = np.abs(u.values[u.domain.inside])
    return float((vals**q).sum() * u.domain.spacing**2) ** (1.0 / q)


def _forward_diffs(values: np.ndarray, spacing: float) -> tuple[np.ndarray, np.ndarray]:
    gx = np.zeros_like(values)
    gy = np.zeros_like(values)
    gx[:-1, :] = (values[1:, :] - values[:-1, :]) / spacing
    gy[:, :-1] = (values[:, 1:] - values[:, :-1]) / spacing
    return gx, gy


def grad_energy_p(u: ScalarField, p: float, eps: float = 0.0) -> float:
    """Regularized p-energy: sum ((|grad u|^2 + eps^2)^(p/2)) * spacing^2.

    Forward differences over the full raster; the zero margin makes the
    boundary jump part of the sum.
    """
    if eps < 0.0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    gx, gy = _forward_diffs(u.values, u.domain.spacing)
    mag2 = gx * gx + gy * gy
    if eps == 0.0:
        return float((mag2 ** (p / 2.0)).sum()) * u.domain.spacing**2
    return float(((mag2 + eps * eps) ** (p / 2.0)).sum()) * u.domain.spacing**2


def total_variation(u: ScalarField) -> float:
    """Isotropic discrete total variation: sum sqrt(ux^2 + uy^2) * spacing^2.

    Forward differences over the full raster; for an indicator this is the
    discrete perimeter including the boundary jump.
    """
    gx, gy = _forward_diffs(u.values, u.domain.spacing)
    return float(np.hypot(gx, gy).sum()) * u.domain.spacing**2


def indicator(region: BinaryRegion) -> ScalarField:
    """Sharp 0/1 field of a region."""
    return ScalarField(region.mask.astype(float), region.domain)


def mollified_indicator(region: BinaryRegion, sigma: float = 1.5) -> ScalarField:
    """Indicator smoothed by a Gaussian of ``sigma`` cells, clipped to the domain.

    The smooth transition restores isotropy of the forward-difference TV,
    whose error on a sharp staircase indicator does not vanish under
    refinement. Mass outside the domain mask is folded back by clipping;
    sigma = 1.5 keeps the TV of a rasterized disk within a few percent of the
    true perimeter while staying narrow enough to resolve at n >= 64.
    """
    smooth = ndimage.gaussian_filter(region.mask.astype(float), sigma, mode="constant")
    smooth[~region.domain.inside] = 0.0
    return ScalarField(smooth, region.domain)


def save_mask(region: BinaryRegion | GridDomain, path: str | Path) -> None:
    """Write a mask as plain text: header ``nx ny spacing``, then ny rows of 0/1."""
    if isinstance(region, GridDomain):
        mask, spacing = region.inside, region.spacing
    else:
        mask, spacing = region.mask, region.domain.spacing
    nx, ny = mask.shape
    lines = [f"{nx} {ny} {spacing!r}"]
    for j in range(ny):
        lines.append("".join("1" if mask[i, j] else "0" for i in range(nx)))
    Path(path).write_text("\n".join(lines) + "\n")


def load_mask(path: str | Path) -> GridDomain:
    """Read a plain-text mask written by :func:`save_mask` into a custom domain."""
    text = Path(path).read_text().strip().split("\n")
    try:
        nx_s, ny_s, spacing_s = text[0].split()
        nx, ny, spacing = int(nx_s), int(ny_s), float(spacing_s)
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed mask header in {path}") from exc
    rows = text[1:]
    if len(rows) != ny or any(len(row) != nx for row in rows):
        raise ValueError(f"mask body does not match header dimensions in {path}")
    mask = np.zeros((nx, ny), dtype=bool)
    for j, row in enumerate(rows):
        mask[:, j] = np.frombuffer(row.encode(), dtype=np.uint8) == ord("1")
    # strip any existing margin, then re-pad so the margin invariant holds
    live = np.nonzero(mask)
    i0, i1 = live[0].min(), live[0].max()
    j0, j1 = live[1].min(), live[1].max()
    core = mask[i0 : i1 + 1, j0 : j1 + 1]
    return build_domain("mask", max(16, *core.shape), mask=core, spacing=spacing)
