"""Finite-difference eigensolver on masked 2D grids with Dirichlet boundary.

Domains are unions of disks and rectangles sampled on a uniform lattice: a
node is interior iff it lies strictly inside the point set.  The Laplacian is
the 5-point stencil applied matrix-free (zeros at exterior nodes act as the
Dirichlet condition), eigenvalues come from inverse power iteration with
conjugate-gradient inner solves, and the mean-zero-against-g constraint is
enforced by projecting every iterate and operator application onto the
orthogonal complement of the weight vector, which keeps the operator
symmetric positive-definite on the constraint subspace.

This module is the independent cross-check for the analytic two-ball branch:
discretization error is O(h) at curved boundaries (mask inclusion) and the
eigenvalue comparisons downstream budget 1-2% for it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import fft as sp_fft
from scipy import ndimage

from .bessel import Dimension
from .twoball import solve_optimal_pair

__all__ = [
    "DomainError",
    "ConvergenceError",
    "GridDomain",
    "ConstraintField",
    "TwistedSolution",
    "NodalReport",
    "build_domain",
    "two_disk_shapes",
    "assemble_laplacian",
    "DirichletLaplacian",
    "dirichlet_eigs",
    "twisted_eig",
    "nodal_report",
    "attaining_g",
    "boundary_concentration_g",
    "twisted_test_function",
    "isoperimetric_check",
    "load_spec",
    "run_spec",
]

_RNG_SEED = 0x5EED
_INNER_TOL = 1e-10
_RAYLEIGH_TOL = 1e-10
_NODAL_THRESHOLD = 1e-7
_MIN_INTERIOR = 16


class DomainError(ValueError):
    """Bad geometry or constraint specification."""


class ConvergenceError(RuntimeError):
    """An inner (CG) or outer (eigen) iteration failed to converge."""


# --------------------------------------------------------------------------
# geometry


def _shape_bbox(shape: dict):
    kind = shape.get("type")
    if kind == "disk":
        (cx, cy), r = shape["center"], shape["radius"]
        if r <= 0:
            raise DomainError(f"disk radius must be positive: {r}")
        return cx - r, cy - r, cx + r, cy + r
    if kind == "rect":
        (x0, y0), (x1, y1) = shape["min"], shape["max"]
        if x1 <= x0 or y1 <= y0:
            raise DomainError(f"empty rectangle: {shape}")
        return x0, y0, x1, y1
    raise DomainError(f"unknown shape type: {kind!r}")


def _shape_mask(shape: dict, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    if shape["type"] == "disk":
        (cx, cy), r = shape["center"], shape["radius"]
        return (X - cx) ** 2 + (Y - cy) ** 2 < r * r
    (x0, y0), (x1, y1) = shape["min"], shape["max"]
    return (X > x0) & (X < x1) & (Y > y0) & (Y < y1)


@dataclass
class GridDomain:
    """Masked uniform grid: node (ix, iy) sits at (x0 + ix h, y0 + iy h)."""

    h: float
    nx: int
    ny: int
    x0: float
    y0: float
    mask: np.ndarray  # (ny, nx) bool, True at interior nodes
    shape_spec: list
    index: np.ndarray = field(init=False)  # (ny, nx) int, -1 outside
    n_interior: int = field(init=False)

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.shape != (self.ny, self.nx):
            raise DomainError("mask shape does not match grid extents")
        self.n_interior = int(self.mask.sum())
        self.index = np.full((self.ny, self.nx), -1, dtype=np.int64)
        self.index[self.mask] = np.arange(self.n_interior)

    @property
    def area(self) -> float:
        return self.n_interior * self.h * self.h

    def coordinates(self):
        """(x, y) arrays of the interior nodes, in index order."""
        iy, ix = np.nonzero(self.mask)
        return self.x0 + ix * self.h, self.y0 + iy * self.h

    def to_grid(self, u: np.ndarray) -> np.ndarray:
        full = np.zeros((self.ny, self.nx))
        full[self.mask] = u
        return full


def build_domain(shapes: list, h: float, holes: list = ()) -> GridDomain:
    """Union-of-shapes domain sampled at spacing h; ``holes`` are subtracted
    (used for punctured-domain cross-checks, not part of the JSON schema)."""
    if h <= 0 or not math.isfinite(h):
        raise DomainError(f"grid spacing must be positive: h={h}")
    if not shapes:
        raise DomainError("at least one shape is required")
    boxes = [_shape_bbox(s) for s in shapes]
    xmin = min(b[0] for b in boxes)
    ymin = min(b[1] for b in boxes)
    xmax = max(b[2] for b in boxes)
    ymax = max(b[3] for b in boxes)
    nx = int(math.ceil((xmax - xmin) / h - 1e-12)) + 1
    ny = int(math.ceil((ymax - ymin) / h - 1e-12)) + 1
    xs = xmin + np.arange(nx) * h
    ys = ymin + np.arange(ny) * h
    X, Y = np.meshgrid(xs, ys)
    mask = np.zeros((ny, nx), dtype=bool)
    for s in shapes:
        mask |= _shape_mask(s, X, Y)
    for s in holes:
        mask &= ~_shape_mask(s, X, Y)
    domain = GridDomain(h=h, nx=nx, ny=ny, x0=xmin, y0=ymin, mask=mask,
                        shape_spec=list(shapes))
    if domain.n_interior < _MIN_INTERIOR:
        raise DomainError(
            f"degenerate domain: {domain.n_interior} interior nodes < {_MIN_INTERIOR}"
        )
    return domain


def two_disk_shapes(r_plus: float, r_minus: float, gap: float = 0.2):
    """Two disjoint disks on a common horizontal axis, larger one first."""
    yc = r_plus
    c_plus = (r_plus, yc)
    c_minus = (2.0 * r_plus + gap + r_minus, yc)
    return [
        {"type": "disk", "center": list(c_plus), "radius": r_plus},
        {"type": "disk", "center": list(c_minus), "radius": r_minus},
    ]


# --------------------------------------------------------------------------
# operator


class DirichletLaplacian:
    """Matrix-free 5-point -Laplacian on the interior nodes (SPD)."""

    def __init__(self, domain: GridDomain):
        if domain.n_interior < 1:
            raise DomainError("empty domain")
        self.domain = domain
        self._inv_h2 = 1.0 / (domain.h * domain.h)

    @property
    def n(self) -> int:
        return self.domain.n_interior

    def matvec(self, u: np.ndarray) -> np.ndarray:
        dom = self.domain
        full = dom.to_grid(u)
        out = 4.0 * full
        out[:, 1:] -= full[:, :-1]
        out[:, :-1] -= full[:, 1:]
        out[1:, :] -= full[:-1, :]
        out[:-1, :] -= full[1:, :]
        return out[dom.mask] * self._inv_h2

    __call__ = matvec

    def diagonal(self) -> np.ndarray:
        # every interior node keeps the full 4/h^2 diagonal (missing
        # neighbours are Dirichlet zeros), so Jacobi scaling is a constant
        return np.full(self.n, 4.0 * self._inv_h2)


def assemble_laplacian(domain: GridDomain) -> DirichletLaplacian:
    return DirichletLaplacian(domain)


# --------------------------------------------------------------------------
# linear and eigen solvers


class _BoxPoissonPreconditioner:
    """Fictitious-domain preconditioner: exact 5-point Poisson solve on the
    bounding rectangle via the type-I discrete sine transform (extend the
    residual by zero, solve, restrict).  Symmetric positive definite, and it
    captures the stencil's stiffness exactly away from the mask boundary."""

    def __init__(self, domain: GridDomain):
        self.domain = domain
        h2 = domain.h * domain.h
        # pad the box to FFT-friendly extents (a larger enclosing rectangle
        # is still a valid fictitious domain)
        self._px = sp_fft.next_fast_len(domain.nx + 1, real=True) - 1
        self._py = sp_fft.next_fast_len(domain.ny + 1, real=True) - 1
        lx = (2.0 - 2.0 * np.cos(np.pi * np.arange(1, self._px + 1) / (self._px + 1))) / h2
        ly = (2.0 - 2.0 * np.cos(np.pi * np.arange(1, self._py + 1) / (self._py + 1))) / h2
        self._eig = lx[None, :] + ly[:, None]

    def apply(self, r: np.ndarray) -> np.ndarray:
        dom = self.domain
        full = np.zeros((self._py, self._px))
        full[: dom.ny, : dom.nx][dom.mask] = r
        coeff = sp_fft.dstn(full, type=1, norm="ortho")
        coeff /= self._eig
        z = sp_fft.dstn(coeff, type=1, norm="ortho")
        return z[: dom.ny, : dom.nx][dom.mask]


def _cg(matvec: Callable, b: np.ndarray, x0: Optional[np.ndarray] = None,
        tol: float = _INNER_TOL, maxit: int = 50000,
        minv: Optional[Callable] = None) -> np.ndarray:
    b_norm = math.sqrt(float(b @ b))
    if b_norm == 0.0:
        return np.zeros_like(b)
    if x0 is None:
        x = np.zeros_like(b)
        r = b.copy()
    else:
        x = x0.copy()
        r = b - matvec(x)
    z = minv(r) if minv is not None else r
    p = z.copy()
    rz = float(r @ z)
    target = tol * b_norm
    for _ in range(maxit):
        if math.sqrt(float(r @ r)) <= target:
            return x
        Ap = matvec(p)
        pAp = float(p @ Ap)
        if pAp <= 0.0:
            raise ConvergenceError("CG encountered a non-positive curvature direction")
        step = rz / pAp
        x += step * p
        r -= step * Ap
        z = minv(r) if minv is not None else r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise ConvergenceError(f"CG did not reach tolerance {tol} in {maxit} iterations")


def _inverse_power(apply_full: Callable, n: int, seed_vector: np.ndarray,
                   projections: list, resid_factor: float = 1e-9,
                   maxit: int = 500, minv: Optional[Callable] = None):
    """Smallest eigenpair of the operator restricted to the intersection of
    the orthogonal complements in ``projections`` (each a unit vector).

    Plain inverse iteration contracts by the eigenvalue ratio per solve,
    which degenerates when eigenvalues cluster, so once the Rayleigh
    quotient settles the solves are shifted by s = rho - max(3 resid,
    1e-6 rho).  Rayleigh quotients bound the target from above within the
    subspace and |rho - lambda| <= resid, so the shifted operator stays
    positive-definite while the contraction factor collapses with the
    residual (superlinear outer convergence); the shift retreats to zero on
    any sign of indefiniteness.
    """

    def project(v):
        for q in projections:
            v = v - (q @ v) * q
        return v

    minv_proj = None
    if minv is not None:
        minv_proj = (lambda r: project(minv(r))) if projections else minv

    v = project(seed_vector.astype(float))
    norm = math.sqrt(float(v @ v))
    if norm < 1e-300:
        raise ConvergenceError("seed vector lies in the constraint subspace complement")
    v /= norm
    lam = None
    w = None
    shift = 0.0
    shift_allowed = True
    it = 0
    guard = 0
    while it < maxit:
        it += 1

        def apply_shifted(u, s=shift):
            up = project(u)
            out = project(apply_full(up))
            if s != 0.0:
                out -= s * up
            return out

        try:
            w = _cg(apply_shifted, v, x0=w, minv=minv_proj)
        except ConvergenceError:
            guard += 1
            if guard > 3 or shift == 0.0:
                raise
            shift = 0.0  # retreat to the unshifted, definitely-SPD solve
            shift_allowed = False
            w = None
            it -= 1
            continue
        w = project(w)
        w_norm = math.sqrt(float(w @ w))
        if w_norm == 0.0:
            raise ConvergenceError("inverse iteration produced the zero vector")
        v_new = w / w_norm
        Av_full = apply_full(v_new)
        Av = project(Av_full)
        lam_new = float(v_new @ Av)
        resid = Av - lam_new * v_new
        resid_norm = math.sqrt(float(resid @ resid))
        full_norm = math.sqrt(float(Av_full @ Av_full))
        if (
            lam is not None
            and abs(lam_new - lam) <= _RAYLEIGH_TOL * max(1.0, abs(lam_new))
            and resid_norm <= resid_factor * max(full_norm, 1e-300)
        ):
            return lam_new, v_new, it, resid_norm
        v, lam = v_new, lam_new
        w = w_norm * v  # warm start for the next solve
        if (
            shift_allowed
            and lam_new > 0.0
            and resid_norm < 0.05 * lam_new
        ):
            new_shift = lam_new - max(3.0 * resid_norm, 1e-6 * lam_new)
            if new_shift > shift:
                w *= (lam_new - shift) / max(lam_new - new_shift, 1e-300)
                shift = new_shift
    raise ConvergenceError(f"inverse power iteration did not converge in {maxit} steps")


def _block_smallest(apply_full: Callable, n: int, seeds: np.ndarray,
                    projections: list, resid_factor: float = 1e-9,
                    maxit: int = 300, minv: Optional[Callable] = None):
    """Smallest eigenpair on the constraint subspace by block inverse
    iteration with Rayleigh-Ritz extraction.

    A block of two vectors resolves the near-degenerate doublets that defeat
    single-vector iteration (angular second modes of disks split only by
    grid anisotropy): the Ritz step separates the cluster while the solves
    only need to contract against the spectrum outside it.
    """

    def project(v):
        for q in projections:
            v = v - (q @ v) * q
        return v

    minv_proj = None
    if minv is not None:
        minv_proj = (lambda r: project(minv(r))) if projections else minv

    block = [project(s.astype(float)) for s in seeds]
    bs = len(block)
    lam = None
    warm = [None] * bs
    shift = 0.0
    shift_allowed = True
    it = 0
    guard = 0
    while it < maxit:
        it += 1

        def apply_shifted(u, s=shift):
            up = project(u)
            out = project(apply_full(up))
            if s != 0.0:
                out -= s * up
            return out

        try:
            new_block = []
            for j, col in enumerate(block):
                w = _cg(apply_shifted, col, x0=warm[j], minv=minv_proj)
                new_block.append(project(w))
        except ConvergenceError:
            guard += 1
            if guard > 3 or shift == 0.0:
                raise
            shift = 0.0
            shift_allowed = False
            warm = [None] * bs
            it -= 1
            continue
        # orthonormalize within the subspace
        basis = []
        for w in new_block:
            for b in basis:
                w = w - (b @ w) * b
            norm = math.sqrt(float(w @ w))
            if norm < 1e-250:
                raise ConvergenceError("block collapsed during orthonormalization")
            basis.append(w / norm)
        # Rayleigh-Ritz on the block
        applied = [project(apply_full(b)) for b in basis]
        S = np.array([[float(basis[i] @ applied[j]) for j in range(bs)] for i in range(bs)])
        S = 0.5 * (S + S.T)
        ritz_vals, ritz_vecs = np.linalg.eigh(S)
        v = sum(ritz_vecs[i, 0] * basis[i] for i in range(bs))
        Av_full = apply_full(v)
        Av = project(Av_full)
        lam_new = float(ritz_vals[0])
        resid = Av - lam_new * v
        resid_norm = math.sqrt(float(resid @ resid))
        full_norm = math.sqrt(float(Av_full @ Av_full))
        if (
            lam is not None
            and abs(lam_new - lam) <= _RAYLEIGH_TOL * max(1.0, abs(lam_new))
            and resid_norm <= resid_factor * max(full_norm, 1e-300)
        ):
            return lam_new, v, it, resid_norm
        if (
            shift_allowed
            and lam_new > 0.0
            and resid_norm < 0.05 * lam_new
        ):
            # Ritz values sit above the true eigenvalue by at most the
            # residual, so this shift stays strictly below it
            new_shift = lam_new - max(3.0 * resid_norm, 1e-6 * lam_new)
            if new_shift > shift:
                shift = new_shift
                warm = [None] * bs
            else:
                warm = list(basis)
        else:
            warm = list(basis)
        block = [sum(ritz_vecs[i, j] * basis[i] for i in range(bs)) for j in range(bs)]
        lam = lam_new
    raise ConvergenceError(f"block inverse iteration did not converge in {maxit} steps")


def dirichlet_eigs(domain: GridDomain, k: int = 1):
    """Smallest k (k <= 2) Dirichlet eigenpairs, eigenvectors orthonormal;
    the first eigenvector is oriented positive."""
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2: {k}")
    op = assemble_laplacian(domain)
    n = op.n
    minv = _BoxPoissonPreconditioner(domain).apply
    ones = np.ones(n)
    lam1, v1, _, _ = _inverse_power(op.matvec, n, ones, [], minv=minv)
    if float(v1.sum()) < 0.0:
        v1 = -v1
    out = [(lam1, v1)]
    if k == 2:
        rng = np.random.default_rng(_RNG_SEED)
        seeds = rng.standard_normal((2, n))
        lam2, v2, _, _ = _block_smallest(op.matvec, n, seeds, [v1], minv=minv)
        out.append((lam2, v2))
    return out


# --------------------------------------------------------------------------
# constraint fields


@dataclass
class ConstraintField:
    """Weight g on the interior nodes (the orthogonality constraint)."""

    values: np.ndarray
    class_tag: str  # zero | constant | bang_bang | custom
    alpha: Optional[float] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def validate_two_level(self):
        if self.class_tag == "bang_bang":
            levels = np.unique(self.values)
            ok = all(
                min(abs(v - self.alpha), abs(v - 1.0)) < 1e-12 for v in levels
            )
            if not ok:
                raise DomainError("bang_bang field must take only the values {alpha, 1}")

    def in_uniform_class(self, alpha: float) -> bool:
        """Membership in the class of weights bounded between alpha and 1."""
        return bool(
            np.all(self.values >= alpha - 1e-12) and np.all(self.values <= 1.0 + 1e-12)
        )


def zero_field(domain: GridDomain) -> ConstraintField:
    return ConstraintField(np.zeros(domain.n_interior), "zero")


def constant_field(domain: GridDomain, value: float = 1.0) -> ConstraintField:
    if value == 0.0:
        raise DomainError("constant field must be nonzero (use the zero class)")
    return ConstraintField(np.full(domain.n_interior, float(value)), "constant",
                           alpha=min(abs(value), 1.0))


def bang_bang_field(domain: GridDomain, alpha: float) -> ConstraintField:
    """Two-level weight: alpha on the largest connected component of the
    domain, 1 on the others (a connected domain gets the constant alpha)."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1]: {alpha}")
    labels, count = ndimage.label(domain.mask)
    sizes = ndimage.sum_labels(np.ones_like(labels), labels, index=range(1, count + 1))
    largest = int(np.argmax(sizes)) + 1  # ties resolve to the first label
    values = np.where(labels[domain.mask] == largest, alpha, 1.0)
    return ConstraintField(values, "bang_bang", alpha=alpha)


def custom_field(domain: GridDomain, values: np.ndarray,
                 alpha: Optional[float] = None) -> ConstraintField:
    values = np.asarray(values, dtype=float)
    if values.shape != (domain.n_interior,):
        raise DomainError(
            f"custom field needs one value per interior node "
            f"({domain.n_interior}), got shape {values.shape}"
        )
    return ConstraintField(values, "custom", alpha=alpha)


# --------------------------------------------------------------------------
# twisted eigensolve


@dataclass
class TwistedSolution:
    lam: float
    u: np.ndarray
    xi: float
    iterations: int
    residual: float


def twisted_eig(domain: GridDomain, g: ConstraintField) -> TwistedSolution:
    """Smallest eigenvalue of the Dirichlet Laplacian restricted to the
    discrete orthogonal complement of g, via projected inverse iteration.

    The zero class delegates to the unconstrained first eigenvalue.
    """
    op = assemble_laplacian(domain)
    n = op.n
    if g.values.shape != (n,):
        raise DomainError("constraint field does not match the domain")
    minv = _BoxPoissonPreconditioner(domain).apply
    if g.class_tag == "zero" or not np.any(g.values):
        if g.class_tag != "zero":
            raise DomainError("non-zero class field with all-zero values")
        lam, v, it, resid = _inverse_power(op.matvec, n, np.ones(n), [], minv=minv)
        return TwistedSolution(lam=lam, u=v, xi=0.0, iterations=it, residual=resid)
    if n < 2:
        raise DomainError("constraint subspace is empty on a single-node domain")
    q = g.values / math.sqrt(float(g.values @ g.values))
    rng = np.random.default_rng(_RNG_SEED)
    seed = rng.standard_normal(n)
    try:
        lam, v, it, resid = _inverse_power(op.matvec, n, seed, [q], resid_factor=5e-9,
                                           minv=minv, maxit=120)
    except ConvergenceError:
        # nearly multiple constrained eigenvalue: fall back to the block solver
        seeds = rng.standard_normal((2, n))
        lam, v, it, resid = _block_smallest(op.matvec, n, seeds, [q],
                                            resid_factor=5e-9, minv=minv)
    Av = op.matvec(v)
    xi = float((Av - lam * v) @ g.values) / float(g.values @ g.values)
    return TwistedSolution(lam=lam, u=v, xi=xi, iterations=it, residual=resid)


# --------------------------------------------------------------------------
# nodal structure


@dataclass
class NodalReport:
    count: int
    signs: list
    measures: list  # node count * h^2 per component
    rayleigh: list  # discrete Rayleigh quotient per component
    node_counts: list


def nodal_report(sol: TwistedSolution, domain: GridDomain) -> NodalReport:
    """Connected components of {u > theta} and {u < -theta} with
    theta = 1e-7 max|u|, each with its measure and discrete Rayleigh
    quotient (zero-extension energy)."""
    op = assemble_laplacian(domain)
    theta = _NODAL_THRESHOLD * float(np.max(np.abs(sol.u)))
    full = domain.to_grid(sol.u)
    components = []
    for sign, region in ((1, full > theta), (-1, full < -theta)):
        region &= domain.mask
        labels, count = ndimage.label(region)
        for lab in range(1, count + 1):
            comp_mask = labels == lab
            u_c = np.where(comp_mask[domain.mask], sol.u, 0.0)
            norm2 = float(u_c @ u_c)
            energy = float(u_c @ op.matvec(u_c))
            nodes = int(comp_mask.sum())
            components.append((sign, nodes, energy / norm2 if norm2 > 0 else math.inf))
    components.sort(key=lambda t: (-t[1], t[0]))
    return NodalReport(
        count=len(components),
        signs=[c[0] for c in components],
        measures=[c[1] * domain.h**2 for c in components],
        rayleigh=[c[2] for c in components],
        node_counts=[c[1] for c in components],
    )


# --------------------------------------------------------------------------
# constraint constructions


def attaining_g(domain: GridDomain, a1_frac: float, a2_frac: float) -> ConstraintField:
    """Sign-changing weight built from the first eigenfunction so that the
    constrained eigenvalue collapses to the unconstrained one:
    g = (int_{A2} u1) on A1, -(int_{A1} u1) on A2, with A1/A2 vertical slabs
    spanning the given fractions of the bounding box from the left/right."""
    if a1_frac <= 0.0 or a2_frac <= 0.0 or a1_frac + a2_frac > 1.0 + 1e-12:
        raise DomainError("slab fractions must be positive and non-overlapping")
    (lam1, u1), = dirichlet_eigs(domain, 1)
    x, _ = domain.coordinates()
    width = (domain.nx - 1) * domain.h
    left_cut = domain.x0 + a1_frac * width
    right_cut = domain.x0 + (1.0 - a2_frac) * width
    in_a1 = x < left_cut
    in_a2 = x > right_cut
    if not np.any(in_a1) or not np.any(in_a2):
        raise DomainError("slab misses the domain interior")
    h2 = domain.h**2
    int_a1 = float(u1[in_a1].sum()) * h2
    int_a2 = float(u1[in_a2].sum()) * h2
    values = np.zeros(domain.n_interior)
    values[in_a1] = int_a2
    values[in_a2] = -int_a1
    return ConstraintField(values, "custom")


def boundary_concentration_g(domain: GridDomain, r: float, alpha: float) -> ConstraintField:
    """Two-level weight concentrating near a boundary point: 1 inside the
    ball of radius r around the lexicographically smallest boundary node,
    alpha outside.  Drives the constrained eigenvalue down toward the
    unconstrained one as (r, alpha) shrink."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1]: {alpha}")
    if r <= 0.0:
        raise DomainError(f"radius must be positive: {r}")
    mask = domain.mask
    neighbor_interior = np.zeros_like(mask)
    neighbor_interior[:, 1:] |= mask[:, :-1]
    neighbor_interior[:, :-1] |= mask[:, 1:]
    neighbor_interior[1:, :] |= mask[:-1, :]
    neighbor_interior[:-1, :] |= mask[1:, :]
    boundary = neighbor_interior & ~mask
    if not boundary.any():
        raise DomainError("domain has no boundary nodes")
    iy, ix = np.nonzero(boundary)
    order = np.lexsort((iy, ix))  # smallest ix, then iy
    bx = domain.x0 + ix[order[0]] * domain.h
    by = domain.y0 + iy[order[0]] * domain.h
    x, y = domain.coordinates()
    inside = (x - bx) ** 2 + (y - by) ** 2 < r * r
    if not inside.any() or inside.all():
        raise DomainError("degenerate split: ball covers none or all of the domain")
    values = np.where(inside, 1.0, alpha)
    return ConstraintField(values, "bang_bang", alpha=alpha)


def twisted_test_function(v1: np.ndarray, v2: np.ndarray, g: ConstraintField) -> np.ndarray:
    """Combination of two independent functions lying in the constraint
    subspace: v1 - (<v1,g>/<v2,g>) v2 when <v2,g> is nonzero, else v2."""
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    gv = g.values
    inner2 = float(v2 @ gv)
    scale = math.sqrt(float(v2 @ v2)) * math.sqrt(float(gv @ gv))
    if abs(inner2) <= 1e-14 * max(scale, 1e-300):
        return v2.copy()
    gamma = float(v1 @ gv) / inner2
    return v1 - gamma * v2


# --------------------------------------------------------------------------
# the inequality check


def isoperimetric_check(domain: GridDomain, g: ConstraintField):
    """(lhs, rhs, margin) of the scale-invariant inequality: the domain's
    area-normalized constrained eigenvalue against the optimal two-ball
    value at the same uniform-positivity level alpha.

    The grid side converges from below at O(h) boundary error, so callers
    budget a small negative margin at coarse resolution.
    """
    if g.alpha is None:
        raise DomainError("isoperimetric check needs a field with an alpha level")
    if not g.in_uniform_class(g.alpha):
        raise DomainError("field values leave the interval [alpha, 1]")
    sol = twisted_eig(domain, g)
    lhs = domain.area * sol.lam  # |Omega|^(2/d) lambda at d = 2
    rhs = solve_optimal_pair(Dimension(2), g.alpha).lambda_scaled
    return lhs, rhs, lhs - rhs


# --------------------------------------------------------------------------
# JSON interface


def load_spec(spec: dict):
    """Build (domain, field) from the JSON document
    {"h": .., "shapes": [..], "g": {"class": .., "alpha": .., "values_file": ..}}."""
    if not isinstance(spec, dict):
        raise DomainError("spec must be a JSON object")
    try:
        h = float(spec["h"])
        shapes = spec["shapes"]
        g_spec = spec["g"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"spec missing or malformed field: {exc}") from exc
    if not isinstance(shapes, list) or not isinstance(g_spec, dict):
        raise DomainError("'shapes' must be a list and 'g' an object")
    domain = build_domain(shapes, h)
    klass = g_spec.get("class")
    alpha = g_spec.get("alpha")
    if klass == "zero":
        field_ = zero_field(domain)
    elif klass == "constant":
        field_ = constant_field(domain)
    elif klass == "bang_bang":
        if alpha is None:
            raise DomainError("bang_bang class requires 'alpha'")
        field_ = bang_bang_field(domain, float(alpha))
    elif klass == "custom":
        path = g_spec.get("values_file")
        if path is None:
            raise DomainError("custom class requires 'values_file'")
        values = np.loadtxt(path, dtype=float).ravel()
        field_ = custom_field(domain, values,
                              alpha=float(alpha) if alpha is not None else None)
    else:
        raise DomainError(f"unknown constraint class: {klass!r}")
    return domain, field_


def run_spec(spec: dict) -> dict:
    """Solve the spec'd problem and return the flat result record."""
    domain, field_ = load_spec(spec)
    sol = twisted_eig(domain, field_)
    eigs = dirichlet_eigs(domain, 2)
    report = nodal_report(sol, domain)
    return {
        "lambda": sol.lam,
        "lambda1": eigs[0][0],
        "lambda2": eigs[1][0],
        "xi": sol.xi,
        "nodal_count": report.count,
        "area": domain.area,
        "iterations": sol.iterations,
    }


def load_spec_file(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"invalid JSON in {path}: {exc}") from exc
    return spec
