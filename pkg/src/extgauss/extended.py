"""Extended Gaussian distributions and maps.

An extended Gaussian on R^n is a Gaussian distribution combined with
complete ignorance along a subspace ``nondet``: written additively,
``N(mean, cov) + nondet``.  Translating the mean inside ``nondet`` does
not change the distribution, so values are kept in a normal form with
mean and covariance orthogonal to ``nondet``; equality then reduces to a
componentwise comparison.

Extended Gaussian maps ``x -> A x + N(mean, cov) + nondet`` compose
through the generic annotated-relation engine with the point/covariance
noise pair.  Conditionals split off the nondeterministic directions with
a structured complement, condition the Gaussian part, decompose the
nondeterminism into a function plus output noise, and reassemble.  Exact
conditioning on linear events (``observe``) introduces the residual as an
auxiliary variable, conditions on it, and evaluates at the observed
value, failing loudly when the observation is off the support.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import gauss
from .decorated import CovDec, DecoratedRelation, PairDec, PointDec, rel_compose, rel_tensor
from .gauss import AffineSupportMap, GaussianMap, psd_normalize
from .linrel import graph_decompose
from .subspace import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    column_space,
    image,
    intersect,
    minkowski_sum,
    oblique_projector,
    pseudoinverse,
    structured_complement,
)

_DEC = PairDec(PointDec(), CovDec())


class InfeasibleObservation(ValueError):
    """An exact observation lies outside the support of the variable."""


def _ro(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class ExtendedGaussianMap:
    """``x -> lin @ x + N(mean, cov) + nondet`` from R^n to R^m.

    The stored representative is in normal form: ``lin``, ``mean`` and
    ``cov`` are orthogonal to ``nondet``.  Construction normalizes any
    representative, so equivalent inputs produce equal values.
    """

    __slots__ = ("dom_dim", "cod_dim", "nondet", "lin", "mean", "cov")

    def __init__(self, nondet: Subspace, lin, mean, cov, tol: Tolerance = DEFAULT_TOL):
        lin = np.asarray(lin, dtype=float)
        if lin.ndim != 2:
            raise ValueError("linear part must be a matrix")
        m, n = lin.shape
        mean = np.asarray(mean, dtype=float).reshape(-1)
        if mean.shape != (m,):
            raise ValueError(f"mean of shape {mean.shape}, expected ({m},)")
        if nondet.ambient_dim != m:
            raise ValueError("nondeterminism subspace must live in the codomain")
        cov = psd_normalize(cov, tol)
        if cov.shape != (m, m):
            raise ValueError(f"cov of shape {cov.shape}, expected ({m}, {m})")
        p = nondet.complement_projector()
        object.__setattr__(self, "dom_dim", n)
        object.__setattr__(self, "cod_dim", m)
        object.__setattr__(self, "nondet", nondet)
        object.__setattr__(self, "lin", _ro(p @ lin))
        object.__setattr__(self, "mean", _ro(p @ mean))
        object.__setattr__(self, "cov", _ro(psd_normalize(p @ cov @ p, tol)))

    def __setattr__(self, name, value):
        raise AttributeError("ExtendedGaussianMap is immutable")

    def equals(self, other: "ExtendedGaussianMap", tol: Tolerance = DEFAULT_TOL) -> bool:
        """Equality of the distributions themselves, not representatives.

        Because both sides are in normal form this is a componentwise
        comparison; the choice of complement is fixed once and for all.
        """
        if (self.dom_dim, self.cod_dim) != (other.dom_dim, other.cod_dim):
            return False
        return (
            self.nondet.equals(other.nondet, tol)
            and bool(np.allclose(self.lin, other.lin, atol=tol.eq_abs_tol))
            and bool(np.allclose(self.mean, other.mean, atol=tol.eq_abs_tol))
            and bool(np.allclose(self.cov, other.cov, atol=tol.eq_abs_tol))
        )

    def __repr__(self):
        return (
            f"ExtendedGaussianMap({self.dom_dim} -> {self.cod_dim}, "
            f"nondet dim {self.nondet.dim})"
        )


class ExtendedGaussian(ExtendedGaussianMap):
    """An extended Gaussian distribution: the domain-0 case of a map."""

    def __init__(self, nondet: Subspace, mean, cov, tol: Tolerance = DEFAULT_TOL):
        mean = np.asarray(mean, dtype=float).reshape(-1)
        super().__init__(nondet, np.zeros((mean.shape[0], 0)), mean, cov, tol)

    @property
    def dim(self) -> int:
        return self.cod_dim

    def __repr__(self):
        return f"ExtendedGaussian(dim={self.dim}, nondet dim {self.nondet.dim})"

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "mean": self.mean.tolist(),
            "cov": self.cov.tolist(),
            "nondet_basis": self.nondet.basis.T.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict, tol: Tolerance = DEFAULT_TOL) -> "ExtendedGaussian":
        nondet = Subspace.span(data["nondet_basis"], ambient_dim=data["dim"], tol=tol)
        return cls(nondet, data["mean"], data["cov"], tol)


def as_distribution(m: ExtendedGaussianMap) -> ExtendedGaussian:
    if m.dom_dim != 0:
        raise ValueError("not a distribution: domain dimension is nonzero")
    return ExtendedGaussian(m.nondet, m.mean, m.cov)


def gaussian(mean, cov, tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussian:
    """An ordinary Gaussian, i.e. with no nondeterministic directions."""
    mean = np.asarray(mean, dtype=float).reshape(-1)
    return ExtendedGaussian(Subspace.zero(mean.shape[0]), mean, cov, tol)


def dirac(point) -> ExtendedGaussian:
    point = np.asarray(point, dtype=float).reshape(-1)
    n = point.shape[0]
    return ExtendedGaussian(Subspace.zero(n), point, np.zeros((n, n)))


def uniform(n: int) -> ExtendedGaussian:
    """Complete ignorance on R^n: nondeterminism along every direction."""
    return ExtendedGaussian(Subspace.full(n), np.zeros(n), np.zeros((n, n)))


def from_gaussian(g: GaussianMap) -> ExtendedGaussianMap:
    return ExtendedGaussianMap(Subspace.zero(g.cod_dim), g.lin, g.mean, g.cov)


def to_gaussian(m: ExtendedGaussianMap) -> GaussianMap:
    if m.nondet.dim != 0:
        raise ValueError("map has nondeterministic directions")
    return GaussianMap(m.lin, m.mean, m.cov)


def identity(n: int) -> ExtendedGaussianMap:
    return ExtendedGaussianMap(
        Subspace.zero(n), np.eye(n), np.zeros(n), np.zeros((n, n))
    )


def copy(n: int) -> ExtendedGaussianMap:
    return ExtendedGaussianMap(
        Subspace.zero(2 * n),
        np.vstack([np.eye(n), np.eye(n)]),
        np.zeros(2 * n),
        np.zeros((2 * n, 2 * n)),
    )


def delete(n: int) -> ExtendedGaussianMap:
    return ExtendedGaussianMap(
        Subspace.zero(0), np.zeros((0, n)), np.zeros(0), np.zeros((0, 0))
    )


def _to_rel(m: ExtendedGaussianMap) -> DecoratedRelation:
    return DecoratedRelation(_DEC, m.nondet, m.lin, (m.mean, m.cov))


def _from_rel(r: DecoratedRelation, tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussianMap:
    mean, cov = r.noise
    return ExtendedGaussianMap(r.nondet, r.lin, mean, cov, tol)


def compose(f2: ExtendedGaussianMap, f1: ExtendedGaussianMap,
            tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussianMap:
    """Sequential composition through the annotated-relation engine."""
    if f1.cod_dim != f2.dom_dim:
        raise ValueError("shape mismatch in composition")
    return _from_rel(rel_compose(_to_rel(f2), _to_rel(f1), tol), tol)


def tensor(f: ExtendedGaussianMap, g: ExtendedGaussianMap,
           tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussianMap:
    return _from_rel(rel_tensor(_to_rel(f), _to_rel(g)), tol)


def pushforward(a, psi: ExtendedGaussian, tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussian:
    """Image distribution under a matrix: the nondeterminism maps along."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[1] != psi.dim:
        raise ValueError(f"matrix of shape {a.shape} applied to R^{psi.dim}")
    return ExtendedGaussian(
        image(a, psi.nondet, tol), a @ psi.mean, a @ psi.cov @ a.T, tol
    )


def translate(psi: ExtendedGaussian, v, tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussian:
    """Shift by a constant vector; shifts inside ``nondet`` are absorbed."""
    v = np.asarray(v, dtype=float).reshape(-1)
    return ExtendedGaussian(psi.nondet, psi.mean + v, psi.cov, tol)


def marginal(psi: ExtendedGaussian, coords: Sequence[int],
             tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussian:
    """Restriction to a subset of coordinates, in the given order."""
    coords = list(coords)
    sel = np.zeros((len(coords), psi.dim))
    for i, c in enumerate(coords):
        sel[i, c] = 1.0
    return pushforward(sel, psi, tol)


def equals(a: ExtendedGaussianMap, b: ExtendedGaussianMap,
           tol: Tolerance = DEFAULT_TOL) -> bool:
    return a.equals(b, tol)


def support(m: ExtendedGaussianMap, tol: Tolerance = DEFAULT_TOL) -> AffineSupportMap:
    """The affine-relation shadow: Gaussian noise widens to its support."""
    return AffineSupportMap(
        m.lin, m.mean, minkowski_sum(column_space(m.cov, tol), m.nondet, tol)
    )


def conditional(phi: ExtendedGaussianMap, nx: int,
                tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussianMap:
    """Conditional of a map into R^{nx} x R^{ny}.

    For ``phi : A -> X x Y`` returns a map ``X x A -> Y`` reproducing the
    joint when composed with the X-marginal.  The nondeterminism is split
    off with a structured complement so the Gaussian part and the purely
    nondeterministic part can be conditioned separately: the former with
    the usual Gaussian formulas, the latter as a linear function of the
    nondeterministic input directions plus residual output noise.
    """
    ny = phi.cod_dim - nx
    if not 0 <= nx <= phi.cod_dim:
        raise ValueError(f"split {nx} out of range for codomain {phi.cod_dim}")
    k, u, _ = structured_complement(phi.nondet, nx, ny, tol)
    p_k = oblique_projector(k, phi.nondet, tol)
    g = gauss.conditional(
        GaussianMap(p_k @ phi.lin, p_k @ phi.mean, p_k @ phi.cov @ p_k.T, tol),
        nx,
        tol,
    )
    h, h_sub = graph_decompose(phi.nondet, nx, tol)
    p_u = u.projector()
    p_dx = np.eye(nx) - p_u
    g_x, g_a = g.lin[:, :nx], g.lin[:, nx:]
    lin = np.hstack([g_x @ p_u + h @ p_dx, g_a])
    return ExtendedGaussianMap(h_sub, lin, g.mean, g.cov, tol)


def observe(psi: ExtendedGaussian, obs, value, tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussian:
    """Condition on the exact linear event ``obs @ x = value``.

    The residual ``obs @ x`` is adjoined as an auxiliary variable, the
    joint is conditioned on it, and the conditional is evaluated at the
    observed value.  Raises :class:`InfeasibleObservation` when the value
    lies outside the affine support of ``obs @ x``.
    """
    obs = np.atleast_2d(np.asarray(obs, dtype=float))
    value = np.asarray(value, dtype=float).reshape(-1)
    k, n = obs.shape
    if n != psi.dim:
        raise ValueError(f"observation matrix of shape {obs.shape} on R^{psi.dim}")
    if value.shape != (k,):
        raise ValueError(f"observed value of shape {value.shape}, expected ({k},)")
    joint = pushforward(np.vstack([obs, np.eye(n)]), psi, tol)
    zm = marginal(joint, range(k), tol)
    # anchor the support's rank cutoff at the joint's covariance scale so
    # that rounding residue from earlier conditioning cannot fake support
    cov_scale = float(np.linalg.norm(joint.cov, 2)) if joint.cov.size else 0.0
    supp = minkowski_sum(column_space(zm.cov, tol, scale=cov_scale), zm.nondet, tol)
    resid = value - zm.mean
    off = resid - supp.basis @ (supp.basis.T @ resid)
    if float(np.linalg.norm(off)) > tol.eq_abs_tol * (1.0 + float(np.linalg.norm(value))):
        raise InfeasibleObservation(
            "observed value lies outside the support of the observed quantity"
        )
    cond = conditional(joint, k, tol)
    return as_distribution(compose(cond, dirac(value), tol))


def condition_equal(psi: ExtendedGaussian, tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussian:
    """Condition a distribution on R^k x R^k on both halves being equal."""
    if psi.dim % 2 != 0:
        raise ValueError("condition_equal needs an even-dimensional joint")
    k = psi.dim // 2
    diff = np.hstack([np.eye(k), -np.eye(k)])
    return observe(psi, diff, np.zeros(k), tol)


class PrecisionRep:
    """Density-side description: a support subspace and a form on it.

    The form's kernel inside the support is exactly the nondeterminism of
    the corresponding distribution; zero precision is allowed.
    """

    __slots__ = ("support", "form")

    def __init__(self, support: Subspace, form, tol: Tolerance = DEFAULT_TOL):
        form = psd_normalize(form, tol)
        if form.shape != (support.ambient_dim, support.ambient_dim):
            raise ValueError("form shape does not match the support's ambient space")
        p = support.projector()
        if form.size and float(np.max(np.abs(form - p @ form @ p))) > tol.eq_abs_tol:
            raise ValueError("form is not supported on the given subspace")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "form", _ro(p @ form @ p if form.size else form))

    def __setattr__(self, name, value):
        raise AttributeError("PrecisionRep is immutable")

    def __repr__(self):
        return f"PrecisionRep(ambient {self.support.ambient_dim}, support dim {self.support.dim})"


class CovarianceRep:
    """Pushforward-side description: a covariance form on the subspace of
    directions that carry information (the complement of nondeterminism)."""

    __slots__ = ("dual_support", "form")

    def __init__(self, dual_support: Subspace, form, tol: Tolerance = DEFAULT_TOL):
        form = psd_normalize(form, tol)
        if form.shape != (dual_support.ambient_dim, dual_support.ambient_dim):
            raise ValueError("form shape does not match the ambient space")
        p = dual_support.projector()
        if form.size and float(np.max(np.abs(form - p @ form @ p))) > tol.eq_abs_tol:
            raise ValueError("form is not supported on the given subspace")
        object.__setattr__(self, "dual_support", dual_support)
        object.__setattr__(self, "form", _ro(p @ form @ p if form.size else form))

    def __setattr__(self, name, value):
        raise AttributeError("CovarianceRep is immutable")

    def __repr__(self):
        return (
            f"CovarianceRep(ambient {self.dual_support.ambient_dim}, "
            f"dual support dim {self.dual_support.dim})"
        )


def to_precision(psi: ExtendedGaussian, tol: Tolerance = DEFAULT_TOL) -> PrecisionRep:
    """Precision-side description of the centered part of ``psi``.

    The support is col(cov) + nondet and the form is the pseudoinverse of
    the covariance, so its kernel inside the support is exactly the
    nondeterminism.  The mean is independent of this correspondence and is
    carried by the caller.
    """
    supp = minkowski_sum(column_space(psi.cov, tol), psi.nondet, tol)
    return PrecisionRep(supp, pseudoinverse(psi.cov, tol), tol)


def to_covariance(p: PrecisionRep, tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussian:
    """Centered extended Gaussian described by a precision form.

    Directions of the support where the form vanishes become
    nondeterminism; on the rest the covariance is the pseudoinverse.
    """
    nondet = intersect(p.support, column_space(p.form, tol).annihilator(), tol)
    return ExtendedGaussian(nondet, np.zeros(p.support.ambient_dim),
                            pseudoinverse(p.form, tol), tol)


def covariance_rep(psi: ExtendedGaussian, tol: Tolerance = DEFAULT_TOL) -> CovarianceRep:
    """Covariance-side description of the centered part of ``psi``."""
    return CovarianceRep(psi.nondet.annihilator(), psi.cov, tol)


def from_covariance_rep(rep: CovarianceRep, tol: Tolerance = DEFAULT_TOL) -> ExtendedGaussian:
    return ExtendedGaussian(
        rep.dual_support.annihilator(),
        np.zeros(rep.dual_support.ambient_dim),
        rep.form,
        tol,
    )
