"""Torus-to-cube transformations and periodization of cube functions.

A torus-to-cube transformation is an increasing, continuously
differentiable, odd bijection psi of [-1/2, 1/2] onto itself with
psi(+-1/2) = +-1/2.  Composing a function h on the cube with psi and
multiplying by sqrt(weight * psi') yields a function that extends
continuously to the torus; how smooth the extension is depends on how fast
psi' vanishes at the boundary.

Two parameterized families (``log`` and ``erf``) are generated from a base
map of (-1/2, 1/2) onto the real line: stretching by eta > 0 in that
coordinate and mapping back gives boundary decay psi'(x) ~ dist(x)^(eta-1).
The static ``sine`` map and the ``id`` map complete the set.

All evaluation of periodized samples happens in the x (torus) variable, so
boundary nodes where psi' = 0 produce exact zeros and no division by a
divergent density ever occurs.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erf as _erf, erfinv as _erfinv

from .errors import DivergentDensityError, DomainError

_DOMAIN_SLACK = 1e-12


def _checked_domain(x, what: str) -> np.ndarray:
    """Return x clamped to [-1/2, 1/2]; error if farther than 1e-12 outside."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(arr) > 0.5 + _DOMAIN_SLACK):
        bad = float(np.max(np.abs(arr)))
        raise DomainError(f"{what} argument {bad} lies outside [-1/2, 1/2]")
    return np.clip(arr, -0.5, 0.5)


class Transform:
    """Univariate torus-to-cube transformation interface."""

    kind = "abstract"
    eta = 1.0

    def forward(self, x):
        """psi(x) for x in [-1/2, 1/2]; exact +-1/2 at the endpoints."""
        raise NotImplementedError

    def inverse(self, y):
        """psi^{-1}(y) for y in [-1/2, 1/2]."""
        raise NotImplementedError

    def derivative(self, x):
        """psi'(x), with the analytic limit at the endpoints."""
        raise NotImplementedError

    def density(self, y):
        """(psi^{-1})'(y) = 1 / psi'(psi^{-1}(y))."""
        raise NotImplementedError

    def density_diverges_at_boundary(self) -> bool:
        raise NotImplementedError

    def label(self) -> str:
        return self.kind

    def __repr__(self):
        return f"Transform({self.label()})"

    def __eq__(self, other):
        return isinstance(other, Transform) and self.kind == other.kind and self.eta == other.eta

    def __hash__(self):
        return hash((self.kind, self.eta))


def _scalar_like(result: np.ndarray, template) -> "np.ndarray | float":
    if np.isscalar(template) or getattr(template, "ndim", 1) == 0:
        return float(result)
    return result


class IdentityTransform(Transform):
    kind = "id"

    def forward(self, x):
        return _scalar_like(_checked_domain(x, "forward"), x)

    def inverse(self, y):
        return _scalar_like(_checked_domain(y, "inverse"), y)

    def derivative(self, x):
        arr = _checked_domain(x, "derivative")
        return _scalar_like(np.ones_like(arr), x)

    def density(self, y):
        arr = _checked_domain(y, "density")
        return _scalar_like(np.ones_like(arr), y)

    def density_diverges_at_boundary(self):
        return False


class SineTransform(Transform):
    """psi(x) = sin(pi x) / 2, the classical static periodizing map."""

    kind = "sine"

    def forward(self, x):
        arr = _checked_domain(x, "forward")
        out = 0.5 * np.sin(np.pi * arr)
        out = np.where(arr == 0.5, 0.5, out)
        out = np.where(arr == -0.5, -0.5, out)
        return _scalar_like(out, x)

    def inverse(self, y):
        arr = _checked_domain(y, "inverse")
        out = np.arcsin(2.0 * arr) / np.pi
        out = np.where(arr == 0.5, 0.5, out)
        out = np.where(arr == -0.5, -0.5, out)
        return _scalar_like(out, y)

    def derivative(self, x):
        arr = _checked_domain(x, "derivative")
        out = (np.pi / 2.0) * np.cos(np.pi * arr)
        out = np.where(np.abs(arr) == 0.5, 0.0, out)
        return _scalar_like(out, x)

    def density(self, y):
        arr = _checked_domain(y, "density")
        if np.any(np.abs(arr) == 0.5):
            raise DivergentDensityError("sine density diverges at y = +-1/2")
        out = (2.0 / np.pi) / np.sqrt(1.0 - 4.0 * arr * arr)
        return _scalar_like(out, y)

    def density_diverges_at_boundary(self):
        return True


class LogarithmicTransform(Transform):
    """Family psi(x, eta) = ((1+2x)^eta - (1-2x)^eta) / (2 ((1+2x)^eta + (1-2x)^eta)).

    eta = 1 is the identity; eta > 1 makes psi' vanish at the boundary like
    dist^(eta-1).  Inverse and density come from the parameter identities
    psi^{-1}(., eta) = psi(., 1/eta) and density(., eta) = psi'(., 1/eta).
    """

    kind = "log"

    def __init__(self, eta: float):
        if not eta > 0:
            raise DomainError(f"log transform requires eta > 0, got {eta}")
        self.eta = float(eta)

    def label(self):
        return f"log:{self.eta:g}"

    def _psi(self, arr, eta):
        p = np.power(1.0 + 2.0 * arr, eta)
        q = np.power(1.0 - 2.0 * arr, eta)
        out = 0.5 * (p - q) / (p + q)
        out = np.where(arr == 0.5, 0.5, out)
        out = np.where(arr == -0.5, -0.5, out)
        return out

    def _dpsi(self, arr, eta):
        boundary = np.abs(arr) == 0.5
        if np.any(boundary) and eta < 1.0:
            raise DomainError(
                f"log transform derivative diverges at x = +-1/2 for eta = {eta} < 1"
            )
        interior = np.where(boundary, 0.0, arr)
        p = np.power(1.0 + 2.0 * interior, eta)
        q = np.power(1.0 - 2.0 * interior, eta)
        out = 4.0 * eta * np.power(1.0 - 4.0 * interior * interior, eta - 1.0) / (p + q) ** 2
        limit = 1.0 if eta == 1.0 else 0.0
        return np.where(boundary, limit, out)

    def forward(self, x):
        arr = _checked_domain(x, "forward")
        return _scalar_like(self._psi(arr, self.eta), x)

    def inverse(self, y):
        arr = _checked_domain(y, "inverse")
        return _scalar_like(self._psi(arr, 1.0 / self.eta), y)

    def derivative(self, x):
        arr = _checked_domain(x, "derivative")
        return _scalar_like(self._dpsi(arr, self.eta), x)

    def density(self, y):
        arr = _checked_domain(y, "density")
        if self.eta > 1.0 and np.any(np.abs(arr) == 0.5):
            raise DivergentDensityError(
                f"log density diverges at y = +-1/2 for eta = {self.eta} > 1"
            )
        return _scalar_like(self._dpsi(arr, 1.0 / self.eta), y)

    def density_diverges_at_boundary(self):
        return self.eta > 1.0


class ErrorFunctionTransform(Transform):
    """Family psi(x, eta) = erf(eta * erfinv(2x)) / 2.

    Same parameter identities as the log family; the density decays
    exponentially instead of algebraically.
    """

    kind = "erf"

    def __init__(self, eta: float):
        if not eta > 0:
            raise DomainError(f"erf transform requires eta > 0, got {eta}")
        self.eta = float(eta)

    def label(self):
        return f"erf:{self.eta:g}"

    def _psi(self, arr, eta):
        boundary = np.abs(arr) == 0.5
        interior = np.where(boundary, 0.0, arr)
        out = 0.5 * _erf(eta * _erfinv(2.0 * interior))
        return np.where(boundary, np.sign(arr) * 0.5, out)

    def _dpsi(self, arr, eta):
        boundary = np.abs(arr) == 0.5
        if np.any(boundary) and eta < 1.0:
            raise DomainError(
                f"erf transform derivative diverges at x = +-1/2 for eta = {eta} < 1"
            )
        interior = np.where(boundary, 0.0, arr)
        t = _erfinv(2.0 * interior)
        out = eta * np.exp((1.0 - eta * eta) * t * t)
        limit = 1.0 if eta == 1.0 else 0.0
        return np.where(boundary, limit, out)

    def forward(self, x):
        arr = _checked_domain(x, "forward")
        return _scalar_like(self._psi(arr, self.eta), x)

    def inverse(self, y):
        arr = _checked_domain(y, "inverse")
        return _scalar_like(self._psi(arr, 1.0 / self.eta), y)

    def derivative(self, x):
        arr = _checked_domain(x, "derivative")
        return _scalar_like(self._dpsi(arr, self.eta), x)

    def density(self, y):
        arr = _checked_domain(y, "density")
        if self.eta > 1.0 and np.any(np.abs(arr) == 0.5):
            raise DivergentDensityError(
                f"erf density diverges at y = +-1/2 for eta = {self.eta} > 1"
            )
        return _scalar_like(self._dpsi(arr, 1.0 / self.eta), y)

    def density_diverges_at_boundary(self):
        return self.eta > 1.0


class ProductTransform:
    """Coordinatewise product of univariate transformations."""

    def __init__(self, components):
        comps = list(components)
        if not comps:
            raise DomainError("a product transform needs at least one component")
        for c in comps:
            if not isinstance(c, Transform):
                raise DomainError(f"not a transform: {c!r}")
        self.components = tuple(comps)

    @property
    def dim(self) -> int:
        return len(self.components)

    def forward(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.column_stack([t.forward(X[:, j]) for j, t in enumerate(self.components)])

    def inverse(self, Y: np.ndarray) -> np.ndarray:
        Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
        return np.column_stack([t.inverse(Y[:, j]) for j, t in enumerate(self.components)])

    def derivative_product(self, X: np.ndarray) -> np.ndarray:
        """prod_j psi_j'(x_j) along rows of X."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.ones(X.shape[0])
        for j, t in enumerate(self.components):
            out *= t.derivative(X[:, j])
        return out

    def label(self) -> str:
        labels = [t.label() for t in self.components]
        if len(set(labels)) == 1 and len(labels) > 1:
            return f"{labels[0]}^{len(labels)}"
        return ",".join(labels)

    def __repr__(self):
        return f"ProductTransform({self.label()})"

    def __eq__(self, other):
        return isinstance(other, ProductTransform) and self.components == other.components

    def __hash__(self):
        return hash(self.components)


class ConstantWeight:
    """Weight function identically one (the only weight shipped).

    Anything exposing the same ``component(j, y)`` method can be passed
    wherever a weight is accepted, so per-coordinate user weights plug in
    without changes elsewhere.
    """

    def component(self, j: int, y: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(y, dtype=np.float64))

    def label(self) -> str:
        return "const"

    def __repr__(self):
        return "ConstantWeight()"


constant_weight = ConstantWeight()


def parse_transform(spec: str) -> Transform:
    """Parse a compact transform spec: ``log:4.0``, ``erf:2.5``, ``sine``, ``id``."""
    s = spec.strip().lower()
    if s in ("id", "identity"):
        return IdentityTransform()
    if s in ("sine", "sin"):
        return SineTransform()
    if ":" in s:
        kind, _, value = s.partition(":")
        try:
            eta = float(value)
        except ValueError:
            raise DomainError(f"bad transform parameter in {spec!r}") from None
        if kind == "log":
            return LogarithmicTransform(eta)
        if kind == "erf":
            return ErrorFunctionTransform(eta)
    raise DomainError(f"unknown transform spec {spec!r}")


def parse_product_transform(spec: str, dim: int | None = None) -> ProductTransform:
    """Parse a product transform from a comma list or replication shorthand.

    ``log:4,sine`` lists components; ``log:4^3`` repeats one component three
    times; a single bare component with ``dim`` given is replicated to fill
    the dimension.
    """
    parts = [p for p in (s.strip() for s in spec.split(",")) if p]
    if not parts:
        raise DomainError(f"empty transform spec {spec!r}")
    comps: list[Transform] = []
    for part in parts:
        if "^" in part:
            base, _, count = part.rpartition("^")
            if count == "d":
                if dim is None:
                    raise DomainError(f"{part!r} needs a known dimension")
                n = dim
            else:
                try:
                    n = int(count)
                except ValueError:
                    raise DomainError(f"bad replication count in {part!r}") from None
            if n < 1:
                raise DomainError(f"replication count must be >= 1 in {part!r}")
            comps.extend(parse_transform(base) for _ in range(n))
        else:
            comps.append(parse_transform(part))
    if dim is not None:
        if len(comps) == 1 and dim > 1:
            comps = comps * dim
        if len(comps) != dim:
            raise DomainError(
                f"transform spec {spec!r} has {len(comps)} components, expected {dim}"
            )
    return ProductTransform(comps)


def min_eta_for_smoothness(m: int) -> float:
    """Exclusive lower bound on eta preserving m derivatives across periodization.

    The square root of the derivative of the parameterized families has its
    first m derivatives vanishing at the boundary exactly when eta exceeds
    2m + 1; callers must therefore pick eta strictly greater than the
    returned value.
    """
    if m < 0:
        raise DomainError(f"smoothness order must be >= 0, got {m}")
    return float(2 * m + 1)


def _fd_derivative(g, x0: float, n: int, h: float) -> float:
    """Central finite difference of order n with spacing h."""
    if n == 0:
        return float(g(x0))
    total = 0.0
    for i in range(n + 1):
        total += (-1) ** i * math.comb(n, i) * float(g(x0 + (n / 2.0 - i) * h))
    return total / h**n


def boundary_vanishing_check(t: Transform, m: int) -> bool:
    """Numerically test whether sqrt(psi') loses its first m derivatives at +-1/2.

    For each order n <= m the n-th derivative of sqrt(psi') is estimated by
    central differences at x = +-(1/2 - delta) for delta in {1e-2, 1e-3,
    1e-4}.  The check passes iff the magnitudes decrease strictly along the
    delta ladder on both sides and the finest value stays below the
    magnitude at the interior reference point x = 0.4.

    This is a heuristic gate, not a proof; :func:`min_eta_for_smoothness`
    is the authoritative rule for the shipped families.
    """
    if m < 0:
        raise DomainError(f"smoothness order must be >= 0, got {m}")

    def g(x):
        return np.sqrt(t.derivative(np.asarray(x, dtype=np.float64)))

    deltas = (1e-2, 1e-3, 1e-4)
    try:
        for n in range(m + 1):
            for side in (+1.0, -1.0):
                mags = []
                for delta in deltas:
                    h = delta / (n + 2)  # keep the stencil strictly inside the interval
                    x0 = side * (0.5 - delta)
                    mags.append(abs(_fd_derivative(g, x0, n, h)))
                if not all(np.isfinite(mags)):
                    return False
                if not all(a > b for a, b in zip(mags, mags[1:])):
                    return False
                h_ref = deltas[-1] / (n + 2)
                ref = abs(_fd_derivative(g, side * 0.4, n, h_ref))
                if not np.isfinite(ref) or mags[-1] >= ref:
                    return False
    except (OverflowError, FloatingPointError, DomainError):
        return False
    return True


def periodized_samples(h, weight, transform: ProductTransform, X) -> np.ndarray:
    """Evaluate h(psi(x)) * prod_j sqrt(w_j(psi_j(x_j)) psi_j'(x_j)) on rows of X.

    Computed entirely in the x variable: the sqrt factor uses psi', never
    the reciprocal density, so nodes on the boundary give exact zeros.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != transform.dim:
        raise DomainError(
            f"points have dimension {X.shape[1]}, transform has {transform.dim}"
        )
    Y = transform.forward(X)
    factor = np.ones(X.shape[0])
    for j, t in enumerate(transform.components):
        factor *= np.sqrt(weight.component(j, Y[:, j]) * t.derivative(X[:, j]))
    out = np.zeros(X.shape[0], dtype=np.complex128)
    live = factor != 0.0  # where the factor vanishes, h is not consulted at all
    if np.any(live):
        values = np.asarray(h(Y[live]), dtype=np.complex128)
        if values.shape != (int(np.count_nonzero(live)),):
            raise DomainError(
                f"cube function returned shape {values.shape}, expected "
                f"({int(np.count_nonzero(live))},)"
            )
        out[live] = values * factor[live]
    return out


def periodized_sample(h, weight, transform: ProductTransform, x) -> complex:
    """Single-point version of :func:`periodized_samples`."""
    out = periodized_samples(h, weight, transform, np.asarray(x, dtype=np.float64).reshape(1, -1))
    return complex(out[0])
