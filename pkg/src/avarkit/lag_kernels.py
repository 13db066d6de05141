"""Truncated lag-window kernels.

A lag window ``w`` is an even function with ``w(0) = 1`` and support
``[-1, 1]``. Kernels here also carry a smoothness class used to decide
which consistency results apply:

* ``A3``: the restriction of ``w`` to ``[0, 1]`` is twice continuously
  differentiable.
* ``A4(r)``: the restriction is ``(r + 1)``-times continuously
  differentiable for some ``r >= 2``.

Only truncated kernels are supported. The quadratic spectral window and
other kernels with unbounded support are deliberately absent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

__all__ = [
    "Smoothness",
    "LagKernel",
    "bartlett",
    "parzen",
    "power",
    "custom",
    "get_kernel",
    "classify",
    "eval_kernel",
]


@dataclass(frozen=True)
class Smoothness:
    """Smoothness class of a lag window.

    ``name`` is one of ``"A3"``, ``"A4"`` or ``"Unverified"``; ``r`` is only
    set for ``"A4"``.
    """

    name: str
    r: Optional[int] = None

    def satisfies(self, required: str) -> bool:
        """True when this class implies ``required`` ("A3" or "A4")."""
        if self.name == "Unverified":
            return False
        if required == "A3":
            return True
        if required == "A4":
            return self.name == "A4"
        raise ValueError(f"unknown smoothness requirement {required!r}")

    def __str__(self) -> str:
        return f"A4(r={self.r})" if self.name == "A4" else self.name


A3 = Smoothness("A3")
UNVERIFIED = Smoothness("Unverified")


def _power_profile(q: float) -> Callable[[np.ndarray], np.ndarray]:
    def profile(a):
        return 1.0 - a**q

    return profile


def _parzen_profile(a: np.ndarray) -> np.ndarray:
    inner = 1.0 - 6.0 * a**2 + 6.0 * a**3
    outer = 2.0 * (1.0 - a) ** 3
    return np.where(a <= 0.5, inner, outer)


@dataclass(frozen=True)
class LagKernel:
    """A symmetric, truncated lag window.

    Instances are callable and vectorized: ``kernel(x)`` evaluates ``w`` on a
    scalar or array. Evaluation goes through ``|x|`` so symmetry is exact,
    and anything with ``|x| >= 1`` (or non-finite) maps to 0.

    Use the factories :func:`bartlett`, :func:`parzen`, :func:`power`,
    :func:`custom` or :func:`get_kernel` rather than the constructor.
    """

    kind: str
    profile: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    q: Optional[float] = None
    label: str = ""

    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        a = np.abs(np.asarray(x, dtype=float))
        inside = a < 1.0
        out = np.zeros_like(a)
        if np.any(inside):
            out[inside] = self.profile(a[inside])
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def name(self) -> str:
        if self.kind == "power":
            return "bartlett" if self.q == 1 else f"power:{self.q:g}"
        if self.kind == "custom":
            return f"custom:{self.label}" if self.label else "custom"
        return self.kind

    @property
    def smoothness(self) -> Smoothness:
        return classify(self)


def power(q: float) -> LagKernel:
    """The family ``w(x) = 1 - |x|**q`` on ``|x| < 1``; ``q = 1`` is Bartlett."""
    q = float(q)
    if not math.isfinite(q) or q < 1.0:
        raise ValueError(f"power kernel needs q >= 1, got {q}")
    return LagKernel("power", _power_profile(q), q=q)


def bartlett() -> LagKernel:
    return power(1.0)


def parzen() -> LagKernel:
    return LagKernel("parzen", _parzen_profile)


def custom(weights, label: str = "") -> LagKernel:
    """Wrap a user-supplied window.

    Parameters
    ----------
    weights : callable or array_like
        Either a function of ``|x|`` on ``[0, 1)`` (it receives a numpy array)
        or a table of weights on an equispaced grid over ``[0, 1]``, linearly
        interpolated. A table's last entry sits at ``x = 1`` and is ignored
        because the window is truncated there.
    label : str
        Free-form name used in reports.

    Custom kernels are always classified ``Unverified``.
    """
    if callable(weights):
        fn = weights

        def profile(a):
            return np.asarray(fn(a), dtype=float) * np.ones_like(a)

    else:
        table = np.asarray(weights, dtype=float)
        if table.ndim != 1 or table.size < 2:
            raise ValueError("tabulated kernel needs at least two weights")
        if not np.all(np.isfinite(table)):
            raise ValueError("tabulated kernel weights must be finite")
        grid = np.linspace(0.0, 1.0, table.size)

        def profile(a):
            return np.interp(a, grid, table)

    kernel = LagKernel("custom", profile, label=label)
    w0 = kernel(0.0)
    if w0 != 1.0:
        raise ValueError(f"kernel must satisfy w(0) = 1, got {w0!r}")
    return kernel


def classify(kernel: LagKernel) -> Smoothness:
    """Smoothness class of ``kernel``.

    Power kernels with integer ``q`` are polynomials on ``[0, 1]``. We report
    ``A4(r=q-1)`` once that gives ``r >= 2`` (``q >= 3``) and ``A3`` below.
    For non-integer ``q`` the derivative of order ``floor(q) + 1`` blows up at
    0, so ``r = floor(q) - 1``; ``1 < q < 2`` is not even twice differentiable
    at 0 and is reported ``Unverified``. Parzen is only ``A3``: its third
    derivative jumps at ``1/2``.
    """
    if kernel.kind == "parzen":
        return A3
    if kernel.kind == "power":
        q = kernel.q
        integer = float(q).is_integer()
        if not integer and q < 2.0:
            return UNVERIFIED
        r = int(q) - 1
        if r >= 2:
            return Smoothness("A4", r)
        return A3
    return UNVERIFIED


def eval_kernel(kernel: LagKernel, x: float) -> float:
    """Scalar evaluation, ``w(x)``."""
    return float(kernel(float(x)))


def get_kernel(spec: Union[str, LagKernel]) -> LagKernel:
    """Resolve ``"bartlett"``, ``"parzen"`` or ``"power:q"`` to a kernel.

    >>> get_kernel("power:2")(0.5)
    0.75
    """
    if isinstance(spec, LagKernel):
        return spec
    text = str(spec).strip().lower()
    if text == "bartlett":
        return bartlett()
    if text == "parzen":
        return parzen()
    if text.startswith("power:"):
        try:
            q = float(text.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad power kernel spec {spec!r}") from None
        return power(q)
    raise ValueError(
        f"unknown kernel {spec!r}; expected 'bartlett', 'parzen' or 'power:q'"
    )
