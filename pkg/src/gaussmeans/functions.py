"""Entire-function representations and the little ``kind:payload`` spec language.

Four kinds are supported:

* ``monomial(k)``      -- z^k,
* ``polynomial(c)``    -- finite coefficient list, constant term first,
* ``taylor(c, tail)``  -- truncated power series plus a declared tail bound,
* ``exponential(beta)``-- exp(beta z).

Coefficient kinds carry their coefficients as a complex array and evaluate by
Horner; the exponential kind evaluates exactly. Text specs look like
``mono:3``, ``poly:1,0,2+1i``, ``exp:0.5-1i``, ``taylor:@coeffs.txt`` where
the referenced file holds one complex coefficient per line, ``#`` comments,
and an optional ``tail: <real>`` header line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["EntireFunction", "parse_function_spec", "parse_complex"]


def parse_complex(token: str) -> complex:
    """Parse ``a+bi`` (or plain reals, or python-style ``a+bj``) to complex."""
    t = token.strip().replace(" ", "").replace("i", "j")
    if not t:
        raise ValueError("empty complex literal")
    if t in ("j", "+j"):
        return 1j
    if t == "-j":
        return -1j
    try:
        return complex(t)
    except ValueError as exc:
        raise ValueError(f"cannot parse complex literal {token!r}") from exc


def _format_complex(c: complex) -> str:
    re, im = float(c.real), float(c.imag)
    if im == 0.0:
        return repr(re)
    sign = "+" if im >= 0 else "-"
    return f"{re!r}{sign}{abs(im)!r}i"


@dataclass(frozen=True, eq=False)
class EntireFunction:
    """One entire function, in one of the four supported representations."""

    kind: str
    coefficients: np.ndarray | None = None  # complex, constant term first
    beta: complex | None = None             # exponential only
    tail_bound: float = 0.0                 # taylor only

    # -- constructors ---------------------------------------------------

    @classmethod
    def monomial(cls, k: int) -> "EntireFunction":
        if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 0:
            raise ValueError(f"monomial degree must be a nonnegative integer, got {k!r}")
        c = np.zeros(int(k) + 1, dtype=np.complex128)
        c[-1] = 1.0
        return cls(kind="monomial", coefficients=c)

    @classmethod
    def polynomial(cls, coeffs) -> "EntireFunction":
        c = cls._clean_coeffs(coeffs, "polynomial")
        return cls(kind="polynomial", coefficients=c)

    @classmethod
    def taylor(cls, coeffs, tail_bound: float = 0.0) -> "EntireFunction":
        c = cls._clean_coeffs(coeffs, "taylor")
        tb = float(tail_bound)
        if not (tb >= 0.0) or not math.isfinite(tb):
            raise ValueError(f"taylor tail bound must be finite and >= 0, got {tail_bound!r}")
        return cls(kind="taylor", coefficients=c, tail_bound=tb)

    @classmethod
    def exponential(cls, beta) -> "EntireFunction":
        b = complex(beta)
        if not (math.isfinite(b.real) and math.isfinite(b.imag)):
            raise ValueError(f"exponential rate must be finite, got {beta!r}")
        return cls(kind="exponential", beta=b)

    @staticmethod
    def _clean_coeffs(coeffs, label: str) -> np.ndarray:
        c = np.asarray(list(coeffs), dtype=np.complex128)
        if c.ndim != 1 or c.size == 0:
            raise ValueError(f"{label} needs a nonempty 1-d coefficient list")
        if not np.all(np.isfinite(c.view(np.float64))):
            raise ValueError(f"{label} coefficients must be finite")
        if not np.any(c != 0):
            raise ValueError(f"{label} needs at least one nonzero coefficient")
        # trim trailing zeros but keep at least one entry
        last = int(np.max(np.nonzero(c != 0)))
        return c[: last + 1].copy()

    # -- structure ------------------------------------------------------

    @property
    def is_coefficient_based(self) -> bool:
        return self.coefficients is not None

    @property
    def degree(self) -> int | None:
        if self.coefficients is None:
            return None
        return self.coefficients.size - 1

    def describe(self) -> str:
        """Round-trippable ``kind:payload`` spec string."""
        if self.kind == "monomial":
            return f"mono:{self.degree}"
        if self.kind == "exponential":
            return f"exp:{_format_complex(self.beta)}"
        payload = ",".join(_format_complex(c) for c in self.coefficients)
        if self.kind == "taylor":
            return f"taylor:{payload};tail={self.tail_bound!r}"
        return f"poly:{payload}"

    # -- evaluation -----------------------------------------------------

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.kind == "exponential":
            out = np.exp(self.beta * z)
        else:
            out = np.zeros_like(z)
            for k in range(self.coefficients.size - 1, -1, -1):
                out = out * z + self.coefficients[k]
        return out if out.shape else complex(out)

    def jet_coefficient_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coefficient arrays of (f, f', f''), each at least length 1."""
        if self.coefficients is None:
            raise ValueError(f"{self.kind} has no stored coefficients")
        c0 = self.coefficients
        j = np.arange(1, c0.size)
        c1 = c0[1:] * j
        j2 = np.arange(2, c0.size)
        c2 = c0[2:] * j2 * (j2 - 1)
        pad = np.zeros(1, dtype=np.complex128)
        if c1.size == 0:
            c1 = pad
        if c2.size == 0:
            c2 = pad.copy()
        return c0, c1, c2

    def squared_coefficients(self) -> np.ndarray:
        """|c_j|^2, the Fourier weights of |f|^2 on circles."""
        if self.coefficients is None:
            raise ValueError(f"{self.kind} has no stored coefficients")
        c = self.coefficients
        return c.real * c.real + c.imag * c.imag

    # -- symmetries (used heavily by the invariance tests) ---------------

    def scaled(self, factor) -> "EntireFunction":
        fac = complex(factor)
        if fac == 0:
            raise ValueError("scaling factor must be nonzero")
        if self.coefficients is None:
            raise ValueError("only coefficient-based kinds support scaling")
        out = EntireFunction(
            kind="polynomial" if self.kind == "monomial" else self.kind,
            coefficients=self.coefficients * fac,
            tail_bound=self.tail_bound * abs(fac),
        )
        return out

    def rotated(self, theta0: float) -> "EntireFunction":
        """The function z -> f(e^{i theta0} z)."""
        rot = complex(math.cos(theta0), math.sin(theta0))
        if self.kind == "exponential":
            return EntireFunction.exponential(self.beta * rot)
        j = np.arange(self.coefficients.size)
        return EntireFunction(
            kind=self.kind,
            coefficients=self.coefficients * rot ** j,
            tail_bound=self.tail_bound,
        )


def _parse_taylor_file(path: str) -> EntireFunction:
    text = Path(path).read_text()
    tail = 0.0
    coeffs: list[complex] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("tail:"):
            try:
                tail = float(line.split(":", 1)[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad tail bound {line!r}") from exc
            continue
        try:
            coeffs.append(parse_complex(line))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
    if not coeffs:
        raise ValueError(f"{path}: no coefficients found")
    return EntireFunction.taylor(coeffs, tail)


def parse_function_spec(spec: str) -> EntireFunction:
    """Parse a ``kind:payload`` function spec (see module docstring)."""
    if not isinstance(spec, str) or ":" not in spec:
        raise ValueError(
            f"function spec must look like 'mono:2', 'poly:1,1', 'exp:1+0i' "
            f"or 'taylor:@file'; got {spec!r}"
        )
    kind, payload = spec.split(":", 1)
    kind = kind.strip().lower()
    payload = payload.strip()
    if kind in ("mono", "monomial"):
        try:
            k = int(payload)
        except ValueError as exc:
            raise ValueError(f"monomial degree must be an integer, got {payload!r}") from exc
        return EntireFunction.monomial(k)
    if kind in ("poly", "polynomial"):
        tokens = [t for t in payload.split(",") if t.strip()]
        if not tokens:
            raise ValueError(f"empty polynomial coefficient list in {spec!r}")
        return EntireFunction.polynomial([parse_complex(t) for t in tokens])
    if kind in ("exp", "exponential"):
        return EntireFunction.exponential(parse_complex(payload))
    if kind == "taylor":
        if payload.startswith("@"):
            return _parse_taylor_file(payload[1:])
        body, _, option = payload.partition(";")
        tail = 0.0
        if option:
            label, _, value = option.partition("=")
            if label.strip().lower() != "tail" or not value.strip():
                raise ValueError(
                    f"taylor spec options must look like ';tail=1e-9', got {spec!r}"
                )
            try:
                tail = float(value)
            except ValueError as exc:
                raise ValueError(f"bad taylor tail bound in {spec!r}") from exc
        tokens = [t for t in body.split(",") if t.strip()]
        if not tokens:
            raise ValueError(
                f"taylor specs need inline coefficients 'taylor:c0,c1,...' "
                f"or a file 'taylor:@path', got {spec!r}"
            )
        return EntireFunction.taylor([parse_complex(t) for t in tokens], tail)
    raise ValueError(f"unknown function kind {kind!r} in spec {spec!r}")
