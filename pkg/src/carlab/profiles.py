"""Scalar time profiles: piecewise polynomials of degree <= 2 with exact piece
access, exact integrals, and exact extrema.

Every profile exposes its pieces in *local* coordinates, ``value(u) = c0 +
c1*(u - o) + c2*(u - o)**2`` with ``o`` the piece origin, which keeps the
closed forms well conditioned far from zero.

At jump discontinuities evaluation returns the right limit, so runs are
deterministic; the choice is immaterial for every integral quantity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Piece:
    """One polynomial piece on [lo, hi]: c0 + c1*(u-origin) + c2*(u-origin)^2."""

    lo: float
    hi: float
    c0: float
    c1: float
    c2: float
    origin: float

    def value(self, u):
        s = np.asarray(u, dtype=float) - self.origin
        return self.c0 + s * (self.c1 + s * self.c2)

    def integral(self, a: float, b: float) -> float:
        """Exact integral over [a, b] (caller guarantees [a,b] within [lo,hi])."""
        sa = a - self.origin
        sb = b - self.origin
        prim = lambda s: s * (self.c0 + s * (self.c1 / 2.0 + s * self.c2 / 3.0))
        return prim(sb) - prim(sa)

    def max_abs(self, a: float, b: float) -> float:
        """Exact max of |value| over [a, b] subset of [lo, hi]."""
        cands = [self.value(a), self.value(b)]
        if self.c2 != 0.0:
            s_v = -self.c1 / (2.0 * self.c2)
            u_v = s_v + self.origin
            if a <= u_v <= b:
                cands.append(self.value(u_v))
        return float(np.max(np.abs(cands)))

    def roots_in(self, a: float, b: float) -> list[float]:
        """Real roots of the piece polynomial inside (a, b)."""
        out = []
        if self.c2 == 0.0:
            if self.c1 != 0.0:
                u = self.origin - self.c0 / self.c1
                if a < u < b:
                    out.append(u)
        else:
            disc = self.c1 * self.c1 - 4.0 * self.c2 * self.c0
            if disc >= 0.0:
                sq = np.sqrt(disc)
                # numerically stable pair
                q = -0.5 * (self.c1 + np.copysign(sq, self.c1))
                cands = [q / self.c2] if q == 0.0 else [q / self.c2, self.c0 / q]
                for s in cands:
                    u = s + self.origin
                    if a < u < b:
                        out.append(float(u))
        return sorted(set(out))


class Profile:
    """Base class; subclasses define piece enumeration over any window."""

    #: continuous profiles support Lipschitz bounds through their derivative
    continuous: bool = True

    def pieces(self, lo: float, hi: float) -> list[Piece]:
        """Pieces covering [lo, hi] exactly (clipped at the window ends)."""
        raise NotImplementedError

    def derivative(self) -> "Profile | None":
        return None

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        flat_u = np.atleast_1d(u)
        flat_o = np.atleast_1d(out)
        for i, ui in enumerate(flat_u):
            flat_o[i] = self._value_scalar(float(ui))
        return out if u.ndim else float(flat_o[0])

    def _value_scalar(self, u: float) -> float:
        # right-limit convention: take the piece that starts at u if any
        eps = 1e-9 * (1.0 + abs(u))
        for pc in self.pieces(u, u + eps):
            return float(pc.value(u))
        raise RuntimeError("profile pieces do not cover requested point")

    def breakpoints_in(self, lo: float, hi: float) -> np.ndarray:
        cuts = set()
        for pc in self.pieces(lo, hi):
            if lo < pc.lo < hi:
                cuts.add(pc.lo)
            if lo < pc.hi < hi:
                cuts.add(pc.hi)
        return np.array(sorted(cuts))

    def integral(self, a: float, b: float) -> float:
        """Exact integral over [a, b]; signed if a > b."""
        if a == b:
            return 0.0
        if a > b:
            return -self.integral(b, a)
        return float(sum(pc.integral(max(a, pc.lo), min(b, pc.hi))
                         for pc in self.pieces(a, b)))

    def abs_integral(self, a: float, b: float) -> float:
        """Exact integral of |value| over [a, b], a <= b."""
        total = 0.0
        for pc in self.pieces(a, b):
            u0, u1 = max(a, pc.lo), min(b, pc.hi)
            cuts = [u0] + pc.roots_in(u0, u1) + [u1]
            for c0, c1 in zip(cuts[:-1], cuts[1:]):
                total += abs(pc.integral(c0, c1))
        return total

    def max_abs_on(self, lo: float, hi: float) -> float:
        return max(pc.max_abs(max(lo, pc.lo), min(hi, pc.hi))
                   for pc in self.pieces(lo, hi))

    def max_slope_on(self, lo: float, hi: float) -> float | None:
        """Exact supremum of difference quotients on [lo, hi].

        Valid for continuous profiles (sup quotient = sup |derivative|);
        None when the profile is discontinuous or has no derivative profile.
        """
        if not self.continuous:
            return None
        d = self.derivative()
        if d is None:
            return None
        return d.max_abs_on(lo, hi)


def _scalar_or_array(u, vals):
    return float(vals) if np.ndim(u) == 0 else vals


@dataclass(frozen=True)
class PolyProfile(Profile):
    """Single global polynomial c0 + c1*u + c2*u^2."""

    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0

    def pieces(self, lo, hi):
        return [Piece(lo, hi, self.c0, self.c1, self.c2, origin=0.0)]

    def derivative(self):
        return PolyProfile(self.c1, 2.0 * self.c2, 0.0)

    def __call__(self, u):
        v = np.asarray(u, dtype=float)
        return _scalar_or_array(u, self.c0 + v * (self.c1 + v * self.c2))


class PiecewiseScalar(Profile):
    """Piecewise polynomial with explicit breakpoints and tail behavior.

    ``coeffs[i]`` holds (c0, c1, c2) for the interval
    [breakpoints[i], breakpoints[i+1]] in local coordinates relative to the
    interval's left endpoint.  Tails are 'zero' (vanish outside) or 'hold'
    (constant continuation of the boundary value).
    """

    def __init__(self, breakpoints, coeffs, left_tail="zero", right_tail="zero"):
        bp = [float(b) for b in breakpoints]
        if sorted(bp) != bp or len(bp) < 2:
            raise ValueError("breakpoints must be sorted, at least two")
        if len(coeffs) != len(bp) - 1:
            raise ValueError("need one coefficient row per interval")
        if left_tail not in ("zero", "hold") or right_tail not in ("zero", "hold"):
            raise ValueError("tails must be 'zero' or 'hold'")
        self.breakpoints = tuple(bp)
        self.coeffs = tuple(tuple(float(c) for c in row) for row in coeffs)
        self.left_tail = left_tail
        self.right_tail = right_tail

    def __eq__(self, other):
        return (type(other) is PiecewiseScalar
                and self.breakpoints == other.breakpoints
                and self.coeffs == other.coeffs
                and self.left_tail == other.left_tail
                and self.right_tail == other.right_tail)

    def __hash__(self):
        return hash((self.breakpoints, self.coeffs, self.left_tail, self.right_tail))

    def _tail_value(self, side: str) -> float:
        if side == "left":
            if self.left_tail == "zero":
                return 0.0
            c0, _, _ = self.coeffs[0]
            return c0  # local coords: value at the left endpoint
        if self.right_tail == "zero":
            return 0.0
        c0, c1, c2 = self.coeffs[-1]
        s = self.breakpoints[-1] - self.breakpoints[-2]
        return c0 + s * (c1 + s * c2)

    def pieces(self, lo, hi):
        out = []
        bp = self.breakpoints
        if lo < bp[0]:
            out.append(Piece(lo, min(hi, bp[0]), self._tail_value("left"),
                             0.0, 0.0, origin=bp[0]))
        for i in range(len(bp) - 1):
            a, b = bp[i], bp[i + 1]
            if b <= lo or a >= hi or a == b:
                continue
            c0, c1, c2 = self.coeffs[i]
            out.append(Piece(max(lo, a), min(hi, b), c0, c1, c2, origin=a))
        if hi > bp[-1]:
            out.append(Piece(max(lo, bp[-1]), hi, self._tail_value("right"),
                             0.0, 0.0, origin=bp[-1]))
        return out

    def derivative(self):
        dcoeffs = [(c1, 2.0 * c2, 0.0) for (_, c1, c2) in self.coeffs]
        return PiecewiseScalar(self.breakpoints, dcoeffs, "zero", "zero")

    def __call__(self, u):
        v = np.atleast_1d(np.asarray(u, dtype=float))
        bp = np.asarray(self.breakpoints)
        idx = np.searchsorted(bp, v, side="right") - 1  # right-limit at jumps
        out = np.empty_like(v)
        left = idx < 0
        right = idx >= len(bp) - 1
        out[left] = self._tail_value("left")
        out[right] = self._tail_value("right")
        inner = ~(left | right)
        if np.any(inner):
            rows = np.asarray(self.coeffs)[idx[inner]]
            s = v[inner] - bp[idx[inner]]
            out[inner] = rows[:, 0] + s * (rows[:, 1] + s * rows[:, 2])
        return _scalar_or_array(u, out if np.ndim(u) else out[0])


def _period_index(u: float) -> int:
    return int(np.floor(u / 4.0))


def _wave_marks(lo: float, hi: float, from_zero: bool) -> np.ndarray:
    """Ramp corner positions of the sharpening wave family inside (lo, hi)."""
    if from_zero and hi <= 0.0:
        return np.array([])
    n_lo = max(0, _period_index(max(lo, 0.0))) if from_zero else _period_index(lo)
    marks = [0.0] if from_zero and lo < 0.0 < hi else []
    for n in range(n_lo, _period_index(hi) + 1):
        base, w = 4.0 * n, 1.0 / (n + 1)
        marks.extend((base, base + w, base + 2 - w, base + 2 + w, base + 4 - w))
    m = np.asarray(marks)
    return m[(m > lo) & (m < hi)]


def _even_marks(lo: float, hi: float) -> np.ndarray:
    first = 2.0 * np.ceil(lo / 2.0)
    if first <= lo:
        first += 2.0
    return np.arange(first, hi, 2.0) if first < hi else np.array([])


def _wave_frame(u):
    """Period index (clamped at 0), local phase s, ramp half-width w, slope k."""
    v = np.asarray(u, dtype=float)
    n = np.maximum(np.floor(v / 4.0), 0.0)
    s = v - 4.0 * n
    k = n + 1.0
    w = 1.0 / k
    return v, s, w, k


class SharpeningWave(Profile):
    """Continuous trapezoid wave of period 4 whose ramps narrow each period.

    Zero for u < 0.  On [4n, 4n+4] it ramps 0 -> 1 with slope n+1, holds 1,
    ramps down to -1 through 4n+2, holds -1, and ramps back to 0 at 4n+4.
    """

    def __eq__(self, other):
        return type(other) is SharpeningWave

    def __hash__(self):
        return hash(type(self))

    @staticmethod
    def _period_pieces(n: int) -> list[Piece]:
        base = 4.0 * n
        w = 1.0 / (n + 1)
        k = float(n + 1)
        out = [Piece(base, base + w, 0.0, k, 0.0, origin=base)]
        if w < 1.0:
            out.append(Piece(base + w, base + 2 - w, 1.0, 0.0, 0.0, origin=base + w))
        out.append(Piece(base + 2 - w, base + 2 + w, 0.0, -k, 0.0, origin=base + 2))
        if w < 1.0:
            out.append(Piece(base + 2 + w, base + 4 - w, -1.0, 0.0, 0.0,
                             origin=base + 2 + w))
        out.append(Piece(base + 4 - w, base + 4, 0.0, k, 0.0, origin=base + 4))
        return out

    def pieces(self, lo, hi):
        out = []
        if lo < 0.0:
            out.append(Piece(lo, min(hi, 0.0), 0.0, 0.0, 0.0, origin=0.0))
        if hi > 0.0:
            for n in range(max(0, _period_index(max(lo, 0.0))),
                           _period_index(hi) + 1):
                for pc in self._period_pieces(n):
                    if pc.hi <= lo or pc.lo >= hi or pc.lo == pc.hi:
                        continue
                    out.append(Piece(max(lo, pc.lo), min(hi, pc.hi),
                                     pc.c0, pc.c1, pc.c2, pc.origin))
        return out

    def derivative(self):
        return _SharpeningWaveSlope()

    def breakpoints_in(self, lo, hi):
        return _wave_marks(lo, hi, from_zero=True)

    def __call__(self, u):
        v, s, w, k = _wave_frame(u)
        vals = np.select(
            [v < 0.0, s < w, s < 2.0 - w, s < 2.0 + w, s < 4.0 - w],
            [0.0, k * s, 1.0, -k * (s - 2.0), -1.0],
            default=k * (s - 4.0),
        )
        return _scalar_or_array(u, vals)


class _SharpeningWaveSlope(Profile):
    """A.e. derivative of SharpeningWave: +-(n+1) on ramps, 0 on plateaus."""

    continuous = False

    def __eq__(self, other):
        return type(other) is _SharpeningWaveSlope

    def __hash__(self):
        return hash(type(self))

    def pieces(self, lo, hi):
        out = []
        for pc in SharpeningWave().pieces(lo, hi):
            out.append(Piece(pc.lo, pc.hi, pc.c1, 0.0, 0.0, origin=pc.origin))
        return out

    def breakpoints_in(self, lo, hi):
        return _wave_marks(lo, hi, from_zero=True)


class SquareWave(Profile):
    """Period-4 square wave on all of R: +1 on (4n, 4n+2), -1 on (4n+2, 4n+4).

    Right-limit convention at the jumps, so the value at every even integer
    is the value of the following open interval.
    """

    continuous = False

    def __eq__(self, other):
        return type(other) is SquareWave

    def __hash__(self):
        return hash(type(self))

    def pieces(self, lo, hi):
        out = []
        for n in range(_period_index(lo), _period_index(hi) + 1):
            base = 4.0 * n
            for a, b, v in ((base, base + 2, 1.0), (base + 2, base + 4, -1.0)):
                if b <= lo or a >= hi:
                    continue
                out.append(Piece(max(lo, a), min(hi, b), v, 0.0, 0.0, origin=a))
        return out

    def breakpoints_in(self, lo, hi):
        return _even_marks(lo, hi)

    def __call__(self, u):
        s = np.mod(np.asarray(u, dtype=float), 4.0)
        return _scalar_or_array(u, np.where(s < 2.0, 1.0, -1.0))


class SharpeningWaveIntegral(Profile):
    """Exact antiderivative (from 0) of SharpeningWave; piecewise quadratic.

    Vanishes at every multiple of 4, peaks at 2 - 1/(n+1) in period n, and
    has Lipschitz constant 1.
    """

    def __eq__(self, other):
        return type(other) is SharpeningWaveIntegral

    def __hash__(self):
        return hash(type(self))

    @staticmethod
    def _period_pieces(n: int) -> list[Piece]:
        base = 4.0 * n
        w = 1.0 / (n + 1)
        k = float(n + 1)
        # closed forms per ramp/plateau, local to natural origins
        out = [Piece(base, base + w, 0.0, 0.0, k / 2.0, origin=base)]
        if w < 1.0:
            # value s - w/2 with s local to the period base
            out.append(Piece(base + w, base + 2 - w, w / 2.0, 1.0, 0.0,
                             origin=base + w))
        out.append(Piece(base + 2 - w, base + 2 + w, 2.0 - w, 0.0, -k / 2.0,
                         origin=base + 2))
        if w < 1.0:
            out.append(Piece(base + 2 + w, base + 4 - w, 2.0 - 1.5 * w, -1.0, 0.0,
                             origin=base + 2 + w))
        out.append(Piece(base + 4 - w, base + 4, 0.0, 0.0, k / 2.0, origin=base + 4))
        return out

    def pieces(self, lo, hi):
        out = []
        if lo < 0.0:
            out.append(Piece(lo, min(hi, 0.0), 0.0, 0.0, 0.0, origin=0.0))
        if hi > 0.0:
            for n in range(max(0, _period_index(max(lo, 0.0))),
                           _period_index(hi) + 1):
                for pc in self._period_pieces(n):
                    if pc.hi <= lo or pc.lo >= hi or pc.lo == pc.hi:
                        continue
                    out.append(Piece(max(lo, pc.lo), min(hi, pc.hi),
                                     pc.c0, pc.c1, pc.c2, pc.origin))
        return out

    def derivative(self):
        return SharpeningWave()

    def breakpoints_in(self, lo, hi):
        return _wave_marks(lo, hi, from_zero=True)

    def __call__(self, u):
        v, s, w, k = _wave_frame(u)
        vals = np.select(
            [v < 0.0, s < w, s < 2.0 - w, s < 2.0 + w, s < 4.0 - w],
            [0.0,
             0.5 * k * s * s,
             s - 0.5 * w,
             2.0 - w - 0.5 * k * (s - 2.0) ** 2,
             4.0 - s - 0.5 * w],
            default=0.5 * k * (s - 4.0) ** 2,
        )
        return _scalar_or_array(u, vals)


class TriangleWave(Profile):
    """Period-4 triangle wave on all of R: 0 at 4n, 2 at 4n+2, slopes +-1.

    Equals the antiderivative (from 0) of SquareWave.
    """

    def __eq__(self, other):
        return type(other) is TriangleWave

    def __hash__(self):
        return hash(type(self))

    def pieces(self, lo, hi):
        out = []
        for n in range(_period_index(lo), _period_index(hi) + 1):
            base = 4.0 * n
            for a, b, c1 in ((base, base + 2, 1.0), (base + 2, base + 4, -1.0)):
                if b <= lo or a >= hi:
                    continue
                c0 = 0.0 if c1 > 0 else 2.0
                out.append(Piece(max(lo, a), min(hi, b), c0, c1, 0.0, origin=a))
        return out

    def derivative(self):
        return SquareWave()

    def breakpoints_in(self, lo, hi):
        return _even_marks(lo, hi)

    def __call__(self, u):
        s = np.mod(np.asarray(u, dtype=float), 4.0)
        return _scalar_or_array(u, np.where(s < 2.0, s, 4.0 - s))
