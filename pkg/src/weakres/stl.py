"""Signal temporal logic over discrete-time signals: syntax tree and semantics.

Formulas are built from affine predicates ``f(s(t)) > 0``, boolean connectives,
and the bounded temporal operators always/eventually/until with integer-step
windows.  The same node classes double as the weakenable dialect: a predicate
may carry an integer slack bound and always/eventually may carry a pair of
window-adjustment bounds.  A formula with no annotations anywhere is "plain".

Quantitative semantics (robustness) follows the usual min/max recursion:

    rho(f > 0)        = f(s(t))
    rho(true)         = +M           (a large finite constant, configurable)
    rho(!phi)         = -rho(phi)
    rho(phi & psi)    = min
    rho(phi | psi)    = max
    rho(G[a,b] phi)   = min over t' in [t+a, t+b] of rho(phi, t')
    rho(F[a,b] phi)   = max over the same window
    rho(phi U[a,b] psi) = max over t1 in [t+a, t+b] of
                            min(rho(psi, t1), min over t2 in [t, t1] of rho(phi, t2))

The until recursion uses the closed prefix window [t, t1]; satisfaction is
``rho >= 0``.  True's robustness is kept finite so every value stays
representable inside linear constraint systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import EvaluationError, HorizonError, UnknownVariableError
from .signals import Signal

#: Finite stand-in for the robustness of ``true``; mirrors the default big-M
#: of the constraint encoding so monitor and encoder agree bit-for-bit.
DEFAULT_TRUE_ROBUSTNESS = 1000.0


@dataclass(frozen=True)
class AffineExpr:
    """An affine function of signal variables: ``sum(coef * var) + const``.

    Terms are stored in insertion order with zero coefficients dropped, so
    structural equality is order-sensitive exactly like the printed form.
    """

    terms: tuple[tuple[str, float], ...]
    const: float = 0.0

    @staticmethod
    def build(coeffs: dict[str, float] | list[tuple[str, float]], const: float = 0.0) -> "AffineExpr":
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        merged: dict[str, float] = {}
        for name, coef in items:
            merged[name] = merged.get(name, 0.0) + float(coef)
        terms = tuple((n, c) for n, c in merged.items() if c != 0.0)
        return AffineExpr(terms, float(const))

    def variables(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.terms)

    def as_dict(self) -> dict[str, float]:
        return dict(self.terms)

    def evaluate(self, signal: Signal, t: int) -> float:
        total = self.const
        for name, coef in self.terms:
            total += coef * signal.value(name, t)
        return total

    def evaluate_values(self, values) -> float:
        """Evaluate against a plain name-to-value mapping."""
        total = self.const
        for name, coef in self.terms:
            if name not in values:
                raise UnknownVariableError(f"no value for variable {name!r}")
            total += coef * values[name]
        return total

    def value_range(self, var_bounds) -> tuple[float, float]:
        """Interval-arithmetic range given per-variable (lo, hi) bounds."""
        lo = hi = self.const
        for name, coef in self.terms:
            if name not in var_bounds:
                raise UnknownVariableError(f"no bounds for variable {name!r}")
            blo, bhi = var_bounds[name]
            a, b = coef * blo, coef * bhi
            lo += min(a, b)
            hi += max(a, b)
        return lo, hi

    def magnitude_bound(self, var_bounds: dict[str, tuple[float, float]] | None = None) -> float:
        """An upper bound on ``|value|`` given per-variable ranges.

        Without ranges the expression is assumed bounded by unit values; the
        encoder always supplies real ranges.
        """
        total = abs(self.const)
        for name, coef in self.terms:
            if var_bounds and name in var_bounds:
                lo, hi = var_bounds[name]
                total += abs(coef) * max(abs(lo), abs(hi))
            else:
                total += abs(coef)
        return total

    def to_text(self) -> str:
        parts: list[str] = []
        for name, coef in self.terms:
            if coef == 1.0:
                term = name
            elif coef == -1.0:
                term = f"-{name}"
            else:
                term = f"{_fmt(coef)} * {name}"
            if not parts:
                parts.append(term)
            elif term.startswith("-"):
                parts.append(f"- {term[1:]}")
            else:
                parts.append(f"+ {term}")
        if self.const != 0.0 or not parts:
            c = self.const
            if not parts:
                parts.append(_fmt(c))
            elif c < 0:
                parts.append(f"- {_fmt(-c)}")
            else:
                parts.append(f"+ {_fmt(c)}")
        return " ".join(parts)


def _fmt(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


@dataclass(frozen=True)
class Interval:
    """A temporal window ``[lo, hi]`` in whole steps, ``0 <= lo <= hi``."""

    lo: int
    hi: int

    def __post_init__(self):
        if not (isinstance(self.lo, int) and isinstance(self.hi, int)):
            raise ValueError("interval bounds must be integers (whole steps)")
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError(f"bad interval [{self.lo}, {self.hi}]")

    def steps(self, t: int = 0) -> range:
        return range(t + self.lo, t + self.hi + 1)

    def to_text(self) -> str:
        return f"[{self.lo},{self.hi}]"


class Formula:
    """Base class; concrete nodes are the frozen dataclasses below."""

    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class Pred(Formula):
    """Atomic predicate ``expr > 0``; may carry a weakening slack bound.

    ``slack_bound`` is the maximal integer slack p (None means the predicate
    is not weakenable); ``slack_scale`` converts one slack unit into signal
    units.
    """

    expr: AffineExpr
    slack_bound: int | None = None
    slack_scale: float = 1.0

    def __post_init__(self):
        if self.slack_bound is not None:
            if not isinstance(self.slack_bound, int) or self.slack_bound < 0:
                raise ValueError("slack bound must be a nonnegative integer")
        if self.slack_scale <= 0:
            raise ValueError("slack scale must be positive")


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Always(Formula):
    """G[a,b]; ``window_bounds`` = (p, q) caps for shrinking the window."""

    interval: Interval
    child: Formula
    window_bounds: tuple[int, int] | None = None

    def __post_init__(self):
        _check_window_bounds(self.window_bounds)
        if self.window_bounds is not None:
            p, q = self.window_bounds
            # Shrinking by the full caps must still leave a nonempty window,
            # otherwise some admissible instantiations would be meaningless.
            if self.interval.lo + p > self.interval.hi - q:
                raise ValueError(
                    f"window bounds ({p},{q}) can empty G{self.interval.to_text()}"
                )


@dataclass(frozen=True)
class Eventually(Formula):
    """F[a,b]; ``window_bounds`` = (p, q) caps for growing the window."""

    interval: Interval
    child: Formula
    window_bounds: tuple[int, int] | None = None

    def __post_init__(self):
        _check_window_bounds(self.window_bounds)


@dataclass(frozen=True)
class Until(Formula):
    """left U[a,b] right; carries no weakening annotation of its own."""

    interval: Interval
    left: Formula
    right: Formula


def _check_window_bounds(wb):
    if wb is None:
        return
    p, q = wb
    if not (isinstance(p, int) and isinstance(q, int)) or p < 0 or q < 0:
        raise ValueError("window adjustment bounds must be nonnegative integers")


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, (TrueF, Pred)):
        return ()
    if isinstance(phi, Not):
        return (phi.child,)
    if isinstance(phi, (And, Or)):
        return (phi.left, phi.right)
    if isinstance(phi, (Always, Eventually)):
        return (phi.child,)
    if isinstance(phi, Until):
        return (phi.left, phi.right)
    raise TypeError(f"not a formula node: {phi!r}")


def walk(phi: Formula) -> Iterator[Formula]:
    """Pre-order traversal."""
    yield phi
    for c in children(phi):
        yield from walk(c)


def is_plain(phi: Formula) -> bool:
    """True when no node carries any weakening annotation."""
    for node in walk(phi):
        if isinstance(node, Pred) and node.slack_bound is not None:
            return False
        if isinstance(node, (Always, Eventually)) and node.window_bounds is not None:
            return False
    return True


def variables(phi: Formula) -> tuple[str, ...]:
    """All signal variables mentioned, in first-appearance order."""
    seen: dict[str, None] = {}
    for node in walk(phi):
        if isinstance(node, Pred):
            for name in node.expr.variables():
                seen.setdefault(name)
    return tuple(seen)


def horizon(phi: Formula) -> int:
    """Steps of future signal needed beyond the evaluation point."""
    if isinstance(phi, (TrueF, Pred)):
        return 0
    if isinstance(phi, Not):
        return horizon(phi.child)
    if isinstance(phi, (And, Or)):
        return max(horizon(phi.left), horizon(phi.right))
    if isinstance(phi, (Always, Eventually)):
        return phi.interval.hi + horizon(phi.child)
    if isinstance(phi, Until):
        return phi.interval.hi + max(horizon(phi.left), horizon(phi.right))
    raise TypeError(f"not a formula node: {phi!r}")


def weak_horizon(phi: Formula) -> int:
    """Horizon covering every admissible window adjustment.

    A window-annotated operator may extend its upper bound by at most q under
    one of the two instantiation polarities, so planning code must reserve
    signal for ``hi + q``.
    """
    if isinstance(phi, (TrueF, Pred)):
        return 0
    if isinstance(phi, Not):
        return weak_horizon(phi.child)
    if isinstance(phi, (And, Or)):
        return max(weak_horizon(phi.left), weak_horizon(phi.right))
    if isinstance(phi, (Always, Eventually)):
        q = phi.window_bounds[1] if phi.window_bounds else 0
        return phi.interval.hi + q + weak_horizon(phi.child)
    if isinstance(phi, Until):
        return phi.interval.hi + max(weak_horizon(phi.left), weak_horizon(phi.right))
    raise TypeError(f"not a formula node: {phi!r}")


def to_text(phi: Formula) -> str:
    """Render a formula in the concrete grammar; parses back to an equal tree."""
    return _render(phi)


def _annot(phi: "Pred | Always | Eventually") -> str:
    if isinstance(phi, Pred):
        if phi.slack_bound is None:
            return ""
        return "{%d}" % phi.slack_bound
    if phi.window_bounds is None:
        return ""
    return "{%d,%d}" % phi.window_bounds


def _render(phi: Formula) -> str:
    if isinstance(phi, TrueF):
        return "true"
    if isinstance(phi, Pred):
        body = f"({phi.expr.to_text()} > 0)"
        return body + _annot(phi)
    if isinstance(phi, Not):
        return f"!{_wrap(phi.child)}"
    if isinstance(phi, And):
        return f"{_wrap(phi.left)} & {_wrap(phi.right)}"
    if isinstance(phi, Or):
        return f"{_wrap(phi.left)} | {_wrap(phi.right)}"
    if isinstance(phi, Always):
        return f"G{phi.interval.to_text()}{_annot(phi)}{_wrap(phi.child)}"
    if isinstance(phi, Eventually):
        return f"F{phi.interval.to_text()}{_annot(phi)}{_wrap(phi.child)}"
    if isinstance(phi, Until):
        return f"{_wrap(phi.left)} U{phi.interval.to_text()} {_wrap(phi.right)}"
    raise TypeError(f"not a formula node: {phi!r}")


def _wrap(phi: Formula) -> str:
    # Parenthesize everything that is not already self-delimiting; the
    # round-trip property matters more than minimal output.
    if isinstance(phi, (TrueF, Pred)):
        return _render(phi)
    if isinstance(phi, (Not, Always, Eventually)):
        return _render(phi)
    return f"({_render(phi)})"


# --- robustness -------------------------------------------------------------

def robustness(phi: Formula, signal: Signal, t: int = 0, *,
               true_value: float = DEFAULT_TRUE_ROBUSTNESS) -> float:
    """Quantitative satisfaction of ``phi`` by ``signal`` at step ``t``.

    Requires a plain formula (instantiate any weakening annotations first)
    and ``t + horizon(phi) < len(signal)``.
    """
    if not is_plain(phi):
        raise EvaluationError(
            "formula carries weakening annotations; instantiate a parameter vector first"
        )
    if t < 0 or t >= len(signal):
        raise HorizonError(f"evaluation step {t} outside signal of length {len(signal)}")
    need = t + horizon(phi)
    if need >= len(signal):
        raise HorizonError(
            f"formula horizon {horizon(phi)} needs step {need} but signal ends at {len(signal) - 1}"
        )
    table = _evaluate_table(phi, signal, true_value)
    return table[t]


def satisfied(phi: Formula, signal: Signal, t: int = 0, *,
              true_value: float = DEFAULT_TRUE_ROBUSTNESS) -> bool:
    """Boolean satisfaction: nonnegative robustness."""
    return robustness(phi, signal, t, true_value=true_value) >= 0.0


def robustness_series(phi: Formula, signal: Signal, *,
                      true_value: float = DEFAULT_TRUE_ROBUSTNESS) -> list[float]:
    """Robustness at every step where the horizon fits; bulk form of
    :func:`robustness` used by monitoring loops."""
    if not is_plain(phi):
        raise EvaluationError(
            "formula carries weakening annotations; instantiate a parameter vector first"
        )
    if horizon(phi) >= len(signal):
        return []
    return _evaluate_table(phi, signal, true_value)


def _evaluate_table(phi: Formula, signal: Signal, true_value: float) -> list[float]:
    """Bottom-up evaluation: the value list covers steps ``0..T-horizon``."""
    n = len(signal)
    if isinstance(phi, TrueF):
        return [true_value] * n
    if isinstance(phi, Pred):
        for name in phi.expr.variables():
            if not signal.has_variable(name):
                raise UnknownVariableError(f"signal has no variable {name!r}")
        return [phi.expr.evaluate(signal, t) for t in range(n)]
    if isinstance(phi, Not):
        return [-v for v in _evaluate_table(phi.child, signal, true_value)]
    if isinstance(phi, And):
        a = _evaluate_table(phi.left, signal, true_value)
        b = _evaluate_table(phi.right, signal, true_value)
        return [min(x, y) for x, y in zip(a, b)]
    if isinstance(phi, Or):
        a = _evaluate_table(phi.left, signal, true_value)
        b = _evaluate_table(phi.right, signal, true_value)
        return [max(x, y) for x, y in zip(a, b)]
    if isinstance(phi, Always):
        inner = _evaluate_table(phi.child, signal, true_value)
        return _window(inner, phi.interval, min)
    if isinstance(phi, Eventually):
        inner = _evaluate_table(phi.child, signal, true_value)
        return _window(inner, phi.interval, max)
    if isinstance(phi, Until):
        a = _evaluate_table(phi.left, signal, true_value)
        b = _evaluate_table(phi.right, signal, true_value)
        lo, hi = phi.interval.lo, phi.interval.hi
        out_len = min(len(a), len(b)) - hi
        out: list[float] = []
        for t in range(max(out_len, 0)):
            best = None
            prefix = a[t]  # min of the left child over the closed window [t, t1]
            for t1 in range(t, t + hi + 1):
                if t1 > t:
                    prefix = min(prefix, a[t1])
                if t1 < t + lo:
                    continue
                cand = min(b[t1], prefix)
                best = cand if best is None else max(best, cand)
            out.append(best)
        return out
    raise TypeError(f"not a formula node: {phi!r}")


def _window(inner: list[float], interval: Interval, combine) -> list[float]:
    lo, hi = interval.lo, interval.hi
    out_len = len(inner) - hi
    out = []
    for t in range(max(out_len, 0)):
        seg = inner[t + lo: t + hi + 1]
        out.append(combine(seg))
    return out
