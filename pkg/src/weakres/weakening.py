"""Parameterized requirement weakening.

An annotated formula denotes a family of plain formulas indexed by an integer
parameter vector theta, ordered by a pre-order walk of the tree:

    slots(true)              = ()
    slots((f > 0){p})        = (x,)            0 <= x <= p
    slots(G[a,b]{p,q} phi)   = (x, y) + slots(phi)
    slots(F[a,b]{p,q} phi)   = (x, y) + slots(phi)
    slots(!phi)              = slots(phi)
    slots(phi op psi)        = slots(phi) + slots(psi)     for &, |, U

Instantiation is polarity-directed.  Under the weakening polarity each
annotated node is made easier to satisfy; under the strengthening polarity,
harder.  Negation flips the polarity for its subtree; all other connectives
pass it through:

    node                weaken                      strengthen
    (f > 0){p} with x   f + x*scale > 0             f - x*scale > 0
    G[a,b]{p,q} (x,y)   G[a+x, b-y]                 G[max(a-x,0), b+y]
    F[a,b]{p,q} (x,y)   F[max(a-x,0), b+y]          F[a+x, b-y]

Weakening therefore shrinks an always window and grows an eventually window;
strengthening is the exact dual.  Clamping an eventually lower bound at zero
is legal and logged; a strengthened eventually whose window empties is an
error.  Instantiating at theta = 0 returns the original requirement with the
annotations stripped; instantiating at the upper bounds under the weakening
polarity yields the family's minimal (least demanding) member.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from .errors import EmptyIntervalError, ThetaBoundsError
from .signals import Signal
from .stl import (DEFAULT_TRUE_ROBUSTNESS, AffineExpr, Always, And, Eventually,
                  Formula, Interval, Not, Or, Pred, TrueF, Until, robustness)

log = logging.getLogger(__name__)


class Polarity(enum.Enum):
    WEAKEN = "weaken"
    STRENGTHEN = "strengthen"

    def flipped(self) -> "Polarity":
        return Polarity.STRENGTHEN if self is Polarity.WEAKEN else Polarity.WEAKEN


@dataclass(frozen=True)
class ThetaSlot:
    """One adjustable parameter: where it lives and how far it may go."""

    path: tuple[int, ...]  # child indices from the root to the annotated node
    kind: str              # "slack" | "window_lo" | "window_hi"
    bound: int
    scale: float = 1.0


def theta_slots(phi: Formula, _path: tuple[int, ...] = ()) -> tuple[ThetaSlot, ...]:
    """All parameter slots of ``phi`` in pre-order."""
    if isinstance(phi, TrueF):
        return ()
    if isinstance(phi, Pred):
        if phi.slack_bound is None:
            return ()
        return (ThetaSlot(_path, "slack", phi.slack_bound, phi.slack_scale),)
    if isinstance(phi, Not):
        return theta_slots(phi.child, _path + (0,))
    if isinstance(phi, (And, Or, Until)):
        return (theta_slots(phi.left, _path + (0,))
                + theta_slots(phi.right, _path + (1,)))
    if isinstance(phi, (Always, Eventually)):
        own: tuple[ThetaSlot, ...] = ()
        if phi.window_bounds is not None:
            p, q = phi.window_bounds
            own = (ThetaSlot(_path, "window_lo", p),
                   ThetaSlot(_path, "window_hi", q))
        return own + theta_slots(phi.child, _path + (0,))
    raise TypeError(f"not a formula node: {phi!r}")


def weaken_param_count(phi: Formula) -> int:
    """Arity of the formula's parameter vector."""
    return len(theta_slots(phi))


@dataclass(frozen=True)
class Theta:
    """An integer parameter vector together with its per-slot bounds."""

    values: tuple[int, ...]
    bounds: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.bounds):
            raise ThetaBoundsError(
                f"theta has {len(self.values)} values but {len(self.bounds)} bounds")
        for i, (v, b) in enumerate(zip(self.values, self.bounds)):
            if not isinstance(v, int):
                raise ThetaBoundsError(f"theta[{i}] = {v!r} is not an integer")
            if not 0 <= v <= b:
                raise ThetaBoundsError(f"theta[{i}] = {v} outside [0, {b}]")

    def __len__(self) -> int:
        return len(self.values)

    @staticmethod
    def zeros(phi: Formula) -> "Theta":
        bounds = tuple(s.bound for s in theta_slots(phi))
        return Theta((0,) * len(bounds), bounds)

    @staticmethod
    def maxed(phi: Formula) -> "Theta":
        bounds = tuple(s.bound for s in theta_slots(phi))
        return Theta(bounds, bounds)

    @staticmethod
    def of(phi: Formula, values) -> "Theta":
        bounds = tuple(s.bound for s in theta_slots(phi))
        return Theta(tuple(int(v) for v in values), bounds)


def instantiate(phi: Formula, theta: Theta, polarity: Polarity = Polarity.WEAKEN) -> Formula:
    """The plain formula selected by ``theta`` under the given polarity."""
    slots = theta_slots(phi)
    if len(theta) != len(slots):
        raise ThetaBoundsError(
            f"formula takes {len(slots)} parameters, theta has {len(theta)}")
    for i, (slot, v) in enumerate(zip(slots, theta.values)):
        if v > slot.bound:
            raise ThetaBoundsError(
                f"theta[{i}] = {v} exceeds the formula's declared bound {slot.bound}")
    values = list(theta.values)
    out = _instantiate(phi, values, polarity)
    assert not values, "instantiation must consume the whole vector"
    return out


def _instantiate(phi: Formula, values: list[int], polarity: Polarity) -> Formula:
    if isinstance(phi, TrueF):
        return phi
    if isinstance(phi, Pred):
        if phi.slack_bound is None:
            return Pred(phi.expr)
        x = values.pop(0)
        shift = x * phi.slack_scale
        if polarity is Polarity.STRENGTHEN:
            shift = -shift
        expr = AffineExpr(phi.expr.terms, phi.expr.const + shift)
        return Pred(expr)
    if isinstance(phi, Not):
        return Not(_instantiate(phi.child, values, polarity.flipped()))
    if isinstance(phi, And):
        left = _instantiate(phi.left, values, polarity)
        return And(left, _instantiate(phi.right, values, polarity))
    if isinstance(phi, Or):
        left = _instantiate(phi.left, values, polarity)
        return Or(left, _instantiate(phi.right, values, polarity))
    if isinstance(phi, Until):
        left = _instantiate(phi.left, values, polarity)
        return Until(phi.interval, left, _instantiate(phi.right, values, polarity))
    if isinstance(phi, (Always, Eventually)):
        if phi.window_bounds is None:
            interval = phi.interval
        else:
            x, y = values.pop(0), values.pop(0)
            interval = adjusted_window(phi, x, y, polarity)
        child = _instantiate(phi.child, values, polarity)
        cls = Always if isinstance(phi, Always) else Eventually
        return cls(interval, child)
    raise TypeError(f"not a formula node: {phi!r}")


def adjusted_window(phi: "Always | Eventually", x: int, y: int,
                    polarity: Polarity) -> Interval:
    """The instantiated temporal window for one annotated operator."""
    a, b = phi.interval.lo, phi.interval.hi
    shrink = (polarity is Polarity.WEAKEN) == isinstance(phi, Always)
    if shrink:
        lo, hi = a + x, b - y
        if lo > hi:
            raise EmptyIntervalError(
                f"window [{a},{b}] shrunk by ({x},{y}) is empty")
    else:
        lo, hi = a - x, b + y
        if lo < 0:
            log.debug("window lower bound %d clamped to 0", lo)
            lo = 0
    return Interval(lo, hi)


def minimal_requirement(phi: Formula) -> Formula:
    """The least demanding member of the family: weaken at the full bounds."""
    return instantiate(phi, Theta.maxed(phi), Polarity.WEAKEN)


def degree_of_weakening(phi: Formula, theta: Theta, signal: Signal, t: int = 0, *,
                        true_value: float = DEFAULT_TRUE_ROBUSTNESS) -> float:
    """Robustness gained by weakening: rho(phi_theta) - rho(phi_0) on ``signal``.

    Nonnegative for any in-bounds theta because instantiated robustness is
    monotone in every parameter.
    """
    weakened = instantiate(phi, theta, Polarity.WEAKEN)
    original = instantiate(phi, Theta.zeros(phi), Polarity.WEAKEN)
    return (robustness(weakened, signal, t, true_value=true_value)
            - robustness(original, signal, t, true_value=true_value))


def weak_satisfied(phi: Formula, signal: Signal, t: int = 0, *,
                   true_value: float = DEFAULT_TRUE_ROBUSTNESS) -> bool:
    """Whether any admissible instantiation satisfies the signal.

    By parameter monotonicity this holds exactly when the minimal requirement
    is satisfied, so no enumeration is needed.
    """
    return robustness(minimal_requirement(phi), signal, t, true_value=true_value) >= 0.0
