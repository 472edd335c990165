"""
Markov processes in a finite Riesz space.

A process (X_t) indexed by finite integer times is Markov with respect to a
base conditional expectation T when

    T_(t1..tn) P e = T_tn P e

for all t1 < ... < tn < t and every band projection P with Pe in the
subspace generated by R(T) and X_t. T_(ts) is the conditional expectation
onto the subspace generated by R(T) and the elements at times ts.

Besides the defining scan this module checks the operator form, the
future-product form, Chapman-Kolmogorov, and the two Rao characterizations,
so their mutual agreement can be tested.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

from riesz_core.condexp import (
    ConditionalExpectation,
    condexp_onto,
    matrices_equal,
    operator_matrix,
)
from riesz_core.errors import DomainError, StructuralError
from riesz_core.partitions import Partition, enumerate_band_projections, generated_partition
from riesz_core.settings import FUTURE_CAP
from riesz_core.space import BandProjection, RieszElement, e_mul, require_same_space

from .independence import require_invariant_unit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Process:
    """
    A finite-time process on one sample space.

    Attributes:
        t: Base conditional expectation
        e: T-invariant weak order unit
        times: Strictly increasing integer times
        elements: One element per time

    Examples:
        >>> space = SampleSpace.uniform(2)
        >>> proc = Process.of(ConditionalExpectation.expectation(space), {1: space.ones()})
        >>> proc.times
        (1,)
    """

    t: ConditionalExpectation
    e: RieszElement
    times: tuple[int, ...]
    elements: tuple[RieszElement, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "times", tuple(self.times))
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.times:
            raise DomainError("A process needs at least one time")
        if len(self.times) != len(self.elements):
            raise StructuralError(
                f"{len(self.times)} times but {len(self.elements)} elements"
            )
        if any(a >= b for a, b in zip(self.times, self.times[1:])):
            raise DomainError(f"Times must be strictly increasing, got {list(self.times)}")
        require_same_space(self.t.space, self.e.space, *(x.space for x in self.elements))
        require_invariant_unit(self.t, self.e)

    @classmethod
    def of(
        cls,
        t: ConditionalExpectation,
        elements: Mapping[int, RieszElement],
        e: Optional[RieszElement] = None,
    ) -> "Process":
        """Build a process from a time -> element mapping; e defaults to the constant one."""
        times = sorted(elements)
        e = t.space.ones() if e is None else e
        return cls(t, e, tuple(times), tuple(elements[s] for s in times))

    @property
    def space(self):
        return self.t.space

    def at(self, time: int) -> RieszElement:
        """
        Raises:
            DomainError: If the time is not in the process
        """
        try:
            return self.elements[self.times.index(time)]
        except ValueError:
            raise DomainError(f"unknown time {time}") from None

    def earlier(self, time: int) -> tuple[int, ...]:
        return tuple(s for s in self.times if s < time)

    def later(self, time: int) -> tuple[int, ...]:
        return tuple(s for s in self.times if s > time)


def _require_times(proc: Process, ts: Iterable[int]) -> tuple[int, ...]:
    ts = tuple(sorted(set(ts)))
    for s in ts:
        if s not in proc.times:
            raise DomainError(f"unknown time {s}")
    return ts


def history_partition(proc: Process, ts: Iterable[int]) -> Partition:
    """Partition of the subspace generated by R(T) and the elements at times ts."""
    ts = _require_times(proc, ts)
    return generated_partition(proc.t.partition, [proc.at(s) for s in ts])


def history_condexp(proc: Process, ts: Iterable[int]) -> ConditionalExpectation:
    """
    Conditional expectation T_(ts) onto the subspace generated by R(T) and X_s, s in ts.

    Returns T itself for an empty ts. Results are cached on the process.

    Raises:
        DomainError: If a time is not in the process
    """
    ts = _require_times(proc, ts)
    cached = proc._cache.get(ts)
    if cached is None:
        cached = condexp_onto(proc.t, history_partition(proc, ts))
        proc._cache[ts] = cached
    return cached


def past_condexp(proc: Process, u: int) -> ConditionalExpectation:
    """The past operator: range generated by R(T) and X_s for s <= u."""
    _require_times(proc, [u])
    return history_condexp(proc, [s for s in proc.times if s <= u])


def future_condexp(proc: Process, u: int) -> ConditionalExpectation:
    """The future operator: range generated by R(T) and X_s for s >= u."""
    _require_times(proc, [u])
    return history_condexp(proc, [s for s in proc.times if s >= u])


def histories(times: Sequence[int], max_size: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    """Nonempty subsets of times, by size then lexicographically."""
    top = len(times) if max_size is None else min(max_size, len(times))
    for size in range(1, top + 1):
        yield from itertools.combinations(times, size)


def _all_equal(sides: Sequence[Any]) -> bool:
    first = sides[0]
    for other in sides[1:]:
        if isinstance(first, np.ndarray):
            if not matrices_equal(first, other):
                return False
        elif first != other:
            return False
    return True


@dataclass(frozen=True)
class MarkovWitness:
    """
    A failing instance of one of the Markov identities.

    Attributes:
        kind: Which identity failed ("markov", "operator", "future", "future_range",
            "rao_ii", "rao_iii", "chapman_kolmogorov")
        history: Conditioning times (t1..tn, or the past times)
        time: The present time t (v for rao_ii, n for chapman_kolmogorov)
        future: Future times, where the identity has any
        projections: Band projections the identity was evaluated with
        w: Element the identity was evaluated at, where it is not e
        sides: The exact values of the sides, which are not all equal
    """

    kind: str
    history: tuple[int, ...]
    time: int
    sides: tuple[Any, ...]
    future: tuple[int, ...] = ()
    projections: tuple[BandProjection, ...] = ()
    w: Optional[RieszElement] = None

    def reevaluate(self, proc: Process) -> bool:
        """True iff recomputing the sides on proc reproduces this exact inequality."""
        sides = witness_sides(proc, self)
        return (
            len(sides) == len(self.sides)
            and all(_all_equal([a, b]) for a, b in zip(sides, self.sides))
            and not _all_equal(sides)
        )


@dataclass
class MarkovReport:
    """
    Verdict of a Markov characterization.

    Attributes:
        holds: Whether the identity holds everywhere it was checked
        counterexample: First failing instance, in scan order
        checked: Number of identities evaluated
    """

    holds: bool
    counterexample: Optional[MarkovWitness] = None
    checked: int = 0


def _apply_all(projections: Sequence[BandProjection], w: RieszElement) -> RieszElement:
    for p in reversed(projections):
        w = p.apply(w)
    return w


def witness_sides(proc: Process, witness: MarkovWitness) -> tuple[Any, ...]:
    """Recompute the sides of the identity a witness records."""
    kind, history, time = witness.kind, witness.history, witness.time
    e = proc.e
    if kind == "markov":
        (p,) = witness.projections
        return (
            history_condexp(proc, history).apply(p.apply(e)),
            history_condexp(proc, history[-1:]).apply(p.apply(e)),
        )
    if kind == "operator":
        tt = history_condexp(proc, [time])
        return (
            operator_matrix(history_condexp(proc, history), tt),
            operator_matrix(history_condexp(proc, history[-1:]), tt),
        )
    if kind in ("future", "future_range"):
        w = _apply_all(witness.projections, e if witness.w is None else witness.w)
        return (
            history_condexp(proc, history + (time,)).apply(w),
            history_condexp(proc, [time]).apply(w),
        )
    if kind == "rao_ii":
        (u,) = history[-1:]
        tv = history_condexp(proc, [time])
        return (
            operator_matrix(past_condexp(proc, u), tv),
            operator_matrix(history_condexp(proc, [u]), tv),
        )
    if kind == "rao_iii":
        p, q = witness.projections
        return rao_iii_sides(history_condexp(proc, [time]), p, q, e)
    if kind == "chapman_kolmogorov":
        u, t = history
        tu, tt = history_condexp(proc, [u]), history_condexp(proc, [t])
        if witness.w is None:
            tn = history_condexp(proc, [time])
            return (operator_matrix(tu, tn), operator_matrix(tu, tt, tn))
        return (tu.apply(witness.w), tu.apply(tt.apply(witness.w)))
    raise DomainError(f"Unknown witness kind {kind!r}")


def _single_projections(proc: Process, time: int, cap: Optional[int]) -> list[BandProjection]:
    return list(enumerate_band_projections(history_partition(proc, [time]), cap))


def _require_two_times(proc: Process) -> None:
    if len(proc.times) < 2:
        raise DomainError("A Markov check needs at least two times")


def is_markov(proc: Process, cap: Optional[int] = None) -> MarkovReport:
    """
    Scan the defining identity T_(t1..tn) P e = T_tn P e.

    Times t run over every time after the first, histories over every
    nonempty subset of earlier times (by size then lexicographically) and P
    over every band projection with Pe in the subspace generated by R(T) and X_t.

    Raises:
        DomainError: If the process has fewer than two times
        ResourceCapError: If a single-time subspace has too many blocks
    """
    _require_two_times(proc)
    e = proc.e
    checked = 0
    for t in proc.times[1:]:
        projected = [(p, p.apply(e)) for p in _single_projections(proc, t, cap)]
        for history in histories(proc.earlier(t)):
            t_hist = history_condexp(proc, history)
            t_last = history_condexp(proc, history[-1:])
            for p, pe in projected:
                checked += 1
                left, right = t_hist.apply(pe), t_last.apply(pe)
                if left != right:
                    logger.info(f"Markov identity fails: history {history}, time {t}, {p}")
                    witness = MarkovWitness("markov", history, t, (left, right), projections=(p,))
                    return MarkovReport(False, witness, checked)
    logger.debug(f"Markov identity holds over {checked} instances")
    return MarkovReport(True, checked=checked)


def markov_operator_form(proc: Process) -> MarkovReport:
    """
    Check T_(t1..tn) T_t = T_tn T_t as exact matrices for every admissible tuple.

    Raises:
        DomainError: If the process has fewer than two times
    """
    _require_two_times(proc)
    checked = 0
    for t in proc.times[1:]:
        tt = history_condexp(proc, [t])
        for history in histories(proc.earlier(t)):
            checked += 1
            left = operator_matrix(history_condexp(proc, history), tt)
            right = operator_matrix(history_condexp(proc, history[-1:]), tt)
            if not matrices_equal(left, right):
                witness = MarkovWitness("operator", history, t, (left, right))
                return MarkovReport(False, witness, checked)
    return MarkovReport(True, checked=checked)


def future_products(
    proc: Process, future_cap: int = FUTURE_CAP, cap: Optional[int] = None
) -> MarkovReport:
    """
    Check that conditioning on the past adds nothing to the present, for joint futures.

    For every t, every nonempty history before t and every set of at most
    future_cap later times s1 < ... < sm, checks

        T_(t1..tn, t) Q1...Qm e = T_t Q1...Qm e

    for all band projections Qi with Qi e in the subspace of R(T) and X_si,
    then checks T_(t1..tn, t) f = T_t f for f over the block indicators of the
    joint future subspace.
    """
    e = proc.e
    checked = 0
    for t in proc.times:
        earlier, later = proc.earlier(t), proc.later(t)
        if not earlier or not later:
            continue
        tt = history_condexp(proc, [t])
        for history in histories(earlier):
            t_hist = history_condexp(proc, history + (t,))
            for future in histories(later, future_cap):
                choices = [_single_projections(proc, s, cap) for s in future]
                for qs in itertools.product(*choices):
                    checked += 1
                    w = _apply_all(qs, e)
                    left, right = t_hist.apply(w), tt.apply(w)
                    if left != right:
                        witness = MarkovWitness(
                            "future", history, t, (left, right), future=future, projections=qs
                        )
                        return MarkovReport(False, witness, checked)
                for f in history_partition(proc, future).block_indicators():
                    checked += 1
                    left, right = t_hist.apply(f), tt.apply(f)
                    if left != right:
                        witness = MarkovWitness(
                            "future_range", history, t, (left, right), future=future, w=f
                        )
                        return MarkovReport(False, witness, checked)
    return MarkovReport(True, checked=checked)


def _require_ordered(proc: Process, *ts: int) -> None:
    _require_times(proc, ts)
    if any(a >= b for a, b in zip(ts, ts[1:])):
        raise DomainError(f"Times must satisfy {' < '.join(map(str, ts))}")


def chapman_kolmogorov_check(proc: Process, u: int, t: int, n: int) -> MarkovReport:
    """
    Check T_u X = T_u T_t X for X over a basis of R(T_n), then T_u T_n = T_u T_t T_n.

    Raises:
        DomainError: Unless u < t < n are times of the process
    """
    _require_ordered(proc, u, t, n)
    tu, tt, tn = (history_condexp(proc, [s]) for s in (u, t, n))
    checked = 0
    for x in tn.partition.block_indicators():
        checked += 1
        left, right = tu.apply(x), tu.apply(tt.apply(x))
        if left != right:
            witness = MarkovWitness("chapman_kolmogorov", (u, t), n, (left, right), w=x)
            return MarkovReport(False, witness, checked)
    checked += 1
    left, right = operator_matrix(tu, tn), operator_matrix(tu, tt, tn)
    if not matrices_equal(left, right):
        witness = MarkovWitness("chapman_kolmogorov", (u, t), n, (left, right))
        return MarkovReport(False, witness, checked)
    return MarkovReport(True, checked=checked)


def chapman_kolmogorov(proc: Process, u: int, t: int, n: int) -> bool:
    """Chapman-Kolmogorov identity T_u X = T_u T_t X for X in R(T_n)."""
    return chapman_kolmogorov_check(proc, u, t, n).holds


def chapman_kolmogorov_all(proc: Process) -> MarkovReport:
    """Chapman-Kolmogorov over every triple u < t < n of times."""
    checked = 0
    for u, t, n in itertools.combinations(proc.times, 3):
        report = chapman_kolmogorov_check(proc, u, t, n)
        checked += report.checked
        if not report.holds:
            report.checked = checked
            return report
    return MarkovReport(True, checked=checked)


def rao_ii(proc: Process, u: int, v: int) -> bool:
    """
    Check that the full past at u and the present at u act alike on the time-v subspace.

    Raises:
        DomainError: Unless u < v are times of the process
    """
    _require_ordered(proc, u, v)
    tv = history_condexp(proc, [v])
    return matrices_equal(
        operator_matrix(past_condexp(proc, u), tv),
        operator_matrix(history_condexp(proc, [u]), tv),
    )


def rao_ii_all(proc: Process) -> MarkovReport:
    """rao_ii over every pair u < v."""
    checked = 0
    for u, v in itertools.combinations(proc.times, 2):
        checked += 1
        if not rao_ii(proc, u, v):
            past = tuple(s for s in proc.times if s <= u)
            witness = MarkovWitness("rao_ii", past, v, ())
            witness = MarkovWitness("rao_ii", past, v, witness_sides(proc, witness))
            return MarkovReport(False, witness, checked)
    return MarkovReport(True, checked=checked)


def rao_iii_sides(
    tt: ConditionalExpectation, p: BandProjection, q: BandProjection, e: RieszElement
) -> tuple[RieszElement, RieszElement, RieszElement, RieszElement]:
    """T_t Q T_t P e, T_t Q P e, T_t P Q e and T_t P T_t Q e."""
    return (
        tt.apply(q.apply(tt.apply(p.apply(e)))),
        tt.apply(q.apply(p.apply(e))),
        tt.apply(p.apply(q.apply(e))),
        tt.apply(p.apply(tt.apply(q.apply(e)))),
    )


def rao_iii_check(
    proc: Process,
    t: int,
    past_times: Sequence[int],
    future_times: Sequence[int],
    cap: Optional[int] = None,
) -> MarkovReport:
    """
    Scan the four-element chain for P from the joint past and Q from the joint future.

    Raises:
        DomainError: Unless every past time is before t and every future time after t
        ResourceCapError: If a joint subspace has too many blocks
    """
    past = _require_times(proc, past_times)
    future = _require_times(proc, future_times)
    _require_times(proc, [t])
    if not past or not future or past[-1] >= t or future[0] <= t:
        raise DomainError(f"Need nonempty past before {t} and future after {t}")
    tt = history_condexp(proc, [t])
    ps = list(enumerate_band_projections(history_partition(proc, past), cap))
    qs = list(enumerate_band_projections(history_partition(proc, future), cap))
    checked = 0
    for p in ps:
        for q in qs:
            checked += 1
            sides = rao_iii_sides(tt, p, q, proc.e)
            if not _all_equal(sides):
                witness = MarkovWitness(
                    "rao_iii", past, t, sides, future=future, projections=(p, q)
                )
                return MarkovReport(False, witness, checked)
    return MarkovReport(True, checked=checked)


def rao_iii(
    proc: Process,
    t: int,
    past_times: Sequence[int],
    future_times: Sequence[int],
    cap: Optional[int] = None,
) -> bool:
    """Past and future conditionally independent on the present, band by band."""
    return rao_iii_check(proc, t, past_times, future_times, cap).holds


def rao_iii_all(proc: Process, cap: Optional[int] = None) -> MarkovReport:
    """
    rao_iii at every time with both a past and a future, over the full past and future.

    Smaller past or future sets give subspaces of these, so they are covered.
    """
    checked = 0
    for t in proc.times:
        past, future = proc.earlier(t), proc.later(t)
        if not past or not future:
            continue
        report = rao_iii_check(proc, t, past, future, cap)
        checked += report.checked
        if not report.holds:
            report.checked = checked
            return report
    return MarkovReport(True, checked=checked)


@dataclass
class PastFutureReport:
    """
    Past/future products at one time, in both orders.

    Attributes:
        time: The present time
        past_future: Whether (past operator)(future operator) = T_t
        future_past: Whether (future operator)(past operator) = T_t
    """

    time: int
    past_future: bool
    future_past: bool

    @property
    def holds(self) -> bool:
        return self.past_future and self.future_past


def past_future_independent(proc: Process, t: int) -> PastFutureReport:
    """Evaluate both orders of the past/future product against the present operator."""
    past, future = past_condexp(proc, t), future_condexp(proc, t)
    present = history_condexp(proc, [t])
    return PastFutureReport(
        time=t,
        past_future=matrices_equal(operator_matrix(past, future), present.matrix),
        future_past=matrices_equal(operator_matrix(future, past), present.matrix),
    )


def f_algebra_step(proc: Process, t: int, p: BandProjection, q: BandProjection) -> bool:
    """Averaging step T_t(Qe . T_t P e) = T_t P e . T_t Q e in the f-algebra with unit e."""
    tt, e = history_condexp(proc, [t]), proc.e
    tpe, tqe = tt.apply(p.apply(e)), tt.apply(q.apply(e))
    return tt.apply(e_mul(q.apply(e), tpe, e)) == e_mul(tpe, tqe, e)


@dataclass
class EquivalenceReport:
    """
    The Markov characterizations side by side.

    Attributes:
        markov: The defining scan
        operator_form: Operator identity form
        rao_ii: Past operator form over all pairs
        rao_iii: Band chain form over all splits
        past_future: Both-order past/future products at every time
    """

    markov: MarkovReport
    operator_form: MarkovReport
    rao_ii: MarkovReport
    rao_iii: MarkovReport
    past_future: list[PastFutureReport]

    @property
    def verdicts(self) -> dict[str, bool]:
        return {
            "markov": self.markov.holds,
            "operator_form": self.operator_form.holds,
            "rao_ii": self.rao_ii.holds,
            "rao_iii": self.rao_iii.holds,
            "past_future": all(r.holds for r in self.past_future),
        }

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts.values())) == 1


def markov_equivalence(proc: Process, cap: Optional[int] = None) -> EquivalenceReport:
    """Run every Markov characterization on one process."""
    report = EquivalenceReport(
        markov=is_markov(proc, cap),
        operator_form=markov_operator_form(proc),
        rao_ii=rao_ii_all(proc),
        rao_iii=rao_iii_all(proc, cap),
        past_future=[past_future_independent(proc, t) for t in proc.times],
    )
    if not report.agree:
        logger.warning(f"Markov characterizations disagree: {report.verdicts}")
    return report
