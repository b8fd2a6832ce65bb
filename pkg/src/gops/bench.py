"""Benchmark harness: run the exact solver and the greedy side by side on
a suite of benefit-maximizing instances and check every empirical ratio
against the closed-form guarantee (only where the guarantee applies).
"""

import time
from dataclasses import dataclass
from typing import Optional

from .bmgop import (BmgopInstance, approx_bound, bmgop_compute, bound_applicable,
                    solve_bmgop_exact)
from .core import format_number
from .errors import BoundViolationError, LimitReachedError
from .ip import Limits

_RATIO_SLACK = 1e-9


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    exact_benefit: float
    greedy_benefit: float
    ratio: Optional[float]  # None when the exact optimum is 0
    bound: float
    bound_applicable: bool
    exact_seconds: float
    greedy_seconds: float

    @property
    def within_bound(self) -> bool:
        if not self.bound_applicable or self.ratio is None:
            return True
        return self.ratio >= self.bound - _RATIO_SLACK


@dataclass
class BenchReport:
    records: list

    @property
    def violations(self) -> list:
        return [r for r in self.records if not r.within_bound]

    def to_json(self) -> dict:
        return {
            "records": [
                {
                    "instance_id": r.instance_id,
                    "exact_benefit": r.exact_benefit,
                    "greedy_benefit": r.greedy_benefit,
                    "ratio": r.ratio,
                    "bound": r.bound,
                    "bound_applicable": r.bound_applicable,
                    "within_bound": r.within_bound,
                }
                for r in self.records
            ],
            "timing": [
                {
                    "instance_id": r.instance_id,
                    "exact_seconds": r.exact_seconds,
                    "greedy_seconds": r.greedy_seconds,
                }
                for r in self.records
            ],
        }

    def to_text(self) -> str:
        # Timings live in their own trailing section so the main table is
        # byte-stable across runs.
        header = f"{'instance':<24} {'exact':>10} {'greedy':>10} {'ratio':>10} {'bound':>10} {'applies':>8} {'ok':>4}"
        lines = [header]
        for r in self.records:
            ratio = format_number(r.ratio) if r.ratio is not None else "-"
            lines.append(
                f"{r.instance_id:<24} {format_number(r.exact_benefit):>10} "
                f"{format_number(r.greedy_benefit):>10} {ratio:>10} "
                f"{format_number(r.bound):>10} {'yes' if r.bound_applicable else 'no':>8} "
                f"{'yes' if r.within_bound else 'NO':>4}")
        lines.append("timings:")
        for r in self.records:
            lines.append(f"{r.instance_id:<24} exact={r.exact_seconds:.6f}s "
                         f"greedy={r.greedy_seconds:.6f}s")
        return "\n".join(lines) + "\n"


def run_bench(suite, delta: float = 0.001, limits: Optional[Limits] = None) -> BenchReport:
    """Run exact and greedy solvers over ``suite``: (id, instance) pairs.

    Records are sorted by instance id. Raises BoundViolationError (with
    the finished report attached) if any instance where the guarantee
    applies falls below it, and re-raises a solver LimitReachedError with
    the partial report attached.
    """
    records = []
    for instance_id, inst in suite:
        if not isinstance(inst, BmgopInstance):
            raise BoundViolationError(
                f"benchmark suite entry {instance_id!r} is not a benefit-maximizing instance",
                BenchReport(records=sorted(records, key=lambda r: r.instance_id)))
        start = time.perf_counter()
        try:
            exact = solve_bmgop_exact(inst, limits=limits)
        except LimitReachedError as err:
            err.best = BenchReport(records=sorted(records, key=lambda r: r.instance_id))
            raise
        exact_seconds = time.perf_counter() - start
        start = time.perf_counter()
        greedy, _ = bmgop_compute(inst, delta=delta)
        greedy_seconds = time.perf_counter() - start
        ratio = None
        if exact.achieved_benefit > 0:
            ratio = greedy.achieved_benefit / exact.achieved_benefit
        records.append(BenchRecord(
            instance_id=str(instance_id),
            exact_benefit=exact.achieved_benefit,
            greedy_benefit=greedy.achieved_benefit,
            ratio=ratio,
            bound=approx_bound(inst, delta),
            bound_applicable=bound_applicable(inst, delta),
            exact_seconds=exact_seconds,
            greedy_seconds=greedy_seconds,
        ))
    report = BenchReport(records=sorted(records, key=lambda r: r.instance_id))
    if report.violations:
        ids = ", ".join(r.instance_id for r in report.violations)
        raise BoundViolationError(f"approximation ratio below guarantee on: {ids}", report)
    return report
