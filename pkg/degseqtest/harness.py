"""
Monte-Carlo experiments: instance generators, the edit-distance scaling
experiment for repair, the concentration experiment for the estimator, the
completeness/soundness experiment for the tester, and calibration of the
edit-distance constant. Every experiment returns pandas DataFrames whose rows
carry the seed and grid cell that produced them.
"""
import dataclasses
import itertools
import logging
import math
import os
import typing
import warnings

import dask
import numpy as np
import pandas as pd
import tqdm
import xarray as xr

import degseqtest
from degseqtest.degreeseq import DegreeStatistic, delta_approximates, is_graphic, realize
from degseqtest.deltamath import loglog_slope, nanptp
from degseqtest.estimator import (
    anchor_deviations,
    bucket_counts,
    derive_params,
    sample_degrees,
)
from degseqtest.graphcore import (
    Graph,
    bimodal_graph,
    circulant_graph,
    complete_graph,
    degree_sequence,
    empty_graph,
    perturb_edges,
    random_graph,
    split_graph,
)
from degseqtest.oracle import AdjacencyOracle
from degseqtest.repair import DEFAULT_C_CONST, check_edit_bound, discrepancy, repair
from degseqtest.tester import (
    DegreeSequenceProperty,
    ProximityConfig,
    any_regular,
    fixed_regular,
    max_degree,
    run_tester,
)

SAFETY_FACTOR: float = 1.5
INSTANCE_FAMILIES: tuple = ("drifted-realization", "random-vs-regular", "split-vs-regular")
GRAPH_FAMILIES: tuple = ("gnp", "bimodal", "near-regular", "circulant", "split", "empty", "complete")
EXPERIMENTS: tuple = ("exp_scaling", "exp_estimator", "exp_tester")
SCHEMAS: typing.Dict[str, str] = {
    "exp_scaling": "degseqtest.exp_scaling.v1",
    "exp_scaling_summary": "degseqtest.exp_scaling_summary.v1",
    "exp_estimator": "degseqtest.exp_estimator.v1",
    "exp_tester": "degseqtest.exp_tester.v1",
}
MAX_ATTEMPTS: int = 40


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """
    One experiment's parameter grid. The grid expands deterministically into
    cells (family or case, n, delta), each run for `trials` trials seeded with
    seed ^ trial. When `output` is set, the experiment also writes its rows
    there in `fmt` (csv or json).
    """

    experiment: str
    families: tuple = ()
    n: tuple = ()
    deltas: tuple = ()
    trials: int = 1
    seed: int = 0
    output: typing.Optional[str] = None
    fmt: str = "csv"
    cases: tuple = ()
    c_const: float = DEFAULT_C_CONST
    certify: bool = True
    max_queries: typing.Optional[int] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise NotImplementedError(f"Unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.fmt not in ("csv", "json"):
            raise NotImplementedError(f"Unknown output format {self.fmt!r}")
        for name in ("families", "n", "deltas", "cases"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @classmethod
    def from_catalog(cls, experiment: str, **overrides) -> "ExperimentSpec":
        """
        Default grid stored as metadata of the experiment's catalog entry,
        updated with any non-None keyword overrides.
        """
        if experiment not in EXPERIMENTS:
            raise NotImplementedError(f"Unknown experiment {experiment!r}")
        grid: dict = dict(degseqtest.catalog[experiment].metadata["grid"])
        grid.update({key: value for key, value in overrides.items() if value is not None})
        return cls(experiment=experiment, **grid)

    def cells(self) -> typing.List[tuple]:
        """Grid cells in canonical order"""
        labels = self.cases if self.experiment == "exp_tester" else self.families
        return list(itertools.product(labels, self.n, self.deltas))


def trial_seed(seed: int, trial: int) -> int:
    return int(seed) ^ int(trial)


def _scheduler() -> dict:
    """dask.compute settings from DEGSEQTEST_NUM_WORKERS (unset or 1 = synchronous)"""
    workers = int(os.environ.get("DEGSEQTEST_NUM_WORKERS", "1"))
    if workers <= 1:
        return {"scheduler": "synchronous"}
    return {"scheduler": "processes", "num_workers": workers}


def _write_output(df: pd.DataFrame, spec: ExperimentSpec) -> pd.DataFrame:
    if spec.output:
        write_table(df, spec.output, fmt=spec.fmt)
        logging.info(f"{spec.experiment}: wrote {len(df)} rows to {spec.output}")
    return df


def _run_cell(function: typing.Callable, args: typing.List[tuple]) -> list:
    """Runs one grid cell's trials in parallel, results in trial order"""
    tasks = [dask.delayed(function)(*arg) for arg in args]
    return list(dask.compute(*tasks, **_scheduler()))


def _regular_discrepancies(degrees: np.ndarray) -> np.ndarray:
    """sum_i |degrees_i - r| for every r in 0..n-1"""
    n = degrees.size
    ordered = np.sort(degrees)
    prefix = np.concatenate([[0], np.cumsum(ordered)])
    r = np.arange(n)
    below = np.searchsorted(ordered, r, side="right")
    return r * below - prefix[below] + (prefix[-1] - prefix[below]) - r * (n - below)


def _pick_upper_pairs(mask: np.ndarray, count: int, rng: np.random.Generator):
    u, v = np.nonzero(np.triu(mask, k=1))
    pick = rng.choice(u.size, size=count, replace=False)
    return u[pick], v[pick]


def _drift(graph: Graph, units: int, rng: np.random.Generator) -> Graph:
    """
    Deletes edges inside a random half A of the vertices and adds non-edges
    inside the other half B, `units` toggles in total. Degrees in A only go
    down and degrees in B only go up, so the discrepancy grows by exactly 2
    per toggle.
    """
    n = graph.n
    side = np.zeros(n, dtype=bool)
    side[rng.choice(n, size=n // 2, replace=False)] = True
    inside_a = np.outer(side, side) & graph.adjacency
    inside_b = np.outer(~side, ~side) & ~graph.adjacency & ~np.eye(n, dtype=bool)
    capacity_a = int(np.count_nonzero(inside_a)) // 2
    capacity_b = int(np.count_nonzero(inside_b)) // 2
    if units > capacity_a + capacity_b:
        raise ValueError(f"cannot drift {units} pairs, only {capacity_a + capacity_b} available")
    deletions = min(capacity_a, (units + 1) // 2)
    additions = units - deletions
    if additions > capacity_b:
        deletions, additions = units - capacity_b, capacity_b

    adjacency = graph.adjacency.copy()
    for mask, count, value in ((inside_a, deletions, False), (inside_b, additions, True)):
        if count:
            u, v = _pick_upper_pairs(mask, count, rng)
            adjacency[u, v] = adjacency[v, u] = value
    return Graph(adjacency=adjacency)


def _perturb_into_window(
    start: Graph, target: np.ndarray, goal: float, rng: np.random.Generator
) -> Graph:
    """
    Random pair toggles on `start` until discrepancy(G, target) lands in
    [goal / 2, 2 goal]; the number of toggles is rescaled after each miss.
    """
    total = start.n * (start.n - 1) // 2
    flips = max(1, math.ceil(goal / 2))
    for _ in range(MAX_ATTEMPTS):
        graph = perturb_edges(start, min(flips, total), seed=rng)
        measured = discrepancy(graph, target)
        if goal / 2 <= measured <= 2 * goal:
            return graph
        # random toggles partly cancel, so discrepancy grows sub-linearly
        scale = (goal / measured) ** 2 if measured else 4.0
        flips = max(1, min(total, round(flips * min(max(scale, 0.25), 4.0))))
    raise ValueError(f"no instance within [{goal / 2}, {2 * goal}] after {MAX_ATTEMPTS} attempts")


def _split_instance(n: int, goal: float) -> typing.Tuple[Graph, np.ndarray]:
    """
    K_m plus n - m isolated vertices (m = n // 2), with a target that moves
    every clique degree down and every isolated degree up by the same shift
    a, so the discrepancy is about n * a. The target is two-valued with the
    clique side on top, which keeps it graphic.
    """
    m = n // 2
    shift = min(max(1, round(goal / n)), (m - 1) // 2)
    target = np.full(n, shift, dtype=np.int64)
    target[:m] = m - 1 - shift
    if target.sum() % 2:
        target[m] += 1
    if shift < 1 or not is_graphic(target):
        raise ValueError(f"split-vs-regular: no graphic target for n={n}")
    return split_graph(n, m), target


def gen_instance(
    family: str, n: int, target_delta: float, seed=None
) -> typing.Tuple[Graph, np.ndarray]:
    """
    Generates a graph G and a graphic target sequence d whose normalised
    discrepancy discrepancy(G, d) / n^2 lies in [target_delta / 2,
    2 target_delta], or is 0 when target_delta is 0.

    Families:
    - drifted-realization: d is the degree sequence of G(n, 1/2); G is a
      realization of d with edges deleted on one half of the vertices and
      added on the other half.
    - random-vs-regular: G is G(n, 1/2) and d the graphic regular sequence
      whose discrepancy is closest to the target; when that discrepancy misses
      the window, G is a randomly perturbed realization of d instead.
    - split-vs-regular: G is K_{n/2} plus isolated vertices and d moves the
      clique degrees down and the isolated degrees up by the same shift,
      towards the nearest regular sequence, sized to the window. Such a
      difference never holds an alternating cycle: every missing edge touches
      an isolated vertex, and isolated vertices have no surplus edge.

    Raises NotImplementedError for unknown families and ValueError when the
    window cannot be reached.
    """
    if family not in INSTANCE_FAMILIES:
        raise NotImplementedError(f"Unknown instance family {family!r}")
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if target_delta < 0:
        raise ValueError(f"target_delta must be non-negative, got {target_delta}")
    rng = np.random.default_rng(seed)
    goal = target_delta * n**2

    if family == "drifted-realization":
        target = degree_sequence(random_graph(n, p=0.5, seed=rng))
        graph = realize(target)
        if goal:
            graph = _drift(graph, math.ceil(goal / 2), rng)
    elif family == "random-vs-regular":
        graph = random_graph(n, p=0.5, seed=rng)
        costs = _regular_discrepancies(degree_sequence(graph)).astype(np.float64)
        costs[(np.arange(n) * n) % 2 == 1] = np.inf
        r = int(np.argmin(np.abs(costs - goal)))
        target = np.full(n, r, dtype=np.int64)
        if goal == 0:
            graph = realize(target)
        elif not goal / 2 <= costs[r] <= 2 * goal:
            graph = _perturb_into_window(realize(target), target, goal, rng)
    elif goal == 0:
        target = np.full(n, (n // 2) - ((n // 2) * n) % 2, dtype=np.int64)
        graph = realize(target)
    else:
        graph, target = _split_instance(n, goal)

    measured = discrepancy(graph, target)
    if goal and not goal / 2 <= measured <= 2 * goal:
        raise ValueError(
            f"{family}: discrepancy {measured} outside [{goal / 2}, {2 * goal}] for n={n}"
        )
    return graph, target


def family_graph(family: str, n: int, seed=None) -> Graph:
    """
    Test graphs for the estimator and tester experiments: gnp (G(n, 1/2)),
    bimodal (random split graph), near-regular (an about n/2-regular circulant
    graph with n random toggles), circulant (exactly 2 floor(n/4)-regular),
    split (clique on n/2 vertices plus isolated vertices), empty, complete.
    """
    offsets = range(1, n // 4 + 1)
    if family == "gnp":
        return random_graph(n, p=0.5, seed=seed)
    elif family == "bimodal":
        return bimodal_graph(n, seed=seed)
    elif family == "near-regular":
        flips = min(n, n * (n - 1) // 2)
        return perturb_edges(circulant_graph(n, offsets), flips, seed=seed)
    elif family == "circulant":
        return circulant_graph(n, offsets)
    elif family == "split":
        return split_graph(n, n // 2)
    elif family == "empty":
        return empty_graph(n)
    elif family == "complete":
        return complete_graph(n)
    else:
        raise NotImplementedError(f"Unknown graph family {family!r}")


def _scaling_trial(
    family: str, n: int, delta: float, trial: int, seed: int, cell: int, c_const: float, certify: bool
) -> dict:
    derived = trial_seed(seed, trial)
    rng = np.random.default_rng([derived, cell])
    graph, target = gen_instance(family, n, delta, seed=rng)
    result = repair(graph, target, seed=rng, certify=certify)
    symdiff_norm = result.symdiff_size / n**2
    ratio = symdiff_norm / math.sqrt(result.delta) if result.delta > 0 else np.nan
    return {
        "schema": SCHEMAS["exp_scaling"],
        "seed": seed,
        "trial": trial,
        "trial_seed": derived,
        "family": family,
        "n": n,
        "target_delta": delta,
        "delta_measured": result.delta,
        "discrepancy": result.discrepancy,
        "symdiff": result.symdiff_size,
        "symdiff_norm": symdiff_norm,
        "ratio": ratio,
        "iterations": result.iterations,
        "in_scope": result.in_scope,
        "bound_ok": check_edit_bound(result, n, c_const),
    }


def summarize_scaling(trials: pd.DataFrame) -> pd.DataFrame:
    """
    Per (family, n): log-log fit of symdiff_norm against the measured delta,
    the largest ratio and the spread of ratios over the delta grid.
    """
    cube: xr.Dataset = trials.set_index(["family", "n", "target_delta", "trial"]).to_xarray()
    fit = loglog_slope(cube.delta_measured, cube.symdiff_norm, dims=("target_delta", "trial"))
    ratios = cube.ratio.stack(sample=("target_delta", "trial"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=RuntimeWarning)
        spread = xr.apply_ufunc(
            nanptp,
            ratios,
            input_core_dims=[["sample"]],
            kwargs={"axis": -1},
        )
        max_ratio = ratios.max(dim="sample")
    summary = xr.Dataset(
        {
            "slope": fit.sel(linregress="slope", drop=True),
            "intercept": fit.sel(linregress="intercept", drop=True),
            "rvalue": fit.sel(linregress="rvalue", drop=True),
            "max_ratio": max_ratio,
            "ratio_spread": spread,
        }
    )
    df = summary.to_dataframe().reset_index()
    df.insert(0, "schema", SCHEMAS["exp_scaling_summary"])
    df.insert(1, "seed", int(trials.seed.iloc[0]))
    return df


def exp_scaling(spec: ExperimentSpec) -> typing.Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Repairs generated instances across the (family, n, delta) grid and
    returns the per-trial rows and the per-(family, n) summary.
    """
    rows = []
    for cell, (family, n, delta) in enumerate(tqdm.tqdm(iterable=spec.cells(), desc="exp_scaling")):
        logging.info(f"exp_scaling: family={family} n={n} delta={delta}")
        args = [
            (family, n, delta, trial, spec.seed, cell, spec.c_const, spec.certify)
            for trial in range(spec.trials)
        ]
        rows.extend(_run_cell(_scaling_trial, args))
    trials = pd.DataFrame(rows)
    _write_output(trials, spec)
    return trials, summarize_scaling(trials)


def _estimator_trial(family: str, n: int, delta: float, trial: int, seed: int, cell: int) -> dict:
    rng = np.random.default_rng([trial_seed(seed, trial), cell])
    graph = family_graph(family, n, seed=rng)
    oracle = AdjacencyOracle(graph)
    params = derive_params(delta)
    records = sample_degrees(oracle, params, rng)
    statistic = DegreeStatistic.from_counts(bucket_counts(records.hits, params.t, params.k))
    deviations = anchor_deviations(records, graph)
    return {
        "success": delta_approximates(statistic, graph, delta),
        "anchor_dev": float(deviations.mean()),
        "within_gamma": bool(np.all(deviations < params.gamma)),
        "queries": oracle.query_count(),
    }


def exp_estimator(spec: ExperimentSpec) -> pd.DataFrame:
    """
    Success rate of the estimator (fraction of trials whose statistic
    delta-approximates the graph) per (family, n, delta) cell.
    """
    rows = []
    for cell, (family, n, delta) in enumerate(tqdm.tqdm(iterable=spec.cells(), desc="exp_estimator")):
        logging.info(f"exp_estimator: family={family} n={n} delta={delta}")
        args = [(family, n, delta, trial, spec.seed, cell) for trial in range(spec.trials)]
        results = pd.DataFrame(_run_cell(_estimator_trial, args))
        rows.append(
            {
                "schema": SCHEMAS["exp_estimator"],
                "seed": spec.seed,
                "family": family,
                "n": n,
                "delta": delta,
                "trials": spec.trials,
                "success_rate": results.success.mean(),
                "mean_anchor_dev": results.anchor_dev.mean(),
                "all_within_gamma_rate": results.within_gamma.mean(),
                "queries": int(results.queries.max()),
            }
        )
    return _write_output(pd.DataFrame(rows), spec)


class TesterCase(typing.NamedTuple):
    family: str
    prop: typing.Callable[[int], DegreeSequenceProperty]
    expect: str  # "accept" or "reject"


TESTER_CASES: typing.Dict[str, TesterCase] = {
    "circulant-fixed-regular": TesterCase(
        "circulant", lambda n: fixed_regular(r=2 * (n // 4)), "accept"
    ),
    "circulant-any-regular": TesterCase("circulant", lambda n: any_regular(), "accept"),
    "empty-max-degree": TesterCase("empty", lambda n: max_degree(fraction=0.5), "accept"),
    "complete-vs-empty": TesterCase("complete", lambda n: fixed_regular(r=0), "reject"),
    "empty-vs-complete": TesterCase("empty", lambda n: fixed_regular(fraction=1.0), "reject"),
    "complete-max-degree-zero": TesterCase("complete", lambda n: max_degree(fraction=0.0), "reject"),
    "split-vs-complete": TesterCase("split", lambda n: fixed_regular(fraction=1.0), "reject"),
}


def _tester_trial(
    case: str, n: int, delta: float, trial: int, seed: int, cell: int, max_queries
) -> dict:
    family, prop, _ = TESTER_CASES[case]
    derived = trial_seed(seed, trial)
    graph = family_graph(family, n, seed=np.random.default_rng([derived, cell]))
    cfg = ProximityConfig(
        epsilon=1.0, seed=[derived, cell], delta_override=delta, max_queries=max_queries
    )
    verdict = run_tester(AdjacencyOracle(graph), prop(n), cfg)
    return {"accept": verdict.accept, "path": verdict.path, "queries": verdict.queries}


def exp_tester(spec: ExperimentSpec) -> pd.DataFrame:
    """
    Accept rate of the tester per (case, n, delta) cell; `rate` is the
    accept rate for cases expected to be accepted and the reject rate for
    the far cases. Cells whose sampling budget exceeds max_queries are
    skipped.
    """
    rows = []
    for cell, (case, n, delta) in enumerate(tqdm.tqdm(iterable=spec.cells(), desc="exp_tester")):
        if case not in TESTER_CASES:
            raise NotImplementedError(f"Unknown tester case {case!r}")
        fallback = n * delta**2 < 1
        if not fallback and spec.max_queries is not None:
            if derive_params(delta).queries > spec.max_queries:
                logging.warning(f"exp_tester: skipping {case} n={n} delta={delta}, over query budget")
                continue
        logging.info(f"exp_tester: case={case} n={n} delta={delta}")
        args = [
            (case, n, delta, trial, spec.seed, cell, spec.max_queries)
            for trial in range(spec.trials)
        ]
        results = pd.DataFrame(_run_cell(_tester_trial, args))
        accept_rate = results.accept.mean()
        expect = TESTER_CASES[case].expect
        rows.append(
            {
                "schema": SCHEMAS["exp_tester"],
                "seed": spec.seed,
                "case": case,
                "n": n,
                "delta": delta,
                "path": results.path.iloc[0],
                "expect": expect,
                "trials": spec.trials,
                "accept_rate": accept_rate,
                "rate": accept_rate if expect == "accept" else 1 - accept_rate,
                "queries": int(results.queries.max()),
            }
        )
    return _write_output(pd.DataFrame(rows), spec)


def calibrate_c(
    spec: typing.Optional[ExperimentSpec] = None,
    trials: typing.Optional[pd.DataFrame] = None,
    safety_factor: float = SAFETY_FACTOR,
) -> float:
    """
    Edit-distance constant estimated as the largest finite ratio
    symdiff_norm / sqrt(delta) over cells with delta > 0, times
    `safety_factor`. Runs exp_scaling on `spec` unless per-trial rows are
    given. Raises ValueError when no cell has a positive delta.
    """
    if trials is None:
        if spec is None:
            raise ValueError("calibrate_c needs an experiment spec or scaling rows")
        trials, _ = exp_scaling(spec)
    ratios = trials.loc[trials.delta_measured > 0, "ratio"].to_numpy(dtype=np.float64)
    ratios = ratios[np.isfinite(ratios)]
    if ratios.size == 0:
        raise ValueError("no trial with positive discrepancy, cannot calibrate")
    c_const = float(ratios.max()) * safety_factor
    logging.info(f"calibrate_c: max ratio {ratios.max():.4f}, C = {c_const:.4f}")
    return c_const


def write_table(df: pd.DataFrame, path, fmt: str = "csv") -> None:
    """Writes experiment rows as CSV (with header) or as a JSON records list"""
    if fmt == "csv":
        df.to_csv(path_or_buf=path, index=False)
    elif fmt == "json":
        df.to_json(path_or_buf=path, orient="records")
    else:
        raise NotImplementedError(f"Unknown output format {fmt!r}")
