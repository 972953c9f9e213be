"""Experiment runner: paired loss comparisons, curriculum detection and tau sweeps.

Every random choice in an experiment is seeded from :func:`derive_seed`, a
hash of the base seed and the coordinates of the job (training size,
replicate, role). Adding sizes, losses or workers therefore never changes the
records of existing replicates, and re-running a config reproduces its record
stream byte for byte.

Records are JSON objects, one per line. Summaries are CSV with the columns in
:data:`SUMMARY_COLUMNS`.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .bitdata import Dataset, sample_split
from .errors import InfeasibleInstanceError
from .loss import LOSS_NAMES, Curriculum
from .minfs import estimate_curriculum
from .network import evaluate
from .optimizer import (
    DEFAULT_ITERATIONS,
    DEFAULT_RESTARTS,
    LahcConfig,
    default_gates,
    default_history,
    lahc_train,
)
from .problems import ProblemSpec
from .stats import achievable_taus, kendall_tau, mean_ci, sample_permutation_with_inversions

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CURRICULUM_MODES = ("given", "auto", "random_tau")
SUMMARY_COLUMNS = ("problem", "size", "fraction", "loss", "target", "mean_acc", "diff_vs_l1", "ci95")


def derive_seed(base_seed: int, *parts) -> int:
    """64-bit seed from SHA-256 of ``base_seed`` and ``parts`` joined by ``'/'``."""
    text = "/".join(str(p) for p in (base_seed, *parts))
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little")


@dataclass(frozen=True)
class CurriculumMode:
    """How targets are ordered for the hierarchical losses.

    ``given`` uses ``order`` (or the problem's known order), ``auto`` estimates
    the order from the training rows, ``random_tau`` samples orders stratified
    by their tau against the known order.
    """

    mode: str = "given"
    order: tuple[int, ...] | None = None
    taus: tuple[float, ...] | None = None
    permutations: int = 10

    def __post_init__(self):
        if self.mode not in CURRICULUM_MODES:
            raise ValueError(f"curriculum mode must be one of {CURRICULUM_MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    problem: ProblemSpec
    train_sizes: tuple[int, ...]
    replicates: int = 50
    losses: tuple[str, ...] = ("l1", "lgh")
    curriculum: CurriculumMode = field(default_factory=CurriculumMode)
    history_length: int | None = None
    iteration_limit: int = DEFAULT_ITERATIONS
    restart_limit: int = DEFAULT_RESTARTS
    return_best: bool = False
    gates: int | str = "21m"
    base_seed: int = 0
    output: str | None = None
    workers: int = 1
    record_wall_time: bool = False

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not self.train_sizes:
            raise ValueError("train_sizes is empty")
        for loss in self.losses:
            if loss not in LOSS_NAMES:
                raise ValueError(f"unknown loss {loss!r}")

    def lahc(self, loss: str, curriculum) -> LahcConfig:
        hist = self.history_length or default_history(self.problem.kind)
        return LahcConfig(hist, self.iteration_limit, self.restart_limit, loss, curriculum, self.return_best)

    def n_gates(self, m: int) -> int:
        return resolve_gates(self.gates, m)


def resolve_gates(spec, m: int) -> int:
    """``'21m'``-style multiples of the target count, or a plain gate count."""
    if isinstance(spec, str):
        s = spec.strip()
        if s.endswith("m"):
            return int(s[:-1] or 1) * m
        return int(s)
    return int(spec)


def config_from_dict(data: dict) -> ExperimentConfig:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    p = dict(data["problem"])
    if p.get("known_order") is not None:
        p["known_order"] = tuple(p["known_order"])
    problem = ProblemSpec(**p)
    c = dict(data.get("curriculum", {}))
    if c.get("order") is not None:
        c["order"] = tuple(c["order"])
    if c.get("taus") in ("all", None):
        c["taus"] = None
    else:
        c["taus"] = tuple(c["taus"])
    lahc = data.get("lahc", {})
    return ExperimentConfig(
        name=data.get("name", problem.name),
        problem=problem,
        train_sizes=tuple(data["train_sizes"]),
        replicates=data.get("replicates", 50),
        losses=tuple(data.get("losses", ("l1", "lgh"))),
        curriculum=CurriculumMode(**c),
        history_length=lahc.get("history"),
        iteration_limit=lahc.get("iterations", DEFAULT_ITERATIONS),
        restart_limit=lahc.get("restarts", DEFAULT_RESTARTS),
        return_best=lahc.get("return_best", False),
        gates=lahc.get("gates", "21m"),
        base_seed=data.get("base_seed", 0),
        output=data.get("output"),
        workers=data.get("workers", 1),
        record_wall_time=data.get("record_wall_time", False),
    )


def load_config(path) -> ExperimentConfig:
    return config_from_dict(json.loads(Path(path).read_text()))


# -- jobs --------------------------------------------------------------------

_DATASET_CACHE: dict = {}


def _dataset(problem: ProblemSpec) -> Dataset:
    if problem not in _DATASET_CACHE:
        _DATASET_CACHE[problem] = problem.load()
    return _DATASET_CACHE[problem]


def _accuracy(net, data: Dataset):
    if data.n_examples == 0:
        return None
    correct = evaluate(net, data.inputs).to_array() == data.targets.to_array()
    return correct.mean(axis=0)


def _train_record(cfg, *, work, split, loss, curriculum_work, back, seed, base):
    """Train one network and build its record.

    ``back[j]`` is the original index of working target ``j``.
    """
    train = work.subset(split.train_indices)
    test = work.subset(split.test_indices)
    t0 = time.perf_counter()
    res = lahc_train(train, cfg.lahc(loss, curriculum_work), cfg.n_gates(work.n_targets), seed)
    elapsed = time.perf_counter() - t0
    acc_work = _accuracy(res.network, test)
    rec = dict(base)
    rec.update(
        loss=loss,
        curriculum=[int(back[j]) for j in curriculum_work],
        train_seed=seed,
        reached_zero=bool(res.reached_zero),
        final_training_loss=res.final_training_loss,
        iterations=res.iterations_used,
        restarts=res.restarts_used,
        wall_time=round(elapsed, 4) if cfg.record_wall_time else None,
    )
    if acc_work is None:
        rec.update(target_accuracy=None, mean_accuracy=None)
    else:
        acc = np.empty(work.n_targets)
        acc[np.asarray(back)] = acc_work
        rec.update(target_accuracy=[float(a) for a in acc], mean_accuracy=float(acc.mean()))
    return rec


def _base_record(cfg, ds, size, replicate, split, split_seed, job):
    return dict(
        experiment=cfg.name,
        problem=cfg.problem.name,
        pool_size=ds.n_examples,
        size=size,
        fraction=size / ds.n_examples,
        replicate=replicate,
        curriculum_mode=cfg.curriculum.mode,
        split_seed=split_seed,
        train_indices=[int(i) for i in split.train_indices],
        n_test=int(split.n_test),
        job=job,
        status="ok",
    )


def _known_order(cfg, m):
    return cfg.problem.resolved_known_order(m)


def _paired_unit(cfg: ExperimentConfig, size: int, replicate: int) -> list[dict]:
    """One training split shared by every configured loss."""
    ds = _dataset(cfg.problem)
    m = ds.n_targets
    base_seed = cfg.base_seed
    split_seed = derive_seed(base_seed, size, replicate, "split")
    split = sample_split(ds, size, split_seed)
    train_seed = derive_seed(base_seed, size, replicate, "train")
    job = f"pair/{size}/{replicate}"
    base = _base_record(cfg, ds, size, replicate, split, split_seed, job)
    known = _known_order(cfg, m)

    if cfg.curriculum.mode == "auto":
        shuffle = np.random.default_rng(derive_seed(base_seed, size, replicate, "shuffle")).permutation(m)
        work = ds.select_targets(shuffle)
        back = [int(j) for j in shuffle]
        try:
            est = estimate_curriculum(work.subset(split.train_indices),
                                      derive_seed(base_seed, size, replicate, "ties"))
        except InfeasibleInstanceError as exc:
            base.update(status="infeasible", error=str(exc))
            return [dict(base, loss=loss) for loss in cfg.losses]
        curriculum_work = tuple(est.order)
        sizes = [0] * m
        for j, s in enumerate(est.sizes):
            sizes[back[j]] = s
        base.update(target_shuffle=back, mfs_sizes=sizes, eta=est.nestedness)
    else:
        work = ds
        back = list(range(m))
        order = cfg.curriculum.order or known or tuple(range(m))
        curriculum_work = tuple(Curriculum(order))

    curriculum_orig = [back[j] for j in curriculum_work]
    tau = kendall_tau(known, curriculum_orig) if known is not None and m >= 2 else None
    base.update(tau=None if tau is None else tau.value,
                tau_exact=None if tau is None else str(tau.fraction))
    records = []
    for loss in cfg.losses:
        # l1 ignores order; it still records the curriculum that was in force
        records.append(_train_record(cfg, work=work, split=split, loss=loss,
                                     curriculum_work=curriculum_work, back=back,
                                     seed=train_seed, base=base))
    return records


def _sweep_unit(cfg: ExperimentConfig, size: int, split_rep: int, q, perm_index) -> list[dict]:
    """A tau-sweep job: the L1 baseline of a split (``q is None``) or one permuted run."""
    ds = _dataset(cfg.problem)
    m = ds.n_targets
    known = _known_order(cfg, m)
    split_seed = derive_seed(cfg.base_seed, size, split_rep, "split")
    split = sample_split(ds, size, split_seed)
    train_seed = derive_seed(cfg.base_seed, size, split_rep, "train")
    back = list(range(m))
    if q is None:
        job = f"baseline/{size}/{split_rep}"
        base = _base_record(cfg, ds, size, split_rep, split, split_seed, job)
        base.update(tau=1.0, tau_exact="1", inversions=0, permutation_index=None)
        return [_train_record(cfg, work=ds, split=split, loss="l1", curriculum_work=tuple(known),
                              back=back, seed=train_seed, base=base)]
    perm = sample_permutation_with_inversions(
        m, q, derive_seed(cfg.base_seed, size, "perm", q, perm_index))
    curriculum = tuple(known[i] for i in perm)
    tau = kendall_tau(known, curriculum)
    job = f"tau/{size}/{q}/{perm_index}/{split_rep}"
    base = _base_record(cfg, ds, size, split_rep, split, split_seed, job)
    base.update(tau=tau.value, tau_exact=str(tau.fraction), inversions=q, permutation_index=perm_index)
    losses = [loss for loss in cfg.losses if loss != "l1"] or ["lgh"]
    return [_train_record(cfg, work=ds, split=split, loss=loss, curriculum_work=curriculum,
                          back=back, seed=train_seed, base=base) for loss in losses]


def _execute(job):
    kind, cfg, args = job
    if kind == "pair":
        return _paired_unit(cfg, *args)
    return _sweep_unit(cfg, *args)


def _check_sizes(cfg: ExperimentConfig) -> Dataset:
    ds = _dataset(cfg.problem)
    for s in cfg.train_sizes:
        if not 0 < s <= ds.n_examples:
            raise ValueError(f"training size {s} outside 1..{ds.n_examples}")
    return ds


def experiment_jobs(cfg: ExperimentConfig) -> list:
    _check_sizes(cfg)
    return [("pair", cfg, (size, r)) for size in cfg.train_sizes for r in range(cfg.replicates)]


def sweep_strata(cfg: ExperimentConfig, m: int) -> list[int]:
    """Inversion counts to sweep, from tau = +1 down to -1."""
    taus = achievable_taus(m)
    if cfg.curriculum.taus is None:
        return list(range(len(taus)))
    wanted = []
    for t in cfg.curriculum.taus:
        matches = [q for q, v in enumerate(taus) if abs(float(v) - float(t)) < 1e-9]
        if not matches:
            raise ValueError(f"tau={t} is not achievable for m={m}")
        wanted.append(matches[0])
    return sorted(set(wanted))


def sweep_jobs(cfg: ExperimentConfig) -> list:
    ds = _check_sizes(cfg)
    m = ds.n_targets
    if _known_order(cfg, m) is None:
        raise ValueError("a tau sweep needs a known target order")
    n_perm = cfg.curriculum.permutations
    jobs = []
    for size in cfg.train_sizes:
        for split_rep in range(n_perm * cfg.replicates):
            jobs.append(("sweep", cfg, (size, split_rep, None, None)))
        for q in sweep_strata(cfg, m):
            for p in range(n_perm):
                for r in range(cfg.replicates):
                    jobs.append(("sweep", cfg, (size, p * cfg.replicates + r, q, p)))
    return jobs


def _job_key(job) -> str:
    kind, _, args = job
    if kind == "pair":
        return f"pair/{args[0]}/{args[1]}"
    size, split_rep, q, p = args
    if q is None:
        return f"baseline/{size}/{split_rep}"
    return f"tau/{size}/{q}/{p}/{split_rep}"


def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _completed_jobs(path: Path) -> set:
    done = set()
    if not path.exists():
        return done
    good = []
    for line in path.read_text().split("\n"):
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            break
        good.append(line)
        done.add(rec["job"])
    # drop a torn final line so appends start on a clean boundary
    path.write_text("".join(x + "\n" for x in good))
    return done


def _run_jobs(jobs, output=None, workers: int = 1, resume: bool = False):
    out = None
    if output is not None:
        path = Path(output)
        if resume:
            done = _completed_jobs(path)
            jobs = [j for j in jobs if _job_key(j) not in done]
            out = path.open("a")
        else:
            out = path.open("w")
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = pool.map(_execute, jobs)
                for records in results:
                    yield from _emit(records, out)
        else:
            for job in jobs:
                yield from _emit(_execute(job), out)
    finally:
        if out is not None:
            out.close()


def _emit(records, out):
    if out is not None:
        out.write("".join(_dumps(r) + "\n" for r in records))
        out.flush()
    yield from records


def run_experiment(cfg: ExperimentConfig, output=None, workers=None, resume=False):
    """Yield records for every (training size, replicate, loss).

    All losses of a replicate share one training split; the test set is its
    complement in the example pool. Records are also appended to ``output``
    (default ``cfg.output``) as they are produced.
    """
    if cfg.curriculum.mode == "random_tau":
        raise ValueError("random_tau configs run through run_tau_sweep")
    return _run_jobs(experiment_jobs(cfg), output or cfg.output, workers or cfg.workers, resume)


def run_tau_sweep(cfg: ExperimentConfig, output=None, workers=None, resume=False):
    """Yield L1 baselines and permuted-curriculum records for each tau stratum.

    For each training size there are ``permutations * replicates`` splits,
    each with one L1 baseline. Permutation ``p`` of a stratum is trained on
    splits ``p*replicates .. p*replicates + replicates - 1``.
    """
    cfg = replace(cfg, curriculum=replace(cfg.curriculum, mode="random_tau"))
    return _run_jobs(sweep_jobs(cfg), output or cfg.output, workers or cfg.workers, resume)


def read_records(path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().split("\n") if line]


# -- summaries ---------------------------------------------------------------


def _fmt(x):
    return "" if x is None else f"{x:.6g}"


def summarize(records, group_by=("size", "loss")) -> list[dict]:
    """Mean accuracy and paired difference against L1, per group and per target.

    Each non-L1 record is paired with the L1 record of the same experiment,
    training size and replicate. Rows use target ``'all'`` for the mean over
    targets. ``ci95`` is the half-width of the 95% interval of the paired
    difference.
    """
    records = [r for r in records if r.get("status", "ok") == "ok" and r.get("target_accuracy") is not None]
    if not records:
        raise ValueError("no usable records to summarise")
    group_by = tuple(group_by)
    baselines = {}
    for r in records:
        if r["loss"] == "l1":
            baselines.setdefault((r["experiment"], r["problem"], r["size"], r["replicate"]), r)

    def label(r):
        name = r["loss"]
        if "tau" in group_by and r.get("tau") is not None and r["loss"] != "l1":
            name += f"@tau={r['tau_exact']}"
        return name

    groups: dict = {}
    for r in records:
        key = (r["experiment"], r["problem"], r["size"], label(r))
        extra = tuple(r.get(k) for k in group_by if k not in ("size", "loss", "tau"))
        groups.setdefault(key + extra, []).append(r)

    rows = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        members = groups[key]
        experiment, problem, size, loss = key[:4]
        pairs = []
        for r in members:
            b = baselines.get((experiment, problem, size, r["replicate"]))
            if b is not None:
                pairs.append((r, b))
        if not pairs:
            log.warning("no L1 baseline for %s size=%s loss=%s; group skipped", problem, size, loss)
            continue
        m = len(members[0]["target_accuracy"])
        fraction = members[0]["fraction"]
        for target in ["all", *range(m)]:
            if target == "all":
                acc = [r["mean_accuracy"] for r in members]
                diffs = [r["mean_accuracy"] - b["mean_accuracy"] for r, b in pairs]
            else:
                acc = [r["target_accuracy"][target] for r in members]
                diffs = [r["target_accuracy"][target] - b["target_accuracy"][target] for r, b in pairs]
            ci = mean_ci(diffs)[1] if len(diffs) >= 2 else None
            rows.append(dict(
                problem=problem, size=size, fraction=fraction, loss=loss, target=target,
                mean_acc=float(np.mean(acc)), diff_vs_l1=float(np.mean(diffs)), ci95=ci,
            ))
    return rows


def write_summary_csv(rows, path_or_file) -> None:
    own = isinstance(path_or_file, (str, Path))
    f = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for r in rows:
            w.writerow([r["problem"], r["size"], _fmt(r["fraction"]), r["loss"], r["target"],
                        _fmt(r["mean_acc"]), _fmt(r["diff_vs_l1"]), _fmt(r["ci95"])])
    finally:
        if own:
            f.close()
