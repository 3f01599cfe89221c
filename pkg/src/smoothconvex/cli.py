"""Batch experiment runner: dispatch named experiments, write CSV traces and a
summary table.

CSV conventions: '.' decimal, '\n' line endings, no quoting (fields never
contain commas); identical config+seed produces byte-identical files.
"""

from __future__ import annotations

import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (ConfigurationError, Domain, InputError, NumericError,
                   StepSchedule, make_rng)
from . import adversary, metrics, online, problems, stochastic

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


@dataclass
class RunConfig:
    experiment: str
    seed: int = 0
    overrides: dict = field(default_factory=dict)
    output_dir: str = "results"


@dataclass
class ExperimentResult:
    columns: list
    rows: list
    final_metric: float
    slope: float = math.nan


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


def write_csv(path: str, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def exp_emgd_variance(seed: int, p: dict) -> ExperimentResult:
    data = problems.synthetic_classification(int(p["n"]), int(p["d"]), seed=7,
                                             row_norm=p["row_norm"])
    prob = problems.logistic_problem(data, lam=p["lam"])
    cfg = stochastic.SolverConfig(seed=seed, T=int(p["T"]), m=int(p["epochs"]),
                                  probe_variance=True, Delta1=p["Delta1"])
    tr = stochastic.emgd(prob, Domain.ball(p["radius"]), cfg)
    cols = ["iter", "objective", "calls_full", "calls_stochastic",
            "variance_sgd", "variance_mixed"]
    rows = [{"iter": r["epoch"], "objective": r["objective"],
             "calls_full": r["calls_full"], "calls_stochastic": r["calls_stochastic"],
             "variance_sgd": r["variance_sgd"], "variance_mixed": r["variance_mixed"]}
            for r in tr.records]
    vm = tr.column("variance_mixed")
    return ExperimentResult(cols, rows, final_metric=float(vm[-1] / vm[0]),
                            slope=metrics.loglog_slope(np.arange(1, len(vm) + 1), vm))


def exp_mixedgrad_rate(seed: int, p: dict) -> ExperimentResult:
    data = problems.synthetic_regression(int(p["n"]), int(p["d"]), seed=11, noise=0.3,
                                         row_norm=1.0)
    prob = problems.least_squares_problem(data, lam=0.0)
    beta = prob.constants.L_comp
    wopt = np.linalg.lstsq(prob.X, prob.y, rcond=None)[0]
    dom = Domain.ball(2.0 * float(np.linalg.norm(wopt)))
    fstar = metrics.reference_optimum(prob, dom)["F"]
    rows = []
    subs, calls = [], []
    for m in range(int(p["m_min"]), int(p["m_max"]) + 1):
        # lambda1 scaled to the averaged objective's smoothness: with the
        # worst-case 16*beta setting the shrinking-domain schedule outruns the
        # regularization path at this dimension and the rate never shows
        cfg = stochastic.SolverConfig(seed=seed, T1=int(p["T1"]), m=m,
                                      lambda1=p["lambda1_factor"] * prob.constants.L_full,
                                      eta=p["eta_factor"] / beta)
        tr = stochastic.mixed_grad(prob, dom, cfg)
        sub = prob.full_value(tr.final_point) - fstar
        subs.append(sub)
        calls.append(tr.calls_stochastic)
        rows.append({"iter": m, "calls_full": tr.calls_full,
                     "calls_stochastic": tr.calls_stochastic, "suboptimality": sub})
    slope = metrics.loglog_slope(calls, subs)
    return ExperimentResult(["iter", "calls_full", "calls_stochastic", "suboptimality"],
                            rows, final_metric=subs[-1], slope=slope)


def exp_clippedsgd_target(seed: int, p: dict) -> ExperimentResult:
    prob = problems.onedim_target_risk_problem(p["delta"])
    target = p["target_factor"] * prob.eps_opt
    cfg = stochastic.SolverConfig(seed=seed, m=int(p["stages"]), T1=int(p["T1"]),
                                  target_risk=target, epsilon=p["epsilon"],
                                  tau=p["tau"], L=prob.beta, lam=prob.alpha)
    tr = stochastic.clipped_sgd(prob, Domain.ball(1.0), cfg)
    rows = [{"iter": r["stage"], "objective": r["objective"], "delta": r["delta"],
             "calls_stochastic": r["calls_stochastic"]} for r in tr.records]
    risk = prob.expected_loss(tr.final_point)
    bound = (1.0 + p["tau"] / (1.0 - p["epsilon"])) * target
    return ExperimentResult(["iter", "objective", "delta", "calls_stochastic"],
                            rows, final_metric=risk / bound)


def _oneproj_setup(p):
    center = np.array([p["center_x"], 0.0])
    obj = problems.NoisyQuadratic(center=center, noise=p["noise"])
    dom = Domain.ball(p["radius"])
    ref = metrics.reference_optimum(_QuadWrapper(obj), dom)
    return obj, dom, ref["F"]


class _QuadWrapper:
    """Adapts a noisy quadratic to the full-gradient solver interface."""

    def __init__(self, obj):
        self.obj = obj
        self.d = obj.d
        self.constants = problems.Constants(L=1.0, lam=1.0, G=obj.grad_bound(),
                                            sigma=obj.noise, L_comp=1.0, L_full=1.0)

    def full_value(self, w):
        return self.obj.value(w)

    def full_grad(self, w):
        return self.obj.grad(w)


def exp_oneproj_general(seed: int, p: dict) -> ExperimentResult:
    obj, dom, fstar = _oneproj_setup(p)
    rows, subs, Ts = [], [], []
    for T in [int(t) for t in str(p["T_grid"]).split(";")]:
        cfg = stochastic.SolverConfig(seed=seed, T=T)
        tr = stochastic.sgd_pd(obj, dom, cfg)
        sub = obj.value(tr.final_point) - fstar
        rows.append({"iter": T, "suboptimality": sub, "violation": dom.g(tr.final_point),
                     "calls_stochastic": tr.calls_stochastic, "projections": tr.projections})
        subs.append(sub)
        Ts.append(T)
    return ExperimentResult(["iter", "suboptimality", "violation", "calls_stochastic",
                             "projections"], rows, final_metric=subs[-1],
                            slope=metrics.loglog_slope(Ts, subs))


def exp_oneproj_strong(seed: int, p: dict) -> ExperimentResult:
    obj, dom, fstar = _oneproj_setup(p)
    rows, ratios = [], []
    for T in [int(t) for t in str(p["T_grid"]).split(";")]:
        cfg = stochastic.SolverConfig(seed=seed, T=T, lam=1.0)
        tr = stochastic.sgd_st(obj, dom, cfg)
        sub = obj.value(tr.final_point) - fstar
        ratio = sub * T / math.log(T)
        rows.append({"iter": T, "suboptimality": sub, "violation": dom.g(tr.final_point),
                     "projections": tr.projections})
        ratios.append(ratio)
    return ExperimentResult(["iter", "suboptimality", "violation", "projections"],
                            rows, final_metric=max(ratios) / min(ratios))


def exp_gv_regret_sweep(seed: int, p: dict) -> ExperimentResult:
    T, d = int(p["T"]), int(p["d"])
    dom = Domain.ball(1.0)
    egvs = [float(v) for v in str(p["egv_grid"]).split(";")]
    rows, regs = [], []
    for egv in egvs:
        seq = adversary.alternating_linear(egv, T, d)
        measured = adversary.measure_egv_exact(seq)
        omp = online.OMP(dom, L=1.0, eta=online.OMP.tuned_eta(1.0, measured), dim=d)
        ift = online.IFTRL(dom, L=1.0, eta=min(1.0, 1.0 / math.sqrt(measured)), dim=d)
        for l in seq:
            omp.observe(l)
            ift.observe(l)
        r_omp = metrics.final_regret(omp.decisions, seq, dom)
        r_ift = metrics.final_regret(ift.decisions, seq, dom)
        rows.append({"egv": measured, "regret": r_omp, "regret_iftrl": r_ift})
        regs.append(max(r_omp, 1e-12))
    return ExperimentResult(["egv", "regret", "regret_iftrl"], rows,
                            final_metric=regs[-1] / regs[0],
                            slope=metrics.loglog_slope(egvs, regs))


def exp_ogd_vs_omp_adversary(seed: int, p: dict) -> ExperimentResult:
    T, eta = int(p["T"]), p["eta_ogd"]
    seq = adversary.ftrl_adversary(eta, T, gv_target=p["gv_target"])
    dom = Domain.ball(1.0)
    ogd = online.OGD(dom, StepSchedule.constant(eta), dim=1)
    for l in seq:
        ogd.observe(l)
    egv = adversary.measure_egv_exact(seq)
    omp = online.OMP(dom, L=1.0, eta=online.OMP.tuned_eta(1.0, egv), dim=1)
    for l in seq:
        omp.observe(l)
    r_ogd = metrics.final_regret(ogd.decisions, seq, dom)
    r_omp = metrics.final_regret(omp.decisions, seq, dom)
    margin = r_ogd - 5.0 * r_omp  # nonnegative iff the 5x separation holds
    rows = [{"egv": egv, "regret": r_ogd, "regret_omp": r_omp, "margin": margin}]
    return ExperimentResult(["egv", "regret", "regret_omp", "margin"], rows,
                            final_metric=margin)


def exp_expert_switch(seed: int, p: dict) -> ExperimentResult:
    T = int(p["T"])
    rng = make_rng(seed)
    rows, worst = [], 0.0
    for m in [int(v) for v in str(p["m_grid"]).split(";")]:
        c1 = rng.uniform(0.0, 1.0, size=m)
        c2 = rng.uniform(0.0, 1.0, size=m)
        losses = [online.RoundLoss.from_linear(c1)] * (T // 2)
        losses += [online.RoundLoss.from_linear(c2)] * (T - T // 2)
        seq = adversary.LossSequence(T=T, kind="expert_switch", _losses=losses)
        egv_inf = adversary.measure_egv_inf(seq)
        learner = online.ExpertOMP(m, eta=online.ExpertOMP.tuned_eta(m, egv_inf))
        for l in seq:
            learner.observe(l)
        total = np.zeros(m)
        learner_loss = 0.0
        for l, x in zip(seq, learner.decisions):
            total += l.linear
            learner_loss += float(l.linear @ x)
        regret = learner_loss - float(total.min())
        bound = math.sqrt(2.0 * egv_inf * math.log(m))
        rows.append({"iter": m, "egv": egv_inf, "regret": regret, "bound": bound})
        worst = max(worst, regret / bound)
    return ExperimentResult(["iter", "egv", "regret", "bound"], rows, final_metric=worst)


def exp_bandit_estimate(seed: int, p: dict) -> ExperimentResult:
    rows, worst = [], 0.0
    T = int(p["T"])
    for d in [int(v) for v in str(p["d_grid"]).split(";")]:
        rng = make_rng(seed + d)
        dom = Domain.ball(1.0)
        delta = p["delta"]
        learner = online.BanditOMP(dom, G=2.0, delta=delta, eta=delta / (4 * d * math.sqrt(2)),
                                   dim=d)
        centers = [rng.standard_normal(d) * 0.3 for _ in range(T)]
        max_err = 0.0
        for c in centers:
            l = online.RoundLoss.from_quadratic(c)
            x = learner.predict()
            learner.observe(l)
            err = float(np.linalg.norm(learner.last_estimate - l.grad(x)))
            max_err = max(max_err, err)
        bound = math.sqrt(d) * 1.0 * delta / 2.0
        rows.append({"iter": d, "max_error": max_err, "bound": bound,
                     "queries": learner.value_queries, "expected_queries": (d + 1) * T})
        worst = max(worst, max_err / bound)
    return ExperimentResult(["iter", "max_error", "bound", "queries", "expected_queries"],
                            rows, final_metric=worst)


def _soft_instance(seed: int, p: dict):
    T, R = int(p["T"]), p["radius_R"]
    rng = make_rng(seed)
    r_c = p["constraint_radius"]
    g = (lambda x: float(x @ x) - r_c * r_c, lambda x: 2.0 * x)
    centers = [np.array([0.9 * math.cos(0.001 * t), 0.9 * math.sin(0.001 * t)])
               for t in range(T)]
    losses = [online.RoundLoss.from_quadratic(c) for c in centers]
    seq = adversary.LossSequence(T=T, kind="soft_quadratic", _losses=losses)
    G = max(2.0 * R, R + 0.9)  # gradient bounds for losses and constraint over RB
    F = 0.5 * (R + 0.9) ** 2
    cons = online.ConstraintSet.from_samples([g], dim=2, ball_radius=R, loss_bound=F,
                                             grad_bound=G, rng=rng)
    return seq, cons, T, R


def exp_soft_constraints(seed: int, p: dict) -> ExperimentResult:
    seq, cons, T, R = _soft_instance(seed, p)
    dom_true = Domain.ball(p["constraint_radius"])
    soft = online.SoftConstraintOGD(cons, T, R=R, dim=2)
    zero = online.ZeroViolationOGD(cons, T, R=R, dim=2)
    for l in seq:
        soft.observe(l)
        zero.observe(l)
    reg_soft = metrics.final_regret(soft.decisions, seq, dom_true)
    reg_zero = metrics.final_regret(zero.decisions, seq, dom_true)
    viol_soft = float(np.sum([v[0] for v in soft.violations]))
    viol_zero = float(np.sum(zero.raw_violations))
    a, delta = soft.a, soft.delta
    m = cons.m
    reg_bound = a * math.sqrt(T)
    viol_bound = math.sqrt(2 * (cons.F * T + a * math.sqrt(T)) * math.sqrt(T)
                           * (delta * R * R / a + m * a / (R * R)))
    rows = [
        {"variant": "soft", "regret": reg_soft, "regret_bound": reg_bound,
         "violation": viol_soft, "violation_bound": viol_bound},
        {"variant": "zero_violation", "regret": reg_zero, "regret_bound": reg_bound,
         "violation": viol_zero, "violation_bound": 0.0},
    ]
    return ExperimentResult(["variant", "regret", "regret_bound", "violation",
                             "violation_bound"], rows,
                            final_metric=max(reg_soft / reg_bound,
                                             viol_soft / viol_bound))


def exp_penalty_impossibility(seed: int, p: dict) -> ExperimentResult:
    T = int(p["T"])
    v = np.array([1.0, 0.0])
    losses = [online.RoundLoss.from_linear(v)] * T
    seq = adversary.LossSequence(T=T, kind="penalty_instance", _losses=losses)
    cons = online.ConstraintSet(
        funcs=[(lambda x: 1.0 - float(v @ x), lambda x: -v)], D=3.0, G=1.0, F=2.0)
    learner = online.PenaltyOGD(cons, StepSchedule.constant(p["eta"]),
                                delta=p["delta_penalty"], R=2.0, dim=2)
    for l in seq:
        learner.observe(l)
    viol = float(np.sum(np.maximum([x[0] for x in learner.violations], 0.0)))
    rows = [{"iter": T, "violation": viol, "threshold": 0.5 * T}]
    return ExperimentResult(["iter", "violation", "threshold"], rows,
                            final_metric=viol / T)


def exp_psi_transform_table(seed: int, p: dict) -> ExperimentResult:
    rows = []
    for gamma in [float(v) for v in str(p["gamma_grid"]).split(";")]:
        for eta in [round(0.1 * k, 1) for k in range(1, 10)]:
            rows.append({"eta": eta, "gamma": gamma,
                         "psi": problems.psi_transform(eta, gamma)})
    return ExperimentResult(["eta", "gamma", "psi"], rows,
                            final_metric=rows[-1]["psi"])


def exp_hinge_mistakes(seed: int, p: dict) -> ExperimentResult:
    T, d, drift = int(p["T"]), int(p["d"]), p["drift"]
    seq = adversary.classification_stream(drift, T, d, seed=seed)
    learner = online.HingeClassifierPD(d, R=p["radius_R"])
    for gx in seq.meta["examples"]:
        learner.round(gx, 1.0)  # stream stores y·x, so the label is +1
    mistakes = learner.mistakes
    # best fixed comparator over a 2-D grid (coarse + refinement)
    best = _best_hinge_grid(seq.meta["examples"], p["radius_R"])
    egv = 0.0
    prev = None
    for gx in learner.mistake_examples:
        pv = np.zeros_like(gx) if prev is None else prev
        egv += float((gx - pv) @ (gx - pv))
        prev = gx
    bound = best + math.sqrt(2.0) * (p["radius_R"] ** 2 + 1.0) * max(2.0, math.sqrt(egv))
    rows = [{"iter": T, "mistakes": mistakes, "hinge_best": best, "egv": egv,
             "bound": bound}]
    return ExperimentResult(["iter", "mistakes", "hinge_best", "egv", "bound"],
                            rows, final_metric=mistakes / bound)


def _best_hinge_grid(examples, R: float) -> float:
    pts = np.stack(examples)

    def total(w):
        return float(np.sum(np.maximum(0.0, 1.0 - pts @ w)))

    best_w, best_v = np.zeros(2), total(np.zeros(2))
    for res, span, center in ((0.05, R, np.zeros(2)), ):
        grid = np.arange(-span, span + res / 2, res)
        for a in grid:
            for b in grid:
                w = center + np.array([a, b])
                if w @ w <= R * R:
                    v = total(w)
                    if v < best_v:
                        best_w, best_v = w, v
    res = 0.002
    grid = np.arange(-0.06, 0.06 + res / 2, res)
    for a in grid:
        for b in grid:
            w = best_w + np.array([a, b])
            if w @ w <= R * R:
                v = total(w)
                best_v = min(best_v, v)
    return best_v


EXPERIMENTS = {
    "emgd_variance": (exp_emgd_variance, {
        "n": 500, "d": 20, "lam": 1e-2, "T": 10_000, "epochs": 10,
        "row_norm": 1.0, "Delta1": 2.0, "radius": 2.0}),
    "mixedgrad_rate": (exp_mixedgrad_rate, {
        "n": 200, "d": 10, "m_min": 4, "m_max": 8, "T1": 30,
        "lambda1_factor": 1.0, "eta_factor": 0.25}),
    "clippedsgd_target": (exp_clippedsgd_target, {
        "delta": 0.05, "target_factor": 2.0, "stages": 10, "T1": 4000,
        "epsilon": 0.5, "tau": 0.1}),
    "oneproj_general": (exp_oneproj_general, {
        "T_grid": "1000;10000;100000", "center_x": 1.2, "noise": 0.5,
        "radius": 0.8}),
    "oneproj_strong": (exp_oneproj_strong, {
        "T_grid": "1000;10000;100000", "center_x": 1.2, "noise": 0.5,
        "radius": 0.8}),
    "gv_regret_sweep": (exp_gv_regret_sweep, {
        "T": 10_000, "d": 5, "egv_grid": "1;4;16;64"}),
    "ogd_vs_omp_adversary": (exp_ogd_vs_omp_adversary, {
        "T": 10_000, "eta_ogd": 0.2, "gv_target": 8000.0}),
    "expert_switch": (exp_expert_switch, {"T": 2000, "m_grid": "4;16"}),
    "bandit_estimate": (exp_bandit_estimate, {
        "T": 100, "d_grid": "2;5;10", "delta": 0.05}),
    "soft_constraints": (exp_soft_constraints, {
        "T": 10_000, "radius_R": 1.0, "constraint_radius": 0.7}),
    "penalty_impossibility": (exp_penalty_impossibility, {
        "T": 1000, "eta": 0.05, "delta_penalty": 0.5}),
    "psi_transform_table": (exp_psi_transform_table, {"gamma_grid": "1;10;100"}),
    "hinge_mistakes": (exp_hinge_mistakes, {
        "T": 2000, "d": 2, "drift": 0.1, "radius_R": 1.0}),
}


# ---------------------------------------------------------------------------
# Runner plumbing
# ---------------------------------------------------------------------------


def parse_config_file(path: str) -> dict:
    """Flat `key = value` text with '#' comments."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"config line {lineno}: expected key = value")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _coerce(value: str, default):
    if isinstance(default, bool):
        return value.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def resolve_params(experiment: str, overrides: dict) -> dict:
    _, defaults = EXPERIMENTS[experiment]
    params = dict(defaults)
    valid = set(defaults) | {"seed"}
    for k, v in overrides.items():
        if k not in defaults:
            raise ConfigurationError(
                f"unknown key {k!r}; valid keys: {', '.join(sorted(valid))}")
        params[k] = _coerce(v, defaults[k]) if isinstance(v, str) else v
    return params


def run(config: RunConfig) -> dict:
    """Execute one experiment run; returns the summary row."""
    if config.experiment not in EXPERIMENTS:
        raise ConfigurationError(
            f"unknown experiment {config.experiment!r}; registry: "
            + ", ".join(sorted(EXPERIMENTS)))
    fn, _ = EXPERIMENTS[config.experiment]
    params = resolve_params(config.experiment, config.overrides)
    os.makedirs(config.output_dir, exist_ok=True)
    t0 = time.perf_counter()
    result = fn(config.seed, params)
    runtime_ms = int(round((time.perf_counter() - t0) * 1000.0))
    if not math.isfinite(result.final_metric):
        raise NumericError(f"{config.experiment}: non-finite final metric")
    path = os.path.join(config.output_dir, f"{config.experiment}_{config.seed}.csv")
    write_csv(path, result.columns, result.rows)
    return {"experiment": config.experiment, "seed": config.seed,
            "final_metric": result.final_metric, "slope": result.slope,
            "runtime_ms": runtime_ms}


def _run_one(args) -> dict:
    return run(RunConfig(**args))


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _main_inner(argv)
    except (ConfigurationError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def _main_inner(argv) -> int:
    if not argv or argv[0] in ("-h", "--help"):
        print(_usage())
        return EXIT_OK
    if argv[0] != "run":
        raise ConfigurationError(f"unknown command {argv[0]!r}; try: run <experiment>")
    if len(argv) < 2:
        raise ConfigurationError(
            "missing experiment; registry: " + ", ".join(sorted(EXPERIMENTS)))
    experiment = argv[1]
    seeds = [0]
    outdir = os.environ.get("SMOOTHCONVEX_OUT", "results")
    jobs = 1
    overrides: dict = {}
    i = 2
    while i < len(argv):
        arg = argv[i]
        if arg == "--seed":
            seeds = [int(s) for s in argv[i + 1].split(",")]
            i += 2
        elif arg == "--config":
            overrides.update(parse_config_file(argv[i + 1]))
            i += 2
        elif arg == "--out":
            outdir = argv[i + 1]
            i += 2
        elif arg == "--jobs":
            jobs = int(argv[i + 1])
            i += 2
        elif arg.startswith("--") and "=" in arg:
            k, v = arg[2:].split("=", 1)
            overrides[k] = v
            i += 1
        else:
            raise ConfigurationError(f"unrecognized argument {arg!r}")
    if experiment not in EXPERIMENTS:
        raise ConfigurationError(
            f"unknown experiment {experiment!r}; registry: "
            + ", ".join(sorted(EXPERIMENTS)))
    seed_override = overrides.pop("seed", None)
    if seed_override is not None:
        seeds = [int(seed_override)]
    resolve_params(experiment, overrides)  # fail fast on unknown keys
    tasks = [{"experiment": experiment, "seed": s, "overrides": overrides,
              "output_dir": outdir} for s in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            summaries = list(ex.map(_run_one, tasks))
    else:
        summaries = [_run_one(t) for t in tasks]
    write_csv(os.path.join(outdir, "summary.csv"),
              ["experiment", "seed", "final_metric", "slope", "runtime_ms"],
              summaries)
    for row in summaries:
        print(f"{row['experiment']} seed={row['seed']} "
              f"final_metric={row['final_metric']:.6g} slope={row['slope']:.4g} "
              f"runtime_ms={row['runtime_ms']}")
    return EXIT_OK


def _usage() -> str:
    return ("usage: smoothconvex run <experiment> [--seed S[,S2,...]] "
            "[--config FILE] [--out DIR] [--jobs N] [--key=value ...]\n"
            "experiments: " + ", ".join(sorted(EXPERIMENTS)))


if __name__ == "__main__":
    sys.exit(main())
