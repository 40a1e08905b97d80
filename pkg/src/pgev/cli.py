"""Command-line interface: ``pgev fit|bayes|gof|simulate|return-levels|query|doa-check``."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import asymptotics, bayes, dist, gof, mle, specfun, svgplot
from .dataset import Dataset
from .dist import Family, ModelParams

DEFAULT_PERIODS = (4, 10, 15, 20, 30, 35, 50)
FIT_FAMILIES = ("pgev", "gev", "gumbel")
QUERY_FAMILIES = FIT_FAMILIES + ("k1", "k2", "k3", "k4", "k5", "k6")


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    family: str = "pgev"
    seed: Optional[int] = None
    n_iter: int = 5000
    burn_in: Optional[int] = None
    prior_var: tuple = (bayes.DEFAULT_PRIOR_VAR,) * 3
    proposal_sd: Optional[tuple] = None
    periods: tuple = DEFAULT_PERIODS
    p_values: tuple = ()
    plot: bool = False
    chains: int = 1
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# input / output
# ---------------------------------------------------------------------------

def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def ingest_csv(path) -> Dataset:
    """Read a ``label,value`` or single ``value`` column file.

    A first row with a non-numeric value cell is taken as a header. Blank
    lines are skipped with one entry each in ``Dataset.warnings``.
    """
    path = Path(path)
    if not path.exists():
        raise CliError(f"{path}: no such file")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    warns = []
    body = []
    for lineno, row in enumerate(rows, start=1):
        cells = [c.strip() for c in row]
        if not any(cells):
            warns.append(f"line {lineno}: blank line skipped")
            continue
        body.append((lineno, cells))
    if not body:
        raise CliError(f"{path}: file is empty")
    value_col = 1 if len(body[0][1]) >= 2 else 0
    first = body[0][1]
    if not _is_number(first[value_col]):
        header = [c.lower() for c in first]
        if "value" in header:
            value_col = header.index("value")
        body = body[1:]
    if not body:
        raise CliError(f"{path}: no data rows")
    labels, values, bad = [], [], []
    for lineno, cells in body:
        if len(cells) <= value_col or not _is_number(cells[value_col]):
            bad.append(lineno)
            continue
        v = float(cells[value_col])
        if not math.isfinite(v):
            bad.append(lineno)
            continue
        values.append(v)
        labels.append(cells[0] if value_col > 0 else str(len(labels) + 1))
    if bad:
        shown = ", ".join(str(b) for b in bad[:10])
        raise CliError(f"{path}: non-numeric value on row(s) {shown}"
                       + (" ..." if len(bad) > 10 else ""))
    return Dataset(np.array(values), labels, warns)


def _dump_json(obj, path: Optional[Path]) -> str:
    text = json.dumps(obj, indent=2, allow_nan=True) + "\n"
    if path is not None:
        path.write_text(text)
    return text


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def fit_report(fit: mle.FitResult) -> dict:
    p = fit.params
    return {"family": p.family.value, "mu": p.mu, "sigma": p.sigma, "xi": p.xi,
            "support_sign": p.support_sign, "loglik": _num(fit.loglik),
            "se": [_num(s) for s in fit.std_errors], "warnings": list(fit.warnings),
            "n": fit.n, "converged": fit.converged, "iterations": fit.iterations}


def params_from_report(report) -> ModelParams:
    """ModelParams from a fit report dict or JSON file path."""
    if not isinstance(report, dict):
        report = json.loads(Path(report).read_text())
    return ModelParams.from_dict(report)


def _out_dir(cfg: RunConfig) -> Optional[Path]:
    if cfg.output_path is None:
        return None
    cfg.output_path.mkdir(parents=True, exist_ok=True)
    return cfg.output_path


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def _parse_list(text: Optional[str], cast=float) -> tuple:
    if text is None or text == "":
        return ()
    try:
        return tuple(cast(t) for t in text.split(","))
    except ValueError as exc:
        raise CliError(f"cannot parse list {text!r}: {exc}")


def _need_input(cfg: RunConfig) -> Dataset:
    if cfg.input_path is None:
        raise CliError("--input is required")
    ds = ingest_csv(cfg.input_path)
    for w in ds.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return ds


def _need_seed(cfg: RunConfig) -> int:
    if cfg.seed is None:
        raise CliError("--seed is required for randomized commands")
    return cfg.seed


# ---------------------------------------------------------------------------
# plots
# ---------------------------------------------------------------------------

def _plot_fit(ds: Dataset, fit: mle.FitResult, out: Path):
    x = np.arange(1, ds.n + 1)
    (out / "data.svg").write_text(svgplot.plot(
        [dict(x=x, y=ds.values, style="points")], "data", "index", "value"))
    counts, edges = np.histogram(ds.values, bins=min(30, max(5, ds.n // 5)), density=True)
    mids = 0.5 * (edges[1:] + edges[:-1])
    grid = np.linspace(edges[0], edges[-1], 200)
    dens = np.asarray(dist.pdf(fit.params, grid), float)
    (out / "density.svg").write_text(svgplot.plot(
        [dict(x=mids, y=counts, style="bars", label="histogram"),
         dict(x=grid, y=dens, label=f"fitted {fit.params.family.value}")],
        "density", "value", "density"))


def _plot_chain(chain: bayes.Chain, out: Path, name: str):
    it = np.arange(chain.n)
    cols = [("mu", chain.draws[:, 0]), ("sigma", np.exp(chain.draws[:, 1])),
            ("xi", chain.draws[:, 2])]
    (out / f"{name}.svg").write_text(svgplot.panels(
        [dict(series=[dict(x=it, y=c)], title=f"trace of {n}", xlabel="iteration", ylabel=n)
         for n, c in cols], height_each=220))


def _plot_return_levels(rows, out: Path):
    ps = [r[1] for r in rows]
    lv = [r[2] for r in rows]
    (out / "return_levels.svg").write_text(svgplot.plot(
        [dict(x=ps, y=lv), dict(x=ps, y=lv, style="points")],
        "predictive return levels", "p = 1/m", "return level"))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_fit(cfg: RunConfig) -> dict:
    ds = _need_input(cfg)
    fit = mle.fit_mle(ds, cfg.family)
    report = fit_report(fit)
    if cfg.p_values:
        cis = []
        for p in cfg.p_values:
            try:
                q = mle.quantile_ci(fit, p)
                cis.append({"p": p, "estimate": q.estimate, "lower": q.lower,
                            "upper": q.upper, "se": math.sqrt(q.variance)})
            except np.linalg.LinAlgError as exc:
                cis.append({"p": p, "estimate": float(dist.quantile(fit.params, p)),
                            "error": str(exc)})
        report["quantiles"] = cis
    out = _out_dir(cfg)
    _dump_json(report, out / "fit.json" if out else None)
    if cfg.plot and out:
        _plot_fit(ds, fit, out)
    return report


def _chain_seeds(seed: int, k: int) -> list:
    if k == 1:
        return [seed]
    return [int(s.generate_state(1, np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(k)]


def _return_rows(chain: bayes.Chain, periods) -> list:
    return [(m, 1.0 / m, bayes.return_level(chain, m)) for m in periods]


def cmd_bayes(cfg: RunConfig) -> dict:
    ds = _need_input(cfg)
    seed = _need_seed(cfg)
    prior = bayes.PriorSpec(*cfg.prior_var)
    proposal = bayes.ProposalSpec.from_sds(cfg.proposal_sd) if cfg.proposal_sd else None
    family = Family(cfg.family)
    init = None
    if proposal is not None:
        fit = mle.fit_mle(ds, family)
        init = (fit.params.mu, math.log(fit.params.sigma), fit.params.xi)

    def one(s):
        return bayes.run_mcmc(ds, prior, proposal, cfg.n_iter, init, s, cfg.burn_in, family)

    seeds = _chain_seeds(seed, cfg.chains)
    with ThreadPoolExecutor(max_workers=max(1, cfg.chains)) as pool:
        chains = list(pool.map(one, seeds))
    out = _out_dir(cfg)
    report = {"family": family.value, "n_iter": cfg.n_iter, "chains": []}
    for k, (s, ch) in enumerate(zip(seeds, chains)):
        name = "chain" if cfg.chains == 1 else f"chain_{k + 1}"
        rows = _return_rows(ch, cfg.periods)
        report["chains"].append({
            "seed": s, "burn_in": ch.burn_in, "support_sign": ch.support_sign,
            "proposal_sd": list(ch.proposal.sds), "summary": bayes.chain_summary(ch),
            "return_levels": [{"period": m, "p": p, "level": lv} for m, p, lv in rows]})
        if out:
            bayes.write_chain_csv(ch, out / f"{name}.csv")
            _write_csv(out / f"return_levels{'' if cfg.chains == 1 else '_' + str(k + 1)}.csv",
                       ("period", "p", "level"), rows)
            if cfg.plot:
                _plot_chain(ch, out, f"trace{'' if cfg.chains == 1 else '_' + str(k + 1)}")
                if k == 0:
                    grid = sorted(set(cfg.periods) | {1.25, 2, 3, 5, 25, 75, 100})
                    _plot_return_levels(_return_rows(ch, grid), out)
    _dump_json(report, out / "bayes.json" if out else None)
    return report


def cmd_gof(cfg: RunConfig) -> dict:
    ds = _need_input(cfg)
    fit = mle.fit_mle(ds, cfg.family)
    table = None
    cv = cfg.extra.get("critical_values")
    if cv:
        table = gof.load_critical_values(cv)
    rep = gof.gof_test(ds, fit, table, cfg.extra.get("level", 0.05))
    report = {"family": fit.params.family.value, **rep.as_dict(), "fit": fit_report(fit)}
    out = _out_dir(cfg)
    _dump_json(report, out / "gof.json" if out else None)
    return report


def _params_from_cli(family: str, mu, sigma, xi, sign) -> ModelParams:
    fam = Family(family)
    if fam is Family.PGEV:
        return ModelParams.pgev(mu, sigma, xi, sign)
    if fam is Family.GEV:
        return ModelParams.gev(mu, sigma, xi)
    if fam is Family.GUMBEL:
        return ModelParams.gumbel(mu, sigma)
    return ModelParams.pmax(fam, None if fam in (Family.PMAX_K3, Family.PMAX_K6) else xi)


def cmd_simulate(cfg: RunConfig) -> dict:
    seed = _need_seed(cfg)
    e = cfg.extra
    params = _params_from_cli(cfg.family, e["mu"], e["sigma"], e["xi"], e["support_sign"])
    ds = dist.sample(params, e["n"], specfun.rng_new(seed))
    out = _out_dir(cfg)
    if out:
        _write_csv(out / "data.csv", ("label", "value"),
                   [(i + 1, float(v)) for i, v in enumerate(ds.values)])
    return {"params": params.as_dict(), "n": ds.n, "seed": seed,
            "values": [float(v) for v in ds.values]}


def cmd_return_levels(cfg: RunConfig) -> dict:
    out = _out_dir(cfg)
    chain_path = cfg.extra.get("chain")
    if chain_path:
        family = Family(cfg.family)
        chain = bayes.read_chain_csv(chain_path, cfg.burn_in or 0, None, family,
                                     cfg.extra.get("support_sign") or 1)
        rows = _return_rows(chain, cfg.periods)
        source = "posterior predictive"
    else:
        ds = _need_input(cfg)
        fit = mle.fit_mle(ds, cfg.family)
        rows = [(m, 1.0 / m, float(dist.quantile(fit.params, 1 - 1.0 / m)))
                for m in cfg.periods]
        source = "maximum likelihood plug-in"
    if out:
        _write_csv(out / "return_levels.csv", ("period", "p", "level"), rows)
        if cfg.plot:
            _plot_return_levels(rows, out)
    return {"source": source,
            "return_levels": [{"period": m, "p": p, "level": lv} for m, p, lv in rows]}


def cmd_query(cfg: RunConfig) -> dict:
    e = cfg.extra
    params = _params_from_cli(cfg.family, e["mu"], e["sigma"], e["xi"], e["support_sign"])
    xs = e.get("x") or ()
    rep = {"params": params.as_dict()}
    if xs:
        rep["cdf"] = [float(dist.cdf(params, x)) for x in xs]
        rep["pdf"] = [float(dist.pdf(params, x)) for x in xs]
    if cfg.p_values:
        rep["quantile"] = [float(dist.quantile(params, p)) for p in cfg.p_values]
    for name, fn in (("mean", lambda: dist.signed_moment(params, 1)),
                     ("variance", lambda: dist.variance(params)),
                     ("entropy", lambda: dist.entropy(params))):
        try:
            rep[name] = _num(fn())
        except (ValueError, ArithmeticError) as exc:
            rep[name] = None
            rep.setdefault("notes", []).append(f"{name}: {exc}")
    out = _out_dir(cfg)
    _dump_json(rep, out / "query.json" if out else None)
    return rep


def _default_parent(case: asymptotics.DoaCase, xi: float):
    C = asymptotics.DoaCase
    if case is C.L1_POS_XI:
        return asymptotics.log_tail_parent(1 / xi)
    if case is C.L2_POS_XI:
        return asymptotics.reflected_log_tail_parent(1 / xi)
    if case is C.L1_NEG_XI:
        return asymptotics.uniform_parent() if xi == -1 else asymptotics.log_power_parent(1.0, -1 / xi)
    return asymptotics.uniform_parent(-2, -1) if xi == -1 else asymptotics.log_power_parent(-1.0, -1 / xi)


def cmd_doa_check(cfg: RunConfig) -> dict:
    e = cfg.extra
    case = asymptotics.DoaCase(e["case"])
    xi, x = e["xi"], e["x_point"]
    parent = _default_parent(case, xi)
    grid = e.get("t_grid") or asymptotics.default_t_grid(case)
    ratios = [asymptotics.doa_ratio(case, parent, xi, x, t) for t in grid]
    trace = asymptotics.ConvergenceTrace.build(grid, [r.ratio for r in ratios],
                                               ratios[0].stated_limit,
                                               ratios[0].self_consistent_limit)
    rep = {"case": case.value, "parent": parent.name, "xi": xi, "x": x,
           "t_values": list(trace.t_values), "ratio_values": list(trace.ratio_values),
           "literal_ratio_values": [_num(r.literal_ratio) for r in ratios],
           "stated_limit": _num(trace.stated_limit),
           "self_consistent_limit": trace.self_consistent_limit,
           "max_abs_gap": trace.max_abs_gap}
    n_grid = e.get("n_grid")
    if n_grid:
        conv = asymptotics.pmax_convergence(parent, case, x, n_grid, xi)
        rep["pmax_convergence"] = {"n_values": list(conv.t_values),
                                   "cdf_values": list(conv.ratio_values),
                                   "limit": conv.self_consistent_limit,
                                   "max_abs_gap": conv.max_abs_gap}
    out = _out_dir(cfg)
    _dump_json(rep, out / "doa.json" if out else None)
    return rep


COMMANDS = {"fit": cmd_fit, "bayes": cmd_bayes, "gof": cmd_gof, "simulate": cmd_simulate,
            "return-levels": cmd_return_levels, "query": cmd_query, "doa-check": cmd_doa_check}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pgev", description="PGEV, GEV and Gumbel modelling "
                                 "of block maxima")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, families=FIT_FAMILIES, default="pgev"):
        p.add_argument("--input", type=Path)
        p.add_argument("--output", type=Path, help="directory for artifact files")
        p.add_argument("--family", choices=families, default=default)
        p.add_argument("--plot", action="store_true")
        return p

    def param_args(p):
        p.add_argument("--mu", type=float, default=0.0)
        p.add_argument("--sigma", type=float, default=1.0)
        p.add_argument("--xi", type=float, default=None,
                       help="shape, or alpha for the p-max stable laws")
        p.add_argument("--support-sign", type=int, choices=(1, -1), default=1)

    p = common(sub.add_parser("fit", help="maximum likelihood fit"))
    p.add_argument("--p", help="comma-separated probabilities for quantile intervals")

    p = common(sub.add_parser("bayes", help="Metropolis-within-Gibbs posterior sampling"),
               ("pgev", "gev"))
    p.add_argument("--seed", type=int)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--prior-var", help="one variance or three comma-separated")
    p.add_argument("--proposal-sd", help="a,b,c step sds for mu, log sigma, xi")
    p.add_argument("--periods")
    p.add_argument("--chains", type=int, default=1)

    p = common(sub.add_parser("gof", help="Cramer-von Mises and Anderson-Darling statistics"))
    p.add_argument("--critical-values", type=Path,
                   help='JSON table {"C": {"0.05": ...}, "A": {...}}')
    p.add_argument("--level", type=float, default=0.05)

    p = common(sub.add_parser("simulate", help="draw a sample"), QUERY_FAMILIES)
    param_args(p)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int)

    p = common(sub.add_parser("return-levels", help="return-level table"), ("pgev", "gev"))
    p.add_argument("--chain", type=Path, help="chain CSV written by the bayes command")
    p.add_argument("--burn-in", type=int)
    p.add_argument("--support-sign", type=int, choices=(1, -1), default=1)
    p.add_argument("--periods")

    p = common(sub.add_parser("query", help="cdf, pdf, quantiles and moments"), QUERY_FAMILIES)
    param_args(p)
    p.add_argument("--x", help="comma-separated points")
    p.add_argument("--p", help="comma-separated probabilities")

    p = sub.add_parser("doa-check", help="domain-of-attraction ratio trace")
    p.add_argument("--case", required=True, choices=[c.value for c in asymptotics.DoaCase])
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--t-grid")
    p.add_argument("--n-grid")
    p.add_argument("--output", type=Path)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(ns.command, getattr(ns, "input", None), getattr(ns, "output", None),
                    getattr(ns, "family", "pgev"), getattr(ns, "seed", None))
    cfg.plot = getattr(ns, "plot", False)
    if ns.command == "bayes":
        if ns.iters < 1:
            raise CliError("--iters must be positive")
        cfg.n_iter = ns.iters
        cfg.chains = ns.chains
        if cfg.chains < 1:
            raise CliError("--chains must be positive")
        pv = _parse_list(ns.prior_var)
        if len(pv) == 1:
            pv = pv * 3
        if pv:
            if len(pv) != 3 or min(pv) <= 0:
                raise CliError("--prior-var takes one or three positive numbers")
            cfg.prior_var = pv
        sd = _parse_list(ns.proposal_sd)
        if sd:
            if len(sd) != 3 or min(sd) <= 0:
                raise CliError("--proposal-sd takes three positive numbers")
            cfg.proposal_sd = sd
    if ns.command in ("bayes", "return-levels"):
        cfg.burn_in = ns.burn_in
        if ns.burn_in is not None and ns.burn_in < 0:
            raise CliError("--burn-in must be non-negative")
        periods = _parse_list(ns.periods) or DEFAULT_PERIODS
        if min(periods) <= 1:
            raise CliError("return periods must exceed 1")
        cfg.periods = tuple(periods)
    if ns.command in ("fit", "query"):
        cfg.p_values = _parse_list(ns.p)
        if any(not 0 < p < 1 for p in cfg.p_values):
            raise CliError("probabilities must lie in (0, 1)")
    if ns.command == "gof":
        cfg.extra = {"critical_values": ns.critical_values, "level": ns.level}
    if ns.command in ("simulate", "query"):
        fam = Family(ns.family)
        xi = ns.xi
        if xi is None and fam in (Family.PGEV, Family.GEV):
            raise CliError(f"--xi is required for {fam.value}")
        cfg.extra = {"mu": ns.mu, "sigma": ns.sigma, "xi": xi, "support_sign": ns.support_sign}
        if ns.command == "simulate":
            if ns.n < 1:
                raise CliError("--n must be positive")
            cfg.extra["n"] = ns.n
        else:
            cfg.extra["x"] = _parse_list(ns.x)
    if ns.command == "return-levels":
        cfg.extra = {"chain": ns.chain, "support_sign": ns.support_sign}
    if ns.command == "doa-check":
        cfg.extra = {"case": ns.case, "xi": ns.xi, "x_point": ns.x,
                     "t_grid": _parse_list(ns.t_grid),
                     "n_grid": _parse_list(ns.n_grid, int)}
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        result = COMMANDS[cfg.command](cfg)
    except (CliError, ValueError, ArithmeticError, OSError, KeyError,
            np.linalg.LinAlgError, specfun.QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(_dump_json(result, None))
    return 0


if __name__ == "__main__":
    sys.exit(main())
