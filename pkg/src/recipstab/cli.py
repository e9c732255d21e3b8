"""``recipstab`` command-line entry point."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import harness, reporting
from .config import CheckSolutionConfig, PadicRunConfig, StabilityRunConfig, load_config, parse_config
from .equation import Variant
from .errors import ConfigError, RecipStabError
from .exact import set_precision


def _emit(ctx: click.Context, summary: harness.RunSummary, text: str = "") -> None:
    if ctx.obj["json"]:
        click.echo(reporting.dumps(summary.to_dict()), nl=False)
    else:
        if text:
            click.echo(text)
        click.echo(
            f"{summary.command}: checks={summary.checks} passed={summary.passed} "
            f"failed={summary.failed} flagged={summary.flagged} "
            f"time={summary.wall_time:.3f}s"
        )
    ctx.exit(0 if summary.ok else 1)


def _load(ctx: click.Context, path, model):
    try:
        cfg = parse_config({}, model) if path is None else load_config(path, model)
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc
    seed = ctx.obj["seed"]
    if seed is not None and "rng_seed" in model.model_fields:
        cfg = cfg.model_copy(update={"rng_seed": seed})
    return cfg


@click.group()
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None,
              help="RNG seed (overrides rng_seed in the config).")
@click.option("--precision-bits", type=click.IntRange(64, None), default=128, show_default=True,
              help="Mantissa bits of the high-precision real channel.")
@click.option("--json", "as_json", is_flag=True, help="Print the run summary as JSON.")
@click.pass_context
def main(ctx: click.Context, seed, precision_bits, as_json):
    """Verification toolkit for reciprocal-type functional equations and their stability bounds."""
    set_precision(precision_bits)
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, json=as_json)


@main.command("verify-identity")
@click.option("--l-max", type=int, required=True, help="Check degrees 0..N.")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.pass_context
def verify_identity(ctx, l_max, out):
    """Check 2 * sum_{k even} 2^(l-k) C(l,k) == 3^l + 1 exactly."""
    if l_max < 1:
        raise click.BadParameter("must be at least 1", param_hint="--l-max")
    _emit(ctx, harness.run_verify_identity(l_max, out))


@main.command("check-solution")
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.pass_context
def check_solution(ctx, config_path, out):
    """Randomized exact nullity and scaling checks of (r/x)^l for both equation families."""
    cfg = _load(ctx, config_path, CheckSolutionConfig)
    summary = harness.run_check_solution(cfg, out)
    per = summary.details["per_variant"]
    text = "\n".join(
        f"  {name}: admissible={c['admissible']} inadmissible(flagged)={c['inadmissible']} "
        f"failed={c['failed']}"
        for name, c in per.items()
    )
    _emit(ctx, summary, text)


@main.command("specialize")
@click.option("--variant", type=click.Choice(["primary", "generalized"]), required=True)
@click.option("--degree", type=click.IntRange(1, None), required=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.pass_context
def specialize(ctx, variant, degree, out):
    """Expanded numerator coefficients and the comparison with the published instance."""
    summary = harness.run_specialize(Variant(variant), degree, out)
    d = summary.details
    coeffs = ", ".join(f"{k}:{v}" for k, v in d["coefficients"].items())
    lines = [f"coefficients {{{coeffs}}}", f"verdict {d['verdict']}"
             + (f" vs {d['reference']}" if d["reference"] else "")]
    if d["note"]:
        lines.append(f"note: {d['note']}")
    _emit(ctx, summary, "\n".join(lines))


@main.command("stability-run")
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_context
def stability_run(ctx, config_path, out):
    """Fit or check a control, run the direct method on a grid and compare with the series bound."""
    cfg = _load(ctx, config_path, StabilityRunConfig)
    summary = harness.run_stability(cfg, out)
    d = summary.details
    if "hypothesis_violation" in d:
        v = d["hypothesis_violation"]
        text = (f"HypothesisViolation: |residual|={v['abs_residual']} exceeds control "
                f"{v['control_value']} at (x={v['x']}, y={v['y']})")
    else:
        text = (f"  violations={d['violations']} max_ratio={d['max_ratio']} "
                f"scaling_probe_max_error={d['scaling_probe_max_error']}")
    _emit(ctx, summary, text)


@main.command("padic-run")
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_context
def padic_run(ctx, config_path, out):
    """Decay condition, literal max bound and corollary closed forms per (p, l, control)."""
    cfg = _load(ctx, config_path, PadicRunConfig)
    _emit(ctx, harness.run_padic(cfg, out))


def run() -> None:
    try:
        main(standalone_mode=True)
    except RecipStabError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    run()
