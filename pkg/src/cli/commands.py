"""Command-line interface for dpne.

Every command resolves a RunConfig from built-in defaults, the ``run:``
section of the config file, and its flags (in that order of precedence),
and maps failures to exit codes: 2 for configuration errors, 3 for I/O
errors, 4 for internal invariant violations.
"""

import functools
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional

import click

from ..common.config import DEFAULT_CONFIG_PATH, dump_config, load_sections
from ..common.errors import ConfigError, DpneError, InvariantViolation
from ..common.logger import configure_run_logging, get_logger
from ..corpus import (
    Corpus,
    CorpusFormat,
    corpus_statistics,
    load_corpus,
    suggest_caps,
    synth_corpus,
    write_corpus,
)
from ..evaluation import (
    METHODS,
    SWEEP_PARAMETERS,
    compare_methods,
    coverage_csv,
    evaluate,
    render_csv,
    render_table,
    rows_from_results,
    run_sweep,
    sweep_csv,
    to_json,
)
from ..extraction import (
    UNSAFE_HEADER,
    ExtractionResult,
    dpne_extract,
    read_result,
    write_result,
)
from ..evaluation.run_config import RUN_CONFIG_FILE, RunConfig, build_schedule

EXIT_CONFIG = 2
EXIT_IO = 3

REPORT_FORMATS = ("table", "json", "csv")
COMPOSITION_TOLERANCE = 1e-9
SYNTH_CORPUS_FILE = "corpus.jsonl"


def handle_errors(func: Callable) -> Callable:
    """Turn library exceptions into an error message and an exit code."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except DpneError as e:
            _fail(str(e), e.exit_code)
        except OSError as e:
            _fail(str(e), EXIT_IO)
        except ValueError as e:
            _fail(str(e), EXIT_CONFIG)

    return wrapper


def _fail(message: str, code: int) -> None:
    get_logger("cli").debug(f"Exiting with code {code}: {message}")
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


def run_options(func: Callable) -> Callable:
    """Flags shared by every command; each maps onto a RunConfig field."""
    options = [
        click.option("--input", "input_path", type=click.Path(dir_okay=False), help="Corpus file"),
        click.option(
            "--format",
            "input_format",
            type=click.Choice([f.value for f in CorpusFormat]),
            help="Corpus file format",
        ),
        click.option("--output", "-o", type=click.Path(file_okay=False), help="Output directory"),
        click.option("--epsilon", type=float, help="Privacy budget epsilon"),
        click.option("--delta", type=float, help="Privacy parameter delta"),
        click.option("--max-len", type=int, help="Longest n-gram length T"),
        click.option("--delta0", type=int, help="Per-level contribution cap"),
        click.option("--eta", type=float, help="Tolerated spurious fraction"),
        click.option("--decay", type=float, help="Geometric noise decay c"),
        click.option("--sample-p", type=float, help="Validity sampling probability"),
        click.option("--prune", type=click.Choice(["both", "single"]), help="Pruning rule"),
        click.option(
            "--mode", type=click.Choice(["reference", "scalable"]), help="Extraction mode"
        ),
        click.option("--seed", type=int, help="Run seed"),
        click.option("--threads", type=int, help="Worker threads"),
        click.option("--lowercase/--no-lowercase", default=None, help="Lowercase tokens"),
        click.option(
            "--unsafe-no-privacy",
            is_flag=True,
            default=False,
            help="Run without noise; output is NOT differentially private",
        ),
        click.option(
            "--noiseless-threshold", type=float, help="Threshold used with --unsafe-no-privacy"
        ),
        click.option(
            "--report-format",
            type=click.Choice(REPORT_FORMATS),
            default="table",
            show_default=True,
            help="Format of the report printed to stdout",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _resolve(ctx: click.Context, params: Dict[str, Any], **extra: Any) -> RunConfig:
    """Defaults < config file < flags."""
    run_section, logging_section = load_sections(ctx.obj.get("config_path"))

    overrides = dict(params)
    overrides["input"] = overrides.pop("input_path", None)
    if not overrides.get("unsafe_no_privacy"):
        overrides["unsafe_no_privacy"] = None
    overrides.update(extra)

    config = RunConfig.from_mapping(run_section).with_overrides(**overrides)
    configure_run_logging(logging_section, ctx.obj.get("verbose", False), config.output)
    if config.unsafe_no_privacy:
        get_logger("cli").warning(
            "--unsafe-no-privacy: outputs of this run are NOT differentially private"
        )
    return config


def _load(config: RunConfig) -> Corpus:
    if not config.input:
        raise ConfigError("No input corpus given; pass --input or set run.input")
    return load_corpus(config.input, config.corpus_format, config.lowercase)


def _echo_config(config: RunConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_config({"run": config.to_dict()}, out_dir / RUN_CONFIG_FILE)


def _stamp(text: str, unsafe: bool) -> str:
    return f"{UNSAFE_HEADER}\n{text}" if unsafe else text


def _emit_results(report_format: str, results: Mapping[str, ExtractionResult]) -> None:
    if report_format == "json":
        click.echo(to_json({name: r.to_dict() for name, r in results.items()}), nl=False)
    elif report_format == "csv":
        click.echo(render_csv(rows_from_results(results)), nl=False)
    else:
        click.echo(render_table(rows_from_results(results)), nl=False)


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    default=None,
    help=f"YAML config file (default: {DEFAULT_CONFIG_PATH} if present)",
)
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], verbose: bool) -> None:
    """Differentially private n-gram extraction."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["verbose"] = verbose


@cli.command()
@run_options
@click.pass_context
@handle_errors
def calibrate(ctx: click.Context, report_format: str, **params: Any) -> None:
    """Print the noise schedule for the configured privacy target."""
    config = _resolve(ctx, params)
    schedule = build_schedule(config)
    residual = schedule.composition_residual()
    if residual > COMPOSITION_TOLERANCE:
        raise InvariantViolation(f"composition residual {residual:.3e} above tolerance")

    if report_format == "json":
        click.echo(to_json({"schedule": schedule.to_dict(), "config": config.to_dict()}), nl=False)
        return
    if report_format == "csv":
        click.echo("level,sigma,cap")
        for k in range(1, schedule.max_len + 1):
            click.echo(f"{k},{schedule.sigma(k)!r},{schedule.cap(k)}")
        return

    click.echo(f"sigma*      = {schedule.sigma_star:.6g}")
    for k in range(1, schedule.max_len + 1):
        click.echo(f"sigma_{k:<4} = {schedule.sigma(k):.6g}  (cap {schedule.cap(k)})")
    click.echo(f"rho_1       = {schedule.rho1:.6g}")
    click.echo(f"residual    = {residual:.3e}")


@cli.command()
@run_options
@click.pass_context
@handle_errors
def extract(ctx: click.Context, report_format: str, **params: Any) -> None:
    """Extract private n-grams and write level files, report, and config echo."""
    config = _resolve(ctx, params)
    corpus = _load(config)
    schedule = build_schedule(config)
    result = dpne_extract(
        corpus,
        schedule,
        config.pruning_rule,
        config.extraction_mode,
        config.seed,
        config.threads,
        debug=config.unsafe_no_privacy,
    )

    out_dir = Path(config.output)
    write_result(
        result,
        corpus.tokens,
        out_dir,
        unsafe=config.unsafe_no_privacy,
        extra={"schedule": schedule.to_dict()},
    )
    _echo_config(config, out_dir)
    _emit_results(report_format, {"dpne": result})


@cli.command()
@run_options
@click.option(
    "--methods",
    default=",".join(METHODS),
    show_default=True,
    help="Comma-separated subset of methods to run",
)
@click.pass_context
@handle_errors
def compare(ctx: click.Context, report_format: str, methods: str, **params: Any) -> None:
    """Run DPNE and the DPSU baselines side by side."""
    config = _resolve(ctx, params)
    selected = [m.strip() for m in methods.split(",") if m.strip()]
    unknown = [m for m in selected if m not in METHODS]
    if not selected or unknown:
        raise ConfigError(f"--methods must be a subset of {','.join(METHODS)}")

    corpus = _load(config)
    results = compare_methods(corpus, config, selected)
    rows = rows_from_results(results)

    unsafe = config.unsafe_no_privacy
    out_dir = Path(config.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "compare.txt").write_text(_stamp(render_table(rows), unsafe), encoding="utf-8")
    (out_dir / "compare.csv").write_text(_stamp(render_csv(rows), unsafe), encoding="utf-8")
    (out_dir / "compare.json").write_text(
        to_json(
            {
                "unsafe_no_privacy": unsafe,
                "methods": {name: r.to_dict() for name, r in results.items()},
            }
        ),
        encoding="utf-8",
    )
    _echo_config(config, out_dir)
    _emit_results(report_format, results)


@cli.command(name="evaluate")
@click.argument("result_dir", type=click.Path(file_okay=False))
@run_options
@click.option(
    "-K",
    "thresholds",
    type=int,
    multiple=True,
    default=(10, 100),
    show_default=True,
    help="User-count threshold for coverage (repeatable)",
)
@click.pass_context
@handle_errors
def evaluate_cmd(
    ctx: click.Context,
    result_dir: str,
    report_format: str,
    thresholds: List[int],
    **params: Any,
) -> None:
    """Coverage and spurious audit of an extraction against its corpus."""
    config = _resolve(ctx, params)
    corpus = _load(config)
    result = read_result(Path(result_dir), corpus.tokens)
    report = evaluate(
        result,
        corpus,
        thresholds,
        parameters={"K": sorted(set(thresholds)), "config": config.to_dict()},
    )

    # A noiseless result is unsafe even when evaluate runs without the flag.
    unsafe = config.unsafe_no_privacy or not result.private
    data = report.to_dict()
    data["unsafe_no_privacy"] = unsafe

    out_dir = Path(result_dir)
    (out_dir / "evaluation.json").write_text(to_json(data), encoding="utf-8")
    (out_dir / "coverage.csv").write_text(
        _stamp(coverage_csv([report]), unsafe), encoding="utf-8"
    )

    if report_format == "json":
        click.echo(to_json(data), nl=False)
    elif report_format == "csv":
        click.echo(coverage_csv([report]), nl=False)
    else:
        for cell in report.coverage:
            fraction = "-" if cell.fraction is None else f"{cell.fraction:.4f}"
            click.echo(
                f"k={cell.k} K={cell.K}: {cell.numerator}/{cell.denominator} = {fraction}"
            )
        audit = report.spurious
        click.echo(
            f"spurious per level: {audit.per_level} "
            f"(total {audit.total}/{audit.output_total} = {audit.fraction:.4f})"
        )


@cli.command()
@run_options
@click.option("--users", type=int, help="Number of synthetic users")
@click.option("--tokens-per-user", type=int, help="Tokens per user")
@click.option("--vocab", type=int, help="Vocabulary size")
@click.option("--zipf", type=float, help="Zipf exponent")
@click.pass_context
@handle_errors
def synth(
    ctx: click.Context,
    report_format: str,
    users: Optional[int],
    tokens_per_user: Optional[int],
    vocab: Optional[int],
    zipf: Optional[float],
    **params: Any,
) -> None:
    """Write a synthetic Zipfian corpus as jsonl_text."""
    config = _resolve(
        ctx,
        params,
        synth_users=users,
        synth_tokens_per_user=tokens_per_user,
        synth_vocab=vocab,
        synth_zipf=zipf,
    )
    corpus = synth_corpus(
        config.synth_users,
        config.synth_tokens_per_user,
        config.synth_vocab,
        config.synth_zipf,
        config.seed,
    )
    out_dir = Path(config.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / SYNTH_CORPUS_FILE
    write_corpus(corpus, path)
    _echo_config(config, out_dir)
    click.echo(str(path))


@cli.command()
@run_options
@click.pass_context
@handle_errors
def stats(ctx: click.Context, report_format: str, **params: Any) -> None:
    """Describe a corpus and suggest per-level caps (reads cleartext data)."""
    config = _resolve(ctx, params)
    corpus = _load(config)
    corpus_stats = corpus_statistics(corpus, config.max_len)
    caps = suggest_caps(corpus_stats)
    click.echo(
        "Warning: statistics and suggested caps are computed from the raw corpus "
        "and are not differentially private",
        err=True,
    )

    if report_format == "json":
        data = corpus_stats.to_dict()
        data["suggested_caps"] = caps
        click.echo(to_json(data), nl=False)
        return
    if report_format == "csv":
        click.echo("k,distinct_grams,mean_per_user,median_per_user,suggested_cap")
        for length, cap in zip(corpus_stats.lengths, caps):
            click.echo(
                f"{length.k},{length.distinct_grams},{length.mean_per_user!r},"
                f"{length.median_per_user!r},{cap}"
            )
        return

    click.echo(
        f"users={corpus_stats.n_users} sequences={corpus_stats.n_sequences} "
        f"tokens={corpus_stats.n_tokens}"
    )
    for length, cap in zip(corpus_stats.lengths, caps):
        click.echo(
            f"k={length.k}: {length.distinct_grams} distinct, "
            f"mean {length.mean_per_user:.2f} / median {length.median_per_user:.1f} "
            f"per user, suggested cap {cap}"
        )


def _parse_sweep_values(parameter: str, raw: str) -> List[Any]:
    items = [v.strip() for v in raw.split(",") if v.strip()]
    if not items:
        raise ConfigError("--values needs at least one value")
    if parameter == "prune":
        return items
    if parameter == "delta0":
        return [int(v) for v in items]
    return [float(v) for v in items]


@cli.command()
@run_options
@click.option(
    "--parameter", type=click.Choice(SWEEP_PARAMETERS), required=True, help="Swept parameter"
)
@click.option("--values", "raw_values", required=True, help="Comma-separated values")
@click.pass_context
@handle_errors
def sweep(
    ctx: click.Context, report_format: str, parameter: str, raw_values: str, **params: Any
) -> None:
    """Per-length DPNE counts across values of one hyperparameter."""
    config = _resolve(ctx, params)
    values = _parse_sweep_values(parameter, raw_values)
    corpus = _load(config)
    points = run_sweep(corpus, config, parameter, values)

    out_dir = Path(config.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sweep.csv").write_text(
        _stamp(sweep_csv(points), config.unsafe_no_privacy), encoding="utf-8"
    )
    _echo_config(config, out_dir)

    if report_format == "json":
        click.echo(
            to_json(
                [
                    {"parameter": p.parameter, "value": p.value, "counts": p.counts, "total": p.total}
                    for p in points
                ]
            ),
            nl=False,
        )
    else:
        click.echo(sweep_csv(points), nl=False)
