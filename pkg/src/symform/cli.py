"""CLI for symform."""

import sys
from collections.abc import Callable
from typing import Annotated, Any, Literal

import numpy as np
import structlog
from cyclopts import App, Parameter

from symform import compound as compound_tensor
from symform import forms as symmetric_forms
from symform.config import RunConfig, get_config
from symform.config_commands import config_app
from symform.errors import ConfigError, SymformError
from symform.forms import eval_form, eval_form_matrix
from symform.inequalities import inequality_check
from symform.majorize_commands import majorize_app
from symform.models import ProbeReport
from symform.probes import (
    conjecture_search,
    merge_reports,
    probe_midpoint,
    probe_reduction,
    probe_second_difference,
    verify_inequality,
)
from symform.serialization import dumps_report, load_matrix, write_report

logger = structlog.get_logger()

app = App(
    help="symform - symmetric forms, trace inequalities and concavity probes on PSD matrices",
)

app.command(config_app)
app.command(majorize_app)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_NUMERICAL = 3

# (k, n) pairs the conjecture search covers when --k is not given
CONJECTURE_GRID = ((1, 2), (1, 3), (2, 3), (2, 4), (3, 4))

FORM_CHECKS: dict[str, Callable[..., Any]] = {
    "axioms": symmetric_forms.check_axioms,
    "hoelder": symmetric_forms.check_hoelder,
    "concavity": symmetric_forms.check_concavity_vector,
    "matrix-concavity": symmetric_forms.check_concavity_matrix,
    "matrix-hoelder": symmetric_forms.check_matrix_hoelder,
}


def configure_logging(log_level: str) -> None:
    """Configure structlog with the specified log level; log lines go to stderr."""
    structlog.configure(
        wrapper_class=structlog.make_filtering_bound_logger(min_level=log_level.lower()),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
    )


def handle_errors(action: Callable[[], int]) -> int:
    """Run a command body and turn symform errors into exit codes with a one-line message on stderr."""
    try:
        return action()
    except SymformError as e:
        logger.error("Command failed", error=str(e), error_type=type(e).__name__)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except np.linalg.LinAlgError as e:
        logger.error("Linear algebra failure", error=str(e))
        print(f"error: linear algebra failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


def _emit(report: Any, config: RunConfig) -> None:
    if config.out:
        write_report(report, config.out)
    print(dumps_report(report), end="")


def _probe_exit(report: ProbeReport) -> int:
    return EXIT_VIOLATION if report.confirmed_violations else EXIT_OK


def _eval(config: RunConfig) -> int:
    phi = config.form_descriptor()
    if config.kernel is None:
        if len(config.matrices) != 1:
            raise ConfigError("eval without --kernel takes exactly one --matrix")
        value = eval_form_matrix(phi, load_matrix(config.matrices[0], hermitian_required=True))
        document: dict[str, Any] = {"form": str(phi), "matrix": config.matrices[0], "value": value}
    else:
        target = config.target_descriptor().build(load_matrix(config.kernel))
        inputs = [load_matrix(path, hermitian_required=True) for path in config.matrices]
        spectrum = target.spectrum(inputs)
        value = eval_form(phi, spectrum)
        document = {
            "form": str(phi),
            "target": target.kind,
            "params": target.params(),
            "spectrum": spectrum,
            "value": value,
        }
    if config.out:
        write_report(document, config.out)
    print(repr(value))
    return EXIT_OK


def _verify(config: RunConfig) -> int:
    phi = config.form_descriptor()
    params = config.ineq_params()
    spec = config.quadrature_spec()
    if config.matrices:
        inputs = [load_matrix(path) for path in config.matrices]
        result = inequality_check(config.ineq, phi, inputs, params, spec)
        _emit(result, config)
        return EXIT_OK if result.passed else EXIT_VIOLATION
    report = verify_inequality(config.ineq, phi, config.probe_config(), params, spec)
    _emit(report, config)
    return _probe_exit(report)


def _probe(config: RunConfig) -> int:
    phi, descriptor, probe_config = config.form_descriptor(), config.target_descriptor(), config.probe_config()
    match config.mode:
        case "midpoint":
            report = probe_midpoint(descriptor, phi, probe_config)
        case "second_difference":
            report = probe_second_difference(descriptor, phi, probe_config)
        case "both":
            parts = {
                "midpoint": probe_midpoint(descriptor, phi, probe_config),
                "second_difference": probe_second_difference(descriptor, phi, probe_config),
            }
            report = merge_reports(f"probe both target={descriptor.kind} form={phi}", config.seed, parts)
        case "reduction":
            report = probe_reduction(descriptor, phi, probe_config)
        case _:
            raise ConfigError(
                f"Unknown probe mode {config.mode!r}; expected midpoint, second_difference, both or reduction"
            )
    _emit(report, config)
    return _probe_exit(report)


def _conjecture(config: RunConfig) -> int:
    descriptor, probe_config = config.target_descriptor(), config.probe_config()
    if config.k is not None:
        report = conjecture_search(config.k, config.n, descriptor, probe_config)
    else:
        parts = {f"k={k},n={n}": conjecture_search(k, n, descriptor, probe_config) for k, n in CONJECTURE_GRID}
        report = merge_reports(f"conjecture grid target={descriptor.kind}", config.seed, parts)
        report.details["candidate_counterexamples"] = len(report.confirmed_violations)
    _emit(report, config)
    return _probe_exit(report)


def _forms(config: RunConfig) -> int:
    check = FORM_CHECKS.get(config.check)
    if check is None:
        raise ConfigError(f"Unknown form check {config.check!r}; expected one of {', '.join(FORM_CHECKS)}")
    phi = config.form_descriptor()
    if config.check == "matrix-concavity":
        report = check(phi, config.n, config.trials, config.seed, r=config.r if config.r is not None else 1.0)
    else:
        report = check(phi, config.n, config.trials, config.seed)
    _emit(report, config)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _compound(config: RunConfig) -> int:
    if config.k is None:
        raise ConfigError("compound needs --k")
    loaded = [load_matrix(path) for path in config.matrices]
    if len(loaded) > 2:
        raise ConfigError(f"compound takes at most two --matrix files, got {len(loaded)}")
    a, b = (loaded + [None, None])[:2]
    n = loaded[0].shape[0] if loaded else config.n
    report = compound_tensor.compound_property_check(n, config.k, config.seed, config.trials, a=a, b=b)
    _emit(report, config)
    return EXIT_OK if report.passed else EXIT_VIOLATION


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "eval": _eval,
    "verify": _verify,
    "probe": _probe,
    "conjecture": _conjecture,
    "forms": _forms,
    "compound": _compound,
}


def run_command(config: RunConfig) -> int:
    """Dispatch a resolved run; 0 clean, 1 confirmed violations, 2 usage or config error, 3 numerical failure."""

    def action() -> int:
        if config.command not in COMMANDS:
            raise ConfigError(f"Unknown command {config.command!r}")
        logger.info("Running command", command=config.command, seed=config.seed, trials=config.trials)
        return COMMANDS[config.command](config)

    return handle_errors(action)


def _run(command: str, config_file: str | None, **flags: Any) -> int:
    def action() -> int:
        config = RunConfig.resolve({"command": command, **flags}, config_file, get_config())
        return run_command(config)

    return handle_errors(action)


@app.command(name="eval")
def evaluate(
    form: str | None = None,
    matrix: list[str] | None = None,
    target: str | None = None,
    kernel: str | None = None,
    r: float | None = None,
    s: float | None = None,
    p: float | None = None,
    q: float | None = None,
    weights: str | None = None,
    out: str | None = None,
    config: str | None = None,
) -> int:
    """Evaluate phi(A) for a matrix file, or phi(F(A_1, ...)) for a target with an explicit kernel.

    Args:
        form: Form descriptor, e.g. trace, ktrace:k=2, seminorm:p=0.5
        matrix: JSON matrix file; repeat for each target argument
        target: epstein, lieb or exp_log
        kernel: JSON matrix file holding K (or H for exp_log)
        weights: Comma-separated exp_log weights
        out: Write a JSON report here
        config: File of key=value run settings
    """
    return _run(
        "eval",
        config,
        form=form,
        matrices=matrix,
        target=target,
        kernel=kernel,
        r=r,
        s=s,
        p=p,
        q=q,
        weights=weights,
        out=out,
    )


@app.command
def verify(
    ineq: str | None = None,
    form: str | None = None,
    n: int | None = None,
    m: int | None = None,
    trials: int | None = None,
    seed: int | None = None,
    threads: int | None = None,
    family: str | None = None,
    p: float | None = None,
    q: float | None = None,
    r: float | None = None,
    s: float | None = None,
    t: float | None = None,
    tau: float | None = None,
    theta: float | None = None,
    p0: float | None = None,
    p1: float | None = None,
    matrix: list[str] | None = None,
    force: bool | None = None,
    confirm_tol: float | None = None,
    out: str | None = None,
    config: str | None = None,
) -> int:
    """Check a named inequality on seeded random inputs, or once on matrix files.

    Args:
        ineq: matrix_hoelder, alt, alt_chain, gt, exp_convex, multi_gt, t_identity, three_matrix, lie_product
            or interpolation
        form: Form descriptor
        n: Matrix dimension
        m: Number of matrices for multi_gt and lie_product
        family: power_product, epstein or lieb_two_var (interpolation only)
        matrix: JSON matrix files used instead of random inputs
        force: Run even when the form is not a Hölder form
        out: Write the JSON report here
        config: File of key=value run settings
    """
    return _run(
        "verify",
        config,
        ineq=ineq,
        form=form,
        n=n,
        m=m,
        trials=trials,
        seed=seed,
        threads=threads,
        family=family,
        p=p,
        q=q,
        r=r,
        s=s,
        t=t,
        tau=tau,
        theta=theta,
        p0=p0,
        p1=p1,
        matrices=matrix,
        force=force,
        confirm_tol=confirm_tol,
        out=out,
    )


@app.command
def probe(
    target: str | None = None,
    form: str | None = None,
    mode: Literal["midpoint", "second_difference", "both", "reduction"] | None = None,
    n: int | None = None,
    m: int | None = None,
    trials: int | None = None,
    seed: int | None = None,
    threads: int | None = None,
    r: float | None = None,
    s: float | None = None,
    p: float | None = None,
    q: float | None = None,
    weights: str | None = None,
    tau_mode: Literal["fixed_half", "uniform"] | None = None,
    tol_abs: float | None = None,
    tol_rel: float | None = None,
    confirm_tol: float | None = None,
    unchecked: bool | None = None,
    force: bool | None = None,
    out: str | None = None,
    config: str | None = None,
) -> int:
    """Probe joint concavity of phi o F for a target map.

    Args:
        target: epstein, lieb or exp_log
        form: Form descriptor
        mode: midpoint, second_difference, both or reduction
        n: Row dimension of the arguments
        m: Columns of K for lieb, number of arguments for exp_log
        unchecked: Lift the exponent constraints, to check that the probe can detect violations
        force: Probe forms that are not Hölder forms
        out: Write the JSON report here
        config: File of key=value run settings
    """
    return _run(
        "probe",
        config,
        target=target,
        form=form,
        mode=mode,
        n=n,
        m=m,
        trials=trials,
        seed=seed,
        threads=threads,
        r=r,
        s=s,
        p=p,
        q=q,
        weights=weights,
        tau_mode=tau_mode,
        tol_abs=tol_abs,
        tol_rel=tol_rel,
        confirm_tol=confirm_tol,
        strict=None if unchecked is None else not unchecked,
        force=force,
        out=out,
    )


@app.command
def conjecture(
    k: int | None = None,
    n: int | None = None,
    target: str | None = None,
    trials: int | None = None,
    seed: int | None = None,
    threads: int | None = None,
    out: str | None = None,
    config: str | None = None,
) -> int:
    """Search for concavity violations of the sum of the k smallest eigenvalues.

    Without --k the search covers (k, n) in (1, 2), (1, 3), (2, 3), (2, 4) and (3, 4).
    """
    return _run("conjecture", config, k=k, n=n, target=target, trials=trials, seed=seed, threads=threads, out=out)


@app.command
def forms(
    form: str | None = None,
    check: Literal["axioms", "hoelder", "concavity", "matrix-concavity", "matrix-hoelder"] | None = None,
    n: int | None = None,
    trials: int | None = None,
    seed: int | None = None,
    r: float | None = None,
    out: str | None = None,
    config: str | None = None,
) -> int:
    """Sample-check properties of a symmetric form.

    Args:
        form: Form descriptor
        check: Property to check
        r: Power for matrix-concavity, in (0, 1]
    """
    return _run("forms", config, form=form, check=check, n=n, trials=trials, seed=seed, r=r, out=out)


@app.command
def compound(
    k: int | None = None,
    n: int | None = None,
    trials: int | None = None,
    seed: int | None = None,
    matrix: list[str] | None = None,
    out: str | None = None,
    config: str | None = None,
) -> int:
    """Check the k-th compound identities on random or given matrices."""
    return _run("compound", config, k=k, n=n, trials=trials, seed=seed, matrices=matrix, out=out)


@app.meta.default
def main(
    *tokens: Annotated[str, Parameter(show=False, allow_leading_hyphen=True)],
    log_level: Literal["debug", "info", "warning", "error", "critical"] = "critical",
) -> int | None:
    """Main entry point with global options."""
    configure_logging(log_level)
    return app(tokens)


if __name__ == "__main__":
    sys.exit(app.meta())
