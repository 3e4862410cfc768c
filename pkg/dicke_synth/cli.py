"""
Command-line interface for Dicke-subspace state synthesis.
Provides compile, simulate, budget, validate, cavity and sweep commands.

Exit codes: 0 success, 2 config error, 3 non-convergence, 4 invariant
violation or compiler precondition failure.
"""

import logging
import math
from contextlib import contextmanager
from functools import partial
from pathlib import Path
from typing import List, NamedTuple, Optional

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from .budget import build_budget
from .cavity import at_detuning, compare_models, run_full_model
from .compiler import PulseCompiler, random_target
from .config import RunConfig, load_config
from .dynamics import integrate, leakage_spectrum, off_target_population, parallel_map
from .exceptions import ConfigError, DickeError, IntegratorError, InvariantViolation, TruncationError
from .oracle import build_full_model, permutation_check, reduction_equivalence, verify_symmetry_invariance
from .reporting import artifact, read_json, write_json, write_trajectory_csv
from .schemas import (
    CheckReport,
    DickeVector,
    ErrorBudget,
    Frame,
    IntegratorConfig,
    ModelComparison,
    PhysicalParams,
    PulseSchedule,
    TargetState,
)
from .settings import get_settings

app = typer.Typer(help="Dicke-subspace pulse compiler and simulator")
console = Console()
logger = logging.getLogger(__name__)

_CONFIG_HELP = "TOML run configuration"
_OUT_HELP = "Output directory (overrides run.out_dir)"
_FRAME_HELP = "Integration frame: lab or rotating (overrides run.frame)"
_SCHEDULE_HELP = "schedule.json from compile (default: compile the configured target)"


def configure_logging(verbose: bool = False):
    level = logging.DEBUG if verbose else getattr(logging, get_settings().log_level.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


@contextmanager
def _exit_on_error():
    try:
        yield
    except DickeError as error:
        console.print(f"[bold red]❌ Error:[/bold red] {escape(str(error))}")
        raise typer.Exit(code=error.exit_code)


def _load(
    config_path: Path,
    out: Optional[Path] = None,
    frame: Optional[Frame] = None,
    seed: Optional[int] = None,
) -> RunConfig:
    config = load_config(config_path)
    overrides = {}
    if out is not None:
        overrides["out_dir"] = out
    if frame is not None:
        overrides["frame"] = frame
    if seed is not None:
        overrides["seed"] = seed
    if overrides:
        config = config.model_copy(update={"run": config.run.model_copy(update=overrides)})
    return config


def _compile(config: RunConfig) -> PulseSchedule:
    return PulseCompiler().compile(config.target.to_target(), config.params())


def _load_schedule(path: Path) -> PulseSchedule:
    """Rebuild a schedule from a compile artifact"""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"schedule artifact {path} does not exist")
    try:
        data = read_json(path)
    except ValueError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None
    if data.get("kind") != "schedule":
        raise ConfigError(f"{path} is a '{data.get('kind')}' artifact; pass the schedule.json written by compile")
    payload = data.get("schedule", {})
    try:
        schedule = PulseSchedule.model_validate(
            {key: payload.get(key) for key in ("segments", "params", "target", "global_phase")}
        )
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"{path}: {first['msg']}", field=field) from None
    logger.debug("loaded %d segments from %s", len(schedule.segments), path)
    return schedule


def _schedule_for(config: RunConfig, schedule_path: Optional[Path]) -> PulseSchedule:
    if schedule_path is None:
        return _compile(config)
    schedule = _load_schedule(schedule_path)
    if schedule.n_qubits != config.target.n_qubits:
        raise ConfigError(
            f"{schedule_path} was compiled for N={schedule.n_qubits}, the config has N={config.target.n_qubits}",
            field="target.n_qubits",
        )
    return schedule


def _format_ms(seconds: float) -> str:
    return f"{seconds * 1e3:.3g} ms"


def _schedule_payload(schedule: PulseSchedule) -> dict:
    return {
        "n_qubits": schedule.n_qubits,
        "segments": [segment.model_dump(mode="json") for segment in schedule.segments],
        "params": schedule.params.model_dump(mode="json", by_alias=True),
        "target": schedule.target.model_dump(mode="json"),
        "total_duration_s": schedule.total_duration,
        "global_phase": schedule.global_phase,
    }


@app.command("compile")
def compile_command(
    config_path: Path = typer.Option(..., "--config", help=_CONFIG_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help=_OUT_HELP),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Compile the configured target into a drive schedule.

    Example:
        python -m dicke_synth compile --config configs/cavity_example.toml
    """
    configure_logging(verbose)
    with _exit_on_error():
        config = _load(config_path, out)
        console.print(f"\n[bold blue]🎯 Compiling target for N={config.target.n_qubits}[/bold blue]")
        compiler = PulseCompiler()
        schedule = compiler.compile(config.target.to_target(), config.params())

        body = {"schedule": _schedule_payload(schedule), "literal_phase_discrepancy_rad": compiler.literal_phase_discrepancy(schedule)}
        path = write_json(config.run.out_dir / "schedule.json", artifact("schedule", config.resolved(), body))

    _print_schedule(schedule)
    console.print(f"\n[dim]Schedule saved to:[/dim] {path}")


@app.command()
def simulate(
    config_path: Path = typer.Option(..., "--config", help=_CONFIG_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help=_OUT_HELP),
    frame: Optional[Frame] = typer.Option(None, "--frame", case_sensitive=False, help=_FRAME_HELP),
    schedule_path: Optional[Path] = typer.Option(None, "--schedule", help=_SCHEDULE_HELP),
    jobs: int = typer.Option(1, "--jobs", help="Worker processes for the leakage spectrum"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Integrate the full ladder Hamiltonian for the configured target, or for
    a schedule.json passed with --schedule.

    Example:
        python -m dicke_synth simulate --config configs/cavity_example.toml --frame rotating
    """
    configure_logging(verbose)
    with _exit_on_error():
        config = _load(config_path, out, frame)
        schedule = _schedule_for(config, schedule_path)
        initial = DickeVector.basis(schedule.n_qubits, config.run.initial_level)
        console.print(f"\n[bold blue]⚛️  Integrating {len(schedule.segments)} segments ({config.run.frame.value} frame)[/bold blue]")
        result = integrate(schedule, initial, config.integrator, config.run.frame)
        leakage = off_target_population(result.final_state, len(schedule.segments))

        body = {
            "schedule": _schedule_payload(schedule),
            "fidelity": result.fidelity_vs_target,
            "norm_drift": result.norm_drift,
            "converged": result.converged,
            "frame": result.frame.value,
            "final_populations": [float(p) for p in result.final_populations],
            "leakage": leakage,
            "rhs_evaluations": result.rhs_evaluations,
        }
        if config.run.spectrum:
            lambda_ = schedule.params.lambda_
            points = leakage_spectrum(
                schedule, initial, config.integrator, [d * lambda_ for d in config.run.spectrum],
                config.run.frame, jobs,
            )
            body["spectrum"] = [point.model_dump(mode="json") for point in points]

        out_dir = config.run.out_dir
        path = write_json(out_dir / "simulation.json", artifact("simulation", config.resolved(), body))
        csv_path = write_trajectory_csv(out_dir / "trajectory.csv", result.times, amplitudes=result.trajectory)

    _print_simulation(result.fidelity_vs_target, result.norm_drift, leakage, result.final_populations, result.converged)
    console.print(f"\n[dim]Report saved to:[/dim] {path}")
    console.print(f"[dim]Trajectory saved to:[/dim] {csv_path}")

    if not result.converged:
        raise typer.Exit(code=IntegratorError.exit_code)


@app.command()
def budget(
    config_path: Path = typer.Option(..., "--config", help=_CONFIG_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help=_OUT_HELP),
    simulation: Optional[Path] = typer.Option(None, "--simulation", help="simulation.json supplying numeric leakage"),
    schedule_path: Optional[Path] = typer.Option(None, "--schedule", help=_SCHEDULE_HELP),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Closed-form decoherence and leakage estimates for the compiled schedule.

    Example:
        python -m dicke_synth budget --config configs/cavity_example.toml --simulation output/simulation.json
    """
    configure_logging(verbose)
    with _exit_on_error():
        config = _load(config_path, out)
        schedule = _schedule_for(config, schedule_path)
        numeric = None
        if simulation is not None:
            if not simulation.exists():
                raise ConfigError(f"simulation artifact {simulation} does not exist")
            data = read_json(simulation)
            if "leakage" not in data:
                raise ConfigError(f"{simulation} has no 'leakage' entry; pass a simulate artifact")
            numeric = float(data["leakage"])

        report = build_budget(schedule, numeric, config.budget.t_d, config.budget.reference_leakage)
        path = write_json(
            config.run.out_dir / "budget.json",
            artifact("budget", config.resolved(), {"budget": report.model_dump(mode="json")}),
        )

    _print_budget(report)
    console.print(f"\n[dim]Budget saved to:[/dim] {path}")


@app.command()
def validate(
    config_path: Path = typer.Option(..., "--config", help=_CONFIG_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help=_OUT_HELP),
    frame: Optional[Frame] = typer.Option(None, "--frame", case_sensitive=False, help=_FRAME_HELP),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for random schedules (overrides run.seed)"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Check the symmetric reduction against brute-force 2^N integration.

    Example:
        python -m dicke_synth validate --config configs/validate_n3.toml --seed 7
    """
    configure_logging(verbose)
    with _exit_on_error():
        config = _load(config_path, out, frame, seed)
        schedule = _compile(config)
        console.print(f"\n[bold blue]🔍 Full-space oracle for N={schedule.n_qubits}[/bold blue]")
        report = run_oracle_checks(config, schedule)
        path = write_json(
            config.run.out_dir / "validate.json",
            artifact("validate", config.resolved(), {"report": report.model_dump(mode="json")}),
        )
        _print_checks(report)
        console.print(f"\n[dim]Report saved to:[/dim] {path}")
        if not report.is_valid:
            raise InvariantViolation(f"{len(report.errors)} oracle checks failed")


def run_oracle_checks(config: RunConfig, schedule: PulseSchedule) -> CheckReport:
    """Reduction equivalence, symmetry invariance, permutation invariance and the negative control"""
    limits = config.validate_
    frame = config.run.frame
    initial = DickeVector.basis(schedule.n_qubits, config.run.initial_level)
    rng = np.random.default_rng(config.run.seed)
    report = CheckReport(name="full-space oracle")
    n_qubits = schedule.n_qubits

    deviation = reduction_equivalence(schedule, config.integrator, initial, frame)
    report.require("reduction_equivalence", deviation, limits.max_deviation, "max_amplitude_deviation")

    symmetric = verify_symmetry_invariance(schedule, config.integrator, initial, frame)
    report.require("symmetry_invariance", symmetric.max_asymmetric_population, limits.max_asymmetric, "max_asymmetric_population")
    report.metrics["final_symmetric_fidelity"] = symmetric.final_symmetric_fidelity

    if schedule.segments:
        operator = build_full_model(schedule.params, n_qubits).operator_at(0.0, schedule.segments[0], frame)
        report.require("permutation_invariance", permutation_check(operator, n_qubits, rng), 1e-12, "permutation_deviation")

        weights = [limits.control_weight] + [1.0] * (n_qubits - 1)
        control = verify_symmetry_invariance(schedule, config.integrator, initial, frame, qubit_weights=weights)
        report.metrics["negative_control_asymmetric_population"] = control.max_asymmetric_population
        if control.max_asymmetric_population < limits.min_control:
            report.add_warning(
                "negative_control",
                f"asymmetric drive left only {control.max_asymmetric_population:.2e} outside the symmetric subspace; "
                "asymmetric transitions are detuned by multiples of lambda",
                quantity="negative_control_asymmetric_population",
            )
    else:
        report.add_warning("negative_control", "empty schedule; nothing drives the qubits asymmetrically")

    compiler = PulseCompiler()
    worst = 0.0
    for _ in range(limits.random_schedules):
        random_schedule = compiler.compile(random_target(n_qubits, rng), schedule.params)
        worst = max(worst, reduction_equivalence(random_schedule, config.integrator, frame=frame))
    if limits.random_schedules:
        report.require("random_reduction_equivalence", worst, limits.max_deviation, "random_max_amplitude_deviation")
    return report


def _cavity_point(delta_c: float, target: TargetState, params: PhysicalParams, config: IntegratorConfig, frame: Frame) -> ModelComparison:
    swept = at_detuning(params, delta_c)
    schedule = PulseCompiler().compile(target, swept)
    return compare_models(schedule, swept, config, frame)


@app.command()
def cavity(
    config_path: Path = typer.Option(..., "--config", help=_CONFIG_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help=_OUT_HELP),
    frame: Optional[Frame] = typer.Option(None, "--frame", case_sensitive=False, help=_FRAME_HELP),
    schedule_path: Optional[Path] = typer.Option(None, "--schedule", help=_SCHEDULE_HELP),
    jobs: int = typer.Option(1, "--jobs", help="Worker processes for the delta_c sweep"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Compare the atoms-plus-cavity model with the dispersive effective model.

    Example:
        python -m dicke_synth cavity --config configs/cavity_example.toml --jobs 4
    """
    configure_logging(verbose)
    with _exit_on_error():
        config = _load(config_path, out, frame)
        schedule = _schedule_for(config, schedule_path)
        params = schedule.params
        console.print(f"\n[bold blue]📡 Atom-cavity comparison (delta_c = {params.delta_c / params.g:.3g} g)[/bold blue]")
        run = run_full_model(schedule, params, config.integrator, frame=config.run.frame)
        comparison = compare_models(schedule, params, config.integrator, config.run.frame, full_run=run)

        body = {"comparison": comparison.model_dump(mode="json"), "schedule": _schedule_payload(schedule)}
        sweep_results: List[ModelComparison] = []
        deltas = config.cavity.delta_c_sweep
        if deltas:
            worker = partial(
                _cavity_point, target=schedule.target, params=params, config=config.integrator, frame=config.run.frame,
            )
            sweep_results = parallel_map(worker, deltas, jobs)
            body["sweep"] = [{"delta_c": d, **c.model_dump(mode="json")} for d, c in zip(deltas, sweep_results)]
            body["disagreement_slope"] = disagreement_slope(deltas, [c.disagreement for c in sweep_results])

        out_dir = config.run.out_dir
        path = write_json(out_dir / "cavity.json", artifact("cavity", config.resolved(), body))
        csv_path = write_trajectory_csv(
            out_dir / "cavity_trajectory.csv", run.times,
            populations=run.atomic_populations, photon_populations=run.photon_populations,
        )
        _print_cavity(comparison, deltas, sweep_results, params.g, body.get("disagreement_slope"))
        console.print(f"\n[dim]Report saved to:[/dim] {path}")
        console.print(f"[dim]Trajectory saved to:[/dim] {csv_path}")

        if not comparison.truncation_ok or any(not c.truncation_ok for c in sweep_results):
            raise TruncationError(f"photon tail above bound even at n_max={get_settings().n_max_ceiling}")


def disagreement_slope(deltas: List[float], disagreements: List[float]) -> Optional[float]:
    """Log-log slope of disagreement against delta_c"""
    points = [(d, v) for d, v in zip(deltas, disagreements) if v > 0]
    if len(points) < 2:
        return None
    x = np.log([d for d, _ in points])
    y = np.log([v for _, v in points])
    return float(np.polyfit(x, y, 1)[0])


class SweepTask(NamedTuple):
    label: str
    value: Optional[float]
    params: PhysicalParams
    target: TargetState


def evaluate_point(task: SweepTask, config: IntegratorConfig, frame: Frame) -> dict:
    """Compile and integrate one sweep point"""
    schedule = PulseCompiler().compile(task.target, task.params)
    result = integrate(schedule, None, config, frame)
    return {
        "label": task.label,
        "value": task.value,
        "schedule": _schedule_payload(schedule),
        "fidelity": result.fidelity_vs_target,
        "leakage": off_target_population(result.final_state, len(schedule.segments)),
        "norm_drift": result.norm_drift,
        "converged": result.converged,
    }


def sweep_tasks(config: RunConfig) -> List[SweepTask]:
    params = config.params()
    target = config.target.to_target()
    section = config.sweep
    tasks = []
    if section.parameter is not None:
        field = "lambda_" if section.parameter == "lambda" else section.parameter
        for i, value in enumerate(section.values):
            changes = {field: value}
            if section.parameter == "delta_c" and config.physical.lambda_ is None:
                changes["lambda_"] = params.g ** 2 / value
            tasks.append(SweepTask(f"{section.parameter}_{i:03d}", value, params.with_updates(**changes), target))
    rng = np.random.default_rng(config.run.seed)
    for i in range(section.random_targets):
        tasks.append(SweepTask(f"target_{i:03d}", None, params, random_target(target.n_qubits, rng)))
    if not tasks:
        raise ConfigError("set sweep.parameter with values, or sweep.random_targets", field="sweep")
    return tasks


@app.command()
def sweep(
    config_path: Path = typer.Option(..., "--config", help=_CONFIG_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help=_OUT_HELP),
    frame: Optional[Frame] = typer.Option(None, "--frame", case_sensitive=False, help=_FRAME_HELP),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for random targets (overrides run.seed)"),
    jobs: int = typer.Option(1, "--jobs", help="Worker processes"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Compile and simulate every sweep point, one JSON file per point.

    Example:
        python -m dicke_synth sweep --config configs/selectivity_sweep.toml --jobs 4
    """
    configure_logging(verbose)
    with _exit_on_error():
        config = _load(config_path, out, frame, seed)
        tasks = sweep_tasks(config)
        console.print(f"\n[bold blue]🚀 Sweeping {len(tasks)} points on {max(jobs, 1)} workers[/bold blue]")
        results = parallel_map(partial(evaluate_point, config=config.integrator, frame=config.run.frame), tasks, jobs)

        resolved = config.resolved()
        out_dir = config.run.out_dir
        for point in results:
            write_json(out_dir / "sweep" / f"{point['label']}.json", artifact("sweep_point", resolved, point))
        summary = [{k: point[k] for k in ("label", "value", "fidelity", "leakage", "norm_drift", "converged")} for point in results]
        path = write_json(out_dir / "sweep.json", artifact("sweep", resolved, {"points": summary}))

    _print_sweep(results)
    console.print(f"\n[dim]Summary saved to:[/dim] {path}")
    if not all(point["converged"] for point in results):
        raise typer.Exit(code=IntegratorError.exit_code)


def _print_schedule(schedule: PulseSchedule):
    """Pretty-print the per-segment table"""
    omega0 = schedule.params.omega0
    table = Table(title="Pulse Schedule", show_header=True, header_style="bold cyan")
    table.add_column("Step", style="cyan", justify="right")
    table.add_column("Transition")
    table.add_column("ω - ω₀ (kHz)", justify="right")
    table.add_column("Phase (rad)", justify="right")
    table.add_column("Duration", justify="right")

    for segment in schedule.segments:
        table.add_row(
            str(segment.step_index),
            f"{segment.lower_level} → {segment.lower_level + 1}",
            f"{(segment.frequency_rad_s - omega0) / (2 * math.pi * 1e3):.4g}",
            f"{segment.phase_rad:.4f}",
            _format_ms(segment.duration_s),
        )

    console.print("\n")
    if schedule.segments:
        console.print(table)
    else:
        console.print("[yellow]⚠️  Target is the ground level; empty schedule[/yellow]")
    console.print(f"[bold]Total time:[/bold] {_format_ms(schedule.total_duration)}")


def _print_simulation(fidelity: float, norm_drift: float, leakage: float, populations, converged: bool):
    """Pretty-print the integration outcome"""
    if converged:
        status_text = "[bold green]✓ CONVERGED[/bold green]"
        status_color = "green"
    else:
        status_text = "[bold red]✗ NORM DRIFT ABOVE TOLERANCE[/bold red]"
        status_color = "red"

    summary_text = f"""
{status_text}

Fidelity vs target:  {fidelity:.8f}
Leakage:             [yellow]{leakage:.3e}[/yellow]
Norm drift:          {norm_drift:.2e}
"""
    console.print("\n")
    console.print(Panel(summary_text, title="Simulation Summary", border_style=status_color))

    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("Level k", style="cyan", justify="right")
    table.add_column("|c_k|²", justify="right")
    for k, population in enumerate(populations):
        table.add_row(str(k), f"{population:.6e}")
    console.print(table)


def _print_budget(report: ErrorBudget):
    """Pretty-print the error budget"""
    table = Table(title="Error Budget", show_header=True, header_style="bold cyan")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    table.add_column("Basis", style="dim")

    flags = report.interpretation_flags
    table.add_row("Total time", _format_ms(report.total_time_s), "")
    table.add_row("T_d", f"{report.t_d_s:.4g} s", flags.get("t_d", ""))
    table.add_row("κ", f"{report.kappa_hz:.4g} Hz", "(g/δ_c)²/T_c")
    table.add_row("Decoherence", f"{report.decoherence_infidelity:.4e}", flags.get("decoherence", "t/T_d + tκ"))
    table.add_row("Leakage (analytic)", f"{report.leakage_analytic:.4e}", flags.get("leakage_analytic", ""))
    table.add_row("Leakage (analytic, alt)", f"{report.leakage_analytic_alt:.4e}", flags.get("leakage_analytic_alt", ""))
    if report.leakage_numeric is not None:
        table.add_row("Leakage (numeric)", f"{report.leakage_numeric:.4e}", "integrator")
    table.add_row("Total error", f"[bold]{report.total_error:.4e}[/bold]", f"leakage: {flags.get('leakage_source', '')}")
    if "reference_total" in flags:
        table.add_row("Total with reference leakage", f"{float(flags['reference_total']):.4e}", "")

    console.print("\n")
    console.print(table)


def _print_checks(report: CheckReport):
    """Pretty-print oracle metrics and failures"""
    if report.is_valid:
        status_text = "[bold green]✓ ALL ORACLE CHECKS PASSED[/bold green]"
        status_color = "green"
    else:
        status_text = f"[bold red]✗ {len(report.errors)} CHECKS FAILED[/bold red]"
        status_color = "red"

    lines = "\n".join(f"{name:<42}{value:.3e}" for name, value in sorted(report.metrics.items()))
    console.print("\n")
    console.print(Panel(f"\n{status_text}\n\n{lines}\n", title=report.name, border_style=status_color))

    if report.errors:
        error_table = Table(show_header=True, header_style="bold red")
        error_table.add_column("Check", style="red")
        error_table.add_column("Message")
        for error in report.errors:
            error_table.add_row(error.rule, error.message)
        console.print(error_table)

    for warning in report.warnings:
        console.print(f"[yellow]⚠️  {warning.rule}: {warning.message}[/yellow]")


def _print_cavity(comparison: ModelComparison, deltas, sweep, g: float, slope: Optional[float]):
    """Pretty-print the model comparison and the optional delta_c sweep"""
    status_color = "green" if comparison.truncation_ok else "red"
    summary_text = f"""
Fidelity full vs effective:  {comparison.fidelity_full_vs_effective:.6f}
Disagreement:                {comparison.disagreement:.3e}
Peak photon population:      {comparison.max_photon_population:.3e}
Validity ratio g√(n+1)/δ_c:  {comparison.validity_ratio:.3g}
Fock truncation used:        {comparison.n_max_used}
"""
    console.print("\n")
    console.print(Panel(summary_text, title="Atom-Cavity Comparison", border_style=status_color))

    if sweep:
        table = Table(show_header=True, header_style="bold cyan")
        table.add_column("δ_c / g", style="cyan", justify="right")
        table.add_column("Disagreement", justify="right")
        table.add_column("Peak photons", justify="right")
        table.add_column("n_max", justify="right")
        for delta_c, point in zip(deltas, sweep):
            table.add_row(f"{delta_c / g:.3g}", f"{point.disagreement:.3e}", f"{point.max_photon_population:.3e}", str(point.n_max_used))
        console.print(table)
        if slope is not None:
            console.print(f"[bold]Log-log slope:[/bold] {slope:.2f}")


def _print_sweep(results):
    """Pretty-print one row per sweep point"""
    table = Table(title="Sweep", show_header=True, header_style="bold cyan")
    table.add_column("Point", style="cyan")
    table.add_column("Value", justify="right")
    table.add_column("Total time", justify="right")
    table.add_column("Fidelity", justify="right")
    table.add_column("Leakage", justify="right")
    table.add_column("Norm drift", justify="right")

    for point in results:
        table.add_row(
            point["label"],
            "-" if point["value"] is None else f"{point['value']:.4g}",
            _format_ms(point["schedule"]["total_duration_s"]),
            f"{point['fidelity']:.6f}",
            f"{point['leakage']:.3e}",
            f"{point['norm_drift']:.1e}",
        )

    console.print("\n")
    console.print(table)


if __name__ == "__main__":
    app()
