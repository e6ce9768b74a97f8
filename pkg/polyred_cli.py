#!/usr/bin/env python3
"""
polyred command-line interface

Exact-arithmetic checks for polysymplectic and polycosymplectic reduction:
- structure identification, orthogonals, linear reduction and conditions
- the M × ℝ lift of polycosymplectic data and its actions
- worked examples with machine-checked expectations
- polynomial field-equation residuals, k-vector solving and lifted dynamics
- deterministic randomized property campaigns

Reports go to stdout as JSON (``--human`` renders them with rich); logs go
to stderr. Exit codes: 0 success, 1 property violated, 2 bad input.

Usage:
    polyred validate data/standard_k2n1.json
    polyred check --condition A2 --input data/bad_action.json
    polyred example r6-cross --human
    polyred dynamics residual --model k=2,n=1 --hamiltonian data/example_hamiltonian.json \\
        --section data/example_section.json
    POLYRED_THREADS=8 polyred campaign --property LIFT_IFF --trials 1000
"""

import asyncio
import json
from enum import Enum
from typing import Annotated, Callable, Optional

import typer
from rich.console import Console
from rich.table import Table

from adapters.logging.campaign_logger import get_campaign_logger
from adapters.storage.json_storage import JsonStorageAdapter, to_jsonable
from config.settings import settings
from core.application.command_use_cases import CommandResult, PolyredCommands
from core.domain.errors import PolyredError
from core.domain.models import PropertyId

app = typer.Typer(name="polyred", help="Exact polysymplectic and polycosymplectic reduction checks",
                  no_args_is_help=True, add_completion=False)
dynamics_app = typer.Typer(help="Polynomial field equations and k-vector fields", no_args_is_help=True)
app.add_typer(dynamics_app, name="dynamics")

stderr = Console(stderr=True)
stdout = Console()

Human = Annotated[bool, typer.Option("--human", help="Render the report as text")]
Output = Annotated[Optional[str], typer.Option("--output", "-o", help="Also export the report to a JSON file")]


class Mode(str, Enum):
    ksym = "kSym"
    kcosym = "kCosym"


def _commands(threads: Optional[int] = None) -> PolyredCommands:
    return PolyredCommands(
        storage=JsonStorageAdapter(settings.storage_path),
        trial_logger=get_campaign_logger(),
        threads=threads if threads is not None else settings.threads,
        box=settings.coefficient_box,
    )


def _render_human(payload: dict) -> None:
    status = "[green]ok[/green]" if payload.get("success") else "[red]FAILED[/red]"
    stdout.rule(f"{payload.get('command', 'polyred')} {status}")

    expectations = payload.get("expectations")
    if expectations:
        table = Table("check", "holds", "detail")
        for e in expectations:
            table.add_row(e["name"], "yes" if e["holds"] else "[red]no[/red]", e.get("detail") or "")
        stdout.print(table)

    counters = payload.get("counters")
    if counters:
        table = Table("counter", "trials")
        for key, value in counters.items():
            table.add_row(key, str(value))
        stdout.print(table)

    summary = Table("field", "value", show_header=False)
    for key, value in payload.items():
        if key in ("expectations", "counters", "trials") or isinstance(value, (dict, list)):
            continue
        summary.add_row(key, str(value))
    stdout.print(summary)

    failures = payload.get("failures")
    if failures:
        stdout.print(f"[red]{len(failures)} failing trial(s)[/red]; first:")
        stdout.print_json(json.dumps(failures[0]))


def _emit(payload: dict, human: bool, output: Optional[str]) -> None:
    if human:
        _render_human(payload)
    else:
        typer.echo(json.dumps(payload, indent=2))
    if output:
        asyncio.run(JsonStorageAdapter(settings.storage_path).export_to_file(payload, output))


def _run(action: Callable[[], CommandResult], human: bool, output: Optional[str]) -> None:
    """Run one handler and map its outcome onto the exit-code contract"""
    try:
        result = action()
        payload, code = to_jsonable(result.report), result.exit_code
    except PolyredError as e:
        payload, code = {"success": False, "error": e.to_dict()}, e.exit_code
        stderr.print(f"[red]error:[/red] {e}")
    _emit(payload, human, output)
    raise typer.Exit(code)


@app.command()
def validate(structure: Annotated[str, typer.Argument(help="Structure JSON file")],
             human: Human = False, output: Output = None) -> None:
    """Identify a form family as polysymplectic, polycosymplectic or invalid"""
    _run(lambda: _commands().validate(structure), human, output)


@app.command()
def orthogonal(structure: Annotated[str, typer.Option("--structure", "-s")],
               subspace: Annotated[str, typer.Option("--subspace")],
               forms: Annotated[Optional[str], typer.Option("--forms", help="1-based form indices, e.g. 1,3")] = None,
               double: Annotated[bool, typer.Option("--double", help="Return S^ωω instead of S^ω")] = False,
               human: Human = False, output: Output = None) -> None:
    """Poly-orthogonal complement of a subspace"""
    _run(lambda: _commands().orthogonal(structure, subspace, forms, double), human, output)


@app.command()
def reduce(action: Annotated[str, typer.Option("--input", "-i", help="Action JSON file")],
           human: Human = False, output: Output = None) -> None:
    """Linear reduction T / g̃_μ at a point"""
    _run(lambda: _commands().reduce(action), human, output)


@app.command()
def check(condition: Annotated[str, typer.Option("--condition", "-c")],
          action: Annotated[str, typer.Option("--input", "-i", help="Action JSON file")],
          human: Human = False, output: Output = None) -> None:
    """Check NONDEG_POLYSYM, NONDEG_POLYCO, A1, A2, C1 or ALBERT_K1"""
    _run(lambda: _commands().check(action, condition), human, output)


@app.command()
def lift(source: Annotated[str, typer.Option("--input", "-i")],
         action: Annotated[bool, typer.Option("--action", help="Input is action data")] = False,
         human: Human = False, output: Output = None) -> None:
    """Lift polycosymplectic data to M × ℝ"""
    _run(lambda: _commands().lift(source, action), human, output)


@app.command()
def example(name: Annotated[str, typer.Argument(help="Example name, or 'list'")] = "list",
            human: Human = False, output: Output = None) -> None:
    """Reproduce a built-in worked example"""
    _run(lambda: _commands().example(name), human, output)


ModelOpt = Annotated[str, typer.Option("--model", "-m", help="k=<int>,n=<int>[,cosym=0]")]
HamiltonianOpt = Annotated[Optional[str], typer.Option("--hamiltonian", help="Polynomial JSON file")]
ExprOpt = Annotated[Optional[str], typer.Option("--expr", help="Hamiltonian as an expression")]
KVectorOpt = Annotated[Optional[str], typer.Option("--kvector", help="k-vector JSON; canonical one if omitted")]


@dynamics_app.command("residual")
def dynamics_residual(model: ModelOpt, section: Annotated[str, typer.Option("--section")],
                      hamiltonian: HamiltonianOpt = None, expr: ExprOpt = None,
                      human: Human = False, output: Output = None) -> None:
    """Field-equation residuals of a polynomial section"""
    _run(lambda: _commands().dynamics_residual(model, section, hamiltonian, expr), human, output)


@dynamics_app.command("solve")
def dynamics_solve(point: Annotated[str, typer.Option("--point", help="Comma-separated rationals")],
                   model: Annotated[Optional[str], typer.Option("--model", "-m")] = None,
                   structure: Annotated[Optional[str], typer.Option("--structure", "-s")] = None,
                   hamiltonian: HamiltonianOpt = None, expr: ExprOpt = None,
                   mode: Annotated[Optional[Mode], typer.Option("--mode")] = None,
                   human: Human = False, output: Output = None) -> None:
    """Solve the k-vector equation at one point"""
    _run(lambda: _commands().dynamics_solve(point, model, structure, hamiltonian, expr,
                                            mode.value if mode else None), human, output)


@dynamics_app.command("obstruction")
def dynamics_obstruction(model: ModelOpt, hamiltonian: HamiltonianOpt = None, expr: ExprOpt = None,
                         kvector: KVectorOpt = None,
                         section: Annotated[Optional[str], typer.Option("--section")] = None,
                         human: Human = False, output: Output = None) -> None:
    """Integrability obstruction of the lifted k-vector"""
    _run(lambda: _commands().dynamics_obstruction(model, hamiltonian, expr, kvector, section), human, output)


@dynamics_app.command("lift-verify")
def dynamics_lift_verify(model: ModelOpt, hamiltonian: HamiltonianOpt = None, expr: ExprOpt = None,
                         kvector: KVectorOpt = None, human: Human = False, output: Output = None) -> None:
    """Verify that the lifted k-vector solves the lifted equation"""
    _run(lambda: _commands().dynamics_lift_verify(model, hamiltonian, expr, kvector), human, output)


@app.command()
def campaign(property_id: Annotated[PropertyId, typer.Option("--property", "-p")],
             trials: Annotated[Optional[int], typer.Option("--trials", "-n")] = None,
             seed: Annotated[Optional[int], typer.Option("--seed")] = None,
             dim_max: Annotated[Optional[int], typer.Option("--dim-max")] = None,
             k_max: Annotated[Optional[int], typer.Option("--k-max")] = None,
             adversarial: Annotated[Optional[str], typer.Option("--adversarial", help="Fraction such as 1/4")] = None,
             threads: Annotated[Optional[int], typer.Option("--threads")] = None,
             serial: Annotated[bool, typer.Option("--serial", help="Run trials one after another")] = False,
             replay: Annotated[Optional[int], typer.Option("--replay", help="Re-run a single trial")] = None,
             save: Annotated[bool, typer.Option("--save", help="Also store the report under the storage path")] = False,
             metrics: Annotated[bool, typer.Option("--metrics", help="Embed per-trial timing metrics")] = False,
             human: Human = False, output: Output = None) -> None:
    """Run a deterministic randomized property campaign"""
    def action() -> CommandResult:
        commands = _commands(threads)
        config = commands.campaign_config(
            property_id=property_id,
            trials=trials if trials is not None else settings.default_trials,
            master_seed=seed if seed is not None else settings.master_seed,
            dim_max=dim_max if dim_max is not None else settings.dim_max,
            k_max=k_max if k_max is not None else settings.k_max,
            adversarial_fraction=adversarial if adversarial is not None else settings.adversarial_fraction,
        )
        return commands.campaign(config, serial=serial, replay=replay, save=save, metrics=metrics)

    _run(action, human, output)


def main() -> None:
    app()


if __name__ == "__main__":
    main()
