"""
Command handlers behind the polyred CLI

Every handler returns a CommandResult: a JSON-ready report and the exit code
(0 when the audited property holds, 1 when it is violated). Input problems
surface as PolyredError subclasses and are mapped to exit codes by the CLI.
"""

import asyncio
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import structlog
from pydantic import ValidationError

from core.algebra.exactlin import to_fraction
from core.algebra.polynomials import MultiPoly
from core.domain.errors import InputError
from core.domain.models import (CampaignConfig, CampaignReport, ConditionId,
                                FormFamily, PolyKVector, SolveMode,
                                StructureTag, TrialOutcome)
from core.domain.ports import LoggingPort, StoragePort
from core.geometry.dynamics import (hamiltonian_kvector, hddw_residual,
                                    integrability_obstruction,
                                    lift_dynamics_verify,
                                    lifted_section_obstruction,
                                    solve_hamiltonian_kvector)
from core.geometry.examples import builtin_example, example_names
from core.geometry.lift import (equivalence_check, lift_action, lift_structure,
                                recover, verify_lift_lemma)
from core.geometry.reduction import (check_condition, dimension_check,
                                     linear_reduce)
from core.geometry.standard_models import StandardCoordinates
from core.geometry.structures import (double_orthogonal, identify_structure,
                                      poly_orthogonal, reeb_solve)

from .campaign_use_cases import CampaignRunner

logger = structlog.get_logger(__name__)


@dataclass
class CommandResult:
    report: Dict[str, Any]
    exit_code: int = 0


def parse_model(text: str) -> StandardCoordinates:
    """Parse ``k=2,n=1`` (optionally ``,cosym=0``) into standard coordinates"""
    fields: Dict[str, str] = {}
    for part in text.split(","):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise InputError(f"model field {part!r} is not of the form key=value")
        fields[key.strip()] = value.strip()
    unknown = set(fields) - {"k", "n", "cosym"}
    if unknown or not {"k", "n"} <= set(fields):
        raise InputError(f"model must read k=<int>,n=<int>[,cosym=0|1], got {text!r}")
    try:
        k, n = int(fields["k"]), int(fields["n"])
        cosym = bool(int(fields.get("cosym", "1")))
    except ValueError as e:
        raise InputError(f"model values must be integers: {text!r}") from e
    return StandardCoordinates(k, n, cosym)


def parse_vector(text: str) -> List:
    """Comma-separated rationals"""
    return [to_fraction(x.strip()) for x in text.split(",") if x.strip()]


def parse_indices(text: str, k: int) -> List[int]:
    """1-based form indices ``1,3`` into 0-based library indices"""
    try:
        picked = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise InputError(f"form indices must be integers, got {text!r}") from e
    bad = [i for i in picked if not 1 <= i <= k]
    if bad:
        raise InputError(f"form indices {bad} outside 1..{k}")
    return [i - 1 for i in picked]


def _structure_report(forms: FormFamily) -> Dict[str, Any]:
    kind = identify_structure(forms)
    report: Dict[str, Any] = {
        "dim": forms.dim,
        "k": forms.k,
        "kind": kind.tag,
        "diagnostics": list(kind.diagnostics),
        "metrics": kind.metrics,
    }
    if kind.tag == StructureTag.POLYCOSYMPLECTIC:
        report["reeb"] = list(reeb_solve(forms).reeb)
    return report


class PolyredCommands:
    """One method per CLI subcommand"""

    def __init__(self, storage: StoragePort, trial_logger: Optional[LoggingPort] = None,
                 threads: int = 4, box: int = 2):
        if threads < 1:
            raise InputError(f"threads must be at least 1, got {threads}")
        self.storage = storage
        self.trial_logger = trial_logger
        self.threads = threads
        self.box = box

    # structures

    def validate(self, structure: Any) -> CommandResult:
        forms = self.storage.load_structure(structure)
        report = {"command": "validate", **_structure_report(forms)}
        report["success"] = report["kind"] != StructureTag.INVALID
        return CommandResult(report, 0 if report["success"] else 1)

    def orthogonal(self, structure: Any, subspace: Any, forms_arg: Optional[str] = None,
                   double: bool = False) -> CommandResult:
        forms = self.storage.load_structure(structure)
        space = self.storage.load_subspace(subspace)
        indices = parse_indices(forms_arg, forms.k) if forms_arg else None
        result = (double_orthogonal if double else poly_orthogonal)(space, forms, indices)
        report = {
            "command": "orthogonal",
            "double": double,
            "forms": [i + 1 for i in indices] if indices is not None else list(range(1, forms.k + 1)),
            "subspace": space,
            "result": result,
            "success": True,
        }
        return CommandResult(report)

    # reduction

    def reduce(self, action: Any) -> CommandResult:
        data = self.storage.load_action(action)
        reduction = linear_reduce(data)
        report: Dict[str, Any] = {
            "command": "reduce",
            "reduced": reduction.reduced,
            "projection": reduction.projection,
            "reduced_kind": reduction.kind.tag,
            "diagnostics": list(reduction.kind.diagnostics),
            "condition": reduction.condition,
            "well_defined": reduction.well_defined,
            "consistent": reduction.consistent,
        }
        if data.g_dim is not None and data.regular:
            dims = dimension_check(data, data.g_dim)
            report["dimension"] = {**vars(dims), "formula_holds": dims.formula_holds,
                                   "regularity_consistent": dims.regularity_consistent}
        report["success"] = reduction.consistent and reduction.well_defined
        return CommandResult(report, 0 if report["success"] else 1)

    def check(self, action: Any, condition: str) -> CommandResult:
        try:
            condition_id = ConditionId(condition)
        except ValueError as e:
            raise InputError(f"unknown condition {condition!r}; known: {[c.value for c in ConditionId]}") from e
        data = self.storage.load_action(action)
        result = check_condition(data, condition_id)
        report = {"command": "check", "condition": condition_id, "holds": result.holds,
                  "lhs": result.lhs, "rhs": result.rhs, "success": result.holds}
        if result.per_index:
            report["per_index"] = list(result.per_index)
        if result.direct_sum is not None:
            report["direct_sum"] = result.direct_sum
        return CommandResult(report, 0 if result.holds else 1)

    # lift

    def lift(self, source: Any, as_action: bool = False) -> CommandResult:
        if as_action:
            return self._lift_action(source)
        forms = self.storage.load_structure(source)
        lifted = lift_structure(forms, strict=False)
        recovered = recover(lifted) == forms
        agree = (lifted.base_kind.tag == StructureTag.POLYCOSYMPLECTIC) == \
            (lifted.lifted_kind.tag == StructureTag.POLYSYMPLECTIC)
        report = {
            "command": "lift",
            "lifted": lifted.lifted,
            "s_index": lifted.s_index,
            "base_kind": lifted.base_kind.tag,
            "lifted_kind": lifted.lifted_kind.tag,
            "lemma_applies": lifted.lemma_applies,
            "verdicts_agree": agree,
            "recovered": recovered,
        }
        report["success"] = recovered and (agree or not lifted.lemma_applies)
        return CommandResult(report, 0 if report["success"] else 1)

    def _lift_action(self, source: Any) -> CommandResult:
        data = self.storage.load_action(source)
        lifted = lift_action(data)
        lemma = verify_lift_lemma(data)
        equivalence = equivalence_check(data, strict=False)
        report = {
            "command": "lift",
            "action": True,
            "lifted": lifted,
            "lemma": {"isotropy": lemma.isotropy, "orthogonal": lemma.orthogonal,
                      "double_orthogonal": lemma.double_orthogonal,
                      "regularity_preserved": lemma.regularity_preserved, "holds": lemma.holds},
            "equivalence": {"base": equivalence.base.holds, "lifted": equivalence.lifted.holds,
                            "c1": equivalence.c1.holds, "a2_lifted": equivalence.a2_lifted.holds,
                            "verdicts_agree": equivalence.verdicts_agree,
                            "chain_agree": equivalence.chain_agree},
        }
        report["success"] = lemma.holds and equivalence.verdicts_agree and equivalence.chain_agree
        return CommandResult(report, 0 if report["success"] else 1)

    # examples

    def example(self, name: Optional[str] = None) -> CommandResult:
        if name is None or name == "list":
            return CommandResult({"command": "example", "available": example_names(), "success": True})
        bundle = builtin_example(name)
        report = {
            "command": "example",
            "name": bundle.spec.name,
            "parameters": bundle.spec.parameters,
            "forms": bundle.forms,
            "subspaces": bundle.subspaces,
            "expectations": bundle.expectations,
            "extras": bundle.extras,
            "success": bundle.passed,
        }
        return CommandResult(report, 0 if bundle.passed else 1)

    # dynamics

    def _hamiltonian(self, coords: StandardCoordinates, source: Any = None,
                     expr: Optional[str] = None) -> MultiPoly:
        if expr is not None:
            return MultiPoly.from_expr(coords.names(), expr)
        if source is None:
            raise InputError("a Hamiltonian is required (file or expression)")
        return self.storage.load_polynomial(source).with_variables(coords.names())

    def _kvector(self, coords: StandardCoordinates, h: MultiPoly, source: Any = None) -> PolyKVector:
        if source is None:
            return hamiltonian_kvector(coords, h)
        x = self.storage.load_kvector(source)
        if list(x.variables) != coords.names():
            raise InputError(f"k-vector coordinates {list(x.variables)} do not match {coords.names()}")
        return x

    def dynamics_residual(self, model: str, section: Any, hamiltonian: Any = None,
                          expr: Optional[str] = None) -> CommandResult:
        coords = parse_model(model)
        poly_section = self.storage.load_section(section)
        if (poly_section.k, poly_section.n) != (coords.k, coords.n) or not coords.cosymplectic:
            raise InputError(f"section of shape (k={poly_section.k}, n={poly_section.n}) on model {model!r}")
        h = self._hamiltonian(coords, hamiltonian, expr)
        residual = hddw_residual(h, poly_section)
        report = {"command": "dynamics residual", "model": model, "hamiltonian": h,
                  "q_residuals": residual.q_residuals, "p_residuals": residual.p_residuals,
                  "solves": residual.solves, "success": residual.solves}
        return CommandResult(report, 0 if residual.solves else 1)

    def dynamics_solve(self, point: str, model: Optional[str] = None, structure: Any = None,
                       hamiltonian: Any = None, expr: Optional[str] = None,
                       mode: Optional[str] = None) -> CommandResult:
        if (model is None) == (structure is None):
            raise InputError("give exactly one of a model or a structure")
        if model is not None:
            coords = parse_model(model)
            forms, names = coords.forms(), coords.names()
        else:
            forms = self.storage.load_structure(structure)
            names = [f"x{i + 1}" for i in range(forms.dim)]
        if expr is not None:
            h = MultiPoly.from_expr(names, expr)
        elif hamiltonian is not None:
            h = self.storage.load_polynomial(hamiltonian)
            if model is not None:
                h = h.with_variables(names)
        else:
            raise InputError("a Hamiltonian is required (file or expression)")
        solve_mode = SolveMode(mode) if mode else (SolveMode.KCOSYM if forms.has_eta else SolveMode.KSYM)
        solution = solve_hamiltonian_kvector(forms, h, parse_vector(point), solve_mode)
        report = {"command": "dynamics solve", "mode": solution.mode, "point": parse_vector(point),
                  "particular": solution.particular, "freedom": solution.freedom, "success": True}
        return CommandResult(report)

    def dynamics_obstruction(self, model: str, hamiltonian: Any = None, expr: Optional[str] = None,
                             kvector: Any = None, section: Any = None) -> CommandResult:
        coords = parse_model(model)
        h = self._hamiltonian(coords, hamiltonian, expr)
        report: Dict[str, Any] = {"command": "dynamics obstruction", "model": model, "hamiltonian": h}
        if section is not None:
            matrix = lifted_section_obstruction(h, self.storage.load_section(section))
            report["mixed_partial_mismatch"] = matrix
        else:
            matrix = integrability_obstruction(h, self._kvector(coords, h, kvector), coords)
            report["coefficients"] = matrix
        report["vanishes"] = all(c.is_zero() for row in matrix for c in row)
        report["success"] = True
        return CommandResult(report)

    def dynamics_lift_verify(self, model: str, hamiltonian: Any = None, expr: Optional[str] = None,
                             kvector: Any = None) -> CommandResult:
        coords = parse_model(model)
        h = self._hamiltonian(coords, hamiltonian, expr)
        result = lift_dynamics_verify(h, self._kvector(coords, h, kvector), coords)
        report = {"command": "dynamics lift-verify", "model": model,
                  "lifted_hamiltonian": result.lifted_hamiltonian,
                  "lifted_kvector": result.lifted_kvector,
                  "residual": result.residual.form_residual,
                  "holds": result.holds, "success": result.holds}
        return CommandResult(report, 0 if result.holds else 1)

    # campaigns

    def campaign_config(self, **values: Any) -> CampaignConfig:
        try:
            return CampaignConfig(**{k: v for k, v in values.items() if v is not None})
        except ValidationError as e:
            raise InputError(f"invalid campaign configuration: {e.errors()[0]['msg']}") from e

    def campaign(self, config: CampaignConfig, serial: bool = False, replay: Optional[int] = None,
                 save: bool = False, metrics: bool = False) -> CommandResult:
        """
        Run (or replay one trial of) a campaign.

        ``metrics`` embeds the trial logger's per-property timing report; ``save``
        also writes the report under the storage root.
        """
        runner = CampaignRunner(config, threads=self.threads, trial_logger=self.trial_logger, box=self.box)
        name = f"campaign_{config.property_id.value}_{config.master_seed}"
        if replay is not None:
            outcome = runner.replay(replay)
            report = {"command": "campaign", "config": config, "replay": _outcome(outcome),
                      "success": outcome.passed}
            name += f"_trial{replay}"
        else:
            result = runner.run_serial() if serial else asyncio.run(runner.run())
            report = campaign_report(result)
        if metrics:
            if self.trial_logger is None:
                raise InputError("trial metrics need a trial logger")
            report["trial_metrics"] = self.trial_logger.generate_report(config.property_id.value)
        if save:
            report["saved_to"] = asyncio.run(self.storage.save_report(name, report))
        return CommandResult(report, 0 if report["success"] else 1)


def _outcome(o: TrialOutcome) -> Dict[str, Any]:
    data: Dict[str, Any] = {"trial": o.trial, "seed": o.seed, "passed": o.passed,
                            "adversarial": o.adversarial, "details": o.details}
    if o.instance is not None:
        data["instance"] = o.instance
    return data


def campaign_report(result: CampaignReport) -> Dict[str, Any]:
    """Aggregated report; only ``duration_seconds`` differs between identical runs"""
    return {
        "command": "campaign",
        "config": result.config,
        "passed": result.passed,
        "failed": result.failed,
        "counters": result.counters,
        "failures": [_outcome(o) for o in result.outcomes if not o.passed],
        "trials": [{"trial": o.trial, "seed": o.seed, "passed": o.passed} for o in result.outcomes],
        "duration_seconds": result.duration_seconds,
        "success": result.success,
    }
