"""
Randomized property campaigns

Each trial derives its own seed from (master_seed, trial index), builds one
instance and checks one property. Trials are independent, so they run
concurrently on worker threads and are sorted by index before aggregation.
"""

import asyncio
import random
import time
from collections import Counter
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

import structlog

from core.algebra.exactlin import Subspace, intersect_all, rank
from core.domain.errors import PolyredError
from core.domain.models import (ActionPointData, CampaignConfig,
                                CampaignReport, ConditionId, FormFamily,
                                InstanceKind, PropertyId, SolveMode,
                                StructureTag, TrialOutcome)
from core.domain.ports import LoggingPort
from core.geometry.dynamics import (add_kvectors, constant_kvector,
                                    hamiltonian_kvector, kvector_residual,
                                    lift_dynamics_verify,
                                    solve_hamiltonian_kvector, strip_time,
                                    translation_reduce_verify)
from core.geometry.lift import equivalence_check, lift_structure, verify_lift_lemma
from core.geometry.random_instances import (DEFAULT_BOX, random_instance,
                                            random_polynomial, random_shape,
                                            random_subspace, trial_seed)
from core.geometry.reduction import (check_condition, derive_geometry, linear_reduce,
                                     presymplectic_double_orthogonal)
from core.geometry.standard_models import (StandardCoordinates,
                                           product_reduction_check)
from core.geometry.structures import covector_kernel

logger = structlog.get_logger(__name__)

# (passed, details, instance)
TrialResult = Tuple[bool, Dict[str, Any], Any]


class CampaignRunner:
    """Runs one property campaign; results depend only on the config"""

    def __init__(self, config: CampaignConfig, threads: int = 4,
                 trial_logger: Optional[LoggingPort] = None, box: int = DEFAULT_BOX):
        self.config = config
        self.threads = max(1, threads)
        self.trial_logger = trial_logger
        self.box = box
        self._checks: Dict[PropertyId, Callable[[random.Random, bool], TrialResult]] = {
            PropertyId.PRESYM_DOUBLE_ORTHO: self._presym_double_ortho,
            PropertyId.A2_IMPLIES_NONDEG: self._a2_implies_nondeg,
            PropertyId.LIFT_IFF: self._lift_iff,
            PropertyId.LIFT_LEMMA_43: self._lift_lemma,
            PropertyId.EQUIVALENCE_44: self._equivalence,
            PropertyId.ALBERT_K1: self._albert,
            PropertyId.PRODUCT_REDUCTION: self._product_reduction,
            PropertyId.KSYM_KCOSYM_CONSISTENCY: self._ksym_kcosym,
            PropertyId.TRANSLATION_REDUCTION: self._translation_reduction,
        }

    # scheduling

    def _is_adversarial(self, rng: random.Random) -> bool:
        ratio = self.config.adversarial_ratio
        return rng.randrange(ratio.denominator) < ratio.numerator

    def run_trial(self, trial: int) -> TrialOutcome:
        seed = trial_seed(self.config.master_seed, trial)
        rng = random.Random(seed)
        adversarial = self._is_adversarial(rng)
        context = None
        if self.trial_logger is not None:
            context = self.trial_logger.start_trial(self.config.property_id.value, trial, seed)
        started = time.perf_counter()
        instance = None
        try:
            passed, details, instance = self._checks[self.config.property_id](rng, adversarial)
        except PolyredError as e:
            passed, details = False, {"error": f"{type(e).__name__}: {e}"}
        outcome = TrialOutcome(trial=trial, seed=seed, passed=passed, adversarial=adversarial,
                               details=details,
                               instance=None if passed else {"property_id": self.config.property_id.value,
                                                             "trial": trial, "seed": seed, "data": instance},
                               duration_seconds=time.perf_counter() - started)
        if self.trial_logger is not None:
            self.trial_logger.end_trial(context, outcome)
        return outcome

    async def run(self) -> CampaignReport:
        started = time.perf_counter()
        semaphore = asyncio.Semaphore(self.threads)

        async def one(trial: int) -> TrialOutcome:
            async with semaphore:
                return await asyncio.to_thread(self.run_trial, trial)

        outcomes = await asyncio.gather(*(one(t) for t in range(self.config.trials)))
        return self._aggregate(list(outcomes), time.perf_counter() - started)

    def run_serial(self) -> CampaignReport:
        started = time.perf_counter()
        outcomes = [self.run_trial(t) for t in range(self.config.trials)]
        return self._aggregate(outcomes, time.perf_counter() - started)

    def _aggregate(self, outcomes: List[TrialOutcome], duration: float) -> CampaignReport:
        outcomes.sort(key=lambda o: o.trial)
        counters: Counter = Counter()
        for o in outcomes:
            counters["passed" if o.passed else "failed"] += 1
            if o.adversarial:
                counters["adversarial"] += 1
            for key, value in o.details.items():
                if value is True:
                    counters[key] += 1
        report = CampaignReport(config=self.config, outcomes=outcomes,
                                counters=dict(sorted(counters.items())), duration_seconds=duration)
        log = logger.info if report.success else logger.error
        log("campaign finished", property_id=self.config.property_id.value,
            passed=report.passed, failed=report.failed, duration_seconds=round(duration, 3))
        return report

    # instance helpers

    def _instance_seed(self, rng: random.Random) -> int:
        return rng.getrandbits(64)

    def _shape(self, rng: random.Random, cosym: bool, reserve: int = 0,
               k_fixed: Optional[int] = None) -> Tuple[int, int]:
        budget = max(2, self.config.dim_max - reserve)
        # the smallest model of order k has k + 1 coordinates
        k_max = max(1, min(self.config.k_max, budget - 1))
        return random_shape(rng, budget, k_max, cosym, k_fixed=k_fixed)

    def _action(self, rng: random.Random, kind: InstanceKind, cosym: bool, adversarial: bool,
                k_fixed: Optional[int] = None, reserve: int = 0) -> ActionPointData:
        k, n = self._shape(rng, cosym, reserve, k_fixed)
        return random_instance(self._instance_seed(rng), n, k, kind, adversarial and n >= 1, self.box)

    # properties

    def _presym_double_ortho(self, rng: random.Random, adversarial: bool) -> TrialResult:
        dim = rng.randint(1, min(self.config.dim_max, 10))
        forms = random_instance(self._instance_seed(rng), dim, 1, InstanceKind.PRESYMPLECTIC, box=self.box)
        space = random_subspace(rng, Subspace.full(dim), rng.randint(0, dim), self.box)
        side = presymplectic_double_orthogonal(forms.omega[0], space)
        details = {"degenerate": rank(forms.omega[0]) < dim, "closed": side.lhs == space}
        return side.holds, details, {"structure": forms, "subspace": space}

    def _a2_implies_nondeg(self, rng: random.Random, adversarial: bool) -> TrialResult:
        data = self._action(rng, InstanceKind.ACTION_POLYSYMPLECTIC, False, adversarial)
        a1 = check_condition(data, ConditionId.A1)
        a2 = check_condition(data, ConditionId.A2)
        nondeg = check_condition(data, ConditionId.NONDEG_POLYSYM)
        reduction = linear_reduce(data)
        # the implication is about regular values: codim T = k·dim g̃
        regular = derive_geometry(data).level_tangent.codim == data.forms.k * data.gtilde.dim
        details = {
            "regular": regular,
            "a2_holds": a2.holds,
            "nondeg_holds": nondeg.holds,
            "a1_holds": a1.holds,
            "nondeg_holds_a1_fails": regular and nondeg.holds and not a1.holds,
            "reduction_consistent": reduction.consistent,
        }
        passed = (nondeg.holds or not a2.holds or not regular) and reduction.consistent
        return passed, details, data

    def _lift_iff(self, rng: random.Random, adversarial: bool) -> TrialResult:
        k, n = self._shape(rng, True, reserve=1)
        forms: FormFamily = random_instance(self._instance_seed(rng), n, k, InstanceKind.POLYCOSYMPLECTIC,
                                            adversarial and n >= 1, self.box)
        lifted = lift_structure(forms, strict=False)
        base_ok = lifted.base_kind.tag == StructureTag.POLYCOSYMPLECTIC
        lifted_ok = lifted.lifted_kind.tag == StructureTag.POLYSYMPLECTIC
        details = {"lemma_applies": lifted.lemma_applies, "base_valid": base_ok, "lifted_valid": lifted_ok}
        passed = base_ok == lifted_ok or not lifted.lemma_applies
        return passed, details, forms

    def _lift_lemma(self, rng: random.Random, adversarial: bool) -> TrialResult:
        data = self._action(rng, InstanceKind.ACTION_POLYCOSYMPLECTIC, True, adversarial, reserve=1)
        report = verify_lift_lemma(data)
        details = {"isotropy": report.isotropy.holds, "orthogonal": report.orthogonal.holds,
                   "double_orthogonal": report.double_orthogonal.holds,
                   "regularity_preserved": report.regularity_preserved}
        return report.holds, details, data

    def _equivalence(self, rng: random.Random, adversarial: bool) -> TrialResult:
        data = self._action(rng, InstanceKind.ACTION_POLYCOSYMPLECTIC, True, adversarial, reserve=1)
        report = equivalence_check(data, strict=False)
        details = {"base_reducible": report.base.holds, "lift_reducible": report.lifted.holds,
                   "c1_holds": report.c1.holds, "a2_lifted_holds": report.a2_lifted.holds}
        return report.verdicts_agree and report.chain_agree, details, data

    def _albert(self, rng: random.Random, adversarial: bool) -> TrialResult:
        data = self._action(rng, InstanceKind.ACTION_POLYCOSYMPLECTIC, True, False, k_fixed=1)
        condition = check_condition(data, ConditionId.ALBERT_K1)
        reduction = linear_reduce(data)
        reduced_ok = reduction.kind.tag == StructureTag.POLYCOSYMPLECTIC
        return condition.holds and reduced_ok, {"reduced_cosymplectic": reduced_ok}, data

    def _product_reduction(self, rng: random.Random, adversarial: bool) -> TrialResult:
        count = rng.randint(2, 3)
        factors, spaces = [], []
        for _ in range(count):
            n = rng.randint(1, 2)
            f = random_instance(self._instance_seed(rng), n, 1, InstanceKind.COSYMPLECTIC, box=self.box)
            kernel = intersect_all([covector_kernel(e, f.dim) for e in f.eta], f.dim)
            factors.append(f)
            spaces.append(random_subspace(rng, kernel, rng.randint(0, min(2, kernel.dim)), self.box))
        equal, _, _ = product_reduction_check(factors, spaces)
        return equal, {"factors": count}, {"factors": factors, "gtildes": spaces}

    def _kcosym_kvector(self, rng: random.Random, coords: StandardCoordinates, autonomous: bool):
        names = coords.names()
        h = random_polynomial(rng, names, degree=3, terms=4, box=self.box,
                              exclude=coords.time_names() if autonomous else ())
        x = hamiltonian_kvector(coords, h)
        homogeneous = solve_hamiltonian_kvector(coords.forms(), h, [0] * coords.dim, SolveMode.KCOSYM).homogeneous
        if not homogeneous.is_zero():
            coeffs = [rng.randint(-self.box, self.box) for _ in range(homogeneous.dim)]
            flat = [sum((c * v[j] for c, v in zip(coeffs, homogeneous.vectors())), Fraction(0))
                    for j in range(homogeneous.ambient_dim)]
            legs = [flat[a * coords.dim:(a + 1) * coords.dim] for a in range(coords.k)]
            x = add_kvectors(x, constant_kvector(names, legs))
        return h, x

    def _ksym_kcosym(self, rng: random.Random, adversarial: bool) -> TrialResult:
        coords = StandardCoordinates(rng.randint(1, min(2, self.config.k_max)), rng.randint(1, 2), True)
        autonomous = rng.random() < 0.5
        h, x = self._kcosym_kvector(rng, coords, autonomous)
        solves = kvector_residual(coords.forms(), h, x, SolveMode.KCOSYM).solves
        lifted = lift_dynamics_verify(h, x, coords).holds if solves else False
        details = {"autonomous": autonomous, "kcosym_solves": solves, "lifted_identity": lifted}
        passed = solves and lifted
        if autonomous:
            polysym = StandardCoordinates(coords.k, coords.n, False)
            stripped = kvector_residual(polysym.forms(), h.with_variables(polysym.names()),
                                        strip_time(x, coords), SolveMode.KSYM).solves
            details["stripped_ksym"] = stripped
            passed = passed and stripped
        return passed, details, {"hamiltonian": h, "kvector": x}

    def _translation_reduction(self, rng: random.Random, adversarial: bool) -> TrialResult:
        k, n = rng.randint(1, min(2, self.config.k_max)), rng.randint(1, 2)
        coords = StandardCoordinates(k, n, True)
        h = random_polynomial(rng, coords.names(), degree=3, terms=4, box=self.box, exclude=["q1"])
        x = hamiltonian_kvector(coords, h)
        mu = [rng.randint(-self.box, self.box) for _ in range(k)]
        report = translation_reduce_verify(h, x, k, n, mu)
        details = {"projection_solves": report.residual.solves,
                   "dimension_formula": report.dimension.formula_holds}
        return report.holds, details, {"hamiltonian": h, "kvector": x, "mu": mu}

    def replay(self, trial: int) -> TrialOutcome:
        """Re-run one trial; the outcome is identical to the one produced inside ``run``"""
        logger.info("replaying trial", property_id=self.config.property_id.value, trial=trial,
                    seed=trial_seed(self.config.master_seed, trial))
        return self.run_trial(trial)
