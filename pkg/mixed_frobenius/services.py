"""
This module defines the Manager classes that run verification tasks and the
FrobeniusRunner that implements each `frobenius` subcommand.

The Manager class is responsible for:
- Holding a mapping of task names to callables.
- Running independent tasks, up to `jobs` at a time, in worker threads.
- Returning results in the order the tasks were registered, whatever the
  completion order.

Example usage:
    def check_unit():
        return check_mfa(mixed_frobenius_algebra)

    manager = VerificationManager(jobs=2)
    report = asyncio.run(manager.verify({'mfa': check_unit}))
"""

import asyncio
import json
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from asgiref.sync import sync_to_async

from mixed_frobenius.adapters import VerificationAdapter
from mixed_frobenius.domains import (
    GWDataset,
    LambdaAlgebra,
    MixedFrobeniusAlgebra,
    VerificationReport,
    build_twisted_product,
    check_closing_formulas,
    check_degree_bound,
    check_formal_mfs,
    check_formal_saito,
    check_invariant_metric,
    check_localized_formal_frobenius,
    check_mfa,
    check_potential_decomposition,
    check_semisimple_action,
    classical_limit_filtration,
    existence_mfa,
    extract_filtration,
    limit_mfs,
    localized_metric_geom,
    mfa_from_invariant_localized_metric,
    mfs_from_graded_mfa,
    nilpotent_filtration_direct,
    nilpotent_mfa,
    normalize_metric,
    potential_vector_field,
    residue_metric_well_defined_check,
    saito_from_algebra,
    verify_division_identity,
)
from mixed_frobenius.domains.errors import FileFormatError
from mixed_frobenius.domains.exactalg import smith_normal_form
from mixed_frobenius.domains.mfa import nilpotent_localized_metric
from mixed_frobenius.domains.sampling import random_unimodular
from mixed_frobenius.infrastructures import RunConfig

logger = logging.getLogger(__name__)

Task = Callable[[], VerificationReport]


@dataclass
class RunReport:
    """
    Outcome of one subcommand: the axiom records plus computed artifacts.

    The document form has no timestamps, so identical inputs give
    byte-identical output.
    """
    command: str
    inputs_digest: str
    order: int
    seed: Optional[int]
    report: VerificationReport
    artifacts: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.report.passed

    def as_document(self) -> dict:
        return {
            'command': self.command,
            'inputs_digest': self.inputs_digest,
            'order': self.order,
            'seed': self.seed,
            'passed': self.passed,
            'records': [record.as_dict() for record in self.report.records],
            'artifacts': self.artifacts,
        }

    def render(self, report_format: str) -> str:
        if report_format == 'structured':
            return json.dumps(self.as_document(), sort_keys=True, indent=2, ensure_ascii=False)
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}  (inputs {self.inputs_digest[:12]})"]
        for record in self.report.records:
            status = 'ok  ' if record.passed else 'FAIL'
            order = f"  [T={record.certified_order}]" if record.certified_order is not None else ''
            line = f"  {status} {record.name}{order}"
            if record.counterexample:
                line += f": {record.counterexample}"
            lines.append(line)
        for key in sorted(self.artifacts):
            lines.append(f"  {key}: {json.dumps(self.artifacts[key], sort_keys=True, ensure_ascii=False)}")
        return '\n'.join(lines)


class Manager:
    """
    Manager class to run named tasks with bounded concurrency.

    Attributes:
        tasks (dict): A dictionary mapping task names to callables.
        jobs (int): Maximum number of tasks running at once.

    Methods:
        run(): Run every task and return the results in registration order.
    """

    def __init__(self, tasks: Optional[Dict[str, Callable]] = None, jobs: int = 1):
        self.tasks = dict(tasks or {})
        self.jobs = jobs

    async def _run_one(self, semaphore: asyncio.Semaphore, name: str, task: Callable):
        async with semaphore:
            logger.debug(f"Running task {name}")
            return await sync_to_async(task, thread_sensitive=False)()

    async def run(self) -> List:
        semaphore = asyncio.Semaphore(self.jobs)
        return await asyncio.gather(
            *(self._run_one(semaphore, name, task) for name, task in self.tasks.items()))


class VerificationManager(Manager):
    """
    A Manager whose tasks each return a VerificationReport.

    The merged report lists the records task by task in registration order,
    so `--jobs` never changes the output.
    """

    async def verify(self, tasks: Optional[Dict[str, Task]] = None) -> VerificationReport:
        if tasks is not None:
            self.tasks = dict(tasks)
        merged = VerificationReport()
        for report in await self.run():
            merged.extend(report)
        return merged


def _records(*pairs) -> VerificationReport:
    report = VerificationReport()
    for name, passed, counterexample in pairs:
        report.add(name, passed, counterexample=counterexample)
    return report


def _prefixed(report: VerificationReport, prefix: str) -> VerificationReport:
    result = VerificationReport()
    result.extend(report, prefix)
    return result


class FrobeniusRunner:
    """
    One method per `frobenius` subcommand; each returns a RunReport.

    InputError and its subclasses propagate to the caller; axiom failures are
    records in the report.
    """

    def __init__(self, config: RunConfig, adapter: type = VerificationAdapter):
        self.config = config
        self.adapter = adapter
        self.commands = {
            'snf': self.snf,
            'filtration': self.filtration,
            'nilpotent': self.nilpotent,
            'existence': self.existence,
            'verify-mfa': self.verify_mfa,
            'formal-check': self.formal_check,
            'quantum-limit': self.quantum_limit,
            'potential': self.potential,
        }

    async def execute(self, command: str, path: str, gw_path: Optional[str] = None) -> RunReport:
        handler = self.commands.get(command)
        if handler is None:
            raise ValueError(f"Unknown command {command!r}")
        run_report = await handler(path, gw_path) if command in ('formal-check', 'quantum-limit') \
            else await handler(path)
        if not run_report.passed:
            logger.warning(f"{command} {path}: failed {', '.join(run_report.report.failed_names())}")
        if self.config.save:
            await self.adapter.save_run(run_report)
        return run_report

    def _report(self, command: str, paths: Sequence[str], report: VerificationReport,
                artifacts: Dict[str, Any], seeded: bool = False) -> RunReport:
        return RunReport(
            command=command,
            inputs_digest=self.adapter.digest([p for p in paths if p]),
            order=self.config.order,
            seed=self.config.seed if seeded else None,
            report=report,
            artifacts=artifacts,
        )

    def _manager(self) -> VerificationManager:
        return VerificationManager(jobs=self.config.jobs)

    def _expect(self, path: str, *kinds: str) -> str:
        kind = self.adapter.kind_of(path)
        if kind not in kinds:
            raise FileFormatError(f"Expected a {' or '.join(kinds)} file, got {kind}", path)
        return kind

    # -- subcommands ----------------------------------------------------------

    async def snf(self, path: str) -> RunReport:
        """Smith decomposition of λ^{k0}·G, the κ profile and, with a seed, a κ-invariance sweep."""
        self._expect(path, 'metric')
        metric = self.adapter.load(path)
        profile = normalize_metric(metric)
        shift, polynomial = metric.matrix.clear_denominators()
        decomposition = smith_normal_form(polynomial, shift=shift)
        config = self.config

        def certificate():
            return _records(
                ('smith certificate', decomposition.verify(polynomial), "U·M·V != diag(e_i)"),
                ('divisibility chain', decomposition.divisibility_chain_holds(), "e_i does not divide e_{i+1}"),
                ('adapted pairing', profile.pairing_holds(metric), "g(x_i, y_j) != λ^{-κ_i}δ_ij"),
            )

        def kappa_invariance():
            rng = random.Random(config.seed)
            expected = sorted(profile.kappas)
            for trial in range(config.trials):
                change = random_unimodular(rng, metric.ambient_dim)
                found = sorted(normalize_metric(metric.transformed(change)).kappas)
                if found != expected:
                    return _records(('kappa invariance', False, f"trial {trial}: κ {found} != {expected}"))
            return _records(('kappa invariance', True, None))

        tasks = {'certificate': certificate}
        if config.seed_given:
            tasks['kappa invariance'] = kappa_invariance
        report = await self._manager().verify(tasks)
        artifacts = {
            'shift': shift,
            'kappa': list(profile.kappas),
            'elementary_divisors': [str(e.as_expr()) for e in decomposition.diag],
        }
        return self._report('snf', [path], report, artifacts, seeded=config.seed_given)

    async def filtration(self, path: str) -> RunReport:
        """The metric-to-filtration pipeline with per-jump residue well-definedness sweeps."""
        kind = self._expect(path, 'metric', 'nilpotent')
        data = None
        if kind == 'nilpotent':
            data = self.adapter.load(path)
            metric = nilpotent_localized_metric(data)
        else:
            metric = self.adapter.load(path)
        profile = normalize_metric(metric)
        filtration = extract_filtration(metric)
        config = self.config

        def exhaustive():
            return _records(('filtration exhaustive', filtration.is_exhaustive, "top filter is not everything"))

        def residue(k):
            def task():
                holds = residue_metric_well_defined_check(metric, k, config.trials, config.seed)
                return _records((f"residue well-defined g_{k}", holds, f"Res λ^{k - 1}g changed under re-lift"))
            return task

        tasks = {'exhaustive': exhaustive}
        for k in filtration.jumps:
            tasks[f"residue {k}"] = residue(k)
        if data is not None:
            def direct():
                locus = nilpotent_filtration_direct(data).mismatch(filtration)
                return _records(('direct construction agrees', locus is None, locus))
            tasks['direct'] = direct
        report = await self._manager().verify(tasks)
        artifacts = {'kappa': list(profile.kappas), 'filtration': filtration.describe()}
        return self._report('filtration', [path], report, artifacts, seeded=True)

    async def nilpotent(self, path: str) -> RunReport:
        """Direct construction against the generic pipeline, the MFA axioms and the division identity."""
        self._expect(path, 'nilpotent')
        data = self.adapter.load(path)
        direct = nilpotent_filtration_direct(data)

        def agreement():
            generic = extract_filtration(nilpotent_localized_metric(data))
            locus = direct.mismatch(generic)
            return _records(('direct construction agrees', locus is None, locus))

        def axioms():
            return check_mfa(nilpotent_mfa(data))

        def division():
            report = VerificationReport()
            x = [data.base.unit] * data.r
            for k in range(data.r + 2):
                report.extend(verify_division_identity(data, x, k), f"k={k}: ")
            return report

        tasks = {'agreement': agreement, 'axioms': axioms, 'division': division}
        if data.r == 1:
            tasks['closing'] = lambda: check_closing_formulas(data, direct)
        report = await self._manager().verify(tasks)
        artifacts = {'r': data.r, 'filtration': direct.describe()}
        return self._report('nilpotent', [path], report, artifacts)

    async def existence(self, path: str) -> RunReport:
        """The constructive Frobenius filtration of a split algebra and its axiom check."""
        self._expect(path, 'algebra')
        algebra = self.adapter.load(path).algebra
        m = existence_mfa(algebra)
        report = await self._manager().verify({
            'mfa': lambda: check_mfa(m),
            'semisimple action': lambda: check_semisimple_action(algebra),
        })
        artifacts = {
            'ranks': [m.filtration.rank(k) for k in m.filtration.jumps],
            'filtration': m.filtration.describe(),
        }
        return self._report('existence', [path], report, artifacts)

    async def verify_mfa(self, path: str) -> RunReport:
        """check_mfa on the layers, grams and charges listed in an algebra file."""
        self._expect(path, 'algebra')
        source = self.adapter.load(path)
        if source.filtration is None:
            raise FileFormatError("No 'layer' lines to verify", path)
        m = MixedFrobeniusAlgebra(source.algebra, source.filtration, source.charges)
        tasks = {'mfa': lambda: check_mfa(m)}
        if source.metric is not None:
            tasks['metric'] = lambda: _prefixed(check_invariant_metric(source.algebra, source.metric), 'algebra ')
        report = await self._manager().verify(tasks)
        return self._report('verify-mfa', [path], report, {'filtration': m.filtration.describe()})

    async def formal_check(self, path: str, gw_path: Optional[str] = None) -> RunReport:
        """Formal axioms for an algebra (its formal MFS), a series file or a geometric model."""
        kind = self._expect(path, 'algebra', 'series', 'geometry')
        order = self.config.order
        if kind == 'algebra':
            source = self.adapter.load(path)
            if source.filtration is not None:
                m = MixedFrobeniusAlgebra(source.algebra, source.filtration, source.charges)
            else:
                m = existence_mfa(source.algebra)
            mfs = mfs_from_graded_mfa(m, order)
            report = await self._manager().verify({'formal mfs': lambda: check_formal_mfs(mfs)})
            artifacts = {'charges': {str(k): str(d) for k, d in sorted(mfs.charges.items())}}
        elif kind == 'series':
            saito = self.adapter.load(path, order=order)
            report = await self._manager().verify({'saito': lambda: check_formal_saito(saito)})
            artifacts = {'frame': [v.name for v in saito.ring.frame]}
        else:
            twisted = self._twisted_product(path, gw_path)
            report = await self._manager().verify(
                {'localized': lambda: check_localized_formal_frobenius(twisted.structure)})
            artifacts = {'charge': str(twisted.structure.charge), 'gw_digest': twisted.digest}
        return self._report('formal-check', [path, gw_path], report, artifacts)

    def _twisted_product(self, path: str, gw_path: Optional[str]):
        geometry = self.adapter.load(path)
        if gw_path:
            self._expect(gw_path, 'gw')
            dataset = self.adapter.load(gw_path)
        else:
            dataset = GWDataset.empty()
        return build_twisted_product(geometry.model, geometry.bundle, dataset, self.config.order)

    async def quantum_limit(self, path: str, gw_path: Optional[str] = None) -> RunReport:
        """
        The geometric pipeline: twisted product, localized axioms, the
        non-equivariant limit and its formal MFS, agreement with the classical
        nilpotent construction, the mixed Frobenius algebra of (H, ∪, g^λ), the
        potential and (when ξ ≤ 0) the degree bound.
        """
        self._expect(path, 'geometry')
        twisted = self._twisted_product(path, gw_path)
        model, bundle = twisted.model, twisted.bundle
        mfs = limit_mfs(twisted.structure)
        potential = potential_vector_field(mfs.saito)

        def classical():
            if bundle.rank == 0:
                return _records(('limit filtration is classical', False, "bundle of rank 0 has no classical limit"))
            locus = classical_limit_filtration(model, bundle).mismatch(mfs.filtration)
            return _records(('limit filtration is classical', locus is None, locus))

        def classical_mfa():
            # cup is λ-independent and ∫ x∪y∪e_λ(V)^-1 is cup-invariant
            metric = localized_metric_geom(model, bundle)
            m = mfa_from_invariant_localized_metric(LambdaAlgebra.constant(model.algebra), metric)
            return _prefixed(check_mfa(m), 'classical ')

        def potential_records():
            report = _prefixed(potential.verify(mfs.saito), 'limit ')
            report.extend(check_potential_decomposition(twisted, mfs.saito, potential))
            return report

        tasks = {
            'localized': twisted.verify,
            'limit': lambda: _prefixed(check_formal_mfs(mfs), 'limit '),
            'classical': classical,
            'classical mfa': classical_mfa,
            'potential': potential_records,
        }
        bound = check_degree_bound(twisted)
        if bound is not None:
            tasks['degree bound'] = lambda: bound
        report = await self._manager().verify(tasks)
        filtration = mfs.filtration
        artifacts = {
            'gw_digest': twisted.digest,
            'euler_weights': [str(w) for w in twisted.weights],
            'jumps': list(filtration.jumps),
            'ranks': [filtration.rank(k) for k in filtration.jumps],
            'charges': {str(k): str(d) for k, d in sorted(mfs.charges.items())},
            'metric': [[str(twisted.structure.metric.matrix.entry(i, j)) for j in range(model.size)]
                       for i in range(model.size)],
            'filtration': filtration.describe(),
        }
        return self._report('quantum-limit', [path, gw_path], report, artifacts)

    async def potential(self, path: str) -> RunReport:
        """The potential vector field of a structure, with its ∂∂ and homogeneity checks."""
        kind = self._expect(path, 'series', 'algebra')
        if kind == 'series':
            saito = self.adapter.load(path, order=self.config.order)
        else:
            saito = saito_from_algebra(self.adapter.load(path).algebra, self.config.order)
        potential = potential_vector_field(saito)
        report = await self._manager().verify({'potential': lambda: potential.verify(saito)})
        artifacts = {'certified_order': potential.certified_order, 'potential': potential.describe(saito)}
        return self._report('potential', [path], report, artifacts)

