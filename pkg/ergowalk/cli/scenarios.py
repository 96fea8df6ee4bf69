"""Scenario runners.

Each runner takes a RunContext, writes its artifacts through it and
returns ``(verdict, summary)``.  Mathematical findings (an obstruction, a
violated symmetry, a degenerate variance) are verdicts, not failures.
"""

import logging
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from ergowalk.cli.build import (
    build_quadrature,
    build_trig,
    default_psi,
    stationary_density,
)
from ergowalk.cli.io import write_csv, write_json
from ergowalk.cohomology.fourier import fourier_transfer
from ergowalk.cohomology.functionals import loop_sweep, random_quadrilaterals
from ergowalk.cohomology.livshitz import livshitz_obstruction
from ergowalk.cohomology.report import NO_OBSTRUCTION, OBSTRUCTION
from ergowalk.cohomology.transfer import coboundary_residual, transfer_from_paths
from ergowalk.errors import NotACoboundaryError, ObstructionLeakError, PreconditionError
from ergowalk.geodesic.loops import loop_defect, random_loops
from ergowalk.markov.density import DensityField
from ergowalk.markov.stationary import stationary_iterate, symmetry_defect
from ergowalk.stats.clt import clt_experiment
from ergowalk.stats.lyapunov import lyapunov_balance
from ergowalk.stats.sampling import nu_sampler
from ergowalk.walk.export import write_steps
from ergowalk.walk.recurrence import recurrence_stats
from ergowalk.walk.simulate import simulate_ensemble

logger = logging.getLogger(__name__)

ORACLE_TOLERANCE = {"rotation": 1e-3, "cat": 1e-2}
TRANSFER_ORACLE_TOLERANCE = 1e-4
LEAF_MARGIN = 1e-8


class RunContext:
    def __init__(self, config, system, profile, run_dir, manifest, threads=1):
        self.config = config
        self.system = system
        self.profile = profile
        self.run_dir = Path(run_dir)
        self.manifest = manifest
        self.threads = threads
        self.options = config.scenario.options
        self._quadrature = None

    @property
    def seed(self):
        return self.config.seed

    def rng(self):
        return np.random.default_rng(self.config.seed)

    def quadrature(self):
        if self._quadrature is None:
            self._quadrature = build_quadrature(self.system, self.config)
        return self._quadrature

    def write_csv(self, name, header, rows):
        write_csv(self.run_dir / name, header, rows)
        self.manifest.add_file(self.run_dir, name)

    def write_json(self, name, record):
        write_json(self.run_dir / name, record)
        self.manifest.add_file(self.run_dir, name)

    @contextmanager
    def stage(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.manifest.stages.append({"name": name, "wall_time": time.perf_counter() - start})
            logger.info("stage %s finished", name)

    def density(self):
        if self.system.kind == "geodesic":
            density = self.profile.closed_form_density()
            if density is None:
                raise PreconditionError("sampling nu on the geodesic model needs a transfer-built profile")
            return density
        density, source = stationary_density(self.system, self.profile, self.quadrature(), self.config.numerics)
        logger.info("stationary density from %s", source)
        return density


def run_stationary(ctx):
    system, profile, numerics = ctx.system, ctx.profile, ctx.config.numerics
    quad = ctx.quadrature()
    with ctx.stage("symmetry"):
        defect = symmetry_defect(system, profile, quad)
    summary = {"symmetry_defect": float(defect), "grid": quad.resolution}
    if not defect.symmetric:
        # nonzero mean of log phi rules out an equivalent stationary measure
        ctx.write_json("stationary.json", summary)
        return "symmetry violated", summary

    with ctx.stage("iterate"):
        density, residual, diag = stationary_iterate(
            system,
            profile,
            quad,
            max_iter=numerics.iterations,
            tol=numerics.tolerance,
            cesaro_window=numerics.cesaro_window,
            degeneracy_ratio=numerics.degeneracy_ratio,
        )
    summary.update(
        residual=residual,
        iterations=diag.iterations,
        converged=diag.converged,
        degenerate=diag.degenerate,
        sup_inf_ratio=density.sup_inf_ratio,
    )
    header, body = density.rows()
    ctx.write_csv("density.csv", header, body)
    ctx.write_json("diagnostics.json", diag.to_record(include_timing=False))

    recovered = diag.converged and not diag.degenerate
    closed = profile.closed_form_density()
    if closed is not None:
        oracle = DensityField.from_function(quad, closed)
        error = float(np.max(np.abs(density.values - oracle.values) / oracle.values))
        tolerance = ctx.options.get("oracle_tolerance") or ORACLE_TOLERANCE[system.kind]
        summary.update(linf_relative_error=error, oracle_tolerance=tolerance)
        recovered = diag.converged and error <= tolerance
    ctx.write_json("stationary.json", summary)
    if recovered:
        return "density recovered", summary
    return ("degenerate" if diag.degenerate else "not converged"), summary


def run_obstruction(ctx):
    system, profile = ctx.system, ctx.profile
    tol = ctx.config.numerics.functional_tolerance
    with ctx.stage("livshitz"):
        orbits = livshitz_obstruction(system, profile.log_phi, ctx.options["max_period"])
    with ctx.stage("loops"):
        loops = random_quadrilaterals(
            system, ctx.options["loops"], ctx.rng(), ctx.options["loop_low"], ctx.options["loop_high"]
        )
        sweep = loop_sweep(system, loops, profile.log_phi, tol=tol)
    ctx.write_csv("livshitz.csv", orbits.header(), orbits.rows())
    ctx.write_csv("loops.csv", sweep.header(), sweep.rows())
    summary = {
        "livshitz_verdict": orbits.verdict,
        "livshitz_max_abs": orbits.max_abs_value,
        "loop_verdict": sweep.verdict,
        "loop_max_abs": sweep.max_abs_value,
    }
    if ctx.options["degeneracy_iterations"]:
        numerics = ctx.config.numerics
        with ctx.stage("degeneracy"):
            density, residual, diag = stationary_iterate(
                system,
                profile,
                ctx.quadrature(),
                max_iter=ctx.options["degeneracy_iterations"],
                tol=numerics.tolerance,
                cesaro_window=numerics.cesaro_window,
                degeneracy_ratio=numerics.degeneracy_ratio,
            )
        summary.update(sup_inf_ratio=density.sup_inf_ratio, degenerate=diag.degenerate, residual=residual)
    ctx.write_json("obstruction.json", {"livshitz": orbits.to_record(), "loops": sweep.to_record(), **summary})
    verdict = OBSTRUCTION if OBSTRUCTION in (orbits.verdict, sweep.verdict) else NO_OBSTRUCTION
    return verdict, summary


def _transfer_rotation(ctx):
    system, log_phi = ctx.system, ctx.profile.log_phi
    try:
        with ctx.stage("fourier"):
            u = fourier_transfer(system, log_phi, K=ctx.options["modes"], denom_floor=ctx.options["denom_floor"])
    except NotACoboundaryError as exc:
        return "not a coboundary", {"reason": str(exc)}
    x = ctx.rng().random(ctx.options["samples"])
    residual = coboundary_residual(system, log_phi, u, x)
    summary = {
        "residual": residual,
        "truncation_estimate": u.truncation_estimate,
        "flagged_modes": u.flagged,
    }
    grid = (np.arange(1024) + 0.5) / 1024
    ctx.write_csv("transfer.csv", ["x", "u"], np.column_stack([grid, u(grid)]))
    ctx.write_json("transfer.json", {**summary, "transfer": u.describe()})
    verdict = "transfer recovered" if residual <= u.truncation_estimate else "residual exceeds estimate"
    return verdict, summary


def _transfer_cat(ctx):
    system, profile = ctx.system, ctx.profile
    tol = ctx.config.numerics.functional_tolerance
    targets = ctx.rng().random((ctx.options["points"], 2))
    try:
        with ctx.stage("paths"):
            values, bounds = transfer_from_paths(system, profile.log_phi, targets, K=ctx.options["lifts"], tol=tol)
            image, image_bounds = transfer_from_paths(
                system, profile.log_phi, system.apply(targets, 1), K=ctx.options["lifts"], tol=tol
            )
    except ObstructionLeakError as exc:
        return "not a coboundary", {"reason": str(exc)}
    # u o f - u = log phi at every target
    gap = np.abs(image - values - profile.log_phi(targets))
    allowed = bounds + image_bounds + LEAF_MARGIN
    summary = {"coboundary_residual": float(np.max(gap)), "max_bound": float(np.max(bounds))}
    recovered = bool(np.all(gap <= allowed))
    if profile.provenance is not None:
        u = profile.provenance.u
        known = u(targets) - u(np.zeros(2))
        error = float(np.max(np.abs(values - known)))
        summary.update(oracle_error=error, oracle_tolerance=TRANSFER_ORACLE_TOLERANCE)
        recovered = recovered and error <= TRANSFER_ORACLE_TOLERANCE
    ctx.write_csv("transfer.csv", ["x", "y", "u", "bound"], np.column_stack([targets, values, bounds]))
    ctx.write_json("transfer.json", summary)
    return ("transfer recovered" if recovered else "transfer inconsistent"), summary


def run_transfer(ctx):
    if ctx.system.kind == "rotation":
        return _transfer_rotation(ctx)
    return _transfer_cat(ctx)


def run_walks(ctx):
    system, profile, mc = ctx.system, ctx.profile, ctx.config.mc
    sampler = None
    if ctx.options["start"] == "nu":
        sampler = nu_sampler(system, ctx.density())
    with ctx.stage("simulate"):
        ensemble = simulate_ensemble(
            system,
            profile,
            mc.walks,
            mc.length,
            ctx.seed,
            start_sampler=sampler,
            stride=mc.stride,
            cells_per_axis=mc.cells,
            threads=ctx.threads,
        )
    report = recurrence_stats(ensemble)
    summary = report.summary()
    ctx.write_csv("walks.csv", report.header(), report.rows())
    ctx.write_json("recurrence.json", summary)
    if ctx.options["dump_steps"]:
        write_steps(ctx.run_dir / "steps.bin", ensemble)
        ctx.manifest.add_file(ctx.run_dir, "steps.bin")
    threshold = ctx.options["return_threshold"]
    recurrent = summary["return_fraction"] >= threshold and summary["sign_coverage_fraction"] >= threshold
    return ("recurrence observed" if recurrent else "recurrence not observed"), summary


def run_clt(ctx):
    system, profile, mc = ctx.system, ctx.profile, ctx.config.mc
    psi_spec = ctx.options["psi"]
    psi = default_psi(system) if psi_spec is None else build_trig(system, psi_spec)
    with ctx.stage("density"):
        density = ctx.density()
    with ctx.stage("clt"):
        report = clt_experiment(
            system, profile, density, psi, mc.walks, mc.length, ctx.seed,
            threads=ctx.threads, threshold=ctx.options["ks_threshold"],
        )
    record = report.to_record()
    ctx.write_json("clt.json", record)
    if not report.degenerate:
        header, rows = report.decile_rows()
        ctx.write_csv("deciles.csv", header, rows)
    summary = {k: record[k] for k in ("sigma2", "empirical_variance", "ks", "passed", "degenerate")}
    if report.degenerate:
        return "degenerate variance", summary
    return ("clt consistent" if report.passed else "clt rejected"), summary


def run_balance(ctx):
    system, profile, mc = ctx.system, ctx.profile, ctx.config.mc
    with ctx.stage("density"):
        density = ctx.density()
    simulate = ctx.options["simulate"]
    with ctx.stage("balance"):
        report = lyapunov_balance(
            system,
            profile,
            density,
            n_walks=mc.walks if simulate else 0,
            n_steps=mc.length,
            master_seed=ctx.seed,
            threads=ctx.threads,
            samples=ctx.options["samples"],
        )
    record = report.to_record()
    ctx.write_json("balance.json", record)
    summary = {k: record[k] for k in ("lhs", "rhs", "imbalance", "balanced", "fiber_exponent_mc", "stderr")}
    if report.balanced is None:
        return "balance reported", summary
    return ("balance holds" if report.balanced else "balance violated"), summary


def run_geodesic_loops(ctx):
    system, profile = ctx.system, ctx.profile
    rng = ctx.rng()
    with ctx.stage("close"):
        base = system.mu_sample(rng)
        loops = random_loops(base, ctx.options["loops"], rng, ctx.options["segments"],
                             ctx.options["scale"], system.group)
    u = profile.provenance.u if profile.provenance is not None else None
    # log phi = u o f - u inherits the bump's jump across side pairings twice
    allowance = 2.0 * getattr(u, "non_invariance", 0.0)
    with ctx.stage("functionals"):
        sweep = loop_sweep(system, loops, profile.log_phi, tol=ctx.config.numerics.functional_tolerance,
                           allowance_per_segment=allowance)
    defects = [loop_defect(loop) for loop in loops]
    summary = {
        "relation_defect": system.group.relation_defect,
        "max_closure_defect": float(max(defects)),
        "max_abs_functional": sweep.max_abs_value,
        "allowance_per_segment": allowance,
    }
    ctx.write_csv("loops.csv", sweep.header() + ["closure_defect"],
                  [row + [d] for row, d in zip(sweep.rows(), defects)])
    ctx.write_json("loops.json", {**summary, "sweep": sweep.to_record()})
    return sweep.verdict, summary


SCENARIO_RUNNERS = {
    "stationary": run_stationary,
    "obstruction": run_obstruction,
    "transfer": run_transfer,
    "walks": run_walks,
    "clt": run_clt,
    "balance": run_balance,
    "geodesic-loops": run_geodesic_loops,
}
