"""Run configuration and command dispatch

``run`` is independent of click and Flask: it takes a fully resolved
RunConfig and returns the exit status, the payload and any files written.
"""
from dataclasses import asdict, dataclass, field, replace
import logging
import os

import numpy as np
import pandas as pd

from omegacurves.blowdown import blowdown_report, properness_table
from omegacurves.calibration import comass, parse_form_name
from omegacurves.cli import reports
from omegacurves.curve import load_curve, parse_curve_name, verify_curve
from omegacurves.errors import ConfigurationError
from omegacurves.exterior import load_form
from omegacurves.growth import (
    INCONCLUSIVE, caccioppoli_ratio, classify_growth, energy_profile, geometric_radii, modulus_constant
)
from omegacurves.utils.audit import log_run
from omegacurves.utils.sampling import Ball
from omegacurves.utils.validators import validate_center, validate_format, validate_grid, validate_positive

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_FAIL = 2

CALIBRATION_TOL = 1e-6

# inputs each command needs
REQUIRED = {
    'comass': ('form',),
    'check-curve': ('curve', 'form'),
    'energy': ('curve', 'radii'),
    'blowdown': ('curve', 'radii'),
    'proper': ('curve', 'radii'),
    'classify': ('curve', 'radii'),
    'report': ('curve', 'form', 'radii'),
}
# check-curve only samples a test set, so it falls back to seed 0
SEED_FALLBACK = {'check-curve': 0}

# RunConfig field -> Flask config key supplying its default
SETTINGS = {
    'samples': 'SAMPLES',
    'batch_size': 'BATCH_SIZE',
    'residual_samples': 'RESIDUAL_SAMPLES',
    'modulus_pairs': 'MODULUS_PAIRS',
    'diameter_pairs': 'DIAMETER_SAMPLES',
    'restarts': 'COMASS_RESTARTS',
    'comass_tol': 'COMASS_TOL',
    'max_iter': 'COMASS_MAX_ITER',
    'tol': 'RESIDUAL_TOL',
    'delta': 'GROWTH_DELTA',
    'affinity_tol': 'AFFINITY_TOL',
    'grid_step': 'SUBHARMONIC_STEP',
    'resolution': 'PROPER_RESOLUTION',
    'max_radius': 'PROPER_MAX_RADIUS',
    'directions': 'SPHERE_DIRECTIONS',
    'n_jobs': 'N_JOBS',
    'schema': 'SCHEMA_VERSION',
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, with defaults already resolved"""
    command: str
    seed: int = None
    curve: str = None
    form: str = None
    center: str = None
    radii: str = None
    radius: float = 1.0
    samples: int = 200_000
    batch_size: int = 50_000
    residual_samples: int = 1_000
    modulus_pairs: int = 2_000
    diameter_pairs: int = 2_000
    restarts: int = 64
    comass_tol: float = 1e-10
    max_iter: int = 10_000
    tol: float = 1e-9
    delta: float = 0.05
    affinity_tol: float = 1e-6
    grid_step: float = 1e-2
    resolution: float = 1e-3
    max_radius: float = 1e3
    directions: int = 10_000
    n_jobs: int = 1
    require_calibration: bool = False
    output: str = None
    fmt: str = 'json'
    schema: int = 1

    @classmethod
    def from_settings(cls, command, settings, **options):
        """Fill options left as None from the application config

        Args:
            command (str): Command name
            settings (Mapping): Flask config
            **options: Values given on the command line (None when omitted)

        Returns:
            RunConfig: Validated configuration
        """
        values = {k: v for k, v in options.items() if v is not None}
        for name, key in SETTINGS.items():
            if name not in values and key in settings:
                values[name] = settings[key]
        if 'seed' not in values:
            default = settings.get('DEFAULT_SEED')
            if default is None:
                default = SEED_FALLBACK.get(command)
            values['seed'] = default
        if command == 'report' and 'output' not in values:
            values['output'] = settings.get('OUTPUT_DIR')
        config = cls(command=command, **values)
        config.validate()
        return config

    def validate(self):
        """Raise ConfigurationError naming the first invalid setting"""
        if self.command not in REQUIRED:
            raise ConfigurationError(f"unknown command '{self.command}'")
        for name in REQUIRED[self.command]:
            if getattr(self, name) in (None, ''):
                raise ConfigurationError(f"{self.command} needs --{name}")
        if self.seed is None:
            raise ConfigurationError(f"{self.command} is randomized: pass --seed or set OMEGA_SEED")
        ok, message = validate_format(self.fmt)
        if not ok:
            raise ConfigurationError(message)
        if self.radii is not None:
            ok, message = validate_grid(self.radii)
            if not ok:
                raise ConfigurationError(message)
        for name in ('samples', 'batch_size', 'residual_samples', 'modulus_pairs', 'diameter_pairs',
                     'restarts', 'max_iter', 'directions'):
            ok, message = validate_positive(name, getattr(self, name), integer=True)
            if not ok:
                raise ConfigurationError(message)
        for name in ('radius', 'comass_tol', 'tol', 'delta', 'affinity_tol', 'grid_step', 'resolution', 'max_radius'):
            ok, message = validate_positive(name, getattr(self, name))
            if not ok:
                raise ConfigurationError(message)
        if self.command == 'report' and self.fmt != 'json':
            raise ConfigurationError("report writes a bundle; --format does not apply")

    def grid(self):
        _, (start, factor, count) = validate_grid(self.radii)
        return geometric_radii(start, factor, count)

    def point(self, dimension):
        ok, value = validate_center(self.center, dimension)
        if not ok:
            raise ConfigurationError(value)
        return np.array(value)

    def parameters(self):
        """Settings echoed into the payload (output location excluded)"""
        values = asdict(self)
        values.pop('output')
        return values


@dataclass
class RunResult:
    status: int
    payload: dict
    text: str
    tables: dict = field(default_factory=dict)
    files: list = field(default_factory=list)


def resolve_form(text):
    """A form from a file path or a catalog string such as symplectic:2"""
    if os.path.isfile(text):
        return load_form(text)
    return parse_form_name(text)


def resolve_curve(text):
    """A curve from a spec-file path or a catalog string such as identity:3"""
    if os.path.isfile(text):
        return load_curve(text)
    return parse_curve_name(text)


def _run_comass(config):
    form = resolve_form(config.form)
    report = comass(form, restarts=config.restarts, tol=config.comass_tol, seed=config.seed,
                    max_iter=config.max_iter, n_jobs=config.n_jobs)
    calibration = report.estimate <= 1 + CALIBRATION_TOL
    result = report.to_dict()
    result['is_calibration'] = calibration
    passed = report.converged and (calibration or not config.require_calibration)
    table = pd.DataFrame({
        'restart': np.arange(report.restarts_used),
        'value': report.restart_values,
        'iterations': report.restart_iterations,
    })
    return result, {'comass': table}, passed, {'restarts': config.restarts}


def _run_check_curve(config):
    model = resolve_curve(config.curve)
    form = resolve_form(config.form)
    region = Ball(config.point(model.n), config.radius)
    report = verify_curve(model, form, region, samples=config.residual_samples, seed=config.seed, tol=config.tol)
    result = report.summary()
    result['curve'] = model.describe()
    return result, {'residuals': report.to_frame()}, report.passed, {'residual_samples': config.residual_samples}


def _energy_table(config, model, center, radii):
    n = model.n
    exponents = (n, n - 1) if n >= 2 else (n,)
    profile = energy_profile(model, center, radii, exponents, samples=config.samples, seed=config.seed,
                             batch_size=config.batch_size, n_jobs=config.n_jobs)
    frame = profile.to_frame()
    sphere_n = profile.sphere_values[n]
    sphere_err = profile.sphere_errors[n]
    frame['h_prime'] = n / radii * (sphere_n - profile.h_values)
    frame['h_prime_stderr'] = n / radii * np.hypot(sphere_err, profile.h_errors)
    if n >= 2:
        lower = profile.sphere_values[n - 1]
        exponent = n / (n - 1)
        frame['isoperimetric_gap'] = lower ** exponent - profile.h_values
        frame['isoperimetric_gap_stderr'] = np.hypot(
            exponent * lower ** (exponent - 1) * profile.sphere_errors[n - 1], profile.h_errors
        )
    caccioppoli = [
        caccioppoli_ratio(model, center, r, samples=config.samples, diameter_pairs=config.diameter_pairs,
                          seed=config.seed, batch_size=config.batch_size)
        for r in radii
    ]
    frame['caccioppoli'] = [c.ratio for c in caccioppoli]
    frame['modulus'] = [
        modulus_constant(model, center, r, pairs=config.modulus_pairs, samples=config.samples,
                         seed=config.seed, batch_size=config.batch_size)
        for r in radii
    ]
    return profile, frame


def _run_energy(config):
    model = resolve_curve(config.curve)
    center = config.point(model.n)
    radii = config.grid()
    profile, frame = _energy_table(config, model, center, radii)
    h_prime_ok = bool(np.all(frame['h_prime'] >= -3 * frame['h_prime_stderr']))
    result = profile.metadata()
    result['h_prime_nonnegative'] = h_prime_ok
    result['table'] = frame.to_dict(orient='list')
    samples = {'samples': config.samples, 'modulus_pairs': config.modulus_pairs,
               'diameter_pairs': config.diameter_pairs}
    return result, {'energy': frame}, profile.is_monotone and h_prime_ok, samples


def _run_blowdown(config):
    model = resolve_curve(config.curve)
    report = blowdown_report(model, config.point(model.n), config.grid(), sample_points=config.residual_samples,
                             samples=config.samples, seed=config.seed, tol=config.affinity_tol,
                             batch_size=config.batch_size, n_jobs=config.n_jobs)
    table = pd.DataFrame({
        'scale': report.scales,
        'deviation': report.deviations,
        'energy': report.energies,
        'energy_stderr': report.energy_errors,
        'lipschitz': report.lipschitz,
        'energy_normalized': report.energy_normalized,
        'one_lipschitz': report.one_lipschitz,
    })
    passed = not (report.hypothesis_satisfied and not report.deviations_decreasing)
    samples = {'sample_points': config.residual_samples, 'samples': config.samples}
    return report.to_dict(), {'blowdown': table}, passed, samples


def _run_proper(config):
    model = resolve_curve(config.curve)
    rows = properness_table(model, config.point(model.n), config.grid(), resolution=config.resolution,
                            max_radius=config.max_radius, directions=config.directions, seed=config.seed)
    passed = all(row.ordered for row in rows)
    if model.is_one_lipschitz:
        passed = passed and all(row.r <= row.s_r + row.resolution for row in rows)
    table = pd.DataFrame({
        'r': [row.r for row in rows],
        's_r': [row.s_r for row in rows],
        'S_r': [row.S_r for row in rows],
        'resolution': [row.resolution for row in rows],
        'inner_capped': [row.inner_capped for row in rows],
        'outer_capped': [row.outer_capped for row in rows],
    })
    result = {'rows': [row.to_dict() for row in rows], 'one_lipschitz': model.is_one_lipschitz}
    return result, {'proper': table}, passed, {'directions': config.directions}


def _run_classify(config):
    model = resolve_curve(config.curve)
    center = config.point(model.n)
    radii = config.grid()
    result = {}
    passed = True
    if config.form:
        form = resolve_form(config.form)
        check = verify_curve(model, form, Ball(center, radii[0]), samples=config.residual_samples,
                             seed=config.seed, tol=config.tol)
        result['residual'] = check.summary()
        passed = check.passed
    profile = energy_profile(model, center, radii, samples=config.samples, seed=config.seed,
                             batch_size=config.batch_size, n_jobs=config.n_jobs)
    verdict = classify_growth(profile, model, delta=config.delta, affinity_tol=config.affinity_tol)
    result['verdict'] = verdict.to_dict()
    result['profile'] = profile.metadata()
    frame = profile.to_frame()
    frame['doubling_ratio'] = [np.nan, *verdict.doubling_ratios]
    samples = {'samples': config.samples, 'residual_samples': config.residual_samples}
    return result, {'profile': frame}, passed and verdict.label != INCONCLUSIVE, samples


COMMANDS = {
    'comass': _run_comass,
    'check-curve': _run_check_curve,
    'energy': _run_energy,
    'blowdown': _run_blowdown,
    'proper': _run_proper,
    'classify': _run_classify,
}


def _run_report(config):
    """Every analysis of one curve into a single bundle plus plots"""
    sections = {}
    tables = {}
    samples = {}
    passed = True
    for command in ('comass', 'check-curve', 'energy', 'blowdown', 'proper', 'classify'):
        result, section_tables, section_passed, section_samples = COMMANDS[command](replace(config, command=command))
        sections[command] = {'result': result, 'passed': bool(section_passed)}
        tables.update(section_tables)
        samples.update(section_samples)
        passed = passed and section_passed
    return sections, tables, passed, samples


def _write_outputs(config, payload, tables, text):
    files = []
    if config.command == 'report':
        directory = config.output
        files.append(reports.write_text(os.path.join(directory, 'bundle.json'), text))
        header = reports.csv_header(payload)
        for name in sorted(tables):
            files.append(reports.write_text(os.path.join(directory, f'{name}.csv'),
                                            reports.frame_to_csv(tables[name], header)))
        files.append(reports.plot_energy_profile(tables['energy'], os.path.join(directory, 'energy.png'),
                                                 title=f"h(r) for {config.curve}"))
        files.append(reports.plot_residual_histogram(tables['residuals'], os.path.join(directory, 'residuals.png'),
                                                     title=f"Residuals of {config.curve} against {config.form}"))
    elif config.output:
        files.append(reports.write_text(config.output, text))
    return files


def run(config):
    """Execute a validated RunConfig

    Returns:
        RunResult: exit status (0 pass, 2 verdict failure), payload, the
            rendered stdout text and written files
    """
    if config.command == 'report' and not config.output:
        raise ConfigurationError("report needs --output DIRECTORY or OMEGA_OUTPUT_DIR")
    handler = _run_report if config.command == 'report' else COMMANDS[config.command]
    result, tables, passed, samples = handler(config)
    provenance = log_run(config.command, config.seed, samples)
    payload = reports.build_payload(
        schema=config.schema,
        command=config.command,
        seed=config.seed,
        samples=samples,
        parameters=config.parameters(),
        provenance=provenance,
        result=result,
        passed=passed,
    )
    if config.fmt == 'csv':
        name = next(iter(tables))
        text = reports.frame_to_csv(tables[name], reports.csv_header(payload))
    else:
        text = reports.dumps_payload(payload)
    files = _write_outputs(config, payload, tables, text)
    status = EXIT_PASS if passed else EXIT_FAIL
    if not passed:
        logger.warning(f"{config.command} verdict failed")
    return RunResult(status=status, payload=payload, text=text, tables=tables, files=files)
