"""Command-line front end

Commands are registered on the application CLI, so they run as
``python run.py <command>`` or ``flask --app run <command>``. Each
command's ``--help`` lists the columns of its CSV table; CSV output
starts with a ``#`` line carrying the schema, command, seed and sample
counts.

Exit status: 0 pass, 2 verdict failure, 1 usage, parse or configuration error.
"""
import click
from flask import current_app

from omegacurves.cli import cli_bp
from omegacurves.cli.runner import EXIT_USAGE, RunConfig, run
from omegacurves.errors import OmegaCurveError


class OmegaCommand(click.Command):
    """click command whose usage errors exit with status 1"""

    def parse_args(self, ctx, args):
        try:
            return super().parse_args(ctx, args)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise


curve_option = click.option('--curve', help='Catalog curve (identity:3, zsquare, exp ...) or curve spec file')
form_option = click.option('--form', help='Catalog form (volume:3, symplectic:2, slag:3,0 ...) or form file')
center_option = click.option('--center', help='Comma-separated center, the origin by default')
radii_option = click.option('--radii', help='Geometric grid start x factor x count, e.g. 1x2x5')
seed_option = click.option('--seed', type=int, help='Master seed (defaults to OMEGA_SEED)')
samples_option = click.option('--samples', type=int, help='Monte-Carlo points per estimate')
format_option = click.option('--format', 'fmt', help='Output format: json or csv')
output_option = click.option('--output', help='Write the report to this path instead of stdout')

CSV_COLUMNS = {
    'comass': 'restart, value, iterations',
    'check-curve': 'x1..xn, residual',
    'energy': 'r, h, h_stderr, sphere_<p>, sphere_<p>_stderr, h_prime, h_prime_stderr, '
              'isoperimetric_gap, isoperimetric_gap_stderr, caccioppoli, modulus',
    'blowdown': 'scale, deviation, energy, energy_stderr, lipschitz, energy_normalized, one_lipschitz',
    'proper': 'r, s_r, S_r, resolution, inner_capped, outer_capped',
    'classify': 'r, h, h_stderr, sphere_<n>, sphere_<n>_stderr, doubling_ratio',
}


def csv_epilog(command):
    # \b keeps click from rewrapping the column list
    return f"\b\nCSV columns: {CSV_COLUMNS[command]}"


REPORT_EPILOG = (
    "\b\nBundle: bundle.json, comass.csv, residuals.csv, energy.csv, blowdown.csv, proper.csv,\n"
    "profile.csv, energy.png, residuals.png; the CSV tables have the columns of their commands"
)


def _execute(command, **options):
    ctx = click.get_current_context()
    try:
        config = RunConfig.from_settings(command, current_app.config, **options)
        result = run(config)
    except OmegaCurveError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_USAGE)
    if result.files:
        for path in result.files:
            click.echo(path)
    else:
        click.echo(result.text, nl=False)
    ctx.exit(result.status)


@cli_bp.cli.command('comass', cls=OmegaCommand, epilog=csv_epilog('comass'))
@form_option
@click.option('--restarts', type=int, help='Independent ascent restarts')
@click.option('--tol', 'comass_tol', type=float, help='Frame-movement stopping tolerance')
@click.option('--max-iter', type=int, help='Iteration cap per restart')
@click.option('--require-calibration', is_flag=True, default=None, help='Fail unless the comass is at most 1')
@seed_option
@format_option
@output_option
def comass_command(**options):
    """Estimate the comass of a constant-coefficient form"""
    _execute('comass', **options)


@cli_bp.cli.command('check-curve', cls=OmegaCommand, epilog=csv_epilog('check-curve'))
@curve_option
@form_option
@center_option
@click.option('--radius', type=float, help='Radius of the sampled ball (default 1)')
@click.option('--samples', 'residual_samples', type=int, help='Sample points')
@click.option('--tol', type=float, help='Pass threshold on max |residual|')
@seed_option
@format_option
@output_option
def check_curve_command(**options):
    """Sample the residual ‖DF‖ⁿ − ⋆F*ω of a curve against a calibration"""
    _execute('check-curve', **options)


@cli_bp.cli.command('energy', cls=OmegaCommand, epilog=csv_epilog('energy'))
@curve_option
@center_option
@radii_option
@samples_option
@click.option('--pairs', 'modulus_pairs', type=int, help='Point pairs of the modulus constant')
@seed_option
@format_option
@output_option
def energy_command(**options):
    """Energy profile h(r) with isoperimetric, Caccioppoli and modulus columns"""
    _execute('energy', **options)


@cli_bp.cli.command('blowdown', cls=OmegaCommand, epilog=csv_epilog('blowdown'))
@curve_option
@center_option
@radii_option
@samples_option
@click.option('--points', 'residual_samples', type=int, help='Deviation sample size')
@click.option('--tol', 'affinity_tol', type=float, help='Tolerance of the hypothesis checks')
@seed_option
@format_option
@output_option
def blowdown_command(**options):
    """Isometry deviations of the blow-downs over a grid of scales"""
    _execute('blowdown', **options)


@cli_bp.cli.command('proper', cls=OmegaCommand, epilog=csv_epilog('proper'))
@curve_option
@center_option
@radii_option
@click.option('--resolution', type=float, help='Bisection resolution')
@click.option('--max-radius', type=float, help='Search cap')
@click.option('--directions', type=int, help='Sampled directions per sphere')
@seed_option
@format_option
@output_option
def proper_command(**options):
    """Inner and outer properness radii for each target radius"""
    _execute('proper', **options)


@cli_bp.cli.command('classify', cls=OmegaCommand, epilog=csv_epilog('classify'))
@curve_option
@form_option
@center_option
@radii_option
@samples_option
@click.option('--delta', type=float, help='Doubling-ratio margin')
@click.option('--affinity-tol', type=float, help='Relative affine-fit tolerance')
@seed_option
@format_option
@output_option
def classify_command(**options):
    """Classify energy growth as AffineBounded or SuperEuclidean"""
    _execute('classify', **options)


@cli_bp.cli.command('report', cls=OmegaCommand, epilog=REPORT_EPILOG)
@curve_option
@form_option
@center_option
@radii_option
@samples_option
@seed_option
@click.option('--output', help='Bundle directory (defaults to OMEGA_OUTPUT_DIR)')
def report_command(**options):
    """Run every analysis into one bundle with CSV tables and plots"""
    _execute('report', **options)
