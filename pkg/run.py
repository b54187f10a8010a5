#!/usr/bin/env python3
"""Application entry point: python run.py <command> [options]"""
import os
from flask.cli import FlaskGroup
from omegacurves import create_app
from omegacurves.calibration import catalog, comass, parse_form_name
from omegacurves.curve import curve_catalog, parse_curve_name, verify_curve

# Create application instance
app = create_app(os.getenv('FLASK_ENV') or 'development')


@app.shell_context_processor
def make_shell_context():
    """Make the catalogs available in flask shell"""
    return {
        'catalog': catalog,
        'parse_form_name': parse_form_name,
        'comass': comass,
        'curve_catalog': curve_catalog,
        'parse_curve_name': parse_curve_name,
        'verify_curve': verify_curve,
    }


cli = FlaskGroup(create_app=lambda: app, add_default_commands=False)


if __name__ == '__main__':
    cli()
