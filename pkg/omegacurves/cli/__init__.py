"""CLI blueprint initialization"""
from flask import Blueprint

cli_bp = Blueprint('cli', __name__, cli_group=None)

from omegacurves.cli import commands
