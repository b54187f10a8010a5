"""Run provenance logging"""
from flask import current_app, has_app_context
import logging

logger = logging.getLogger(__name__)


def log_run(command, seed, samples, details=None):
    """Log a CLI run and return its provenance record

    Args:
        command (str): Command being run
        seed (int): Master seed of the run
        samples (dict): Sample counts used, by name
        details (str): Additional details about the run

    Returns:
        dict: Provenance embedded in the report payload
    """
    from omegacurves import __version__

    record = {
        'command': command,
        'seed': seed,
        'samples': dict(samples),
        'version': __version__,
    }
    message = f"Run: {command} seed={seed} samples={record['samples']}"
    if details:
        message += f" - {details}"
    if has_app_context():
        current_app.logger.info(message)
    else:
        logger.info(message)
    return record
