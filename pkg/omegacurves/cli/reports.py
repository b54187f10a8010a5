"""Report serialization: versioned JSON payloads, CSV tables and static plots"""
from datetime import datetime, timezone
import json
import logging
import math
import os

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np

logger = logging.getLogger(__name__)

TIMESTAMP_FIELD = 'generated_at'


def to_jsonable(value):
    """Convert numpy values, tuples and non-finite floats into plain JSON types

    nan becomes null, infinities become the strings "inf" and "-inf".
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    return value


def build_payload(schema, command, seed, samples, parameters, provenance, result, passed):
    return {
        'schema': schema,
        'command': command,
        TIMESTAMP_FIELD: datetime.now(timezone.utc).isoformat(),
        'seed': seed,
        'samples': samples,
        'parameters': parameters,
        'provenance': provenance,
        'result': result,
        'passed': bool(passed),
    }


def dumps_payload(payload):
    """Stable JSON text: sorted keys, fixed indentation, trailing newline"""
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2) + '\n'


def strip_timestamp(payload):
    """Payload without its timestamp, for determinism comparisons"""
    return {k: v for k, v in payload.items() if k != TIMESTAMP_FIELD}


def write_text(path, text):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        handle.write(text)
    logger.info(f"Wrote {path}")
    return path


def frame_to_csv(frame, header=None):
    """CSV text of a table, preceded by an optional ``#`` comment line"""
    text = frame.to_csv(index=False, lineterminator='\n')
    return (header or '') + text


def csv_header(payload):
    """Comment line keeping the run provenance with a CSV table

    Args:
        payload (dict): Report payload from build_payload

    Returns:
        str: ``# schema=1 command=energy seed=3 samples=4000 ...`` with a
            trailing newline
    """
    fields = {'schema': payload['schema'], 'command': payload['command'], 'seed': payload['seed']}
    fields.update(payload['samples'])
    return '# ' + ' '.join(f"{key}={value}" for key, value in fields.items()) + '\n'


def read_csv_header(text):
    """Parse the provenance comment back from CSV text

    Returns:
        dict: Header fields, integers converted; empty without a header
    """
    first = text.split('\n', 1)[0]
    if not first.startswith('#'):
        return {}
    fields = {}
    for token in first[1:].split():
        key, _, value = token.partition('=')
        fields[key] = int(value) if value.lstrip('-').isdigit() else value
    return fields


def plot_energy_profile(frame, path, title=None):
    """Log-log plot of h(r) with 3-sigma error bars"""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(frame['r'], frame['h'], yerr=3 * frame['h_stderr'], marker='o', lw=1.5, capsize=3)
    ax.set_xscale('log')
    if (frame['h'] > 0).all():
        ax.set_yscale('log')
    ax.set_xlabel('r')
    ax.set_ylabel('h(r)')
    ax.set_title(title or 'Energy average h(r)')
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path


def plot_residual_histogram(frame, path, title=None):
    """Histogram of the sampled Cauchy–Riemann residuals"""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(frame['residual'], bins=40)
    ax.set_xlabel('‖DF‖ⁿ − ⋆F*ω')
    ax.set_ylabel('count')
    ax.set_title(title or 'Residual distribution')
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path
