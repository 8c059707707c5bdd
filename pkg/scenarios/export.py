"""
CSV and JSON writers for scenario outputs
"""
import json
import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.12e'
FRAME_COLUMNS = ['omega_k', 'S', 'S_R', 'S_C', 'S_cross']


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return {'re': _jsonable(value.real), 'im': _jsonable(value.imag)}
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def dumps(data):
    """Deterministic JSON: sorted keys, non-finite floats as strings."""
    return json.dumps(_jsonable(data), sort_keys=True, indent=2, ensure_ascii=False)


def write_json(path, data):
    path = Path(path)
    path.write_text(dumps(data) + '\n', encoding='utf-8')
    logger.info("wrote %s", path)
    return path


def write_table(path, table, header=None):
    """
    DataFrame (or column mapping) as CSV, preceded by '# key: json' comment
    lines for each header entry.
    """
    path = Path(path)
    table = table if isinstance(table, pd.DataFrame) else pd.DataFrame(table)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        for key, value in (header or {}).items():
            handle.write(f"# {key}: {json.dumps(_jsonable(value), sort_keys=True, ensure_ascii=False)}\n")
        table.to_csv(handle, index=False, float_format=FLOAT_FORMAT, na_rep='nan')
    logger.info("wrote %s (%d rows)", path, len(table))
    return path


def frame_table(frame, oracle=None):
    """Frame columns; `oracle` adds S_oracle sampled on the same grid."""
    columns = {'omega_k': frame.grid, 'S': frame.S}
    for name in FRAME_COLUMNS[2:]:
        columns[name] = frame.components.get(name, np.full_like(frame.S, np.nan))
    if oracle is not None:
        columns['S_oracle'] = oracle
    return pd.DataFrame(columns, columns=list(columns))


def frame_header(frame, run_spec):
    return {
        'run_spec': run_spec.as_dict(),
        'frame': {
            'label': frame.label,
            't': frame.t,
            'omega_t': frame.omega_t,
            'branch_error': frame.metadata.get('branch_error', 0.0),
        },
    }


def write_frame(path, frame, run_spec, oracle=None):
    return write_table(path, frame_table(frame, oracle), frame_header(frame, run_spec))

