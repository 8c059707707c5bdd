"""
Scenario execution: spectrum frames, sideband tables, survival curves,
optional oracle columns and the run summary.
"""
import logging
import math
import time
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings

from floquet.analysis import (
    cutoff_index,
    cutoff_scaling,
    envelope_correlation,
    excited_energy,
    plateau_median,
    sideband_peaks,
    spectral_weight,
)
from floquet.params import LambShift

from . import export
from .context import ScenarioContext, run_oracle
from .convergence import truncation_doubling

logger = logging.getLogger(__name__)

SURVIVAL_SAMPLES = 201


def survival_times(run_spec, gamma):
    horizon = max(run_spec.finite_times, default=0.0)
    if gamma > 0:
        horizon = max(horizon, 4.0 / gamma)
    else:
        horizon = max(horizon, 4.0 * math.pi / run_spec.params.omega)
    return np.linspace(0.0, horizon, SURVIVAL_SAMPLES)


def sideband_table(frame, context):
    peaks = sideband_peaks(frame, context.params, context.poles)
    table = pd.DataFrame(
        [[p.m, p.center, p.height, p.bessel_weight, int(p.located)] for p in peaks],
        columns=['m', 'center', 'height', 'bessel_weight', 'located'],
    )
    plateau = int(math.floor(context.params.a))
    summary = {
        'cutoff_index': cutoff_index(peaks, context.params),
        'plateau_median': plateau_median(peaks, context.params),
        'envelope_correlation': envelope_correlation(peaks, plateau),
    }
    return table, summary


def contour_table(frames, params):
    """Long-format (t, omega_t, omega_k, S, E_e) rows over the finite frames."""
    pieces = []
    for frame in frames:
        pieces.append(pd.DataFrame({
            't': np.full(frame.grid.size, frame.t),
            'omega_t': np.full(frame.grid.size, frame.omega_t),
            'omega_k': frame.grid,
            'S': frame.S,
            'E_e': np.full(frame.grid.size, excited_energy(frame.t, params)),
        }))
    return pd.concat(pieces, ignore_index=True)


def run_cutoff_scan(run_spec, out_dir, header):
    """Stationary sideband ladders for each drive amplitude in scan_a."""
    rows, files = [], []
    for a in run_spec.scan_a:
        sub = run_spec.for_drive(a)
        context = ScenarioContext.build(sub)
        frame = context.frame(math.inf)
        files.append(export.write_frame(out_dir / f"frame_a{a:g}_stationary.csv", frame, sub))
        table, summary = sideband_table(frame, context)
        files.append(export.write_table(out_dir / f"sidebands_a{a:g}_stationary.csv", table, header))
        rows.append({'a': a, **summary})
    scaling = cutoff_scaling([r['a'] for r in rows], [r['cutoff_index'] for r in rows])
    result = {
        'rows': rows,
        'slope': scaling.slope,
        'intercept': scaling.intercept,
        'r_squared': scaling.r_squared,
        'quadratic_r_squared': scaling.quadratic_r_squared,
        'linear_preferred': scaling.linear_preferred,
    }
    files.append(export.write_table(out_dir / 'cutoff_scan.csv', pd.DataFrame(rows), header))
    return result, files


def output_directory(run_spec, out_dir=None):
    out = Path(out_dir or run_spec.output_dir or settings.HHG_OUTPUT_DIR)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_scenario(run_spec, out_dir=None):
    """
    Evaluate every requested frame and write the outputs. Returns the written
    paths; summary.json is deterministic, wall-clock timings go to timing.json.
    """
    out = output_directory(run_spec, out_dir)
    header = {'run_spec': run_spec.as_dict()}
    timing = {}
    written = []

    started = time.perf_counter()
    context = ScenarioContext.build(run_spec)
    timing['poles'] = time.perf_counter() - started

    oracle_run = None
    if run_spec.oracle:
        started = time.perf_counter()
        if run_spec.continuum.lamb_shift != LambShift.FULL:
            logger.warning("oracle columns carry the full Lamb shift; analytic frames use %s",
                           run_spec.continuum.lamb_shift)
        oracle_run = run_oracle(run_spec)
        timing['oracle'] = time.perf_counter() - started

    frames, frame_summaries, sidebands = [], [], {}
    started = time.perf_counter()
    for t in run_spec.times:
        frame = context.frame(t)
        frames.append(frame)
        oracle_column = None
        if oracle_run is not None and not frame.is_stationary:
            oracle_column = oracle_run.spectrum_on(frame.grid, t)
        path = export.write_frame(out / f"frame_{frame.label}.csv", frame, run_spec, oracle_column)
        written.append(path)
        frame_summaries.append({
            'label': frame.label,
            't': frame.t,
            'omega_t': frame.omega_t,
            'file': path.name,
            'spectral_weight': spectral_weight(frame),
            'branch_error': frame.metadata.get('branch_error', 0.0),
        })
        if frame.is_stationary:
            table, summary = sideband_table(frame, context)
            written.append(export.write_table(out / f"sidebands_{frame.label}.csv", table, header))
            sidebands[frame.label] = summary
    timing['frames'] = time.perf_counter() - started

    if run_spec.contour:
        finite = [f for f in frames if not f.is_stationary]
        if finite:
            written.append(export.write_table(out / 'contour.csv', contour_table(finite, run_spec.params), header))

    times = survival_times(run_spec, context.gamma)
    survival = {
        't': times,
        'omega_t': run_spec.params.omega * times,
        'survival': np.abs(context.survival(times)) ** 2,
    }
    if oracle_run is not None:
        survival['oracle'] = oracle_run.survival_on(times)
    written.append(export.write_table(out / 'survival.csv', survival, header))

    summary = {
        'run_spec': run_spec.as_dict(),
        'truncation': run_spec.truncation,
        'gamma': context.gamma,
        'weak_coupling_ratio': run_spec.params.weak_coupling_ratio,
        'poles': [pole.as_dict() for pole in context.poles],
        'frames': frame_summaries,
        'sidebands': sidebands,
    }

    started = time.perf_counter()
    summary['certificates'] = {'truncation_doubling': truncation_doubling(run_spec, context).as_dict()}
    timing['certificates'] = time.perf_counter() - started

    if run_spec.scan_a:
        started = time.perf_counter()
        summary['cutoff_scan'], files = run_cutoff_scan(run_spec, out, header)
        written.extend(files)
        timing['cutoff_scan'] = time.perf_counter() - started

    if oracle_run is not None:
        traj = oracle_run.trajectory
        summary['oracle'] = {
            'n_modes': traj.model.n_modes,
            'dt': traj.dt,
            't_end': float(traj.times[-1]),
            'norm_drift': traj.norm_drift,
            'step_change': traj.step_change,
            'decay': oracle_run.decay,
        }

    summary['files'] = sorted(path.name for path in written) + ['summary.json', 'timing.json']
    written.append(export.write_json(out / 'summary.json', summary))
    written.append(export.write_json(out / 'timing.json', {'run_spec': run_spec.as_dict(), 'seconds': timing}))
    return written
