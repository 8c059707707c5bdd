"""
Named scenario presets.

Values are raw configuration strings, exactly as they would appear in the
[settings] section of a run configuration, so presets go through the same
validation as user files.
"""

REFERENCE_DRIVE = {
    'delta0': '20',
    'omega': '1',
    'a': '10',
    'lam': '0.06',
    'theta': '0',
    # sidebands drawn at delta0 + m*omega
    'lamb_shift': 'imaginary_only',
}

# omega*t from 0 to 6 pi in steps of pi/8
CONTOUR_TIMES = ', '.join(f'{k}pi/8' for k in range(0, 49))

PRESETS = {
    'fig2a': {
        **REFERENCE_DRIVE,
        'times': 'inf',
    },
    'fig2b': {
        **REFERENCE_DRIVE,
        'theta': 'pi/2',
        'times': 'inf',
    },
    'fig3': {
        **REFERENCE_DRIVE,
        'times': 'pi/4, pi/2, pi, 2pi, inf',
        'time_unit': 'phase',
    },
    'fig4a': {
        **REFERENCE_DRIVE,
        'times': CONTOUR_TIMES + ', inf',
        'time_unit': 'phase',
        'contour': 'on',
    },
    'fig4b': {
        **REFERENCE_DRIVE,
        'theta': 'pi/2',
        'times': CONTOUR_TIMES + ', inf',
        'time_unit': 'phase',
        'contour': 'on',
    },
    'cutoff_scan': {
        **REFERENCE_DRIVE,
        'scan_a': '5, 10, 15',
        'times': 'inf',
    },
    'decay': {
        **REFERENCE_DRIVE,
        'lamb_shift': 'full',
        'times': 'pi, 2pi, 4pi, inf',
        'time_unit': 'phase',
        'pole_method': 'self_consistent',
        'normalization': 'on',
        'oracle': 'on',
        # far off-resonant modes up to the cutoff set the step
        'oracle_dt': '0.0003',
    },
}

SCENARIO_CHOICES = [(name, name) for name in PRESETS]


def expand_scenario(name):
    """Copy of the preset's raw values; KeyError for unknown names."""
    return dict(PRESETS[name], scenario=name)
