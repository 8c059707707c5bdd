"""
python manage.py run_scenario --scenario fig2a --out output/fig2a
"""

from django.core.management.base import BaseCommand, CommandError

from floquet.amplitudes import DegenerateResonanceError
from floquet.poles import PoleConvergenceError
from oracle.tdse import ResolutionError, StepSizeError
from scenarios.config import ConfigError, parse_config
from scenarios.convergence import convergence_report
from scenarios.presets import PRESETS
from scenarios.runner import output_directory, run_scenario


EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class Command(BaseCommand):
    help = "Compute spectrum frames for a run configuration or a named scenario and write CSV/JSON outputs"

    def add_arguments(self, parser):
        parser.add_argument('--config', help="INI run configuration with a [settings] section")
        parser.add_argument('--scenario', choices=sorted(PRESETS), help="Named preset")
        parser.add_argument('--out', help="Output directory (default: output_dir setting)")
        parser.add_argument(
            '--override', action='append', metavar='KEY=VALUE',
            help="Configuration value applied on top of the file or preset; repeatable",
        )
        parser.add_argument('--oracle', action='store_true', help="Add the time-domain oracle columns")
        parser.add_argument('--branch-term', action='store_true', help="Include the branch-cut term")
        parser.add_argument('--convergence', action='store_true', help="Also write convergence_report.json")

    def load(self, options):
        overrides = list(options['override'] or [])
        if options['oracle']:
            overrides.append('oracle=on')
        if options['branch_term']:
            overrides.append('branch_term=on')
        if not options['config'] and not options['scenario']:
            raise CommandError("either --config or --scenario is required", returncode=EXIT_CONFIG)
        try:
            return parse_config(options['config'], overrides, options['scenario'])
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=EXIT_CONFIG)

    def handle(self, *args, **options):
        run_spec = self.load(options)
        try:
            written = run_scenario(run_spec, options['out'])
            report = None
            if options['convergence']:
                path, report = convergence_report(run_spec, output_directory(run_spec, options['out']))
                written.append(path)
        except (PoleConvergenceError, StepSizeError, ResolutionError, DegenerateResonanceError) as exc:
            raise CommandError(f"numerical failure: {exc}", returncode=EXIT_NUMERICAL)
        except OSError as exc:
            raise CommandError(f"could not write outputs: {exc}", returncode=EXIT_IO)

        for path in written:
            self.stdout.write(str(path))
        if report is not None and not report['certified']:
            failing = [c['name'] for c in report['criteria'] if c['certifying'] and not c['passed']]
            raise CommandError(
                f"convergence not certified: {', '.join(failing)}", returncode=EXIT_NUMERICAL
            )
        self.stdout.write(self.style.SUCCESS(f"{len(written)} files written"))
