"""
python manage.py convergence_report --scenario fig2a

Same as run_scenario --convergence.
"""
from .run_scenario import Command as RunScenarioCommand


class Command(RunScenarioCommand):
    help = "Run a scenario and certify its convergence (exit status 3 when not certified)"

    def handle(self, *args, **options):
        options['convergence'] = True
        return super().handle(*args, **options)
