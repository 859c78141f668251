from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError
from rest_framework.renderers import JSONRenderer

from coded_demixing.ura.exceptions import DemixingError
from coded_demixing.ura.harness import run_trial, trial_seed
from coded_demixing.ura.serializers import TrialOutcomeSerializer, load_scenario


class Command(BaseCommand):
    help = 'Runs one trial and prints its outcome; --verbose adds per-iteration diagnostics as JSON lines.'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Scenario JSON file')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--verbose', action='store_true')

    def emit(self, record):
        self.stdout.write(JSONRenderer().render(record).decode('utf-8'))

    def handle(self, *args, **options):
        try:
            scenario = load_scenario(options['config'])
            outcome = run_trial(scenario, trial_seed(options['seed']))
        except (OSError, ValidationError, DemixingError) as e:
            raise CommandError(str(e))

        if options['verbose']:
            for number, trace in enumerate(outcome.diagnostics.get('passes', [])):
                for step in trace['iterations']:
                    self.emit(dict(step, event='amp', groups=trace['groups'], **{'pass': number}))
                self.emit({'event': 'pass', 'pass': number, 'groups': trace['groups'], 'users': trace['users'],
                           'diverged': trace['diverged']})
            if 'occupancy' in outcome.diagnostics:
                self.emit({'event': 'occupancy', 'counts': outcome.diagnostics['occupancy']})
            self.emit({'event': 'extraction', 'inconsistent': outcome.diagnostics.get('inconsistent', 0)})

        data = dict(TrialOutcomeSerializer(outcome).data)
        data.pop('diagnostics', None)
        self.emit(dict(data, event='outcome'))
