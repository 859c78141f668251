import os

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from coded_demixing.ura.constants import SWEEP_AXES
from coded_demixing.ura.exceptions import DemixingError
from coded_demixing.ura.harness import sweep, write_csv
from coded_demixing.ura.models import Sweep
from coded_demixing.ura.serializers import load_scenario


class Command(BaseCommand):
    help = 'Sweeps Eb/N0 or the user count for a scenario and writes PUPE, MD and FA rows as CSV.'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Scenario JSON file')
        parser.add_argument('--axis', choices=SWEEP_AXES, default='ebno')
        parser.add_argument('--points', nargs='+', type=float, required=True)
        parser.add_argument('--trials', type=int, help='Trials per point (defaults to the scenario value)')
        parser.add_argument('--seed', type=int, help='Master seed (defaults to the scenario value)')
        parser.add_argument('--workers', type=int, default=settings.DEMIXING['WORKERS'])
        parser.add_argument('--out', help='CSV path, relative to RESULTS_DIR; "-" or absent writes to stdout')
        parser.add_argument('--save', action='store_true', help='Also store the sweep in the database')

    def handle(self, *args, **options):
        try:
            scenario = load_scenario(options['config'])
            result = sweep(scenario, options['axis'], options['points'], trials=options['trials'],
                           seed=options['seed'], workers=options['workers'])
        except (OSError, ValidationError, DemixingError) as e:
            raise CommandError(str(e))

        out = options['out']
        if out and out != '-':
            out = os.path.join(settings.DEMIXING['RESULTS_DIR'], out)
            directory = os.path.dirname(out)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(out, 'w', newline='') as stream:
                write_csv(result, stream)
        else:
            write_csv(result, self.stdout)

        if result.diverged:
            self.stderr.write('%d trial(s) flagged AMP divergence.' % result.diverged)
        if options['save']:
            saved = Sweep.from_result(result)
            self.stderr.write(self.style.SUCCESS('Saved sweep #%d.' % saved.pk))
