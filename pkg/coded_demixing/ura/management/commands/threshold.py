from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from coded_demixing.ura.exceptions import DemixingError
from coded_demixing.ura.harness import find_threshold
from coded_demixing.ura.models import ThresholdRun
from coded_demixing.ura.serializers import load_scenario


class Command(BaseCommand):
    help = 'Bisects Eb/N0 for the point where the overall PUPE crosses a target.'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Scenario JSON file')
        parser.add_argument('--target', type=float, default=0.05)
        parser.add_argument('--tolerance', type=float, default=0.1, help='Bracket width to stop at, in dB')
        parser.add_argument('--low', type=float, default=0.0)
        parser.add_argument('--high', type=float, default=6.0)
        parser.add_argument('--trials', type=int)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--workers', type=int, default=settings.DEMIXING['WORKERS'])
        parser.add_argument('--save', action='store_true', help='Also store the search in the database')

    def handle(self, *args, **options):
        if not 0 < options['target'] < 1:
            raise CommandError('Target PUPE must lie in (0, 1).')
        try:
            scenario = load_scenario(options['config'])
            result = find_threshold(scenario, target=options['target'], tolerance_db=options['tolerance'],
                                    low=options['low'], high=options['high'], trials=options['trials'],
                                    seed=options['seed'], workers=options['workers'])
        except (OSError, ValidationError, DemixingError) as e:
            raise CommandError(str(e))

        status = 'resolved' if result.resolved else 'unresolved (CI straddles the target)'
        self.stdout.write('%.4f dB in [%.4f, %.4f] at PUPE %s, %s' % (result.ebno_db, result.low, result.high,
                                                                      result.target, status))
        if options['save']:
            saved = ThresholdRun.from_result(scenario, result)
            self.stderr.write(self.style.SUCCESS('Saved threshold run #%d.' % saved.pk))
