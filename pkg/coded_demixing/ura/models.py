from django.db import models
from django.utils.translation import gettext_lazy as _

from coded_demixing.ura.constants import RECEIVER_MODES

MODE_CHOICES = tuple((mode, mode.replace('_', ' ').title()) for mode in RECEIVER_MODES)
AXIS_CHOICES = (('ebno', _(u'Eb/N0 (dB)')), ('k', _(u'Number of users')))


class Sweep(models.Model):
    name = models.CharField(max_length=255, blank=True, verbose_name=_(u"Scenario Name"))
    mode = models.CharField(max_length=20, choices=MODE_CHOICES, verbose_name=_(u"Receiver Mode"))
    axis = models.CharField(max_length=4, choices=AXIS_CHOICES, verbose_name=_(u"Axis"))
    bins = models.PositiveIntegerField(default=1, verbose_name=_(u"Bins"))
    trials = models.PositiveIntegerField(verbose_name=_(u"Trials per Point"))
    seed = models.BigIntegerField(verbose_name=_(u"Master Seed"))
    scenario = models.JSONField(verbose_name=_(u"Scenario"))
    diverged = models.PositiveIntegerField(default=0, verbose_name=_(u"Diverged Trials"))

    created_at = models.DateTimeField(auto_now_add=True, verbose_name=_(u"Created At"))

    class Meta:
        verbose_name = _(u'Sweep')
        verbose_name_plural = _(u'Sweeps')
        ordering = ['-created_at', '-id']

    def __str__(self):
        return "%s (%s over %s, G=%d)" % (self.name or 'sweep', self.mode, self.axis, self.bins)

    @classmethod
    def from_result(cls, result):
        """Persists a harness SweepResult with all its rows."""
        scenario = result.scenario
        sweep = cls.objects.create(name=scenario.name, mode=scenario.mode, axis=result.axis,
                                   bins=scenario.binning.bins, trials=result.rows[0].trials if result.rows else 0,
                                   seed=scenario.seed, scenario=scenario.to_dict(), diverged=result.diverged)
        SweepPoint.objects.bulk_create([
            SweepPoint(sweep=sweep, axis_value=row.axis_value, group_id=str(row.group_id), pupe=row.pupe,
                       md=row.md, fa=row.fa, trials=row.trials, errors=row.errors, sent=row.sent,
                       ci_lo=row.ci_lo, ci_hi=row.ci_hi)
            for row in result.rows
        ])
        return sweep


class SweepPoint(models.Model):
    sweep = models.ForeignKey(Sweep, related_name='points', on_delete=models.CASCADE, verbose_name=_(u"Sweep"))
    axis_value = models.FloatField(verbose_name=_(u"Axis Value"))
    group_id = models.CharField(max_length=10, verbose_name=_(u"Group"))
    pupe = models.FloatField(verbose_name=_(u"PUPE"))
    md = models.FloatField(verbose_name=_(u"Missed Detection"))
    fa = models.FloatField(verbose_name=_(u"False Alarm"))
    trials = models.PositiveIntegerField(verbose_name=_(u"Trials"))
    errors = models.PositiveIntegerField(default=0, verbose_name=_(u"Missed Messages"))
    sent = models.PositiveIntegerField(default=0, verbose_name=_(u"Sent Messages"))
    ci_lo = models.FloatField(verbose_name=_(u"CI Lower"))
    ci_hi = models.FloatField(verbose_name=_(u"CI Upper"))

    class Meta:
        verbose_name = _(u'Sweep Point')
        verbose_name_plural = _(u'Sweep Points')
        ordering = ['sweep', 'axis_value', 'id']

    def __str__(self):
        return "%s=%s group %s: %.4g" % (self.sweep.axis, self.axis_value, self.group_id, self.pupe)


class ThresholdRun(models.Model):
    name = models.CharField(max_length=255, blank=True, verbose_name=_(u"Scenario Name"))
    mode = models.CharField(max_length=20, choices=MODE_CHOICES, verbose_name=_(u"Receiver Mode"))
    bins = models.PositiveIntegerField(default=1, verbose_name=_(u"Bins"))
    target = models.FloatField(verbose_name=_(u"Target PUPE"))
    ebno_db = models.FloatField(verbose_name=_(u"Required Eb/N0 (dB)"))
    low = models.FloatField(verbose_name=_(u"Bracket Low"))
    high = models.FloatField(verbose_name=_(u"Bracket High"))
    resolved = models.BooleanField(default=True, verbose_name=_(u"Resolved"))
    scenario = models.JSONField(verbose_name=_(u"Scenario"))
    evaluations = models.JSONField(default=list, verbose_name=_(u"Evaluations"))

    created_at = models.DateTimeField(auto_now_add=True, verbose_name=_(u"Created At"))

    class Meta:
        verbose_name = _(u'Threshold Run')
        verbose_name_plural = _(u'Threshold Runs')
        ordering = ['-created_at', '-id']

    def __str__(self):
        return "%s: %.2f dB at PUPE %s" % (self.name or 'threshold', self.ebno_db, self.target)

    @classmethod
    def from_result(cls, scenario, result):
        return cls.objects.create(name=scenario.name, mode=scenario.mode, bins=scenario.binning.bins,
                                  target=result.target, ebno_db=result.ebno_db, low=result.low, high=result.high,
                                  resolved=result.resolved, scenario=scenario.to_dict(),
                                  evaluations=result.evaluations)
