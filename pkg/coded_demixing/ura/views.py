from django.utils.translation import gettext_lazy as _

from coded_demixing.ura.base_views import ListView, RetrieveView, CreateView
from coded_demixing.ura.filters import filter_sweeps, filter_thresholds
from coded_demixing.ura.harness import run_trial, trial_seed
from coded_demixing.ura.models import Sweep, ThresholdRun
from coded_demixing.ura.serializers import (SweepSerializer, SweepDetailSerializer, ThresholdRunSerializer,
                                            TrialOutcomeSerializer, TrialRequestSerializer)


class SweepsView(ListView):
    """
    Lists persisted sweeps. Parameters: mode, bins, axis, name (for filtering).
    """
    serializer_class = SweepSerializer
    model_name = 'sweep'

    def get_queryset(self):
        return filter_sweeps(Sweep.objects.all(), self.request.query_params)


class SweepDetailView(RetrieveView):
    """
    A sweep with all of its points, one row per axis value and group.
    """
    serializer_class = SweepDetailSerializer
    queryset = Sweep.objects.prefetch_related('points')
    model_name = 'sweep'


class ThresholdsView(ListView):
    """
    Lists threshold searches. Parameters: mode, bins, name (for filtering).
    """
    serializer_class = ThresholdRunSerializer
    model_name = 'threshold'

    def get_queryset(self):
        return filter_thresholds(ThresholdRun.objects.all(), self.request.query_params)


class TrialView(CreateView):
    """
    post:
    Validates a scenario and runs a single trial with the given seed.
    """
    serializer_class = TrialRequestSerializer
    model_name = 'trial'
    message = dict(CreateView.message, create=_("Trial finished."))

    def perform_create(self, serializer):
        scenario = serializer.validated_data['scenario']
        outcome = run_trial(scenario, trial_seed(serializer.validated_data['seed']))
        return TrialOutcomeSerializer(outcome).data
