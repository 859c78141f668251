import json
from fractions import Fraction

from django.conf import settings
from django.utils.translation import gettext_lazy as _
from rest_framework import serializers

from coded_demixing.ura.access import AmpSettings, BinningConfig, GroupConfig, Scenario
from coded_demixing.ura.constants import (MAX_BINID_POWER_FRACTION, MAX_SECTION_BITS, MIN_SECTION_BITS,
                                          OCCUPANCY_METHODS, RECEIVER_MODES, SENSING_KINDS)
from coded_demixing.ura.exceptions import DemixingError
from coded_demixing.ura.graph import CheckNode, FactorGraph
from coded_demixing.ura.helper import bit_string
from coded_demixing.ura.models import Sweep, SweepPoint, ThresholdRun
from coded_demixing.ura.sensing import operator_from_spec


def demixing_default(key):
    return lambda: settings.DEMIXING[key]


def defaults_of(serializer_class):
    serializer = serializer_class(data={})
    serializer.is_valid(raise_exception=True)
    return dict(serializer.validated_data)


class RateField(serializers.CharField):
    """A rational rate written as "p/q" (or a decimal)."""

    def to_internal_value(self, data):
        try:
            rate = Fraction(str(super(RateField, self).to_internal_value(data)))
        except (ValueError, ZeroDivisionError):
            raise serializers.ValidationError(_("Rate must look like 1/2."))
        if not 0 < rate < 1:
            raise serializers.ValidationError(_("Rate must lie strictly between 0 and 1."))
        return rate

    def to_representation(self, value):
        return str(value)


class GroupSerializer(serializers.Serializer):
    users = serializers.IntegerField(min_value=0)
    section_bits = serializers.IntegerField(min_value=MIN_SECTION_BITS, max_value=MAX_SECTION_BITS)
    sections = serializers.IntegerField(min_value=2)
    rate = RateField(default=Fraction(1, 2))
    sensing = serializers.ChoiceField(choices=SENSING_KINDS, default='gaussian')
    sensing_seed = serializers.IntegerField(min_value=0, default=0)
    graph_seed = serializers.IntegerField(min_value=0, default=0)
    max_check_degree = serializers.IntegerField(min_value=2, default=demixing_default('GRAPH_MAX_CHECK_DEGREE'))
    max_tries = serializers.IntegerField(min_value=1, default=demixing_default('GRAPH_MAX_TRIES'))
    embed = serializers.BooleanField(default=False)
    amplitude = serializers.FloatField(min_value=0, required=False, allow_null=True, default=None)

    def validate(self, attrs):
        info = attrs['sections'] * attrs['rate']
        if info.denominator != 1:
            raise serializers.ValidationError(_("sections x rate must be an integer."))
        return attrs


class BinningSerializer(serializers.Serializer):
    bins = serializers.IntegerField(min_value=1, default=1)
    binid_power_fraction = serializers.FloatField(min_value=0, max_value=MAX_BINID_POWER_FRACTION,
                                                  default=demixing_default('BINID_POWER_FRACTION'))
    occupancy_estimator = serializers.ChoiceField(choices=OCCUPANCY_METHODS, default='lmmse')
    known_total = serializers.BooleanField(default=True)
    binid_uses_count = serializers.BooleanField(default=False)

    def validate_bins(self, bins):
        if bins & (bins - 1):
            raise serializers.ValidationError(_("Bin count must be a power of two."))
        return bins

    def validate(self, attrs):
        if attrs['occupancy_estimator'] == 'lmmse' and not attrs['known_total']:
            raise serializers.ValidationError(_("The LMMSE estimator needs a known user count."))
        return attrs


class AmpSerializer(serializers.Serializer):
    iterations = serializers.IntegerField(min_value=1, default=demixing_default('AMP_ITERATIONS'))
    list_slack = serializers.IntegerField(min_value=0, default=demixing_default('LIST_SLACK'))
    bp_rounds = serializers.IntegerField(min_value=0, default=demixing_default('DENOISER_BP_ROUNDS'))
    extraction_rounds = serializers.IntegerField(min_value=0, default=demixing_default('EXTRACTION_BP_ROUNDS'))
    bp_enabled = serializers.BooleanField(default=True)
    tau_floor = serializers.FloatField(min_value=0, default=demixing_default('TAU_FLOOR'))
    sic_keep_fraction = serializers.FloatField(min_value=0, max_value=1,
                                               default=demixing_default('SIC_KEEP_FRACTION'))


class ScenarioSerializer(serializers.Serializer):
    """
    Validates a scenario document and builds a `Scenario`. With more than one
    bin, `groups` holds a single template that is replicated per bin with
    sensing and graph seeds offset by the bin index.
    """
    name = serializers.CharField(required=False, allow_blank=True, default='')
    n = serializers.IntegerField(min_value=1)
    ebno_db = serializers.FloatField(default=2.5)
    mode = serializers.ChoiceField(choices=RECEIVER_MODES, default='coded_demixing')
    sic_outer = serializers.BooleanField(default=False)
    noise = serializers.BooleanField(default=True)
    binning = BinningSerializer(required=False)
    groups = GroupSerializer(many=True)
    amp = AmpSerializer(required=False)
    trials = serializers.IntegerField(min_value=1, default=100)
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate_groups(self, groups):
        if not groups:
            raise serializers.ValidationError(_("At least one group is required."))
        return groups

    def validate(self, attrs):
        attrs['binning'] = attrs.get('binning') or defaults_of(BinningSerializer)
        attrs['amp'] = attrs.get('amp') or defaults_of(AmpSerializer)
        binning = attrs['binning']
        groups = attrs['groups']

        if binning['bins'] > 1 and len(groups) != 1:
            raise serializers.ValidationError(_("With binning, give exactly one template group."))
        if attrs['mode'] != 'coded_demixing' and binning['bins'] > 1:
            raise serializers.ValidationError(_("The TIN and SIC baselines decode classes, not bins."))
        if attrs['mode'] == 'sic' and len(groups) != 2:
            raise serializers.ValidationError(_("The SIC baseline needs exactly two classes."))
        if attrs['sic_outer'] and attrs['mode'] != 'coded_demixing':
            raise serializers.ValidationError(_("The SIC outer loop only applies to coded demixing."))
        for group in groups:
            if group['sensing'] == 'hadamard' and attrs['n'] > (1 << group['section_bits']) - 1 \
                    and not group['embed']:
                raise serializers.ValidationError(
                    _("n exceeds the rows of a 2^v Hadamard matrix; set embed or use gaussian sensing."))
        return attrs

    def create(self, validated_data):
        binning = BinningConfig(**validated_data['binning'])
        amp = AmpSettings(**validated_data['amp'])
        templates = validated_data['groups']
        n = validated_data['n']

        if binning.enabled:
            template = templates[0]
            specs = [dict(template, sensing_seed=template['sensing_seed'] + g, graph_seed=template['graph_seed'] + g)
                     for g in range(binning.bins)]
        else:
            specs = templates
        try:
            groups = [GroupConfig(group_id=g, rows=n, **spec) for g, spec in enumerate(specs)]
            for group in groups:
                group.graph
            return Scenario(groups=groups, n=n, ebno_db=validated_data['ebno_db'], binning=binning, amp=amp,
                            mode=validated_data['mode'], sic_outer=validated_data['sic_outer'],
                            noise=validated_data['noise'], trials=validated_data['trials'],
                            seed=validated_data['seed'], name=validated_data['name'])
        except DemixingError as e:
            raise serializers.ValidationError(str(e))


def load_scenario(path):
    with open(path) as scenario_file:
        try:
            data = json.load(scenario_file)
        except ValueError as e:
            raise serializers.ValidationError(_("Scenario file is not valid JSON: %s") % e)
    serializer = ScenarioSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


class CheckSerializer(serializers.Serializer):
    sections = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=2,
                                     source='neighbor_sections')
    coeffs = serializers.ListField(child=serializers.IntegerField(min_value=1), source='coefficients')

    def validate(self, attrs):
        if len(attrs['neighbor_sections']) != len(attrs['coefficients']):
            raise serializers.ValidationError(_("One coefficient per section is required."))
        return attrs


class FactorGraphSerializer(serializers.Serializer):
    """Bit-exact JSON form of an outer graph."""
    L = serializers.IntegerField(min_value=2, source='num_sections')
    v = serializers.IntegerField(min_value=MIN_SECTION_BITS, max_value=MAX_SECTION_BITS, source='section_bits')
    rate = RateField()
    seed = serializers.IntegerField(allow_null=True, required=False)
    checks = CheckSerializer(many=True)
    encoding_order = serializers.ListField(child=serializers.IntegerField(min_value=0))

    def create(self, validated_data):
        checks = [CheckNode(check['neighbor_sections'], check['coefficients']) for check in validated_data['checks']]
        try:
            return FactorGraph(validated_data['num_sections'], validated_data['section_bits'], checks,
                               encoding_order=validated_data['encoding_order'], rate=validated_data['rate'],
                               seed=validated_data.get('seed'))
        except DemixingError as e:
            raise serializers.ValidationError(str(e))


class SensingSpecSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=SENSING_KINDS)
    n = serializers.IntegerField(min_value=1)
    v = serializers.IntegerField(min_value=MIN_SECTION_BITS, max_value=MAX_SECTION_BITS)
    L = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0)
    embed = serializers.BooleanField(default=False)

    def to_representation(self, instance):
        if not isinstance(instance, dict):
            instance = instance.spec()
        return super(SensingSpecSerializer, self).to_representation(instance)

    def create(self, validated_data):
        try:
            return operator_from_spec(validated_data)
        except DemixingError as e:
            raise serializers.ValidationError(str(e))


class DecodedEntrySerializer(serializers.Serializer):
    message = serializers.SerializerMethodField()
    group = serializers.IntegerField()
    bin = serializers.IntegerField()
    score = serializers.FloatField()
    codeword = serializers.ListField(child=serializers.IntegerField())

    def get_message(self, entry):
        return bit_string(entry.message)


class TrialOutcomeSerializer(serializers.Serializer):
    sent_counts = serializers.DictField(child=serializers.IntegerField())
    missed = serializers.DictField(child=serializers.IntegerField())
    false_alarms = serializers.DictField(child=serializers.IntegerField())
    recovered_counts = serializers.DictField(child=serializers.IntegerField())
    recovered = DecodedEntrySerializer(many=True, source='recovered.entries')
    diagnostics = serializers.JSONField()


class TrialRequestSerializer(serializers.Serializer):
    scenario = serializers.JSONField()
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate_scenario(self, scenario):
        serializer = ScenarioSerializer(data=scenario)
        serializer.is_valid(raise_exception=True)
        return serializer.save()


class SweepPointSerializer(serializers.ModelSerializer):
    class Meta:
        model = SweepPoint
        exclude = ['id', 'sweep']


class SweepSerializer(serializers.ModelSerializer):
    class Meta:
        model = Sweep
        fields = ['id', 'name', 'mode', 'axis', 'bins', 'trials', 'seed', 'diverged', 'created_at']


class SweepDetailSerializer(serializers.ModelSerializer):
    points = SweepPointSerializer(many=True, read_only=True)

    class Meta:
        model = Sweep
        exclude = []


class ThresholdRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = ThresholdRun
        exclude = []
