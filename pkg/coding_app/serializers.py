"""
Serializers для REST API та JSON-підсумку експерименту
"""
import math

from rest_framework import serializers

from coding_app.models import ExperimentRun, ResultRecord


class FiniteFloatField(serializers.FloatField):
    """Число з плаваючою крапкою; NaN та нескінченності подаються як null"""

    def to_representation(self, value):
        if value is None or not math.isfinite(value):
            return None
        return super().to_representation(value)


class ResultRecordSerializer(serializers.ModelSerializer):
    mean = FiniteFloatField(allow_null=True)

    class Meta:
        model = ResultRecord
        fields = ['id', 'run', 'params', 'metric', 'mean', 'std', 'count', 'aborted', 'wall_time']


class ExperimentRunSerializer(serializers.ModelSerializer):
    kind_display = serializers.CharField(source='get_kind_display', read_only=True)
    total_results = serializers.IntegerField(read_only=True)

    class Meta:
        model = ExperimentRun
        fields = [
            'id', 'kind', 'kind_display', 'network', 'K', 'N', 'seed',
            'config', 'version', 'status', 'wall_time', 'aborted',
            'output_paths', 'total_results', 'created_at',
        ]


class ExperimentRunDetailSerializer(ExperimentRunSerializer):
    results = ResultRecordSerializer(many=True, read_only=True)

    class Meta(ExperimentRunSerializer.Meta):
        fields = ExperimentRunSerializer.Meta.fields + ['results']


class ResultRowSerializer(serializers.Serializer):
    """Рядок результату (domain.ResultRow) для JSON-підсумку"""
    params = serializers.DictField()
    metric = serializers.CharField()
    mean = FiniteFloatField(allow_null=True)
    std = FiniteFloatField()
    count = serializers.IntegerField()
    aborted = serializers.IntegerField()
    wall_time = serializers.FloatField()
    abort_reasons = serializers.ListField(child=serializers.CharField())


class ExperimentSummarySerializer(serializers.Serializer):
    """Підсумок запуску: конфігурація, версія та агреговані показники"""
    version = serializers.CharField()
    config = serializers.DictField()
    wall_time = serializers.FloatField()
    aborted = serializers.IntegerField()
    sample_count = serializers.IntegerField()
    rows = ResultRowSerializer(many=True)
