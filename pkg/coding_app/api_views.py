"""
REST API Views для перегляду збережених експериментів
"""
from rest_framework import viewsets
from rest_framework.decorators import action
from rest_framework.permissions import IsAuthenticated
from rest_framework.response import Response

from coding_app.models import ExperimentRun, ResultRecord
from coding_app.serializers import (
    ExperimentRunDetailSerializer,
    ExperimentRunSerializer,
    ResultRecordSerializer,
)
from coding_app.services.record_service import RecordService


class ExperimentRunViewSet(viewsets.ReadOnlyModelViewSet):
    """API для перегляду запусків"""
    queryset = ExperimentRun.objects.all()
    permission_classes = [IsAuthenticated]

    def get_serializer_class(self):
        if self.action == 'retrieve':
            return ExperimentRunDetailSerializer
        return ExperimentRunSerializer

    @action(detail=True, methods=['get'])
    def metrics(self, request, pk=None):
        """Показники запуску, згруповані за назвою"""
        run = self.get_object()
        return Response(RecordService.metric_summary(run))


class ResultRecordViewSet(viewsets.ReadOnlyModelViewSet):
    """API для перегляду результатів"""
    serializer_class = ResultRecordSerializer
    permission_classes = [IsAuthenticated]

    def get_queryset(self):
        queryset = ResultRecord.objects.select_related('run')
        metric = self.request.query_params.get('metric')
        if metric:
            queryset = queryset.filter(metric=metric)
        return queryset
