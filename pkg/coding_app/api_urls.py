"""
URLs для REST API
"""
from django.urls import include, path
from rest_framework.routers import DefaultRouter

from coding_app import api_views

router = DefaultRouter()
router.register(r'runs', api_views.ExperimentRunViewSet, basename='run')
router.register(r'results', api_views.ResultRecordViewSet, basename='result')

urlpatterns = [
    path('', include(router.urls)),
]
