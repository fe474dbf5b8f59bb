"""
Django Admin налаштування
"""
from django.contrib import admin

from coding_app.models import ExperimentRun, ResultRecord


class ResultRecordInline(admin.TabularInline):
    model = ResultRecord
    extra = 0
    readonly_fields = ('metric', 'params', 'mean', 'std', 'count', 'aborted', 'wall_time')
    can_delete = False


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ('kind', 'network', 'K', 'N', 'seed', 'status', 'aborted', 'wall_time', 'created_at')
    list_filter = ('kind', 'network', 'status', 'created_at')
    search_fields = ('version',)
    readonly_fields = ('created_at',)
    inlines = [ResultRecordInline]


@admin.register(ResultRecord)
class ResultRecordAdmin(admin.ModelAdmin):
    list_display = ('run', 'metric', 'mean', 'std', 'count', 'aborted')
    list_filter = ('metric',)
    search_fields = ('metric',)
