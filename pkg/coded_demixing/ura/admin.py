from django.contrib import admin

from coded_demixing.ura.models import Sweep, SweepPoint, ThresholdRun


class SweepPointInline(admin.TabularInline):
    model = SweepPoint
    extra = 0
    readonly_fields = ['axis_value', 'group_id', 'pupe', 'md', 'fa', 'trials', 'errors', 'sent', 'ci_lo', 'ci_hi']
    can_delete = False


class SweepAdmin(admin.ModelAdmin):
    list_display = ['name', 'mode', 'axis', 'bins', 'trials', 'created_at']
    list_filter = ('mode', 'axis', 'bins')
    readonly_fields = ['created_at', 'scenario', 'seed', 'diverged']
    inlines = [SweepPointInline]


class ThresholdRunAdmin(admin.ModelAdmin):
    list_display = ['name', 'mode', 'bins', 'target', 'ebno_db', 'resolved', 'created_at']
    list_filter = ('mode', 'bins', 'resolved')
    readonly_fields = ['created_at', 'scenario', 'evaluations']


admin.site.register(Sweep, SweepAdmin)
admin.site.register(ThresholdRun, ThresholdRunAdmin)
