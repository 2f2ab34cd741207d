from django.contrib import admin
from .models import RunLog


@admin.register(RunLog)
class RunLogAdmin(admin.ModelAdmin):
    list_display = [
        "label",
        "status",
        "exit_code",
        "final_time",
        "started_at",
        "duration_seconds",
    ]
    list_filter = ["status", "label", "started_at"]
    search_fields = ["label", "run_id", "error_message"]
    readonly_fields = ["run_id", "started_at", "completed_at", "duration_seconds"]
    date_hierarchy = "started_at"

    fieldsets = (
        ("Run Info", {"fields": ("label", "run_id", "status", "exit_code")}),
        ("Execution", {"fields": ("started_at", "completed_at", "duration_seconds", "final_time")}),
        ("Configuration", {"fields": ("config", "output_dir"), "classes": ("collapse",)}),
        ("Results", {"fields": ("report", "error_message"), "classes": ("collapse",)}),
    )

    def has_add_permission(self, request):
        return False

    def has_change_permission(self, request, obj=None):
        return False
