from django.db import models
from django.utils import timezone


class RunLog(models.Model):
    RUN_STATUS_CHOICES = [
        ("PENDING", "Pending"),
        ("SUCCESS", "Success"),
        ("FAILURE", "Failure"),
        ("STOPPED", "Stopped"),
    ]

    run_id = models.CharField(max_length=255, unique=True)
    label = models.CharField(max_length=200)
    status = models.CharField(
        max_length=20, choices=RUN_STATUS_CHOICES, default="PENDING"
    )
    config = models.JSONField(null=True, blank=True)
    output_dir = models.CharField(max_length=500, blank=True)
    report = models.JSONField(null=True, blank=True)
    error_message = models.TextField(blank=True)
    exit_code = models.IntegerField(null=True, blank=True)
    final_time = models.FloatField(null=True, blank=True)
    started_at = models.DateTimeField(default=timezone.now)
    completed_at = models.DateTimeField(null=True, blank=True)
    duration_seconds = models.FloatField(null=True, blank=True)

    class Meta:
        ordering = ["-started_at"]

    def __str__(self):
        return f"{self.label} - {self.status} ({self.started_at})"
