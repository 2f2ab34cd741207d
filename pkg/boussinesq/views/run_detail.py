from rest_framework.views import APIView
from rest_framework.response import Response
from rest_framework import serializers

from boussinesq.services.run_service import RunService


class RunDetailAPI(APIView):
    class OutputSerializer(serializers.Serializer):
        id = serializers.IntegerField()
        run_id = serializers.CharField()
        label = serializers.CharField()
        status = serializers.CharField()
        config = serializers.JSONField(allow_null=True)
        report = serializers.JSONField(allow_null=True)
        error_message = serializers.CharField(allow_blank=True)
        exit_code = serializers.IntegerField(allow_null=True)
        final_time = serializers.FloatField(allow_null=True)
        output_dir = serializers.CharField()
        started_at = serializers.DateTimeField()
        completed_at = serializers.DateTimeField(allow_null=True)
        duration_seconds = serializers.FloatField(allow_null=True)

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.run_service = RunService()

    def get(self, request, pk):
        run = self.run_service.get_by_id(run_pk=pk)
        serializer = self.OutputSerializer(run)
        return Response(serializer.data)
