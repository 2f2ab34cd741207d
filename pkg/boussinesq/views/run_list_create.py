from rest_framework.views import APIView
from rest_framework.response import Response
from rest_framework import serializers, status

from boussinesq.services.run_service import RunService
from boussinesq.views.base import RunResultsSetPagination


class RunListCreateAPI(APIView):
    class InputSerializer(serializers.Serializer):
        name = serializers.SlugField(max_length=200)
        config = serializers.CharField()
        eps = serializers.FloatField(required=False, allow_null=True, min_value=0.0)

    class OutputSerializer(serializers.Serializer):
        id = serializers.IntegerField()
        run_id = serializers.CharField()
        label = serializers.CharField()
        status = serializers.CharField()
        exit_code = serializers.IntegerField(allow_null=True)
        final_time = serializers.FloatField(allow_null=True)
        output_dir = serializers.CharField()
        started_at = serializers.DateTimeField()
        completed_at = serializers.DateTimeField(allow_null=True)
        duration_seconds = serializers.FloatField(allow_null=True)

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.run_service = RunService()

    def get(self, request):
        runs = self.run_service.get_all()

        status_filter = request.query_params.get("status", None)
        if status_filter is not None:
            runs = runs.filter(status=status_filter.upper())

        paginator = RunResultsSetPagination()
        paginated_runs = paginator.paginate_queryset(runs, request)
        serializer = self.OutputSerializer(paginated_runs, many=True)
        return paginator.get_paginated_response(serializer.data)

    def post(self, request):
        serializer = self.InputSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)

        run = self.run_service.queue(
            config_text=serializer.validated_data["config"],
            name=serializer.validated_data["name"],
            eps=serializer.validated_data.get("eps"),
        )

        output_serializer = self.OutputSerializer(run)
        return Response(output_serializer.data, status=status.HTTP_202_ACCEPTED)
