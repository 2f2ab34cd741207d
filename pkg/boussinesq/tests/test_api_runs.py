"""
Integration tests for the run API endpoints.
"""

from unittest.mock import patch

from django.urls import reverse
from rest_framework import status
from rest_framework.test import APIClient, APITestCase

from ..models import RunLog
from .test_services import TINY_CONFIG


class RunAPITest(APITestCase):
    """Test suite for listing, inspecting and queueing runs."""

    def setUp(self):
        self.client = APIClient()
        self.run = self._create_run(
            run_id="a1",
            label="stable-linear",
            status="SUCCESS",
            exit_code=0,
            final_time=200.0,
            report={"status": "completed"},
        )
        self._create_run(run_id="b2", label="bubble", status="STOPPED", exit_code=4)

    def _create_run(self, **kwargs):
        defaults = {"run_id": "default", "label": "default"}
        defaults.update(kwargs)
        return RunLog.objects.create(**defaults)

    def test_get_run_list(self):
        """Test GET /api/runs/ - List all runs"""
        response = self.client.get(reverse("run-list"))

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["count"], 2)
        self.assertNotIn("report", response.data["results"][0])

    def test_filter_runs_by_status(self):
        """Test GET /api/runs/?status=stopped"""
        response = self.client.get(reverse("run-list"), {"status": "stopped"})

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data["results"]), 1)
        self.assertEqual(response.data["results"][0]["label"], "bubble")
        self.assertEqual(response.data["results"][0]["exit_code"], 4)

    def test_get_run_detail(self):
        """Test GET /api/runs/{id}/ - Run with its report"""
        response = self.client.get(reverse("run-detail", args=[self.run.id]))

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["run_id"], "a1")
        self.assertEqual(response.data["report"], {"status": "completed"})
        self.assertEqual(response.data["final_time"], 200.0)

    def test_get_missing_run(self):
        response = self.client.get(reverse("run-detail", args=[9999]))

        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    @patch("boussinesq.tasks.run_simulation.apply_async")
    def test_queue_run(self, mock_apply_async):
        """Test POST /api/runs/ - Queue a run for a worker"""
        data = {"name": "tiny", "config": TINY_CONFIG, "eps": 0.05}

        with self.captureOnCommitCallbacks(execute=True):
            response = self.client.post(reverse("run-list"), data, format="json")

        self.assertEqual(response.status_code, status.HTTP_202_ACCEPTED)
        self.assertEqual(response.data["status"], "PENDING")
        self.assertEqual(response.data["label"], "tiny")
        mock_apply_async.assert_called_once()
        self.assertEqual(mock_apply_async.call_args.kwargs["task_id"], response.data["run_id"])
        self.assertEqual(RunLog.objects.get(run_id=response.data["run_id"]).config["scenario"]["eps"], 0.05)

    @patch("boussinesq.tasks.run_simulation.apply_async")
    def test_queue_run_with_invalid_config(self, mock_apply_async):
        """Test POST /api/runs/ with a config that fails validation"""
        data = {"name": "broken", "config": TINY_CONFIG.replace("kmax = 4", "kmax = 0")}

        response = self.client.post(reverse("run-list"), data, format="json")

        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("grid.kmax", str(response.data["detail"]))
        mock_apply_async.assert_not_called()
        self.assertEqual(RunLog.objects.count(), 2)

    def test_queue_run_with_invalid_input(self):
        """Test POST /api/runs/ with a bad name and negative eps"""
        data = {"name": "not a slug", "config": TINY_CONFIG, "eps": -1}

        response = self.client.post(reverse("run-list"), data, format="json")

        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("name", response.data["detail"])
        self.assertIn("eps", response.data["detail"])
