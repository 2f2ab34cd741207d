from django.urls import path
from .views import RunListCreateAPI, RunDetailAPI

urlpatterns = [
    path("api/runs/", RunListCreateAPI.as_view(), name="run-list"),
    path("api/runs/<int:pk>/", RunDetailAPI.as_view(), name="run-detail"),
]
