"""
Celery tasks for simulation runs.
"""

from .simulation_tasks import SimulationTasks

run_simulation = SimulationTasks.run_simulation
