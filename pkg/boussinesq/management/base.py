"""
Shared plumbing for the simulation management commands.
"""

import logging

from django.core.management.base import BaseCommand, CommandError

from ..exceptions import BoussinesqError


class SimulationCommand(BaseCommand):
    """Adds --quiet and turns domain errors into exit codes."""

    def add_arguments(self, parser):
        parser.add_argument(
            "--quiet",
            action="store_true",
            help="Only report warnings and errors",
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        if options["quiet"]:
            logging.getLogger("boussinesq").setLevel(logging.WARNING)
        try:
            return self.handle_command(*args, **options)
        except BoussinesqError as e:
            raise CommandError(str(e), returncode=e.exit_code) from e
        except OSError as e:
            raise CommandError(str(e), returncode=1) from e

    def handle_command(self, *args, **options):
        raise NotImplementedError

    def say(self, options, message: str, style=None):
        if options["quiet"]:
            return
        self.stdout.write(style(message) if style else message)
