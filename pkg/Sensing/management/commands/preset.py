"""
Run a named preset.

Usage:
    python manage.py preset fig2-success-dip --seed 42
    python manage.py preset ghz-pd --set protocol.n_qubits=8
    python manage.py preset fig4a-relerr --full-scale --workers 8
"""

from django.core.management.base import CommandError

from Sensing.presets import PresetError, available, materialize

from .run import Command as RunCommand


class Command(RunCommand):
    help = 'Run a named preset experiment, optionally overriding config keys'

    def add_arguments(self, parser):
        parser.add_argument('name', help=f"One of: {', '.join(available())}")
        parser.add_argument(
            '--set',
            dest='overrides',
            action='append',
            default=[],
            metavar='KEY=VALUE',
            help='Override a config key by dotted path; VALUE is parsed as JSON when possible',
        )
        self.add_run_arguments(parser)

    def handle(self, *args, **options):
        try:
            data = materialize(options['name'], options['overrides'])
        except PresetError as e:
            raise CommandError(str(e), returncode=2)
        self.run_config(data, None, options)
