"""
Plot a result CSV as an SVG line chart.

Usage:
    python manage.py plot results/fig4a-relerr/fig4a-relerr.csv --logy
"""

from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from Sensing.reports import ReportError, plot_csv


class Command(BaseCommand):
    help = 'Render a result CSV as an SVG plot, one series per column'

    def add_arguments(self, parser):
        parser.add_argument('csv', help='Result CSV written by run/preset')
        parser.add_argument(
            '--logy',
            action='store_true',
            help='Logarithmic y axis',
        )
        parser.add_argument(
            '--out',
            help='SVG path (default: the CSV path with an .svg suffix)',
        )

    def handle(self, *args, **options):
        csv_path = Path(options['csv'])
        if not csv_path.is_file():
            raise CommandError(f"No such CSV file: {csv_path}", returncode=2)
        try:
            svg_path = plot_csv(csv_path, options.get('out'), logy=options['logy'])
        except ReportError as e:
            raise CommandError(f"{csv_path}: {e}", returncode=2)
        except OSError as e:
            raise CommandError(f"Cannot write plot: {e}", returncode=1) from e
        self.stdout.write(self.style.SUCCESS(f"✓ Wrote {svg_path}"))
