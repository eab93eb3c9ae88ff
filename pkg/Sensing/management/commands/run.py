"""
Run an experiment from a JSON config file.

Usage:
    python manage.py run config.json
    python manage.py run config.json --seed 7 --workers 4 --out results/demo
    python manage.py run config.json --full-scale
"""

import json
import logging
from pathlib import Path
import time

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from Sensing.experiments import run_experiment
from Sensing.reports import write_json, write_manifest, write_table
from Sensing.sampling import MAX_SEED
from Sensing.serializers import ConfigError, config_from_validated, validate_config

logger = logging.getLogger(__name__)


def seed_value(raw):
    value = int(raw)
    if not 0 <= value <= MAX_SEED:
        raise ValueError(raw)
    return value


class Command(BaseCommand):
    help = 'Run an experiment described by a JSON config file and write its CSV tables'

    def add_arguments(self, parser):
        parser.add_argument('config_file', help='Path to the experiment config (JSON)')
        self.add_run_arguments(parser)

    def add_run_arguments(self, parser):
        parser.add_argument(
            '--seed',
            type=seed_value,
            help='Override the config seed (unsigned 64-bit)',
        )
        parser.add_argument(
            '--out',
            help='Output directory (default: ZNE_OUTPUT_DIR/<experiment name>)',
        )
        parser.add_argument(
            '--workers',
            type=int,
            default=1,
            help='Worker processes for Monte-Carlo trials',
        )
        parser.add_argument(
            '--full-scale',
            action='store_true',
            help=f'Use {settings.ZNE_FULL_SCALE_TRIALS} trials per grid point',
        )

    def handle(self, *args, **options):
        path = Path(options['config_file'])
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as e:
            raise CommandError(f"Cannot read config {path}: {e}", returncode=2)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise CommandError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}", returncode=2)
        if not isinstance(data, dict):
            raise CommandError(f"{path}: top-level JSON value must be an object", returncode=2)
        self.run_config(data, str(path), options)

    def run_config(self, data, config_path, options):
        """Validate, execute and publish ``data``; returns the manifest."""
        if options['verbosity'] >= 2:
            logging.getLogger('Sensing').setLevel(logging.DEBUG)
        if options['workers'] < 1:
            raise CommandError(f"--workers must be at least 1, got {options['workers']}", returncode=2)

        data = dict(data)
        if options.get('seed') is not None:
            data['seed'] = options['seed']
        if options.get('full_scale'):
            data['n_t'] = settings.ZNE_FULL_SCALE_TRIALS

        try:
            serializer = validate_config(data)
            cfg = config_from_validated(serializer.validated_data)
        except ConfigError as e:
            raise CommandError('Invalid config:\n  ' + '\n  '.join(e.messages), returncode=2)
        except ValueError as e:
            raise CommandError(f"Invalid config: {e}", returncode=2)

        out_dir = Path(options['out']) if options.get('out') else Path(settings.ZNE_OUTPUT_DIR) / cfg.name

        start = time.time()
        try:
            tables = run_experiment(cfg, workers=options['workers'])
        except Exception as e:
            logger.error(f"Experiment {cfg.name} failed: {e}")
            raise CommandError(f"Experiment {cfg.name} failed: {e}", returncode=1) from e

        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            artifacts = [write_json(out_dir / 'config.json', serializer.data)]
            artifacts += [write_table(table, out_dir) for table in tables]
            manifest = write_manifest(out_dir, cfg.name, config_path, cfg.seed, artifacts, time.time() - start)
        except OSError as e:
            raise CommandError(f"Cannot write results to {out_dir}: {e}", returncode=1) from e

        for artifact in artifacts:
            self.stdout.write(f"  {artifact}")
        self.stdout.write(
            self.style.SUCCESS(f"✓ {cfg.name}: {len(tables)} table(s) in {manifest['duration_seconds']:.2f}s")
        )
        return manifest
