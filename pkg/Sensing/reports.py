"""
CSV and SVG artifacts.

CSV files start with a '#'-prefixed metadata block (schema version first),
then a tablib-rendered header and rows. Floats are written with ``repr`` so
identical runs produce identical bytes. SVG plots are rendered fully in
memory before anything touches the filesystem.
"""

import io
import json
import logging
import math
from pathlib import Path

from django.conf import settings
import matplotlib
from matplotlib.figure import Figure
import tablib

from .serializers import RunManifestSerializer

logger = logging.getLogger(__name__)

# Fixed salt so SVG element ids are identical between runs
SVG_HASH_SALT = 'zne-magnetometry'


class ReportError(ValueError):
    pass


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def table_dataset(table):
    dataset = tablib.Dataset(headers=list(table.headers), title=table.name)
    for row in table.rows:
        dataset.append([_cell(value) for value in row])
    return dataset


def render_csv(table):
    lines = [f"# schema: {settings.ZNE_CSV_SCHEMA}"]
    lines += [f"# {key}: {_cell(value)}" for key, value in table.metadata if key != 'schema']
    body = table_dataset(table).export('csv', lineterminator='\n')
    return '\n'.join(lines) + '\n' + body


def write_table(table, directory):
    path = Path(directory) / f"{table.name}.csv"
    path.write_text(render_csv(table), encoding='utf-8', newline='')
    logger.info(f"Wrote {path}")
    return path


def read_table(text):
    """(metadata dict, tablib.Dataset) from CSV text in the format above."""
    metadata = {}
    body = []
    for line in text.splitlines():
        if line.startswith('#'):
            key, _, value = line[1:].partition(':')
            metadata[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    schema = metadata.get('schema')
    if schema is not None and schema != settings.ZNE_CSV_SCHEMA:
        raise ReportError(f"Unsupported CSV schema {schema!r}, expected {settings.ZNE_CSV_SCHEMA!r}")
    if not body:
        raise ReportError("CSV has no header row")
    dataset = tablib.Dataset().load('\n'.join(body), format='csv')
    if len(dataset.headers or []) < 2:
        raise ReportError("CSV needs an independent-variable column and at least one series column")
    if dataset.height == 0:
        raise ReportError("CSV has no data rows")
    return metadata, dataset


def _number(raw, column, row):
    if raw is None or raw == '':
        return None
    try:
        return float(raw)
    except ValueError:
        raise ReportError(f"Non-numeric value {raw!r} in column {column!r}, row {row + 1}")


def plot_series(dataset, logy=False):
    """[(label, xs, ys)] for every series column; empty cells are skipped."""
    headers = dataset.headers
    xs = [_number(value, headers[0], i) for i, value in enumerate(dataset.get_col(0))]
    if any(x is None for x in xs):
        raise ReportError(f"Column {headers[0]!r} has empty cells")
    series = []
    for index, label in enumerate(headers[1:], start=1):
        if label.startswith('unstable['):
            continue
        ys = [_number(value, label, i) for i, value in enumerate(dataset.get_col(index))]
        points = [
            (x, y) for x, y in zip(xs, ys)
            if y is not None and math.isfinite(y) and (not logy or y > 0)
        ]
        if points:
            series.append((label, [p[0] for p in points], [p[1] for p in points]))
    if not series:
        raise ReportError("Nothing to plot: every series is empty")
    return series


def render_svg(dataset, logy=False, title=None):
    series = plot_series(dataset, logy)
    with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'path'}):
        fig = Figure(figsize=(6.4, 4.8))
        ax = fig.subplots()
        for label, xs, ys in series:
            ax.plot(xs, ys, marker='o', markersize=3, label=label)
        ax.set_xlabel(dataset.headers[0])
        ax.set_ylabel(series[0][0] if len(series) == 1 else 'value')
        if logy:
            ax.set_yscale('log')
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend()
        ax.grid(True, alpha=0.3)
        buffer = io.BytesIO()
        fig.savefig(buffer, format='svg', metadata={'Date': None})
    return buffer.getvalue()


def plot_csv(csv_path, out_path=None, logy=False):
    """Render ``csv_path`` to SVG and write it; returns the SVG path."""
    csv_path = Path(csv_path)
    metadata, dataset = read_table(csv_path.read_text(encoding='utf-8'))
    svg = render_svg(dataset, logy, title=metadata.get('experiment'))
    out_path = Path(out_path) if out_path else csv_path.with_suffix('.svg')
    out_path.write_bytes(svg)
    logger.info(f"Wrote {out_path}")
    return out_path


def write_json(path, data):
    Path(path).write_text(json.dumps(data, indent=2) + '\n', encoding='utf-8')
    return Path(path)


def write_manifest(directory, experiment, config_path, seed, artifacts, duration_seconds):
    serializer = RunManifestSerializer(data={
        'schema': settings.ZNE_CSV_SCHEMA,
        'experiment': experiment,
        'config_path': config_path,
        'seed': seed,
        'output_dir': str(directory),
        'artifacts': [str(path) for path in artifacts],
        'duration_seconds': duration_seconds,
    })
    serializer.is_valid(raise_exception=True)
    path = write_json(Path(directory) / 'manifest.json', serializer.data)
    logger.info(f"Wrote {path}")
    return serializer.data
