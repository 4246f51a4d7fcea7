import csv
import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from errors import InvalidParameters
from phase_system import SolitonParams

logger = logging.getLogger(__name__)

SCHEMA = 'rho-soliton-profile/1'
COLUMNS = ('r', 'omega', 'omega_p', 'omega_pp', 'f', 'f_p', 'f_pp')
NORMALIZATIONS = ('raw', 'R_at_origin_one')
PORTRAIT_HEADER = ('kind', 'x', 'y', 'dx', 'dy')


def fmt(value) -> str:
    """Float as a decimal string with 17 significant digits"""
    return format(float(value), '.17g')


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Sampled warped-product soliton: dr² + ω(r)² g_can with potential f(r)"""
    params: SolitonParams
    r: np.ndarray
    omega: np.ndarray
    omega_p: np.ndarray
    omega_pp: np.ndarray
    f: np.ndarray
    f_p: np.ndarray
    f_pp: np.ndarray
    normalization: str = 'raw'
    # radial coordinate of the point O where ω closes
    tip: float = 0.0

    def __post_init__(self):
        for name in COLUMNS:
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        size = self.r.size
        if any(getattr(self, name).shape != (size,) for name in COLUMNS):
            raise InvalidParameters("profile columns must be 1-D arrays of equal length")
        if size < 2 or np.any(np.diff(self.r) <= 0):
            raise InvalidParameters("profile radius must be strictly increasing")
        if self.normalization not in NORMALIZATIONS:
            raise InvalidParameters(f"unknown normalization {self.normalization!r}")

    def __len__(self):
        return self.r.size

    def replace(self, **changes) -> 'RadialProfile':
        return replace(self, **changes)


class ProfileStore:
    """Reads and writes profiles, reports and phase portraits"""

    def __init__(self, output_dir: Path = None):
        self.output_dir = Path(output_dir) if output_dir else None

    def _resolve(self, path) -> Path:
        """Resolve a target path and create its directory"""
        path = Path(path)
        if self.output_dir is not None and not path.is_absolute():
            path = self.output_dir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def save_profile(self, prof: RadialProfile, path) -> Path:
        """Write a profile in the rho-soliton-profile/1 format"""
        samples = [
            {name: fmt(getattr(prof, name)[i]) for name in COLUMNS}
            for i in range(len(prof))
        ]
        doc = {
            'schema': SCHEMA,
            'params': {
                'n': prof.params.n,
                'rho': fmt(prof.params.rho),
                'lambda': fmt(prof.params.lam),
                'kappa': prof.params.kappa,
            },
            'normalization': prof.normalization,
            'tip': fmt(prof.tip),
            'samples': samples,
        }
        path = self._resolve(path)
        path.write_text(json.dumps(doc, indent=1) + '\n', encoding='utf-8')
        logger.info("wrote profile with %d samples to %s", len(prof), path)
        return path

    def load_profile(self, path) -> RadialProfile:
        """Read a profile file; a missing f_pp column is rebuilt by finite differences"""
        doc = json.loads(Path(path).read_text(encoding='utf-8'))
        if doc.get('schema') != SCHEMA:
            raise InvalidParameters(f"{path}: expected schema {SCHEMA}, got {doc.get('schema')!r}")
        raw = doc['params']
        params = SolitonParams(
            n=int(raw['n']),
            rho=float(raw['rho']),
            lam=float(raw.get('lambda', 0.0)),
            kappa=int(raw.get('kappa', 1)),
        )
        samples = doc['samples']
        columns = {
            name: np.array([float(s[name]) for s in samples])
            for name in COLUMNS if samples and name in samples[0]
        }
        if 'f_pp' not in columns:
            from warped_geometry import radial_derivative
            columns['f_pp'] = radial_derivative(columns['r'], columns['f_p'])
        return RadialProfile(params=params, normalization=doc.get('normalization', 'raw'),
                             tip=float(doc.get('tip', 0.0)), **columns)

    def save_report(self, report: dict, path) -> Path:
        """Write a JSON report with stable key order"""
        path = self._resolve(path)
        path.write_text(dumps(report, indent=2) + '\n', encoding='utf-8')
        return path

    def save_portrait(self, rows: Iterable[Sequence], path) -> Path:
        """Write phase-portrait rows (kind, x, y, dx, dy) as CSV"""
        path = self._resolve(path)
        count = 0
        with open(path, 'w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(PORTRAIT_HEADER)
            for kind, *values in rows:
                writer.writerow([kind] + [fmt(v) for v in values])
                count += 1
        logger.info("wrote %d portrait rows to %s", count, path)
        return path

    def load_portrait(self, path) -> list:
        """Read phase-portrait rows back as (kind, x, y, dx, dy) tuples"""
        with open(path, newline='', encoding='utf-8') as handle:
            reader = csv.reader(handle)
            header = next(reader)
            if tuple(header) != PORTRAIT_HEADER:
                raise InvalidParameters(f"{path}: unexpected header {header}")
            return [(row[0], *map(float, row[1:])) for row in reader]


def to_plain(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values"""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isfinite(value):
            return value
        return 'nan' if math.isnan(value) else ('inf' if value > 0 else '-inf')
    return obj


def dumps(obj, indent: int = None) -> str:
    """JSON text of to_plain(obj) with every float written to 17 significant digits"""
    return _encode(to_plain(obj), indent, 0)


def _encode(obj, indent, level) -> str:
    if isinstance(obj, float):
        text = fmt(obj)
        # keep floats recognisable as floats when read back
        return text if any(c in text for c in '.e') else text + '.0'
    if isinstance(obj, dict):
        items = [f"{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return _wrap('{', items, '}', indent, level)
    if isinstance(obj, list):
        return _wrap('[', [_encode(v, indent, level + 1) for v in obj], ']', indent, level)
    return json.dumps(obj)


def _wrap(opening, items, closing, indent, level) -> str:
    if not items:
        return opening + closing
    if indent is None:
        return opening + ', '.join(items) + closing
    pad = '\n' + ' ' * (indent * (level + 1))
    return opening + pad + (',' + pad).join(items) + '\n' + ' ' * (indent * level) + closing
