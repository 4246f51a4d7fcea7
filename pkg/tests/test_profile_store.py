import json
import math

import numpy as np
import pytest

from errors import InvalidParameters
from exact_solutions import cylinder_solutions, flat_gaussian
from phase_system import SolitonParams
from profile_store import PORTRAIT_HEADER, SCHEMA, ProfileStore, RadialProfile, dumps, fmt, to_plain


def test_profile_survives_a_save_and_load(tmp_path):
    prof = flat_gaussian(4, -1.0, -1.0, a0=2.0, b0=1.0)
    store = ProfileStore(tmp_path)
    path = store.save_profile(prof, 'nested/flat.json')
    assert path == tmp_path / 'nested' / 'flat.json'
    loaded = store.load_profile(path)
    assert loaded.params == prof.params
    assert loaded.tip == prof.tip
    assert loaded.normalization == 'raw'
    for name in ('r', 'omega', 'omega_p', 'f', 'f_p', 'f_pp'):
        assert np.array_equal(getattr(loaded, name), getattr(prof, name)), name


def test_profile_file_layout(tmp_path):
    (sol,) = cylinder_solutions(3, 0.25, 1.0)
    path = ProfileStore().save_profile(sol.profile(np.linspace(0.0, 1.0, 5)), tmp_path / 'cyl.json')
    doc = json.loads(path.read_text())
    assert doc['schema'] == SCHEMA
    assert doc['params'] == {'n': 3, 'rho': '0.25', 'lambda': '1', 'kappa': 1}
    assert len(doc['samples']) == 5
    assert doc['samples'][-1]['r'] == '1'


def test_missing_second_derivative_is_rebuilt(tmp_path):
    prof = flat_gaussian(3, 0.0, 1.0, samples=201)
    path = ProfileStore().save_profile(prof, tmp_path / 'p.json')
    doc = json.loads(path.read_text())
    for sample in doc['samples']:
        del sample['f_pp']
    path.write_text(json.dumps(doc))
    loaded = ProfileStore().load_profile(path)
    # f' = λr is linear, so the difference quotient is exact up to rounding
    assert np.allclose(loaded.f_pp, 1.0, atol=1e-9)


def test_unknown_schema_is_rejected(tmp_path):
    path = tmp_path / 'old.json'
    path.write_text(json.dumps({'schema': 'something-else/0', 'params': {}, 'samples': []}))
    with pytest.raises(InvalidParameters):
        ProfileStore().load_profile(path)


def test_portrait_rows(tmp_path):
    rows = [('field', 0.5, -1.0, 0.25, 3.0), ('nullcline_h', 0.1, 2.0, 0.0, -1e-3)]
    store = ProfileStore(tmp_path)
    path = store.save_portrait(rows, 'portrait.csv')
    lines = path.read_text().splitlines()
    assert lines[0] == ','.join(PORTRAIT_HEADER)
    assert lines[1] == 'field,0.5,-1,0.25,3'
    assert store.load_portrait(path) == rows


def test_portrait_header_is_checked(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text('a,b,c\n')
    with pytest.raises(InvalidParameters):
        ProfileStore().load_portrait(path)


def test_report_values_are_json_safe(tmp_path):
    report = {'nd': np.array([1.0, math.nan]), 'flag': np.bool_(True), 'count': np.int64(3),
              'bounds': (-math.inf, math.inf)}
    assert to_plain(report) == {'nd': [1.0, 'nan'], 'flag': True, 'count': 3, 'bounds': ['-inf', 'inf']}
    path = ProfileStore().save_report(report, tmp_path / 'r.json')
    assert json.loads(path.read_text())['nd'][1] == 'nan'


def test_fmt_keeps_full_precision():
    assert float(fmt(1 / 3)) == 1 / 3
    assert fmt(2.0) == '2'


def test_reports_write_floats_to_17_digits(tmp_path):
    report = {'third': 1 / 3, 'tenth': np.float64(0.1), 'two': 2.0, 'n': 3,
              'bad': math.nan, 'tiny': [1e-20], 'empty': {}}
    text = ProfileStore().save_report(report, tmp_path / 'r.json').read_text()
    assert '"third": 0.33333333333333331,' in text
    assert '"tenth": 0.10000000000000001,' in text
    assert '"two": 2.0,' in text
    assert '"n": 3,' in text
    doc = json.loads(text)
    assert doc == {'third': 1 / 3, 'tenth': 0.1, 'two': 2.0, 'n': 3, 'bad': 'nan', 'tiny': [1e-20], 'empty': {}}
    assert isinstance(doc['two'], float)
    assert json.loads(dumps(report)) == doc


def test_profile_validation():
    r = np.array([0.0, 1.0, 1.0])
    zeros = np.zeros(3)
    p = SolitonParams(n=3, rho=0.0)
    with pytest.raises(InvalidParameters):
        RadialProfile(p, r, zeros, zeros, zeros, zeros, zeros, zeros)
    with pytest.raises(InvalidParameters):
        RadialProfile(p, np.arange(3.0), zeros, zeros, zeros, zeros, zeros, np.zeros(2))
    with pytest.raises(InvalidParameters):
        RadialProfile(p, np.arange(3.0), zeros, zeros, zeros, zeros, zeros, zeros, normalization='unit')
