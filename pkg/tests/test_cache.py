import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wigner_cs.cache import (
    RunStore,
    config_digest,
    matrix_from_json,
    matrix_to_json,
    read_complex_csv,
    read_json,
    read_matrix_csv,
    read_samples_csv,
    sidecar_path,
    write_complex_csv,
    write_formatted_json,
    write_matrix_csv,
    write_rows_csv,
    write_samples_csv,
    write_two_column,
)
from wigner_cs.constants import ModeKind, Provenance
from wigner_cs.exceptions import FormatError
from wigner_cs.sampling import random_uniform, spiral
from wigner_cs.sensing import build_matrix


def test_samples_csv(tmp_path):
    path = str(tmp_path / "samples.csv")
    samples = random_uniform(7, 1)
    write_samples_csv(samples, path, meta={"seed": 1})
    with open(path, encoding="utf-8") as fh:
        assert fh.readline() == "theta,phi,chi\n"
    back = read_samples_csv(path)
    assert_allclose(back.stacked(), samples.stacked(), rtol=0, atol=0)
    assert back.provenance == Provenance.RANDOM
    side = read_json(sidecar_path(path))
    assert side == {"K": 7, "provenance": "random", "seed": 1}


def test_samples_csv_without_sidecar(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("theta,phi,chi\n0.5,1.0,0.0\n1.5,2.0,0.25\n", encoding="utf-8")
    samples = read_samples_csv(str(path))
    assert samples.K == 2
    assert samples.provenance == Provenance.FILE
    assert_allclose(samples.chi, [0.0, 0.25])


@pytest.mark.parametrize("content", [
    "",
    "theta,phi\n0.1,0.2\n",
    "theta,phi,chi\n",
    "theta,phi,chi\n0.1,abc,0.0\n",
    "theta,phi,chi\n0.1,0.2\n",
])
def test_samples_csv_malformed(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(FormatError) as info:
        read_samples_csv(str(path))
    assert info.value.path == str(path)


def test_missing_files(tmp_path):
    with pytest.raises(FormatError):
        read_samples_csv(str(tmp_path / "nope.csv"))
    with pytest.raises(FormatError):
        read_json(str(tmp_path / "nope.json"))
    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    with pytest.raises(FormatError):
        read_json(str(tmp_path / "broken.json"))


def test_complex_csv(tmp_path):
    path = str(tmp_path / "y.csv")
    values = np.array([1 + 2j, -0.5j, 3.25])
    write_complex_csv(values, path)
    assert_allclose(read_complex_csv(path), values)


def test_matrix_formats(tmp_path):
    matrix = build_matrix(ModeKind.SPHERICAL_HARMONICS, 2, spiral(5))
    path = str(tmp_path / "A.csv")
    write_matrix_csv(matrix, path)
    with open(path, encoding="utf-8") as fh:
        assert fh.readline().startswith("re_0,im_0,re_1,im_1")
    assert_allclose(read_matrix_csv(path), matrix.data)

    data = json.loads(json.dumps(matrix_to_json(matrix)))
    restored = matrix_from_json(data)
    assert restored.kind == ModeKind.SPHERICAL_HARMONICS and restored.N == 2
    assert_allclose(restored.data, matrix.data)
    with pytest.raises(FormatError):
        matrix_from_json({"kind": "sh", "N": 2, "K": 5})


def test_rows_and_two_column(tmp_path):
    rows_path = str(tmp_path / "rows.csv")
    write_rows_csv([{"a": 1, "b": 0.1}, {"a": 2, "b": None}], rows_path, ["a", "b"])
    with open(rows_path, encoding="utf-8") as fh:
        assert fh.read() == "a,b\n1,0.10000000000000001\n2,\n"

    dat_path = str(tmp_path / "curve.dat")
    write_two_column(dat_path, [0.5, 0.75, 1.0], [0.25, None, 0.125])
    with open(dat_path, encoding="utf-8") as fh:
        assert fh.read().splitlines() == ["0.5 0.25", "1 0.125"]


def test_formatted_json(tmp_path):
    path = str(tmp_path / "out.json")
    write_formatted_json({"b": 1, "a": [1, 2]}, path, sort_keys=True)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    assert text.endswith("}\n")
    assert text.index('"a"') < text.index('"b"')


def test_config_digest():
    assert config_digest({"a": 1, "b": 2}) == config_digest({"b": 2, "a": 1})
    assert config_digest({"a": 1}) != config_digest({"a": 2})
    assert len(config_digest({})) == 64


def test_run_store(tmp_path):
    store = RunStore(str(tmp_path / "runs.db"))
    assert store.count() == 0
    assert store.get("k") is None
    store.put("k", {"best_mu": 0.5})
    store.put("k", {"best_mu": 0.25})
    assert store.get("k") == {"best_mu": 0.25}
    assert store.count() == 1
    store.clear()
    assert store.count() == 0
    store.close()
    store.close()


def test_run_store_threads(tmp_path):
    store = RunStore(str(tmp_path / "runs.db"))

    def put(i):
        store.put(f"key{i}", {"i": i})
        store.close()

    with ThreadPoolExecutor(max_workers=4) as pool:
        list(pool.map(put, range(20)))
    assert store.count() == 20
    assert store.get("key7") == {"i": 7}
    reopened = RunStore(str(tmp_path / "runs.db"))
    assert reopened.count() == 20
