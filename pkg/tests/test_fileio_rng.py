import math

import numpy as np
import pytest

from holderdecay.exceptions import InvalidInputError
from holderdecay.fileio import (
    dumps_json,
    loads_json,
    read_sequence_csv,
    read_trajectory_csv,
    write_sequence_csv,
    write_trajectory_csv,
)
from holderdecay.rng import SplitMix64


def test_splitmix_reference_values():
    g = SplitMix64(0)
    assert g.next_u64() == 0xE220A8397B1DCDAF
    assert g.next_u64() == 0x6E789E6AA1B965F4


def test_splitmix_uniform_range():
    u = SplitMix64(7).uniform(-1, 1, 1000)
    assert np.all((u >= -1) & (u < 1))
    assert abs(u.mean()) < 0.1
    assert np.array_equal(u, SplitMix64(7).uniform(-1, 1, 1000))


def test_json_round_trip_non_finite():
    obj = {"x": 0.1, "inf": math.inf, "nan": math.nan, "rows": [[1, 2.5], [3, -math.inf]],
           "flag": True, "none": None, "arr": np.arange(3)}
    back = loads_json(dumps_json(obj))
    assert back["x"] == 0.1 and back["inf"] == math.inf and math.isnan(back["nan"])
    assert back["rows"] == [[1, 2.5], [3, -math.inf]]
    assert back["arr"] == [0, 1, 2]


def test_json_floats_round_trip_exactly():
    xs = np.random.default_rng(0).standard_normal(200) * 1e-7
    assert loads_json(dumps_json(xs.tolist())) == xs.tolist()


def test_json_malformed():
    with pytest.raises(InvalidInputError):
        loads_json("{not json")


def test_sequence_csv(tmp_path):
    p = tmp_path / "s.csv"
    write_sequence_csv(p, [(1, 0.5), (2, 1 / 3)], {"a": "golden"})
    assert read_sequence_csv(p) == [(1, 0.5), (2, 1 / 3)]
    bad = tmp_path / "bad.csv"
    bad.write_text("n,value\n1,abc\n")
    with pytest.raises(InvalidInputError):
        read_sequence_csv(bad)
    bad.write_text("idx,val\n1,2\n")
    with pytest.raises(InvalidInputError):
        read_sequence_csv(bad)


def test_trajectory_csv(tmp_path):
    p = tmp_path / "t.csv"
    write_trajectory_csv(p, [0, 0.5], [1.0, 0.9], [0.0, 0.1], {"strong_norm_sq": "1"})
    meta, t, e, d = read_trajectory_csv(p)
    assert meta == {"strong_norm_sq": "1"}
    assert t.tolist() == [0, 0.5] and e.tolist() == [1.0, 0.9] and d.tolist() == [0.0, 0.1]
    p.write_text("t,E,cumulative_dissipation\n")
    with pytest.raises(InvalidInputError):
        read_trajectory_csv(p)
