import json
import math

import numpy as np

from mfgtime.utils.utils import dump_json, file_sha256, parallel_map, sha256_bytes, to_builtin


def test_parallel_map_keeps_input_order():
    def square(value):
        return value * value

    assert parallel_map(square, range(8), workers=4) == [value * value for value in range(8)]
    assert parallel_map(square, [3], workers=4) == [9]


def test_to_builtin_handles_numpy_and_infinities():
    data = {"a": np.arange(3), "b": np.float64(0.5), "c": (np.int64(2), np.bool_(True)), 1: math.inf}
    assert to_builtin(data) == {"a": [0, 1, 2], "b": 0.5, "c": [2, True], "1": "inf"}


def test_dump_json_is_byte_stable(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    dump_json({"z": 1, "a": np.float64(2.0)}, first)
    dump_json({"a": 2.0, "z": 1}, second)
    assert first.read_bytes() == second.read_bytes()
    assert json.loads(first.read_text()) == {"a": 2.0, "z": 1}
    assert file_sha256(first) == sha256_bytes(first.read_bytes())
