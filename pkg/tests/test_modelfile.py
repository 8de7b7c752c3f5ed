"""Model files: the JSON container, CSV ingestion, and DOT round trips."""

import json

import numpy as np
import pytest

from ordermap import (
    Config,
    Dag,
    DagOracle,
    DataOracle,
    ModelFileError,
    TableOracle,
    dag_to_json,
    emit_dot,
    load_model_file,
    parse_dot,
)
from ordermap.fixtures import diamond_dag, noisy_xor_table


def write_model(tmp_path, doc, name="model.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def test_dag_source(tmp_path):
    p = write_model(
        tmp_path,
        {
            "variables": ["a", "b", "c"],
            "dag": {"arcs": [["a", "c"], ["b", "c"]]},
        },
    )
    mf = load_model_file(p)
    assert mf.variables == ("a", "b", "c")
    assert mf.arity == (2, 2, 2)
    assert sorted(mf.dag.arcs) == [(0, 2), (1, 2)]
    assert isinstance(mf.oracle(Config()), DagOracle)
    assert mf.index("b") == 1


def test_dag_arcs_accept_indices(tmp_path):
    p = write_model(
        tmp_path,
        {"variables": ["a", "b"], "dag": {"arcs": [[0, 1]]}},
    )
    assert sorted(load_model_file(p).dag.arcs) == [(0, 1)]


def test_table_source(tmp_path):
    table = noisy_xor_table()
    p = write_model(
        tmp_path,
        {
            "variables": ["a", "b", "c"],
            "arity": [2, 2, 2],
            "table": {"probs": table.reshape(-1).tolist()},
        },
    )
    mf = load_model_file(p)
    assert np.allclose(mf.table, table)
    oracle = mf.oracle(Config())
    assert isinstance(oracle, TableOracle)
    assert oracle.query({0}, set(), {1})


def test_data_source_with_relative_path(tmp_path):
    (tmp_path / "rows.csv").write_text("a,b\n0,0\n1,1\n0,1\n1,0\n")
    p = write_model(
        tmp_path,
        {"variables": ["a", "b"], "data": {"csv_path": "rows.csv"}},
    )
    mf = load_model_file(p)
    assert mf.data.shape == (4, 2)
    assert mf.arity == (2, 2)
    assert isinstance(mf.oracle(Config()), DataOracle)


def test_csv_arity_inference_floor_is_two(tmp_path):
    (tmp_path / "rows.csv").write_text("a,b\n0,0\n0,2\n")
    p = write_model(
        tmp_path,
        {"variables": ["a", "b"], "data": {"csv_path": "rows.csv"}},
    )
    assert load_model_file(p).arity == (2, 3)


@pytest.mark.parametrize(
    "doc,needle",
    [
        ({"variables": ["a"], "dag": {"arcs": []}, "table": {"probs": []}}, "exactly one"),
        ({"variables": ["a", "b"]}, "exactly one"),
        ({"variables": [], "dag": {"arcs": []}}, "non-empty"),
        ({"variables": ["a", "a"], "dag": {"arcs": []}}, "unique"),
        ({"variables": ["a", "b"], "arity": [2], "dag": {"arcs": []}}, "arity"),
        ({"variables": ["a", "b"], "arity": [2, 1], "dag": {"arcs": []}}, "arity"),
        ({"variables": ["a", "b"], "table": {"probs": [0.5, 0.5]}}, "requires explicit"),
        (
            {"variables": ["a", "b"], "arity": [2, 2], "table": {"probs": [1.0]}},
            "4 entries",
        ),
        ({"variables": ["a", "b"], "dag": {"arcs": [["a", "x"]]}}, "x"),
        (
            {"variables": ["a", "b"], "dag": {"arcs": [["a", "b"], ["b", "a"]]}},
            "cycle",
        ),
    ],
)
def test_malformed_documents_are_rejected(tmp_path, doc, needle):
    p = write_model(tmp_path, doc)
    with pytest.raises(ModelFileError, match=needle):
        load_model_file(p)


def test_csv_errors_carry_line_numbers(tmp_path):
    model = {"variables": ["a", "b"], "data": {"csv_path": "rows.csv"}}

    (tmp_path / "rows.csv").write_text("a,c\n0,0\n")
    with pytest.raises(ModelFileError, match=r"rows\.csv:1: header"):
        load_model_file(write_model(tmp_path, model))

    (tmp_path / "rows.csv").write_text("a,b\n0,0\n0,x\n")
    with pytest.raises(ModelFileError, match=r"rows\.csv:3: non-integer"):
        load_model_file(write_model(tmp_path, model))

    (tmp_path / "rows.csv").write_text("a,b\n0,0\n0\n")
    with pytest.raises(ModelFileError, match=r"rows\.csv:3: expected 2 fields"):
        load_model_file(write_model(tmp_path, model))

    (tmp_path / "rows.csv").write_text("a,b\n0,0\n-1,0\n")
    with pytest.raises(ModelFileError, match=r"rows\.csv:3: negative"):
        load_model_file(write_model(tmp_path, model))

    (tmp_path / "rows.csv").write_text("a,b\n0,0\n0,1\n0,2\n")
    model["arity"] = [2, 2]
    with pytest.raises(ModelFileError, match=r"rows\.csv:4: value 2 out of range"):
        load_model_file(write_model(tmp_path, model))

    (tmp_path / "rows.csv").write_text("a,b\n")
    del model["arity"]
    with pytest.raises(ModelFileError, match="no data rows"):
        load_model_file(write_model(tmp_path, model))


def test_missing_and_invalid_files(tmp_path):
    with pytest.raises(ModelFileError):
        load_model_file(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ModelFileError):
        load_model_file(bad)


def test_dag_json_round_trip(tmp_path):
    dag = diamond_dag()
    names = ("a", "b", "c", "d")
    p = tmp_path / "out.json"
    p.write_text(dag_to_json(dag, names))
    mf = load_model_file(p)
    assert mf.variables == names
    assert sorted(mf.dag.arcs) == sorted(dag.arcs)


def test_dot_round_trip():
    dag = diamond_dag()
    names = ("a", "b", "c", "d")
    parsed_names, parsed = parse_dot(emit_dot(dag, names))
    assert parsed_names == names
    assert sorted(parsed.arcs) == sorted(dag.arcs)
    # isolated nodes survive the trip
    lonely = Dag(2, [])
    parsed_names, parsed = parse_dot(emit_dot(lonely, ("x", "y")))
    assert parsed_names == ("x", "y")
    assert parsed.arcs == frozenset()


def test_parse_dot_rejects_garbage():
    with pytest.raises(ModelFileError):
        parse_dot('digraph {\n  "a" -> ;\n}\n')
    with pytest.raises(ModelFileError):
        parse_dot('digraph {\n  "a";\n  "a";\n}\n')


def test_config_validation():
    Config().validate()
    with pytest.raises(ValueError):
        Config(alpha=0.0).validate()
    with pytest.raises(ValueError):
        Config(alpha=1.0).validate()
    with pytest.raises(ValueError):
        Config(epsilon=-1e-3).validate()
    with pytest.raises(ValueError):
        Config(max_perms=0).validate()
    with pytest.raises(ValueError):
        Config(verify_limit=0).validate()
