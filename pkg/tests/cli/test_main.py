import json

import numpy as np
import pytest

from otmap.basis import build_multi_index_set
from otmap.cli import main
from otmap.map import SequentialMap, TransportMap, load_map, save_map
from otmap.utils import read_samples_csv, write_samples_csv


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    monkeypatch.setenv("OTMAP_WORKERS", "1")


def cubic_map(structure: str) -> TransportMap:
    basis = build_multi_index_set(structure, 2, 3)
    weights = np.zeros((2, basis.size))
    weights[0, basis.position((1, 0))] = 1.0
    weights[0, basis.position((3, 0))] = 0.2
    weights[1, basis.position((1, 0))] = 0.5
    weights[1, basis.position((0, 1))] = 1.0
    weights[1, basis.position((0, 3))] = 0.1
    return TransportMap(basis, weights, "monomial")


def read_lines(path) -> list:
    return path.read_text().splitlines()


def test_sample_is_seeded(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sample", "--kind", "two-gaussian-mixture", "-n", "50", "--dim", "2", "--seed", "3"]
    assert main(args + ["-o", str(first)]) == 0
    assert main(args + ["-o", str(second)]) == 0
    assert first.read_text() == second.read_text()
    samples, header = read_samples_csv(str(first))
    assert header == ["x0", "x1"]
    assert samples.shape == (50, 2)


def test_index_set(capsys):
    assert main(["index-set", "--structure", "kr", "--dim", "2", "--order", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "structure=kr D=2 O=1 K=3"
    assert lines[1] == "row sizes: [2, 3]"
    assert len(lines) == 5
    assert sorted(line.split(": ")[1] for line in lines[2:4]) == ["(0, 0)", "(1, 0)"]
    assert lines[4] == "2: (0, 1)"


def test_index_set_dense_has_no_row_sizes(capsys):
    assert main(["index-set", "--dim", "2", "--order", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "structure=dense D=2 O=2 K=6"
    assert not any(line.startswith("row sizes") for line in lines)


def test_push_invert_round_trip(tmp_path):
    map_path = tmp_path / "map.json"
    save_map(cubic_map("kr"), str(map_path))
    samples = np.random.default_rng(0).standard_normal((20, 2))
    write_samples_csv(str(tmp_path / "in.csv"), samples, ["a", "b"])

    assert main(["push", "-m", str(map_path), "-s", str(tmp_path / "in.csv"), "-o", str(tmp_path / "z.csv")]) == 0
    assert main(["invert", "-m", str(map_path), "-s", str(tmp_path / "z.csv"), "-o", str(tmp_path / "x.csv")]) == 0

    pushed, header = read_samples_csv(str(tmp_path / "z.csv"))
    assert header == ["a", "b"]
    np.testing.assert_allclose(pushed, cubic_map("kr").forward(samples))
    recovered, _ = read_samples_csv(str(tmp_path / "x.csv"))
    np.testing.assert_allclose(recovered, samples, atol=1e-8)


def test_invert_dense_map_fails(tmp_path, capsys):
    map_path = tmp_path / "dense.json"
    save_map(cubic_map("dense"), str(map_path))
    write_samples_csv(str(tmp_path / "in.csv"), np.zeros((3, 2)), ["a", "b"])
    code = main(["invert", "-m", str(map_path), "-s", str(tmp_path / "in.csv"), "-o", str(tmp_path / "x.csv")])
    assert code == 1
    assert capsys.readouterr().err.startswith("otmap invert: ")
    assert not (tmp_path / "x.csv").exists()


def test_push_dimension_mismatch(tmp_path, capsys):
    map_path = tmp_path / "map.json"
    save_map(cubic_map("kr"), str(map_path))
    write_samples_csv(str(tmp_path / "in.csv"), np.zeros((3, 3)), ["a", "b", "c"])
    code = main(["push", "-m", str(map_path), "-s", str(tmp_path / "in.csv"), "-o", str(tmp_path / "z.csv")])
    assert code == 1
    assert "D=2" in capsys.readouterr().err


def test_fit_missing_source(tmp_path, capsys):
    missing = tmp_path / "absent.csv"
    assert main(["fit", "--source", str(missing), "--out", str(tmp_path / "m.json")]) == 1
    assert str(missing) in capsys.readouterr().err


def test_fit_refuses_large_dense_basis_before_reading(tmp_path, capsys):
    code = main(
        [
            "fit",
            "--source",
            str(tmp_path / "never-read.csv"),
            "--out",
            str(tmp_path / "m.json"),
            "--structure",
            "dense",
            "--dim",
            "300",
            "--order",
            "4",
        ]
    )
    assert code == 1
    assert "KR or KRSV" in capsys.readouterr().err
    assert not (tmp_path / "m.json").exists()


def test_fit_dense_writes_map_and_diagnostics(tmp_path):
    source = tmp_path / "source.csv"
    assert main(["sample", "--kind", "gaussian", "-n", "200", "--dim", "2", "-o", str(source)]) == 0
    out = tmp_path / "map.json"
    code = main(
        ["fit", "--source", str(source), "--out", str(out), "--structure", "dense", "--order", "1", "--max-iters", "30"]
    )
    assert code in (0, 2)

    tmap = load_map(str(out))
    assert isinstance(tmap, TransportMap)
    assert tmap.dim == 2 and tmap.order == 1

    lines = read_lines(tmp_path / "map_diagnostics.csv")
    assert lines[0].startswith("# config: ")
    effective = json.loads(lines[0][len("# config: ") :])
    assert effective["basis"]["structure"] == "dense"
    assert effective["solver"]["max_iters"] == 30
    assert lines[1] == "iter,objective,primal_res,dual_res"
    assert 2 <= len(lines) - 1 <= 31


def test_fit_sequential_with_config_file(tmp_path):
    source = tmp_path / "source.csv"
    assert main(["sample", "--kind", "laplace", "-n", "150", "--dim", "2", "-o", str(source)]) == 0
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "source": str(source),
                "out": str(tmp_path / "seq.json"),
                "diagnostics": str(tmp_path / "stages.csv"),
                "basis": {"structure": "krsv", "order": 3},
                "solver": {"max_iters": 200},
                "composition": {"stages": 2},
            }
        )
    )
    code = main(["fit", "-c", str(config), "--order", "1"])
    assert code in (0, 2)

    seq = load_map(str(tmp_path / "seq.json"))
    assert isinstance(seq, SequentialMap)
    assert len(seq) == 2
    assert all(stage.order == 1 for stage in seq)

    lines = read_lines(tmp_path / "stages.csv")
    assert '"order": 1' in lines[0]
    assert lines[1] == "stage,theta,objective_train,objective_holdout,admm_iters"
    assert len(lines) == 4


@pytest.mark.parametrize(
    "document, path",
    [
        ({"solver": {"rho": -1.0}}, "solver.rho"),
        ({"solver": {"colour": 1}}, "solver.colour"),
        ({"composition": {"holdout_fraction": 1.5}}, "composition.holdout_fraction"),
    ],
)
def test_fit_invalid_config(tmp_path, capsys, document, path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps(document))
    code = main(["fit", "-c", str(config), "--source", "s.csv", "--out", str(tmp_path / "m.json")])
    assert code == 1
    assert path in capsys.readouterr().err


def test_fit_without_source(tmp_path, capsys):
    assert main(["fit", "--out", str(tmp_path / "m.json")]) == 1
    assert "--source" in capsys.readouterr().err


def test_unknown_command_exits_by_argparse():
    with pytest.raises(SystemExit) as excinfo:
        main(["fly"])
    assert excinfo.value.code == 2


def test_fit_has_no_single_stage_theta_flag(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["fit", "--source", "s.csv", "--theta", "1", "--out", str(tmp_path / "m.json")])
    assert excinfo.value.code == 2


@pytest.fixture
def regression_csv(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.standard_normal((40, 3))
    y = 2.0 * x[:, 0] - x[:, 2] + 0.5 * rng.standard_normal(40)
    path = tmp_path / "regression.csv"
    write_samples_csv(str(path), np.column_stack([x, y]), ["a", "b", "c", "y"])
    return path


def test_lasso_both_methods(tmp_path, regression_csv):
    out_dir = tmp_path / "out"
    code = main(
        [
            "lasso",
            "--data",
            str(regression_csv),
            "--lambda",
            "1.0",
            "--method",
            "both",
            "--structure",
            "krsv",
            "--order",
            "1",
            "--num-prior",
            "100",
            "--stages",
            "1",
            "--max-iters",
            "200",
            "--burn-in",
            "10",
            "--n-samples",
            "200",
            "--kde-grid",
            "20",
            "--out-dir",
            str(out_dir),
        ]
    )
    assert code in (0, 2)
    assert isinstance(load_map(str(out_dir / "lasso_map.json")), (TransportMap, SequentialMap))

    for method in ("transport", "gibbs"):
        samples, header = read_samples_csv(str(out_dir / f"lasso_{method}_samples.csv"))
        assert header == ["a", "b", "c"]
        summary = read_lines(out_dir / f"lasso_{method}_summary.csv")
        assert summary[0].startswith("# config: ")
        assert summary[1] == "name,median,q2.5,q97.5,mean,std,lasso"
        assert [line.split(",")[0] for line in summary[2:]] == ["a", "b", "c"]
        kde = read_lines(out_dir / f"lasso_{method}_kde.csv")
        assert kde[0] == "a_grid,a_density,b_grid,b_density,c_grid,c_density"
        assert len(kde) == 21
    assert samples.shape == (200, 3)

    provenance = json.loads(summary[0][len("# config: ") :])
    assert provenance["lambda"] == 1.0
    assert provenance["sigma2"] > 0


def test_lasso_gibbs_without_estimate(tmp_path, regression_csv):
    code = main(
        [
            "lasso",
            "--data",
            str(regression_csv),
            "--lambda",
            "0.5",
            "--sigma2",
            "0.25",
            "--method",
            "gibbs",
            "--burn-in",
            "10",
            "--n-samples",
            "50",
            "--no-lasso-estimate",
            "--prefix",
            "run",
            "--out-dir",
            str(tmp_path),
        ]
    )
    assert code == 0
    summary = read_lines(tmp_path / "run_gibbs_summary.csv")
    assert summary[1] == "name,median,q2.5,q97.5,mean,std"
    assert '"sigma2": 0.25' in summary[0]
    assert not (tmp_path / "run_map.json").exists()


def test_lasso_requires_lambda(tmp_path, regression_csv, capsys):
    assert main(["lasso", "--data", str(regression_csv), "--out-dir", str(tmp_path)]) == 1
    assert "--lambda" in capsys.readouterr().err


def test_lasso_missing_response(tmp_path, regression_csv, capsys):
    code = main(["lasso", "--data", str(regression_csv), "--lambda", "1", "--response", "medv"])
    assert code == 1
    assert "`medv` not found" in capsys.readouterr().err
