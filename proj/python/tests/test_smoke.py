import json

import numpy as np
import pytest

import stratsel


def test_allocators_and_variance():
    stats = stratsel.StratumStats.from_moments([100, 100], [0.0, 0.0], [1.0, 9.0])
    assert stratsel.optimal(stats, 8) == [2, 6]
    assert stratsel.brute_force_optimal(stats, 8, [1, 1], [8, 8]) == [2, 6]
    assert stratsel.optimal(stats, 8, upper=[8, 4]) == [4, 4]
    assert stratsel.proportional(
        stratsel.StratumStats.from_moments([3, 3, 4], [0, 0, 0], [1, 1, 1]), 5) == [2, 1, 2]
    one = stratsel.StratumStats.from_moments([100], [0.0], [4.0])
    assert stratsel.stratified_variance(one, [25]) == pytest.approx(0.12, rel=1e-12)
    assert stratsel.srs_variance(one, 25) == pytest.approx(0.12, rel=1e-12)


def test_stratum_stats_from_arrays():
    stats = stratsel.stratum_stats(np.array([1.0, 2.0, 3.0, 5.0]), np.array([0, 0, 1, 1]))
    assert stats.sizes == [2, 2]
    assert stats.means == pytest.approx([1.5, 4.0])
    assert stats.overall_mean == pytest.approx(2.75)


def test_frame_roundtrip_and_errors():
    x = np.arange(12, dtype=float).reshape(4, 3)
    frame = stratsel.Frame(x, np.ones(4))
    assert frame.shape == (4, 3)
    assert frame.names == ["X1", "X2", "X3"]
    np.testing.assert_array_equal(frame.X, x)
    with pytest.raises(stratsel.StratselError) as info:
        stratsel.kmeans_fit(frame, [0], 5)
    assert info.value.code == "KExceedsPopulation"


def test_select_and_partition():
    frame = stratsel.generate(2000, beta="type2", seed=3)
    result = stratsel.select(frame, k=4, theta=2, n=200, seed=1)
    assert 1 <= len(result["selected"]) <= 2
    assert result["selected_names"][0] == "X1"
    part = stratsel.kmeans_fit(frame, [0], 4, seed=2)
    labels = part.labels
    assert labels.shape == (2000,)
    np.testing.assert_array_equal(part.assign(frame), labels)
    assert part.centroids.shape == (4, 1)
    assert stratsel.pick_covariate(frame) == 0


def test_evaluate_is_reproducible():
    train, test = stratsel.generate_train_test(1500, beta="type1", seed=5)
    kwargs = dict(methods=["SRS", "CUPED", "SFS-KM-V"], k=3, theta=2, n=100, replications=200, seed=9)
    a = stratsel.evaluate(train, test, **kwargs)
    b = stratsel.evaluate(train, test, **kwargs)
    assert json.dumps(a) == json.dumps(b)
    assert [m["method"] for m in a["methods"]] == ["SRS", "CUPED", "SFS-KM-V"]


def test_cli_generate(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dataset": {"synthetic": {"N": 10, "p": 20, "beta": "type1"}},
                               "out_dir": "gen"}))
    assert stratsel.cli_main(["generate", "--config", str(cfg)]) == 0
    assert (tmp_path / "gen" / "train.csv").read_text().count("\n") == 11
    cfg.write_text(json.dumps({"dataset": {"synthetic": {"N": 10}}}))
    assert stratsel.cli_main(["generate", "--config", str(cfg)]) == 2
