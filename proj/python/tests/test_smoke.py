import math

import pytest

import maxhunt as mh


def pick_columns(rows, cols):
    return [[row[j] for j in cols] for row in rows]


def test_grids_and_version():
    grid = mh.default_grid()
    assert len(grid) == 100
    assert grid[0] == 6.0 / 105.0
    assert grid[-1] == 1.0
    bridge = mh.bridge_grid()
    assert len(bridge) == 100
    assert bridge[-1] < 1.0
    assert mh.__version__ == "0.1.0"


def test_model_registry_and_sampling():
    names = mh.model_names()
    assert "drift" in names and "random-slope" in names
    ds = mh.sample_model("drift", 40, seed=7)
    assert len(ds["labels"]) == 40
    assert len(ds["x"]) == 40
    assert all(len(row) == len(ds["grid"]) for row in ds["x"])
    assert set(ds["labels"]) <= {0, 1}
    again = mh.sample_model("drift", 40, seed=7)
    assert again == ds
    other_stream = mh.sample_model("drift", 40, seed=7, stream=1)
    assert other_stream["x"] != ds["x"]


def test_curve_maxima_and_selection():
    ds = mh.sample_model("drift", 80, seed=11, params={"c": 2.0})
    curve = mh.dependence_curve(ds["grid"], ds["x"], ds["labels"])
    assert curve["measure"] == "V2" and curve["estimator"] == "U"
    assert len(curve["values"]) == len(ds["grid"])
    peaks = mh.local_maxima(curve["t"], curve["values"], h=3)
    sel = mh.mh_select(ds["grid"], ds["x"], ds["labels"], h=3, max_vars=5)
    assert sel["method"].startswith("MHV")
    assert 1 <= len(sel["indices"]) <= 5
    assert sel["indices"][0] == peaks[0]
    # A strong drift separates best near the end of the interval.
    assert sel["indices"][0] >= 50

    tsel = mh.t_select(ds["grid"], ds["x"], ds["labels"], dim=4)
    assert len(tsel["indices"]) == 4
    msel = mh.mrmr_select(ds["grid"], ds["x"], ds["labels"], dim=4, variant="FCD")
    assert len(msel["indices"]) == 4


def test_classification_round_trip():
    train = mh.sample_model("drift", 100, seed=21, params={"c": 2.0})
    test = mh.sample_model("drift", 100, seed=21, stream=1, params={"c": 2.0})
    cols = mh.mh_select(train["grid"], train["x"], train["labels"], max_vars=3)[
        "indices"
    ]
    train_x = pick_columns(train["x"], cols)
    test_x = pick_columns(test["x"], cols)
    knn_acc = mh.accuracy(
        mh.knn_classify(train_x, train["labels"], test_x, k=5), test["labels"]
    )
    lda_acc = mh.accuracy(
        mh.lda_classify(train_x, train["labels"], test_x), test["labels"]
    )
    # c=2 drift is far easier than chance; both rules should clear 70%.
    assert knn_acc > 0.7
    assert lda_acc > 0.7


def test_dataset_file_round_trip(tmp_path):
    ds = mh.sample_model("random-slope", 10, seed=5)
    path = str(tmp_path / "ds.csv")
    mh.save_dataset(ds["grid"], ds["x"], ds["labels"], path)
    back = mh.load_dataset(path)
    assert back["grid"] == ds["grid"]
    assert back["x"] == ds["x"]
    assert back["labels"] == ds["labels"]


def test_analytic_oracles():
    assert math.isclose(
        mh.analytic_v2_curve("drift", 1.0, 0.5, 1.0),
        0.06772582241324471,
        rel_tol=1e-12,
    )
    assert mh.analytic_v2_curve("random-slope", 0.0, 0.5) == 0.0
    est = mh.bayes_error("drift", budget=40000, seed=3)
    # Bayes error of the unit-drift model is Phi(-1/2) ~ 0.3085.
    assert abs(est["error"] - 0.3085) < 4 * est["std_error"] + 1e-3


def test_errors_translate():
    with pytest.raises(ValueError):
        mh.sample_model("no-such-model", 10, seed=1)
    with pytest.raises(RuntimeError):
        mh.sample_model("drift", 0, seed=1)
    with pytest.raises(ValueError):
        mh.analytic_v2_curve("peak", 0.5, 0.5)
    with pytest.raises(RuntimeError):
        mh.bayes_error("drift-mixture", budget=1000, seed=1)
