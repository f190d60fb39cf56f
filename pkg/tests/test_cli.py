import copy
import csv
import io
import json
from pathlib import Path

import pytest

from fgmrisk import cli
from fgmrisk import config as cfgmod
from fgmrisk import reference
from fgmrisk.errors import ValidationError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_config_round_trip(path):
    first = cfgmod.parse(path.read_text())
    again = cfgmod.parse(cfgmod.dump(first))
    assert again == first
    assert cfgmod.dump(again) == cfgmod.dump(first)


def test_unknown_key_rejected_with_path():
    doc = json.loads((CONFIGS / "six_risks_end.json").read_text())
    doc["marginals"][2]["shpae"] = 1
    with pytest.raises(ValidationError, match="marginals.2"):
        cfgmod.parse(json.dumps(doc))


def test_scientific_notation_and_version():
    doc = {"version": 1, "marginals": [{"type": "exponential", "rate": 1e-1}], "dependence": {"type": "independent"}}
    assert cfgmod.to_portfolio(cfgmod.parse(json.dumps(doc))).marginals[0].rate == pytest.approx(0.1)
    doc["version"] = 2
    with pytest.raises(ValidationError):
        cfgmod.parse(json.dumps(doc))


def test_dimension_mismatch_rejected():
    doc = {"version": 1, "marginals": [{"type": "exponential", "rate": 1}] * 2,
           "dependence": {"type": "thetas", "thetas": {"1,3": 0.2}}}
    with pytest.raises(ValidationError):
        cfgmod.to_portfolio(cfgmod.parse(json.dumps(doc)))


def test_risk_on_end_config(capsys):
    code, out, _ = _run(capsys, "risk", "--config", CONFIGS / "six_risks_end.json", "--kappa", "0.99")
    assert code == 0
    (row,) = _rows(out)
    assert float(row["TVaR"]) == pytest.approx(153.41, abs=0.005)
    assert float(row["VaR"]) == pytest.approx(140.58, abs=0.005)


def test_info_inadmissible_exits_one(capsys):
    code, _, err = _run(capsys, "info", "--config", CONFIGS / "inadmissible_pair.json")
    assert code == 1
    assert "eps" in err


def test_info_lists_thetas(capsys):
    code, out, _ = _run(capsys, "info", "--config", CONFIGS / "mixed_thetas.json", "--format", "text")
    assert code == 0
    assert "theta 1,2,3" in out and "yes" in out


def test_moments_and_aggregate(capsys):
    code, out, _ = _run(capsys, "moments", "--config", CONFIGS / "six_risks_independent.json", "--order", "2")
    assert code == 0
    m1, m2 = (float(r["moment"]) for r in _rows(out))
    assert m1 == pytest.approx(80.0, rel=1e-5)
    assert m2 - m1**2 == pytest.approx(564.0, rel=1e-4)
    code, out, _ = _run(capsys, "aggregate", "--config", CONFIGS / "six_risks_independent.json")
    assert code == 0
    assert sum(float(r["weight"]) for r in _rows(out)) == pytest.approx(1.0, abs=1e-4)


def test_non_me_needs_span(capsys):
    code, _, err = _run(capsys, "risk", "--config", CONFIGS / "lognormal_markov.json")
    assert code == 1 and "--h" in err
    code, out, _ = _run(capsys, "risk", "--config", CONFIGS / "lognormal_markov.json", "--h", "1", "--kappa", "0.9")
    assert code == 0 and len(_rows(out)) == 1


def test_bounds(capsys):
    code, out, _ = _run(capsys, "bounds", "--config", CONFIGS / "lognormal_markov.json", "--h", "2", "--kappa", "0.99")
    assert code == 0
    (row,) = _rows(out)
    assert float(row["tvar_upper_method"]) == pytest.approx(92.65, abs=0.01)
    assert float(row["tvar_upper_method"]) <= float(row["tvar_lower_method"])


def test_allocate_and_share(capsys, tmp_path):
    target = tmp_path / "alloc.csv"
    code, _, _ = _run(capsys, "allocate", "--config", CONFIGS / "six_risks_independent.json", "--kappa", "0.99",
                      "--out", target)
    assert code == 0
    rows = _rows(target.read_text())
    assert float(rows[-1]["contribution"]) == pytest.approx(160.14, abs=0.005)
    assert float(rows[5]["contribution"]) == pytest.approx(75.54, abs=0.005)
    code, out, _ = _run(capsys, "share", "--config", CONFIGS / "six_risks_end.json", "--s", "80")
    assert code == 0
    assert sum(float(r["conditional_mean"]) for r in _rows(out)) == pytest.approx(80.0, rel=1e-5)


def test_sample_is_reproducible(capsys):
    args = ("sample", "--config", CONFIGS / "mixed_thetas.json", "--n", "50", "--seed", "3")
    _, a, _ = _run(capsys, *args)
    _, b, _ = _run(capsys, *args)
    assert a == b and len(_rows(a)) == 50


def test_reproduce_table1_subset(capsys):
    code, out, _ = _run(capsys, "reproduce", "table1", "--subset", "d=1,2,10,100")
    assert code == 0
    rows = _rows(out)
    assert len(rows) == 4 * 3 * 2 * 3
    assert all(r["status"] == "ok" for r in rows)


def test_reproduce_reports_forced_mismatch(capsys, monkeypatch):
    table = copy.deepcopy(reference.EXCHANGEABLE_EXP)
    table[2]["VaR"][0.9] = (18.09, 19.45, 21.90)
    monkeypatch.setattr(reference, "EXCHANGEABLE_EXP", table)
    code, out, _ = _run(capsys, "reproduce", "table1", "--subset", "d=2")
    assert code == 3
    bad = [r for r in _rows(out) if r["status"] != "ok"]
    assert len(bad) == 1 and "EPD" in bad[0]["entry"]


def test_usage_errors(capsys):
    assert _run(capsys, "risk")[0] == 1
    assert _run(capsys, "reproduce", "table9")[0] == 1
    assert _run(capsys, "reproduce", "table1", "--subset", "q=1")[0] == 1
    # a density that underflows is a numeric failure, not a validation error
    assert _run(capsys, "share", "--config", CONFIGS / "six_risks_end.json", "--s", "5000")[0] == 2
    with pytest.raises(SystemExit):
        cli.main(["explode"])
