import csv
import json
import math

import pytest

from vibstab import network
from vibstab.cli import main
from vibstab.instances import example3_network, example4_network


@pytest.fixture
def ex3(tmp_path):
    p = tmp_path / "ex3.json"
    network.save(example3_network(), p)
    return p


@pytest.fixture
def ex4(tmp_path):
    p = tmp_path / "ex4.json"
    network.save(example4_network(), p)
    return p


def test_check_exit_codes(ex3, ex4, tmp_path, capsys):
    assert main(["check", str(ex3)]) == 0
    assert main(["check", str(ex4)]) == 1
    assert "1 -> 3 -> 4 -> 1" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["check", str(bad)]) == 2
    assert "bad.json:1:2" in capsys.readouterr().err
    assert main(["check", str(tmp_path / "missing.json")]) == 2


def test_place(ex3, ex4, tmp_path):
    out = tmp_path / "place.json"
    assert main(["place", str(ex3), "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["control_set"] == [{"from": 1, "to": 5}, {"from": 3, "to": 4}]
    assert main(["place", str(ex4)]) == 1


def test_design_reference_amplitudes(ex3, tmp_path):
    out = tmp_path / "s.json"
    assert main(["design", str(ex3), "--omega-base", "50", "--epsilon", "0.01", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    mus = {(e["row"], e["col"]): e["mu"] for e in doc["entries"]}
    assert mus[(4, 3)] == pytest.approx(50 * math.sqrt(1.8 / 1.1), rel=1e-12)
    assert mus[(5, 1)] == pytest.approx(100 * math.sqrt(6.5), rel=1e-12)
    assert doc["epsilon"] == 0.01


def test_average_both(ex3, tmp_path, capsys):
    sched = tmp_path / "s.json"
    main(["design", str(ex3), "--omega-base", "5", "-o", str(sched)])
    out = tmp_path / "avg.json"
    assert main(["average", str(ex3), str(sched), "--method", "both", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert {"closed_form", "numeric", "agreement"} <= set(doc)
    assert doc["agreement"]["spectral_distance"] < 1e-2
    assert "agreement" in capsys.readouterr().out


def test_simulate_unstable_without_schedule(ex3, tmp_path, capsys):
    out = tmp_path / "traj.csv"
    assert main(["simulate", str(ex3), "--tfinal", "10", "--dt", "1e-3", "-o", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "x1", "x2", "x3", "x4", "x5"]
    assert "growing" in capsys.readouterr().out


def test_simulate_controlled(ex3, tmp_path, capsys):
    sched = tmp_path / "s.json"
    main(["design", str(ex3), "--epsilon", "0.01", "-o", str(sched)])
    assert main(["simulate", str(ex3), str(sched), "--tfinal", "20", "--x0", "1,0,0,0,1"]) == 0
    assert "decaying" in capsys.readouterr().out
    assert main(["simulate", str(ex3), str(sched), "--dt", "0.1"]) == 2
    assert main(["simulate", str(ex3), "--x0", "1,2"]) == 2


def test_robustness_side_by_side(tmp_path):
    from vibstab.instances import marginal_network
    net = tmp_path / "m.json"
    network.save(marginal_network(), net)
    sched = tmp_path / "s.json"
    main(["design", str(net), "--omega-base", "50", "-o", str(sched)])
    out, table = tmp_path / "r.json", tmp_path / "r.csv"
    assert main(["robustness", str(net), str(sched), "-o", str(out), "--csv", str(table),
                 "--trials", "20"]) == 0
    doc = json.loads(out.read_text())
    assert doc["Mbar"]["bound"] > doc["M"]["bound"]
    rows = list(csv.reader(table.open()))
    assert rows[0] == ["system", "bound"] and [r[0] for r in rows[1:]] == ["M", "Mbar"]


def test_outputs_byte_identical(ex3, tmp_path):
    sched = tmp_path / "s.json"
    main(["design", str(ex3), "-o", str(sched)])
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        main(["robustness", str(ex3), str(sched), "-o", str(p), "--seed", "3", "--trials", "10"])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
