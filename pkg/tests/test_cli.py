import json

import pytest

from hepnc.cli import load_sim_config, main

GOOD_CELLS = [[0, 1, 2, 3], [1, 0, 3, 2]]
BAD_CELLS = [[0, 0, 2, 3], [1, 0, 3, 2]]


def write_config(path, **overrides):
    fields = {
        "scheme": "4 2",
        "channel": "awgn",
        "snr_br_db": "7",
        "snr_ar": "5 10",
        "symbols": "2000",
        "seed": "3",
    }
    fields.update(overrides)
    lines = [f"{k} = {v}" for k, v in fields.items() if v is not None]
    path.write_text("\n".join(lines) + "\n# trailing comment\n")
    return str(path)


def test_sfs_csv(tmp_path, capsys):
    out = tmp_path / "sfs.csv"
    assert main(["sfs", "4", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "gamma,theta,re,im,n1,n2,l,brute_force_match"
    assert len(lines) == 1 + 9
    origin = [l for l in lines[1:] if l.startswith("0,0,0,0")]
    assert origin == ["0,0,0,0,,,,true"]
    assert all(l.endswith("true") for l in lines[1:])
    assert "wrote 9 singular fade states" in capsys.readouterr().out


def test_sfs_stdout_and_scheme_flag(capsys):
    assert main(["sfs", "--scheme", "4", "2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("gamma,theta,re,im")
    assert "wrote" not in out


def test_scheme_argument_validation(capsys):
    assert main(["sfs"]) == 2
    assert main(["sfs", "4", "2", "--scheme", "4", "2"]) == 2
    assert main(["sfs", "6", "2"]) == 2
    err = capsys.readouterr().err
    assert "error:" in err


def test_maps_json(tmp_path):
    out = tmp_path / "maps.json"
    assert main(["maps", "4", "2", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["scheme"] == [4, 2]
    assert doc["coverage_complete"] is True
    assert len(doc["maps"]) == 3
    for report in doc["maps"]:
        assert report["exclusive_law"] is True
        assert report["label_count"] == 4
        assert report["broadcast_length"] == 2
        assert len(report["removes"]) > 0
        assert len(report["cells"]) == 2 and len(report["cells"][0]) == 4


def test_maps_check_roundtrip(tmp_path, capsys):
    out = tmp_path / "maps.json"
    main(["maps", "8", "2", "--out", str(out)])
    capsys.readouterr()
    assert main(["maps", "8", "2", "--check", str(out)]) == 0
    report = capsys.readouterr().out
    assert "map 0: ok" in report and "FAIL" not in report


def test_maps_check_single_and_bad(tmp_path, capsys):
    good = tmp_path / "one.json"
    good.write_text(json.dumps({"cells": GOOD_CELLS}))
    assert main(["maps", "4", "2", "--check", str(good)]) == 0

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"maps": [{"cells": GOOD_CELLS}, {"cells": BAD_CELLS}]}))
    capsys.readouterr()
    assert main(["maps", "4", "2", "--check", str(bad)]) == 1
    report = capsys.readouterr().out
    assert "map 0: ok" in report and "map 1: FAIL" in report


def test_maps_check_scheme_mismatch(tmp_path, capsys):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"scheme": [8, 2], "maps": [{"cells": GOOD_CELLS}]}))
    assert main(["maps", "4", "2", "--check", str(f)]) == 1
    assert "scheme mismatch" in capsys.readouterr().err


def test_maps_check_unreadable(tmp_path):
    assert main(["maps", "4", "2", "--check", str(tmp_path / "nope.json")]) == 2


def test_regions_raster_and_boundaries(tmp_path, capsys):
    out = tmp_path / "reg.csv"
    rc = main(["regions", "4", "2", "--out", str(out),
               "--grid", "-1.6", "1.6", "-1.6", "1.6", "40"])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,y,label"
    assert len(lines) == 1 + 40 * 40
    labels = {l.split(",", 2)[2] for l in lines[1:]}
    assert "EXT" in labels and "INT" in labels
    assert any(l.startswith("SFS:") for l in labels)

    bdoc = json.loads((tmp_path / "reg.boundaries.json").read_text())
    assert bdoc["scheme"] == [4, 2]
    kinds = {c["kind"] for c in bdoc["curves"]}
    assert kinds == {"circle", "line"}
    for c in bdoc["curves"]:
        if c["kind"] == "circle":
            assert c["radius"] > 0
        else:
            assert abs(c["a"] ** 2 + c["b"] ** 2 - 1) < 1e-12
    assert "0 mismatches" in capsys.readouterr().out


def test_regions_single_cell(tmp_path):
    out = tmp_path / "one.csv"
    rc = main(["regions", "4", "2", "--out", str(out),
               "--grid", "0.6", "0.8", "-0.1", "0.1", "1"])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "0.7,0,SFS:1,1,2"


def test_regions_invalid_grid(tmp_path, capsys):
    rc = main(["regions", "4", "2", "--out", str(tmp_path / "r.csv"),
               "--grid", "1.6", "-1.6", "-1.6", "1.6", "10"])
    assert rc == 2
    assert "invalid grid" in capsys.readouterr().err


def test_verify_passes(capsys):
    assert main(["verify", "4", "2"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 4 and "[FAIL]" not in out


def test_verify_rejects_bad_scheme():
    assert main(["verify", "2", "4"]) == 2


def test_simulate_sweep_csv(tmp_path, capsys):
    cfg = write_config(tmp_path / "sim.cfg")
    out = tmp_path / "sweep.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "snr_ar_db,rer,ber_ab,ber_ba,ber_avg,symbols"
    assert len(lines) == 3
    assert lines[1].startswith("5,") and lines[2].startswith("10,")
    assert all(l.endswith(",2000") for l in lines[1:])
    assert "simulated 4000 symbols over 2 points" in capsys.readouterr().out


def test_simulate_seed_override_deterministic(tmp_path):
    cfg = write_config(tmp_path / "sim.cfg", snr_ar="8")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "--config", cfg, "--out", str(out1), "--seed", "7"])
    main(["simulate", "--config", cfg, "--out", str(out2), "--seed", "7"])
    assert out1.read_text() == out2.read_text()
    out3 = tmp_path / "c.csv"
    main(["simulate", "--config", cfg, "--out", str(out3), "--seed", "8"])
    assert out3.read_text() != out1.read_text()


def test_simulate_maps_used_override(tmp_path):
    cfg = write_config(tmp_path / "sim.cfg", snr_ar="7", snr_br_db="7",
                       symbols="20000")
    full, one = tmp_path / "full.csv", tmp_path / "one.csv"
    assert main(["simulate", "--config", cfg, "--out", str(full)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(one),
                 "--maps-used", "1"]) == 0
    rer_full = float(full.read_text().splitlines()[1].split(",")[1])
    rer_one = float(one.read_text().splitlines()[1].split(",")[1])
    assert rer_one > rer_full
    assert main(["simulate", "--config", cfg, "--maps-used", "9",
                 "--out", str(tmp_path / "x.csv")]) == 2


def test_simulate_config_errors(tmp_path, capsys):
    bad = write_config(tmp_path / "bad.cfg", symbols="0")
    assert main(["simulate", "--config", bad, "--out",
                 str(tmp_path / "o.csv")]) == 2

    unk = write_config(tmp_path / "unk.cfg", wibble="3")
    assert main(["simulate", "--config", unk, "--out",
                 str(tmp_path / "o.csv")]) == 2
    assert "unknown config fields: wibble" in capsys.readouterr().err

    assert main(["simulate", "--config", str(tmp_path / "missing.cfg"),
                 "--out", str(tmp_path / "o.csv")]) == 2


def test_load_sim_config_defaults(tmp_path):
    p = tmp_path / "min.cfg"
    p.write_text("scheme = 8 2\n")
    config, snr_ar = load_sim_config(str(p))
    assert config.scheme.m1 == 8
    assert config.channel.kind == "awgn_random_phase"
    assert config.channel.snr_br_db == 7.0
    assert snr_ar == [0, 5, 10, 15, 20, 25, 30]
    assert config.symbols == 100_000

    p.write_text("scheme = 4 2\nchannel = rayleigh\n")
    config, _ = load_sim_config(str(p))
    assert config.channel.snr_br_db == 25.0


def test_load_sim_config_rejects_bad_lines(tmp_path):
    from hepnc.cli import CliError

    p = tmp_path / "bad.cfg"
    p.write_text("scheme 4 2\n")
    with pytest.raises(CliError):
        load_sim_config(str(p))
    p.write_text("scheme = 4 2\nsnr_ar = five\n")
    with pytest.raises(CliError):
        load_sim_config(str(p))
