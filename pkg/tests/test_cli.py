import csv
import subprocess
import sys

import pytest

from meshfree.cli import main


def run(argv):
    try:
        return main([str(a) for a in argv])
    except SystemExit as exc:
        return exc.code


def files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


@pytest.mark.parametrize("sub", ["converge", "case-study", "gen-points"])
def test_help_lists_flags_with_defaults(sub, capsys):
    assert run([sub, "--help"]) == 0
    out = capsys.readouterr().out
    assert "--seed" in out and "--out" in out and "--threads" in out
    assert "default: 42" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "meshfree", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "converge" in proc.stdout and "case-study" in proc.stdout and "gen-points" in proc.stdout


def test_unknown_kernel_exits_2(capsys, tmp_path):
    assert run(["converge", "--kernel", "cubic", "--out", tmp_path]) == 2
    err = capsys.readouterr().err
    for name in ("gaussian", "multiquadric", "inverse-multiquadric", "thin-plate-spline"):
        assert name in err
    assert not any(tmp_path.iterdir())


def test_full_conflicts_with_explicit_sizes(capsys, tmp_path):
    assert run(["converge", "--full", "--n-end", "600", "--out", tmp_path]) == 2
    assert "--n-end" in capsys.readouterr().err


def test_hour_zero_exits_2(capsys, tmp_path):
    assert run(["case-study", "--synthesize", "--hour", "0", "--out", tmp_path]) == 2
    assert "--hour" in capsys.readouterr().err


def test_full_sweep_gravity_only(tmp_path):
    assert run(["converge", "--full", "--methods", "gravity", "--out", tmp_path, "--threads", 1]) == 0
    rows = list(csv.DictReader((tmp_path / "convergence_seed42.csv").open()))
    assert [int(r["n_points"]) for r in rows] == list(range(300, 15001, 300))
    assert all(r["rms_rbf"] == "" for r in rows)


def test_desk_converge(tmp_path, capsys):
    argv = ["converge", "--n-start", 300, "--n-end", 3000, "--step", 300, "--seed", 42,
            "--kernel", "multiquadric", "--epsilon", "1.0", "--out", tmp_path]
    assert run(argv) == 0
    out = capsys.readouterr().out
    assert "rbf: final RMS" in out and "gravity: final RMS" in out
    rows = list(csv.DictReader((tmp_path / "convergence_seed42.csv").open()))
    assert len(rows) == 10
    assert all(float(r["rms_rbf"]) < float(r["rms_gravity"]) for r in rows)


def test_case_study_files_and_rerun(tmp_path, capsys):
    argv = ["case-study", "--synthesize", "--hours", "1-6", "--methods", "rbf,gravity",
            "--points", 3881, "--seed", 1]
    assert run(argv + ["--out", tmp_path / "a"]) == 0
    out = capsys.readouterr().out
    assert "49 stations" in out
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(f"{m}_hour{h}.{ext}" for m in ("rbf", "gravity")
                           for h in range(1, 7) for ext in ("csv", "svg"))
    assert run(argv + ["--out", tmp_path / "b", "--threads", 1]) == 0
    assert files(tmp_path / "a") == files(tmp_path / "b")


def test_case_study_from_station_files(tmp_path):
    (tmp_path / "s.csv").write_text("station_id,lon,lat\nA,-87,35.5\nB,-85,36\nC,-86,35\nD,-84.5,35.2\n")
    (tmp_path / "r.csv").write_text("station_id,hour_index,temperature_f\n"
                                    "A,1,50\nB,1,55\nC,1,53\nD,1,49\n")
    rc = run(["case-study", "--stations", tmp_path / "s.csv", "--readings", tmp_path / "r.csv",
              "--points", 300, "--out", tmp_path / "o"])
    assert rc == 0
    assert (tmp_path / "o" / "gravity_hour1.svg").exists()
    assert run(["case-study", "--stations", tmp_path / "s.csv", "--readings", tmp_path / "r.csv",
                "--hour", 2, "--out", tmp_path / "o"]) == 2


def test_gen_points(tmp_path):
    assert run(["gen-points", "--count", 3881, "--seed", 1, "--out", tmp_path / "a"]) == 0
    rows = list(csv.DictReader((tmp_path / "a" / "points.csv").open()))
    kinds = [r["kind"] for r in rows]
    assert kinds.count("interior") == 3881 and kinds.count("boundary") > 0
    assert run(["gen-points", "--count", 3881, "--seed", 1, "--out", tmp_path / "b"]) == 0
    assert files(tmp_path / "a") == files(tmp_path / "b")


def test_gen_points_degenerate_polygon(tmp_path):
    poly = tmp_path / "line.csv"
    poly.write_text("lon,lat\n0,0\n1,1\n")
    assert run(["gen-points", "--polygon", poly, "--out", tmp_path / "o"]) == 2
    assert not (tmp_path / "o").exists()


def test_missing_polygon_file_exits_1(tmp_path):
    assert run(["gen-points", "--polygon", tmp_path / "nope.csv", "--out", tmp_path]) == 1
