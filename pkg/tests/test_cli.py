import json
import subprocess
import sys

import numpy as np
import pytest

from curverecon import io as cio
from curverecon.cli import main
from curverecon.mesh import save_mesh
from curverecon.metrics import RigidMotionSample, quat_from_axis_angle
from curverecon.shapes import icosphere
from fixtures import latitude_samples, torus_fixture


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    m = icosphere(3)
    save_mesh(m, d / "sphere.off")
    loop = latitude_samples(m, 0.3, 10)
    perm = np.random.default_rng(3).permutation(10)
    cio.write_indices(d / "s.txt", loop[perm])
    two = np.r_[latitude_samples(m, 0.6, 10), latitude_samples(m, -0.6, 10)]
    cio.write_indices(d / "two.txt", two)
    np.savetxt(d / "z.txt", m.vertices[:, 2])
    t = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    np.savetxt(d / "dense.txt", np.c_[np.cos(t), np.sin(t)])
    cio.write_indices(d / "dense_s.txt", [0, 100, 200, 300])
    ang = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    poses = [RigidMotionSample(quat_from_axis_angle([0, 0, 1], a / 8), [np.cos(a), np.sin(a), 0]).as_array() for a in ang]
    np.savetxt(d / "poses.txt", np.array(poses)[::-1])
    return d, perm


def run(*argv):
    return main([str(a) for a in argv])


def test_reconstruct_single_block(files, capsys):
    d, perm = files
    assert run("reconstruct", "--mesh", d / "sphere.off", "--samples", d / "s.txt", "--single") == 0
    out = capsys.readouterr().out
    blocks = out.strip().split("\n\n")
    assert len(blocks) == 1
    order = [int(x) for x in blocks[0].split()]
    truth_pos = np.argsort(perm)  # position in file of loop sample k
    k = [int(np.flatnonzero(truth_pos == i)[0]) for i in order]
    diffs = {(b - a) % 10 for a, b in zip(k, k[1:] + k[:1])}
    assert diffs in ({1}, {9})


def test_reconstruct_multi_two_blocks(files, tmp_path):
    d, _ = files
    out, rep = tmp_path / "t.txt", tmp_path / "r.json"
    assert run("reconstruct-multi", "--mesh", d / "sphere.off", "--samples", d / "two.txt", "--out", out, "--report", rep) == 0
    tours = cio.read_tours(out)
    assert [sorted(t) for t in tours] == [list(range(10)), list(range(10, 20))]
    payload = json.loads(rep.read_text())
    assert payload["schema"] == 1 and payload["mode"] == "multi"
    assert len(payload["tours"]) == 2
    assert payload["edge_counts"]["final"]["sigdv"] >= 20
    assert "timing" not in payload


def test_reconstruct_obj_export(files, tmp_path):
    d, _ = files
    obj = tmp_path / "p.obj"
    assert run("reconstruct", "--mesh", d / "sphere.off", "--samples", d / "s.txt", "--obj", obj, "--out", tmp_path / "t") == 0
    lines = obj.read_text().splitlines()
    assert any(l.startswith("v ") for l in lines) and sum(l.startswith("l ") for l in lines) == 1


def test_reconstruct_points(files, tmp_path):
    d, _ = files
    assert run("reconstruct", "--points", d / "dense.txt", "--out", tmp_path / "t") == 0
    assert cio.read_tours(tmp_path / "t") == [list(range(400))]


def test_motion(files, tmp_path):
    d, _ = files
    assert run("reconstruct-motion", "--poses", d / "poses.txt", "--out", tmp_path / "t", "--report", tmp_path / "r") == 0
    assert cio.read_tours(tmp_path / "t") == [list(range(8))]
    assert json.loads((tmp_path / "r").read_text())["weights"] == {"w_rot": 1.0, "w_tr": 1.0}


def test_check_sampling_planar(files, capsys):
    d, _ = files
    assert run("check-sampling", "--curve", d / "dense.txt", "--samples", d / "dense_s.txt", "--rho", 0.9, "--u", 1.9) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdicts"] == {"rho_ok": True, "u_ok": True}
    assert any("injectivity" in w for w in payload["warnings"])


def test_check_sampling_mesh(tmp_path, capsys):
    fx = torus_fixture()
    save_mesh(fx.dense.mesh, tmp_path / "torus.off")
    cio.write_indices(tmp_path / "curve.txt", fx.dense.points)
    cio.write_indices(tmp_path / "s.txt", fx.dense.points[::8])
    argv = ["check-sampling", "--mesh", tmp_path / "torus.off", "--curve", tmp_path / "curve.txt",
            "--samples", tmp_path / "s.txt", "--rho", 0.9, "--u", 1.9]
    assert run(*argv, "--injectivity-bound", fx.injectivity_bound) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdicts"] == {"rho_ok": True, "u_ok": True}
    assert "medial axis is empty" in payload["warnings"]
    assert payload["injectivity_bound"] == pytest.approx(fx.injectivity_bound)
    # empty medial axis and no bound: feature size undefined
    assert run(*argv) == 3


def test_sample_command(files, tmp_path):
    d, _ = files
    t = np.linspace(0, 2 * np.pi, 200, endpoint=False)
    np.savetxt(tmp_path / "c.txt", np.c_[np.cos(t), np.sin(t)])
    rep = tmp_path / "r.json"
    assert run("sample", "--curve", tmp_path / "c.txt", "--rho", 0.9, "--u", 1.9, "--out", tmp_path / "s", "--report", rep) == 0
    payload = json.loads(rep.read_text())
    assert payload["verdicts"]["rho_ok"] and payload["verdicts"]["u_ok"]
    assert len(cio.read_indices(tmp_path / "s")) == payload["n_samples"]


def test_isoline(files, tmp_path):
    d, _ = files
    assert run("isoline", "--mesh", d / "sphere.off", "--field", d / "z.txt", "--value", 0, "--tol", 0.05, "--out", tmp_path / "i") == 0
    z = np.loadtxt(d / "z.txt")
    assert cio.read_indices(tmp_path / "i").tolist() == np.flatnonzero(np.abs(z) <= 0.05).tolist()


def test_baseline_json(files, tmp_path):
    d, _ = files
    rep = tmp_path / "b.json"
    assert run("baseline", "--points", d / "dense.txt", "--report", rep, "--out", tmp_path / "t") == 0
    payload = json.loads(rep.read_text())
    assert payload["mst_is_chain"] is True and payload["branching_vertices"] == []
    star = tmp_path / "star.txt"
    np.savetxt(star, [[0, 0], [1, 0], [-0.5, 0.9], [-0.5, -0.9]])
    assert run("baseline", "--points", star, "--report", rep, "--out", tmp_path / "t") == 0
    payload = json.loads(rep.read_text())
    assert payload["mst_is_chain"] is False and payload["branching_vertices"] == [0]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["reconstruct"],
        ["reconstruct", "--mesh", "x.off", "--points", "y.txt"],
        ["sample", "--curve", "c.txt", "--rho", "-1", "--u", "1.5"],
        ["sample", "--curve", "c.txt", "--rho", "0.9", "--u", "0.5"],
        ["no-such-command"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    assert main(argv) == 1


def test_input_errors_exit_2(files, tmp_path):
    d, _ = files
    assert run("reconstruct", "--mesh", tmp_path / "missing.off", "--samples", d / "s.txt") == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("1\nabc\n")
    assert run("reconstruct", "--mesh", d / "sphere.off", "--samples", bad) == 2
    cio.write_indices(tmp_path / "two.txt", [0, 1])
    assert run("reconstruct", "--mesh", d / "sphere.off", "--samples", tmp_path / "two.txt") == 2
    assert run("reconstruct", "--mesh", d / "sphere.off") == 2


def test_reconstruction_failure_exit_3(tmp_path):
    np.savetxt(tmp_path / "c.txt", np.c_[np.cos(np.arange(400) * 2 * np.pi / 400), np.sin(np.arange(400) * 2 * np.pi / 400)])
    assert run("sample", "--curve", tmp_path / "c.txt", "--rho", 0.9, "--u", 1.9, "--out", tmp_path / "s") == 0
    # alternating spacing: only neighbours are admissible at tiny rho and no gap ratio is below 1.01
    t = np.cumsum(np.tile([1.0, 1.3], 200))
    t = t / t[-1] * 2 * np.pi
    np.savetxt(tmp_path / "d.txt", np.c_[np.cos(t), np.sin(t)])
    assert run("sample", "--curve", tmp_path / "d.txt", "--rho", 0.001, "--u", 1.01, "--out", tmp_path / "s") == 3


def test_tour_file_roundtrip(tmp_path):
    tours = [[3, 1, 4, 0, 2], [7, 5, 6]]
    cio.write_tours(tmp_path / "t", tours, chains=[[8, 9]])
    assert cio.read_tours(tmp_path / "t") == tours
    text = (tmp_path / "t").read_text()
    assert "# chains" in text


def test_determinism(files, tmp_path):
    d, _ = files
    outs = []
    for k in range(2):
        t, r = tmp_path / f"t{k}", tmp_path / f"r{k}"
        assert run("reconstruct", "--mesh", d / "sphere.off", "--samples", d / "two.txt", "--single", "--seed", 7, "--out", t, "--report", r) == 0
        outs.append((t.read_bytes(), r.read_bytes()))
    assert outs[0] == outs[1]


def test_module_entry_point(files, tmp_path):
    d, _ = files
    proc = subprocess.run(
        [sys.executable, "-m", "curverecon.cli", "reconstruct", "--points", str(d / "dense.txt")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.split()[:3] == ["0", "1", "2"]
