import os
import subprocess

import pytest

import qdopt

GT = """
algorithm = gt
graph = random:20,0.3,3
problem = paper-suite
levels = 10
s0 = 4.0
mu = 0.999
beta = 0.05
delta = 0.05
iterations = 100
"""


def test_quantizer_and_bits():
    assert qdopt.quantize(3, 0.4) == 0
    assert qdopt.quantize(3, 0.6) == 1
    assert qdopt.quantize(3, -0.6) == -1
    assert qdopt.quantize(2, 10.0) == 2
    assert [qdopt.bits_for_level(k) for k in (1, 10, 100)] == [1, 5, 8]


def test_codec_stays_synchronized():
    stream = [[0.6, -1.0], [1.2, 0.3], [-2.0, 4.0]]
    for internal, estimate in qdopt.codec_roundtrip(3, 1.0, 0.5, stream):
        assert internal == estimate


def test_graph_and_spectrum():
    g = qdopt.build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    ev = qdopt.laplacian_eigenvalues(g)
    assert ev == pytest.approx([0.0, 1.0, 3.0], abs=1e-12)
    with pytest.raises(qdopt.Error, match="DisconnectedGraph"):
        qdopt.build_graph(3, [(0, 1, 1.0)])


def test_certificates():
    g = qdopt.build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    bad = qdopt.gt_certificate(g, 1.0, 0.5, 1.0 / 3.0, 1e-5, 0.9999, 1)
    assert bad["feasible"] == 0.0
    assert bad["violations"][0].startswith("beta")
    good = qdopt.gt_certificate(g, 1.0, 0.5, 0.1, 1e-4, 0.999999, 10**9)
    assert good["feasible"] == 1.0


def test_oracle_and_run():
    f_star, x_star = qdopt.oracle("paper-suite", 100)
    assert abs(f_star) < 1e-12
    assert abs(x_star[0]) < 1e-6
    out = qdopt.run(GT)
    assert len(out["records"]) == 100
    assert out["csv"].splitlines()[0].startswith("k,lambda_norm,")
    assert out["records"][-1]["lambda_norm"] < out["records"][0]["lambda_norm"]
    assert out["saturation_events"] == 0
    with pytest.raises(qdopt.Error, match="ConfigError"):
        qdopt.run("algorithm = gt\n")


@pytest.mark.skipif("QDOPT_CLI" not in os.environ, reason="command-line tool not built")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["QDOPT_CLI"]
    cfg = tmp_path / "table2.cfg"
    cfg.write_text(GT.replace("random:20,0.3,3", "random:100,0.05,42").replace("0.05\ndelta = 0.05",
                                                                                "0.01\ndelta = 0.01"))
    cert = subprocess.run([cli, "certify", "--algorithm", "gt", "--config", str(cfg)], capture_output=True, text=True)
    assert cert.returncode == 2
    assert "violation = " in cert.stdout
    bad = tmp_path / "bad.cfg"
    bad.write_text("algorithm = pi\nbeta = 1\ndelta = 1\n")
    assert subprocess.run([cli, "run", "--config", str(bad)], capture_output=True).returncode == 1
    strict = tmp_path / "strict.cfg"
    strict.write_text(GT.replace("s0 = 4.0", "s0 = 0.001") + "strict_saturation = true\n")
    assert subprocess.run([cli, "run", "--config", str(strict)], capture_output=True).returncode == 3
    diverge = tmp_path / "diverge.cfg"
    diverge.write_text(GT.replace("0.05\ndelta = 0.05", "0.05\ndelta = 5").replace("iterations = 100",
                                                                                  "iterations = 5000"))
    assert subprocess.run([cli, "run", "--config", str(diverge)], capture_output=True).returncode == 4
    out = tmp_path / "run.csv"
    ok = subprocess.run([cli, "run", "--config", str(cfg), "--out", str(out)], capture_output=True, text=True)
    assert ok.returncode == 0
    assert out.read_text().count("\n") == 101
    js = subprocess.run([cli, "certify", "--algorithm", "gt", "--config", str(cfg), "--json"], capture_output=True,
                        text=True)
    assert js.returncode == 2
    import json

    assert json.loads(js.stdout)["violations"]
