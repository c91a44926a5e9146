import pytest

from afdm_pim.cli import main
from afdm_pim.mapping import load_alphabet

CONFIG_TEXT = """\
[system]
n_subcarriers = 4
n_groups = 2
alphabet_size = 2
constellation_order = 2
constellation_kind = PSK
max_delay = 0
max_doppler = 1
cpp_length = 0

[alphabet]
values = 0.2 0.6

[channel]
paths = 2

[simulation]
snr_db = 0 10
min_bits = 2000
min_errors = 100
seed = 4
include_theory = false
"""


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(CONFIG_TEXT)
    return str(path)


def test_simulate_writes_deterministic_csv(config_path, tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["simulate", config_path, "--out", str(out1)]) == 0
    assert main(["simulate", config_path, "--out", str(out2)]) == 0
    text = out1.read_text()
    assert text == out2.read_text()
    lines = text.splitlines()
    assert lines[0] == "scheme,snr_db,kind,bits,errors,ber,seed"
    assert len(lines) == 3
    assert all(row.endswith(",4") for row in lines[1:])


def test_simulate_seed_flag_overrides(config_path, tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["simulate", config_path, "--seed", "9", "--out", str(out1)]) == 0
    assert main(["simulate", config_path, "--out", str(out2)]) == 0
    assert out1.read_text() != out2.read_text()
    assert out1.read_text().splitlines()[1].endswith(",9")


def test_sim_seed_env_fallback(config_path, tmp_path, monkeypatch):
    out = tmp_path / "env.csv"
    monkeypatch.setenv("SIM_SEED", "31")
    assert main(["simulate", config_path, "--out", str(out)]) == 0
    assert out.read_text().splitlines()[1].endswith(",31")


def test_simulate_stdout(config_path, capsys):
    assert main(["simulate", config_path]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("scheme,snr_db,kind,")


def test_analyze_se(config_path, capsys):
    assert main(["analyze", config_path, "--se"]) == 0
    out = capsys.readouterr().out
    assert "afdm " in out or "afdm  " in out
    assert "afdm_pim" in out and "afdm_im" in out
    # N_c = 2, BPSK: floor(log2(2!))/2 + 1 = 1.5
    assert "1.5 bit/s/Hz" in out


def test_analyze_diversity(config_path, capsys):
    assert main(["analyze", config_path, "--diversity"]) == 0
    out = capsys.readouterr().out
    assert "diversity order mu" in out
    assert "condition 1" in out


def test_analyze_bound(config_path, tmp_path):
    out = tmp_path / "bound.csv"
    assert main(["analyze", config_path, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "scheme,snr_db,kind,bits,errors,ber,seed"
    assert all(",theory," in row for row in lines[1:])


def test_optimize_emits_alphabet_and_log(config_path, tmp_path, capsys):
    out = tmp_path / "alpha.txt"
    log = tmp_path / "conv.csv"
    code = main(
        [
            "optimize", config_path,
            "--pso-params", "particles=12,iterations=8",
            "--out", str(out), "--log", str(log),
        ]
    )
    assert code == 0
    alphabet = load_alphabet(str(out))
    assert len(alphabet) == 2
    log_lines = log.read_text().splitlines()
    assert log_lines[0] == "iteration,best_fitness"
    assert len(log_lines) == 10  # initial evaluation + 8 iterations


def test_optimize_rejects_unknown_pso_key(config_path, capsys):
    assert main(["optimize", config_path, "--pso-params", "swarm=9"]) == 2
    assert "unknown pso parameter" in capsys.readouterr().err


def test_validate_suites(capsys):
    assert main(["validate", "--suite", "orthogonality"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "checks passed" in out


def test_missing_config_is_reported(capsys):
    assert main(["simulate", "/nonexistent/path.cfg"]) == 2
    assert "error:" in capsys.readouterr().err


def test_preset_name_accepted_as_config(tmp_path, monkeypatch):
    # presets run with full published budgets; just verify name resolution
    from afdm_pim.cli import _load_scenario

    sc = _load_scenario("fig8_lo", None)
    assert sc.name == "fig8_lo"
    monkeypatch.setenv("SIM_SEED", "77")
    assert _load_scenario("fig8_lo", None).seed == 77
