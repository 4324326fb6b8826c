import csv
import io
import json
import math
import subprocess
import sys

import pytest

from cryolink.architectures import BUILTIN_NAMES
from cryolink.cli import EXIT_INFEASIBLE, EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION, fmt, main
from cryolink.config import builtin_scenario, dump_scenario, loads_scenario
from cryolink.errors import ValidationError
from cryolink.units import format_quantity, parse_quantity


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(body))))


# --- units ---------------------------------------------------------------


@pytest.mark.parametrize(
    "text,dim,value",
    [
        ("1.5 W", "power", 1.5),
        ("19 uW", "power", 19e-6),
        ("200 µW", "power", 200e-6),
        ("-70 dBm", "power", 1e-10),
        ("0.082 K", "temperature", 0.082),
        ("6 GHz", "frequency", 6e9),
        ("20 dB", "db", 20.0),
        ("-150 dB/Hz", "db_per_hz", -150.0),
        ("2 pA/rtHz", "current_asd", 2e-12),
        ("1.4 uA", "current", 1.4e-6),
        ("50 ohm", "resistance", 50.0),
        ("0.25 mm^2", "area", 0.25e-6),
        ("inf W", "power", math.inf),
    ],
)
def test_parse_quantity(text, dim, value):
    assert parse_quantity(text, dim) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("bad,dim", [(1.5, "power"), ("1.5", "power"), ("1.5 K", "power"), ("fast GHz", "frequency")])
def test_parse_quantity_rejects(bad, dim):
    with pytest.raises(ValidationError) as err:
        parse_quantity(bad, dim, "fridge.stages[0].cooling_power")
    assert err.value.path == "fridge.stages[0].cooling_power"


def test_format_quantity_round_trips():
    for v in (1.9e-05, 0.082, 1e-10, 6e9, math.inf):
        assert parse_quantity(format_quantity(v, "power"), "power") == v


# --- scenario files --------------------------------------------------------


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_dump_round_trip(name):
    text = dump_scenario(builtin_scenario(name))
    cfg = loads_scenario(text)
    assert dump_scenario(cfg) == text
    assert cfg.architectures[0] == builtin_scenario(name).architectures[0]


def test_unknown_key_reports_path():
    text = dump_scenario(builtin_scenario("proposed")).replace('kind = "fiber"', 'kind = "fiber"\ncolour = "blue"', 1)
    with pytest.raises(ValidationError) as err:
        loads_scenario(text)
    assert err.value.path == "architectures[0].links[0].colour"


def test_bare_number_rejected_with_path():
    with pytest.raises(ValidationError) as err:
        loads_scenario('[sweep]\nphotocurrent_min = 1e-7\n')
    assert err.value.path == "sweep.photocurrent_min"


def test_bad_stage_reference_rejected():
    text = dump_scenario(builtin_scenario("proposed")).replace('cold = "4K"', 'cold = "5K"', 1)
    with pytest.raises(ValidationError) as err:
        loads_scenario(text)
    assert err.value.path == "architectures.proposed.links.fiber"


def test_bad_enum_and_ranges():
    with pytest.raises(ValidationError):
        loads_scenario('[optimize.attenuation]\nobjective = "cheapest"\n')
    with pytest.raises(ValidationError):
        loads_scenario("duty = 1.5\n")
    with pytest.raises(ValidationError):
        loads_scenario('[optimize.attenuation]\ngrid_step = "0.1 dB"\n')


def test_materials_file_relative_to_config(tmp_path):
    (tmp_path / "mats.csv").write_text(
        "material,T_kelvin,k_W_per_mK\nfoam,1,0.001\nfoam,10,0.01\nfoam,100,0.1\nfoam,300,0.3\n"
    )
    text = '[materials]\nfile = "mats.csv"\n'
    cfg = loads_scenario(text, tmp_path)
    assert "foam" in cfg.materials and "silica" in cfg.materials
    with pytest.raises(ValidationError):
        loads_scenario('[materials]\nfile = "missing.csv"\n', tmp_path)


def test_digest_tracks_content():
    a = builtin_scenario("proposed")
    assert a.digest() == builtin_scenario("proposed").digest()
    assert a.digest() != builtin_scenario("conventional").digest()


# --- CLI -------------------------------------------------------------------


def test_fmt_is_six_significant_digits():
    assert fmt(1.0 / 3.0) == "3.33333e-01"
    assert fmt(math.inf) == "inf"
    assert fmt(7) == "7"


def test_report_proposed(capsys):
    code, out, _ = run(capsys, "report", "proposed")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert rows[0] == ["stage", "temperature_K", "cooling_W", "passive_W", "active_W", "total_W", "headroom_ratio"]
    four = next(r for r in rows if r[0] == "4K")
    assert float(four[3]) == pytest.approx(5.6e-6, rel=1e-5)
    assert any(line.startswith("# config_sha256 ") for line in out.splitlines())


def test_report_of_empty_architecture(tmp_path, capsys):
    path = tmp_path / "empty.toml"
    path.write_text('[[architectures]]\nname = "empty"\n')
    code, out, _ = run(capsys, "--config", str(path), "report")
    assert code == EXIT_OK
    for r in csv_rows(out)[1:]:
        assert r[3:6] == ["0.00000e+00"] * 3
        assert r[6] == "inf"


def test_report_of_dumped_builtin_is_byte_identical(tmp_path, capsys):
    _, dumped, _ = run(capsys, "dump-builtin", "proposed")
    path = tmp_path / "proposed.toml"
    path.write_text(dumped)
    _, direct, _ = run(capsys, "report", "proposed")
    _, via_file, _ = run(capsys, "report", "--config", str(path))
    assert direct == via_file


def test_sweep_row_count(capsys):
    code, out, _ = run(capsys, "sweep")
    rows = csv_rows(out)
    cfg = builtin_scenario("proposed")
    assert code == EXIT_OK
    assert len(rows) - 1 == cfg.sweep.points * len(cfg.sweep.nf_values)
    assert "# target_asd_A_per_sqrtHz 2.00000e-12" in out


def test_optimize_conventional(capsys, tmp_path):
    code, out, _ = run(capsys, "optimize", "--what", "attenuation")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert [r[0] for r in rows[1:]] == ["4K", "CP", "MXC"]
    assert all(abs(float(r[2]) - 20) <= 5 for r in rows[1:])


def test_optimize_infeasible_exit_code(tmp_path, capsys):
    path = tmp_path / "tight.toml"
    path.write_text("[target]\nmax_occupation = 1e-30\n")
    code, _, err = run(capsys, "optimize", "--config", str(path), "--what", "attenuation")
    assert code == EXIT_INFEASIBLE
    assert "MXC" in err


def test_validation_exit_code_names_key(tmp_path, capsys):
    path = tmp_path / "typo.toml"
    path.write_text('[report]\nline = 3\n')
    code, _, err = run(capsys, "validate", "--config", str(path))
    assert code == EXIT_VALIDATION
    assert "report.line" in err


def test_toml_syntax_error_is_validation(tmp_path, capsys):
    path = tmp_path / "broken.toml"
    path.write_text("duty = [\n")
    assert run(capsys, "validate", "--config", str(path))[0] == EXIT_VALIDATION


def test_numeric_range_exit_code(tmp_path, capsys):
    text = dump_scenario(builtin_scenario("proposed")).replace('pd_bandwidth = "10000000000.0 Hz"', 'pd_bandwidth = "1000000000.0 Hz"')
    path = tmp_path / "slow_pd.toml"
    path.write_text(text)
    code, _, err = run(capsys, "sweep", "--config", str(path))
    assert code == EXIT_NUMERIC
    assert "bandwidth" in err


def test_compare_writes_deterministic_files(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    for d in ("a", "b"):
        assert run(capsys, "compare", "--out", str(tmp_path / d))[0] == EXIT_OK
    for name in ("compare_stages.csv", "compare_summary.csv", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["timestamp"] == "1970-01-01T00:00:00Z"
    assert manifest["outputs"] == ["compare_stages.csv", "compare_summary.csv"]
    summary = (tmp_path / "a" / "compare_summary.csv").read_text()
    assert "4K-equivalent" in summary


def test_compare_values_are_finite_or_inf(tmp_path, capsys):
    run(capsys, "compare", "--out", str(tmp_path))
    for name, skip in (("compare_stages.csv", 2), ("compare_summary.csv", 2)):
        for row in csv_rows((tmp_path / name).read_text())[1:]:
            for cell in row[skip:]:
                assert cell == "inf" or math.isfinite(float(cell))


def test_duty_flag_anywhere(capsys):
    _, before, _ = run(capsys, "--duty", "0.5", "compare", "proposed")
    _, after, _ = run(capsys, "compare", "proposed", "--duty", "0.5")
    assert before == after
    assert "# duty 5.00000e-01" in before


def test_table_format(capsys):
    code, out, _ = run(capsys, "compare", "--format", "table")
    assert code == EXIT_OK
    assert out.startswith("== compare_stages.csv")


def test_validate_builtins(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == EXIT_OK and out.startswith("ok ")


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "cryolink.cli", "compare", "deep_photonic"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "deep_photonic,MXC,57," in proc.stdout
