"""Tests for the command line interface."""

import json

import pytest
from typer.testing import CliRunner

from sweepchi.cli import app
from sweepchi.services.curves import BoundaryCurve
from sweepchi.services.domain import Domain, Scene, dump_scene
from sweepchi.services.surfaces import Plane


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


class TestCatalog:
    """Tests for the catalog command."""

    def test_lists_scenes(self, runner):
        """Test every built-in scene is listed with its reference value."""
        result = runner.invoke(app, ["catalog"])
        assert result.exit_code == 0
        lines = result.stdout.strip().splitlines()
        assert len(lines) >= 8
        assert any(line.startswith("torus ") and "chi=0" in line for line in lines)


class TestChi:
    """Tests for the chi command."""

    def test_torus_json(self, runner):
        """Test the torus swept across its axis as JSON."""
        result = runner.invoke(
            app, ["chi", "--scene", "torus", "--direction", "1,0,0", "--format", "json"]
        )
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["chi"] == 0
        assert [e["kind"] for e in data["events"]] == ["interior"] * 4
        assert data["genericity"]["retries"] == 0

    def test_disk_human(self, runner):
        """Test the human summary of the unit disk."""
        result = runner.invoke(app, ["chi", "--scene", "disk", "--direction", "1,0"])
        assert result.exit_code == 0, result.output
        assert "chi = 1" in result.output
        assert "2 events" in result.output

    def test_csv_columns(self, runner):
        """Test the CSV header and one row per event."""
        result = runner.invoke(
            app, ["chi", "--scene", "annulus", "--direction", "0.6,0.8", "--format", "csv"]
        )
        assert result.exit_code == 0, result.output
        lines = result.stdout.strip().splitlines()
        assert lines[0].startswith("lambda,kind,s,t,curve,tau,quantity,sign")
        assert len(lines) == 5

    def test_planar_method(self, runner):
        """Test the planar count is selectable."""
        result = runner.invoke(
            app, ["chi", "--scene", "disk-2-holes", "--method", "planar", "--seed", "5"]
        )
        assert result.exit_code == 0, result.output
        assert "chi = -1 (planar)" in result.output

    def test_zero_direction(self, runner):
        """Test a zero direction is a configuration error."""
        result = runner.invoke(app, ["chi", "--scene", "disk", "--direction", "0,0"])
        assert result.exit_code == 1
        assert "direction must be non-zero" in result.output

    def test_malformed_direction(self, runner):
        """Test a direction that is not a list of numbers."""
        result = runner.invoke(app, ["chi", "--scene", "disk", "--direction", "up"])
        assert result.exit_code == 1
        assert "invalid direction" in result.output

    def test_missing_scene(self, runner, tmp_path):
        """Test an unknown scene reference."""
        result = runner.invoke(app, ["chi", "--scene", str(tmp_path / "nope.json")])
        assert result.exit_code == 1
        assert "no scene file" in result.output

    def test_empty_scene_file(self, runner, tmp_path):
        """Test an empty scene file fails to parse."""
        path = tmp_path / "empty.json"
        path.write_text("")
        result = runner.invoke(app, ["chi", "--scene", str(path)])
        assert result.exit_code == 1

    def test_flipped_scene_file(self, runner, tmp_path):
        """Test a scene whose boundary runs the wrong way."""
        domain = Domain(
            Plane(),
            (BoundaryCurve.circle((0.0, 0.0), 1.0, clockwise=True),),
            (0.0, 0.0),
            1,
        )
        path = dump_scene(Scene("flipped", domain), tmp_path / "flipped.json")
        result = runner.invoke(app, ["chi", "--scene", str(path)])
        assert result.exit_code == 1
        assert "orientation check failed" in result.output

    def test_scene_file(self, runner, scene, tmp_path):
        """Test a catalog scene written to disk gives the same answer."""
        path = dump_scene(scene("annulus"), tmp_path / "annulus.json")
        result = runner.invoke(app, ["chi", "--scene", str(path), "--format", "json"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["chi"] == 0

    def test_exhausted(self, runner):
        """Test the axis of the torus without retries."""
        result = runner.invoke(
            app, ["chi", "--scene", "torus", "--direction", "0,0,1", "--retries", "0"]
        )
        assert result.exit_code == 2
        assert "no generic direction" in result.output

    def test_unsupported_method(self, runner):
        """Test a spherical count on the plane."""
        result = runner.invoke(app, ["chi", "--scene", "disk", "--method", "parallels"])
        assert result.exit_code == 1

    def test_deterministic(self, runner):
        """Test the same seed gives byte-identical output."""
        args = ["chi", "--scene", "torus-minus-disk", "--seed", "11", "--format", "csv"]
        first = runner.invoke(app, args)
        second = runner.invoke(app, args)
        assert first.exit_code == 0, first.output
        assert first.output == second.output


class TestCensus:
    """Tests for the census command."""

    def test_annulus_footer(self, runner):
        """Test the tally footer of the annulus."""
        result = runner.invoke(app, ["census", "--scene", "annulus", "--direction", "0.6,0.8"])
        assert result.exit_code == 0, result.output
        lines = result.stdout.strip().splitlines()
        assert lines[-1] == "# i2=0 b2=0 i1=2 b1=2 chi=0"

    def test_running_sum(self, runner):
        """Test the last running contribution equals chi."""
        result = runner.invoke(
            app,
            ["census", "--scene", "torus", "--direction", "1,0,0", "--format", "json"],
        )
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert (data["i2"], data["b2"]) == (2, 2)
        assert data["events"][-1]["running_chi"] == pytest.approx(0.0)


class TestValidate:
    """Tests for the validate command."""

    def test_disk(self, runner):
        """Test validation of the disk over three directions."""
        result = runner.invoke(app, ["validate", "--scene", "disk", "-n", "3"])
        assert result.exit_code == 0, result.output
        assert "all agree" in result.output

    def test_workers_do_not_change_report(self, runner):
        """Test the report is the same with parallel directions."""
        args = ["validate", "--scene", "annulus", "-n", "3", "--format", "json"]
        serial = runner.invoke(app, args)
        parallel = runner.invoke(app, [*args, "--workers", "3"])
        assert serial.exit_code == 0, serial.output
        assert json.loads(serial.output) == json.loads(parallel.output)

    def test_csv(self, runner):
        """Test CSV output has a header, one row per direction and an oracle footer."""
        result = runner.invoke(app, ["validate", "--scene", "disk", "-n", "3", "--format", "csv"])
        assert result.exit_code == 0, result.output
        lines = result.stdout.strip().splitlines()
        assert lines[0].startswith("index,ux,uy,uz,sweep,census,")
        assert lines[-1].startswith("# reference 1, cell complex 1")
        rows = [line.split(",") for line in lines[1:-1]]
        assert [row[0] for row in rows] == ["0", "1", "2"]
        assert all(row[4] == "1" and row[-2] == "true" for row in rows)

    def test_requires_a_direction(self, runner):
        """Test n must be positive."""
        result = runner.invoke(app, ["validate", "--scene", "disk", "-n", "0"])
        assert result.exit_code != 0
