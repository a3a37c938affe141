"""Unit tests for grid, synthetic and external-command objectives."""

import json
import math
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

from balance_hpo.exceptions import (
    CommandFailed,
    FormatError,
    InvalidConfig,
    OutOfDomain,
    ParseFailed,
    TimedOut,
    UnknownPreset,
)
from balance_hpo.objectives import (
    ExternalCommandObjective,
    ExternalCommandSpec,
    PerformanceGrid,
    default_space,
    external_eval,
    grid_from_function,
    grid_hull,
    grid_interpolate,
    grid_load,
    grid_save,
    load_landscape,
    make_landscape,
    make_objective,
    ridge_suite,
    round_batch_size,
    synthetic_eval,
)
from balance_hpo.objectives.synthetic import RIDGE_OPTIMUM
from balance_hpo.space import HyperConfig, standard_space

PYTHON = sys.executable


def bilinear_grid() -> PerformanceGrid:
    return PerformanceGrid(
        axes=(np.array([1.0, 4.0]), np.array([1.0, 4.0]), np.array([64.0])),
        scores=np.array([[[0.0], [1.0]], [[1.0], [2.0]]]),
    )


class TestGridInterpolate:
    """Tests for log-space multilinear interpolation."""

    def test_exact_at_nodes(self):
        """Test nodes return their stored score."""
        grid = grid_from_function(
            lambda h: math.log(h.lambda_p_rate) - 0.5 * math.log(h.lambda_e_rate) ** 2,
            axes=([1e-3, 1e-2, 1e-1], [0.5, 1.0, 2.0], [32.0, 64.0]),
        )
        for i, lp in enumerate(grid.axes[0]):
            for j, le in enumerate(grid.axes[1]):
                for k, b in enumerate(grid.axes[2]):
                    assert grid_interpolate(grid, HyperConfig(lp, le, b)) == pytest.approx(grid.scores[i, j, k], abs=1e-12)

    def test_log_midpoint_on_one_axis(self):
        """Test the log-midpoint between scores 0.2 and 0.6 gives 0.4."""
        grid = PerformanceGrid(
            axes=(np.array([1e-3, 1e-1]), np.array([1.0]), np.array([64.0])),
            scores=np.array([[[0.2]], [[0.6]]]),
        )
        assert grid_interpolate(grid, HyperConfig(1e-2, 1.0, 64)) == pytest.approx(0.4)

    def test_bilinear_center(self):
        """Test the log-center of the 2×2×1 grid gives 1.0."""
        assert grid_interpolate(bilinear_grid(), HyperConfig(2, 2, 64)) == pytest.approx(1.0)

    def test_outside_hull(self):
        """Test configurations outside the axes raise OutOfDomain."""
        with pytest.raises(OutOfDomain):
            grid_interpolate(bilinear_grid(), HyperConfig(8, 2, 64))
        with pytest.raises(OutOfDomain):
            grid_interpolate(bilinear_grid(), HyperConfig(2, 2, 32))

    def test_hull(self):
        """Test the hull pins length-1 axes."""
        hull = grid_hull(bilinear_grid())
        assert hull.lambda_p == (1.0, 4.0)
        assert hull.batch_size == (64.0, 64.0)
        assert default_space(bilinear_grid()) == hull

    def test_rejects_unsorted_axes(self):
        """Test axes must be strictly increasing."""
        with pytest.raises(InvalidConfig):
            PerformanceGrid(axes=(np.array([4.0, 1.0]), np.array([1.0]), np.array([1.0])), scores=np.zeros((2, 1, 1)))


class TestGridFiles:
    """Tests for grid_load and grid_save."""

    @pytest.fixture
    def tmpdir(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            yield Path(tmpdir)

    def test_round_trip(self, tmpdir):
        """Test a random 5×5×3 grid survives save and load."""
        rng = np.random.default_rng(5)
        grid = PerformanceGrid(
            axes=(np.geomspace(1e-4, 1.0, 5), np.geomspace(0.1, 10.0, 5), np.array([32.0, 64.0, 128.0])),
            scores=rng.uniform(size=(5, 5, 3)),
            metadata={"metric": "R-mAP", "dataset": "toy"},
        )
        loaded = grid_load(grid_save(grid, tmpdir / "grid.csv"))
        for a, b in zip(loaded.axes, grid.axes):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(loaded.scores, grid.scores)
        assert loaded.metadata == {"metric": "R-mAP", "dataset": "toy"}

    def test_round_trip_keeps_every_bit(self, tmpdir):
        """Test values whose shortest repr needs all 17 digits load exactly."""
        axes = (np.array([0.31622776601683794, 1.0]), np.array([0.1, 0.30000000000000004]), np.array([64.0]))
        scores = np.array([[[0.1 + 0.2], [2 / 3]], [[1 / 7], [np.pi / 10]]])
        loaded = grid_load(grid_save(PerformanceGrid(axes=axes, scores=scores), tmpdir / "grid.csv"))
        assert loaded.axes[0][0] == 0.31622776601683794
        assert loaded.axes[1][1] == 0.30000000000000004
        np.testing.assert_array_equal(loaded.scores, scores)

    def test_unsorted_rows(self, tmpdir):
        """Test rows may appear in any order."""
        path = tmpdir / "grid.csv"
        path.write_text("lambda_p,lambda_e,batch_size,score\n4,4,64,2\n1,1,64,0\n4,1,64,1\n1,4,64,1\n")
        assert grid_load(path)(HyperConfig(2, 2, 64)) == pytest.approx(1.0)

    def test_missing_node(self, tmpdir):
        """Test non-rectangular coverage is rejected."""
        path = tmpdir / "grid.csv"
        path.write_text("lambda_p,lambda_e,batch_size,score\n1,1,64,0\n1,4,64,1\n4,1,64,1\n")
        with pytest.raises(FormatError, match="not rectangular") as excinfo:
            grid_load(path)
        assert "lambda_p=4, lambda_e=4" in str(excinfo.value)
        assert excinfo.value.row == 5

    def test_duplicate_row_number(self, tmpdir):
        """Test duplicates report the file row."""
        path = tmpdir / "grid.csv"
        path.write_text("# metric=AP\nlambda_p,lambda_e,batch_size,score\n1,1,64,0\n1,1,64,0.5\n")
        with pytest.raises(FormatError) as excinfo:
            grid_load(path)
        assert excinfo.value.row == 4

    def test_malformed_row(self, tmpdir):
        """Test a non-numeric field reports its row."""
        path = tmpdir / "grid.csv"
        path.write_text("lambda_p,lambda_e,batch_size,score\n1,1,64,0\n1,abc,64,0\n")
        with pytest.raises(FormatError) as excinfo:
            grid_load(path)
        assert excinfo.value.row == 3

    def test_bad_header(self, tmpdir):
        """Test the header is checked."""
        path = tmpdir / "grid.csv"
        path.write_text("lp,le,b,score\n1,1,64,0\n")
        with pytest.raises(FormatError):
            grid_load(path)


class TestSyntheticLandscape:
    """Tests for analytic landscapes."""

    def test_peak_at_optimum(self):
        """Test the optimum scores s_max without perturbation."""
        landscape = make_landscape("ridge")
        assert synthetic_eval(landscape, RIDGE_OPTIMUM) == pytest.approx(0.85)

    def test_joint_scaling_only_moves_low_curvature_direction(self):
        """Test joint scaling of (Λp, Λe) costs d_joint·Δv² only."""
        landscape = make_landscape("ridge")
        c = 3.0
        h = HyperConfig(c * 8e-3, c * 2.0, 64)
        shift = math.sqrt(2) * math.log(c)  # normalized joint-direction displacement
        assert landscape(h) == pytest.approx(0.85 - 0.1 * shift ** 2)

    def test_balance_direction_is_steep(self):
        """Test a balance move costs more than the same-length joint move."""
        landscape = make_landscape("ridge")
        balance = landscape(HyperConfig(8e-3 / 2, 2.0 * 2, 64))
        joint = landscape(HyperConfig(8e-3 * 2, 2.0 * 2, 64))
        assert balance < joint < 0.85

    def test_curvature_linearity(self):
        """Test doubling d_1 doubles the deficit along row 1."""
        base = make_landscape("ridge")
        steeper = type(base)(
            optimum=base.optimum,
            peak=base.peak,
            directions=base.directions,
            curvatures=(base.curvatures[0], 2 * base.curvatures[1], base.curvatures[2]),
        )
        h = HyperConfig(8e-3 * 4, 2.0 * 4, 64)
        assert 0.85 - steeper(h) == pytest.approx(2 * (0.85 - base(h)))

    def test_perturbation_is_seeded(self):
        """Test the ripple depends only on amplitude and seed."""
        h = HyperConfig(0.1, 0.1, 64)
        assert load_landscape("ridge@0.05@4")(h) == load_landscape("ridge@0.05@4")(h)
        assert load_landscape("ridge@0.05@4")(h) != load_landscape("ridge@0.05@5")(h)

    def test_unknown_preset(self):
        """Test unknown names raise UnknownPreset."""
        with pytest.raises(UnknownPreset):
            load_landscape("saddle")

    def test_load_from_json(self):
        """Test a JSON landscape definition."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "bowl.json"
            path.write_text(json.dumps({"preset": "bowl", "optimum": [1.0, 1.0, 64.0]}))
            landscape = load_landscape(path)
        assert landscape(HyperConfig(1, 1, 64)) == pytest.approx(0.85)

    def test_ridge_suite(self):
        """Test suite optima lie in the requested bounds."""
        suite = ridge_suite(5, [(1e-3, 1e-1), (0.1, 10.0), (64, 64)], seed=2)
        assert len(suite) == 5
        for landscape in suite:
            assert 1e-3 <= landscape.optimum.lambda_p_rate <= 1e-1
            assert landscape.optimum.batch_size == pytest.approx(64)


class TestExternalCommand:
    """Tests for command-backed objectives."""

    def spec(self, code: str, **kwargs) -> ExternalCommandSpec:
        return ExternalCommandSpec(template=f'{PYTHON} -c "{code}"', **kwargs)

    def test_echo_score(self):
        """Test a command printing 0.5."""
        assert external_eval(self.spec("print(0.5)"), HyperConfig(1, 1, 64)) == 0.5

    def test_last_line_is_score(self):
        """Test log lines before the score are ignored."""
        spec = self.spec("print('epoch 1'); print('0.73')")
        assert external_eval(spec, HyperConfig(1, 1, 64)) == 0.73

    def test_nonzero_exit(self):
        """Test a failing command raises CommandFailed."""
        with pytest.raises(CommandFailed) as excinfo:
            external_eval(self.spec("import sys; sys.exit(1)"), HyperConfig(1, 1, 64))
        assert excinfo.value.returncode == 1

    def test_unparseable_output(self):
        """Test a non-numeric last line raises ParseFailed."""
        with pytest.raises(ParseFailed):
            external_eval(self.spec("print('done')"), HyperConfig(1, 1, 64))

    def test_timeout(self):
        """Test a slow command raises TimedOut."""
        with pytest.raises(TimedOut):
            external_eval(self.spec("import time; time.sleep(5)", timeout=0.5), HyperConfig(1, 1, 64))

    def test_env_and_placeholders(self):
        """Test hyperparameters reach the command via env vars and placeholders."""
        code = "import os, sys; print(float(os.environ['LAMBDA_P']) + float(sys.argv[1]) + int(os.environ['BATCH_SIZE']))"
        spec = ExternalCommandSpec(template=f'{PYTHON} -c "{code}" {{lambda_e}}')
        assert external_eval(spec, HyperConfig(0.25, 2.0, 63.2)) == pytest.approx(0.25 + 2.0 + 64)

    def test_round_batch_size(self):
        """Test batch sizes round to an even integer >= 2."""
        assert round_batch_size(63.2) == 64
        assert round_batch_size(65.1) == 66
        assert round_batch_size(0.4) == 2

    def test_objective_wrapper(self):
        """Test the objective adapter and factory."""
        objective = make_objective(f'cmd:{PYTHON} -c "print(0.25)"')
        assert isinstance(objective, ExternalCommandObjective)
        assert objective(HyperConfig(1, 1, 64)) == 0.25


class TestMakeObjective:
    """Tests for objective references."""

    def test_synthetic_reference(self):
        """Test synthetic:<preset> builds a landscape with the standard space."""
        objective = make_objective("synthetic:ridge")
        assert objective(RIDGE_OPTIMUM) == pytest.approx(0.85)
        assert default_space(objective, dims=3) == standard_space(dims=3)

    def test_bad_reference(self):
        """Test references without a known kind are refused."""
        with pytest.raises(InvalidConfig):
            make_objective("ridge")
        with pytest.raises(InvalidConfig):
            make_objective("grid:")
