import pytest

from copaug.evaluation.grids import GRIDS
from copaug.experiment.config import ExperimentConfig, config_from_dict


@pytest.mark.parametrize("name,grid", GRIDS.items())
def test_configs_cover_the_whole_grid(name, grid):
    configs = grid.configs()
    assert len(configs) == len(grid)
    assert len(set(configs)) == len(configs)


@pytest.mark.parametrize("name,grid", GRIDS.items())
def test_grid_values_are_positive(name, grid):

    assert all(n >= 1 for n in grid.n_estimators)
    assert all(0 < lr <= 1 for lr in grid.learning_rate)
    assert all(d >= 1 for d in grid.max_depth)


@pytest.mark.parametrize("name,grid", GRIDS.items())
def test_grid_is_selectable_by_name(name, grid):
    assert config_from_dict({"grid": name}).grid == grid


def test_default_grid_is_the_full_search():
    grid = ExperimentConfig().grid
    assert grid.n_estimators == (100, 200, 300)
    assert grid.learning_rate == (0.01, 0.05, 0.1)
    assert grid.max_depth == (3, 5, 7)
    assert len(grid) == 27
