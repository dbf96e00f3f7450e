import numpy as np
import pytest

from copaug.core.models import Table
from copaug.evaluation.model_select import HyperGrid
from copaug.experiment.config import ExperimentConfig


def _make_table(columns: dict[str, list[float]], target: str) -> Table:
    names = tuple(columns)
    values = np.column_stack([np.asarray(v, dtype=float) for v in columns.values()])
    return Table(names, values, target)


@pytest.fixture
def make_table():
    return _make_table


@pytest.fixture
def write_csv(tmp_path):
    def _write(text: str, name: str = "data.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def gaussian_table():
    rng = np.random.default_rng(11)
    cov = [[1.0, 0.6, -0.3], [0.6, 1.0, 0.2], [-0.3, 0.2, 1.0]]
    values = rng.multivariate_normal([10.0, 35.0, 2.0], cov, size=5000)
    return Table(("temp", "sal", "chla"), values, "chla")


@pytest.fixture
def tiny_config():
    return ExperimentConfig(
        bundled_rows=300,
        synthetic_levels=(20, 50),
        tuning_k=2,
        eval_k=3,
        grid=HyperGrid((10,), (0.1,), (2,)),
        master_seed=7,
    )
