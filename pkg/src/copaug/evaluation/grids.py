from .model_select import HyperGrid

full_grid = HyperGrid(
    n_estimators=(100, 200, 300),
    learning_rate=(0.01, 0.05, 0.1),
    max_depth=(3, 5, 7),
)

# single config for smoke runs and CI
fast_grid = HyperGrid(n_estimators=(100,), learning_rate=(0.1,), max_depth=(3,))

GRIDS = {
    "full": full_grid,
    "fast": fast_grid,
}
