#!/usr/bin/env python3
"""One-time generator for data/possum_predictions.csv.

Synthesizes anatomical measurements for 104 possums driven by a latent
body-size factor, trains an AdaBoost regressor on the standardized features
to predict the animal's height, and stores the model's (standardized)
predictions alongside the measurements. Three rows carry a missing cell on
purpose, so a loader that drops incomplete rows ends up with n = 101.

Deterministic: fixed RNG seed and estimator random_state.

Requires numpy and scikit-learn.
"""

import csv
import pathlib

import numpy as np
from sklearn.ensemble import AdaBoostRegressor
from sklearn.tree import DecisionTreeRegressor

SEED = 20240518
N = 104
MISSING_ROWS = (43, 65, 97)  # 0-based rows shipped with one blank cell

COLUMNS = [
    # (name, mean, size loading, shape loading, measurement noise sd)
    ("hdlngth", 92.6, 2.9, 0.6, 1.3),
    ("skullw", 56.9, 2.4, -0.9, 1.4),
    ("taill", 37.0, 1.2, 0.9, 1.3),
    ("footlgth", 68.5, 3.6, 1.4, 1.6),
    ("earconch", 48.1, 3.0, 2.2, 1.8),
    ("eye", 15.0, 0.35, 0.1, 0.6),
    ("chest", 27.0, 1.7, -0.5, 1.1),
    ("belly", 32.6, 2.0, 0.4, 1.5),
]
SHAPE_SCALE = 0.02   # secondary-factor contribution, relative to loading
NOISE_SCALE = 0.006  # measurement noise, relative to the column's spread


def main() -> None:
    rng = np.random.default_rng(SEED)
    size = rng.standard_normal(N)
    shape = rng.standard_normal(N)
    sex = rng.choice(["m", "f"], size=N)

    features = {}
    for name, mean, load_size, load_shape, sd in COLUMNS:
        features[name] = (
            mean
            + load_size * size
            + load_shape * SHAPE_SCALE * shape
            + rng.normal(0.0, sd * NOISE_SCALE, N)
        )

    height = (
        87.0
        + 3.6 * size
        + 0.45 * size**2
        + 0.9 * np.tanh(size)
        + rng.normal(0.0, 0.01, N)
    )

    X = np.column_stack([features[name] for name, *_ in COLUMNS])
    X = np.round(X, 2)  # measurements recorded to 0.01
    X_std = (X - X.mean(axis=0)) / X.std(axis=0)

    model = AdaBoostRegressor(
        DecisionTreeRegressor(max_depth=8, random_state=0),
        n_estimators=800,
        learning_rate=1.0,
        random_state=0,
    )
    model.fit(X_std, height)
    pred = model.predict(X_std)
    print(f"black-box training MSE: {np.mean((pred - height) ** 2):.3g} cm^2")
    pred = (pred - pred.mean()) / pred.std()

    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "possum_predictions.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        names = [name for name, *_ in COLUMNS]
        writer.writerow(["sex"] + names + ["prediction"])
        for i in range(N):
            cells = [sex[i]]
            for j, _ in enumerate(names):
                cells.append(f"{X[i, j]:.2f}")
            cells.append(f"{pred[i]:.12g}")
            if i in MISSING_ROWS:
                cells[2 + (i % 3)] = ""  # blank one feature cell
            writer.writerow(cells)
    print(f"wrote {out} ({N} rows, {len(MISSING_ROWS)} with a missing cell)")


if __name__ == "__main__":
    main()
