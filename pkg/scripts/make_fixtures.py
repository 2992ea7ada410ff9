"""Write the shipped JSON fixtures into fixtures/."""

from __future__ import annotations

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import fixtures  # noqa: E402

SQRT2 = math.sqrt(2.0)

FIXTURES = {
    # {0, 1, 2} on the line; S(0,-1,0) = {{0,1},{1,2}}.
    "line": {"points": {"0": [0.0], "1": [1.0], "2": [2.0]}, "affine": False},
    "line_lift": {"0": 0.0, "1": -1.0, "2": 0.0},
    "line_direction_flip": {"0": 0.0, "1": 1.0, "2": 0.0},
    "triangle": {"points": {"a": [0.0, 0.0], "b": [1.0, 0.0], "c": [0.0, 1.0]}, "affine": False},
    "five_point": {
        "points": {
            "a": [0.0, 1.0],
            "b": [1.0, 2.0],
            "c": [1.2, 1.0],
            "d": [1.0, 0.0],
            "e": [2.0, 1.0],
        },
        "affine": False,
    },
    "five_point_lift": {"a": 0.0, "b": 0.0, "c": -1.0, "d": 0.0, "e": 0.0},
    # A1 = {(-√2, 1), (1, 0), (1, 1)}: z_c = z_a z_b^(1+√2) on Y_A1.
    "a1": {"points": {"a": [-SQRT2, 1.0], "b": [1.0, 0.0], "c": [1.0, 1.0]}, "affine": False},
    # Σ_[1]: cones cone{e_i : i in I} + R(1,1).
    "simplex_fan_1": {
        "dim": 2,
        "lineality": [[1.0, 1.0]],
        "cones": [
            {"label": "{}", "generators": []},
            {"label": "{0}", "generators": [[1.0, 0.0]]},
            {"label": "{1}", "generators": [[0.0, 1.0]]},
        ],
    },
    # Σ'_[1]: the same cones without lineality; (1,1) is uncovered.
    "boundary_orthant_1": {
        "dim": 2,
        "cones": [
            {"label": "{}", "generators": []},
            {"label": "{0}", "generators": [[1.0, 0.0]]},
            {"label": "{1}", "generators": [[0.0, 1.0]]},
        ],
    },
    "orthant_2": {"cones": [{"label": "quadrant", "generators": [[1.0, 0.0], [0.0, 1.0]]}]},
}


def main() -> None:
    fixtures.FIXTURES_DIR.mkdir(parents=True, exist_ok=True)
    for name, payload in FIXTURES.items():
        path = fixtures.write_json(fixtures.fixture_path(name), payload)
        print(f"  wrote {path.relative_to(fixtures.FIXTURES_DIR.parent)}")
    print(f"Done: {len(FIXTURES)} fixtures")


if __name__ == "__main__":
    main()
