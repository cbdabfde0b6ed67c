#!/usr/bin/env python3
"""Export the small UCI benchmark datasets bundled with scikit-learn to CSV.

Writes iris.csv, wine.csv, and cancer.csv into data/ (or the directory
given as the first argument). The blood and covtype datasets are not
bundled anywhere offline; see data/README.md for how to fetch and convert
them by hand.
"""

import sys
from pathlib import Path

from sklearn import datasets


def export(bunch, path: Path, label_names=None) -> None:
    names = [n.replace(" ", "_").replace("(", "").replace(")", "")
             for n in bunch.feature_names]
    targets = bunch.target_names
    with path.open("w") as out:
        out.write(",".join(list(names) + ["class"]) + "\n")
        for row, label in zip(bunch.data, bunch.target):
            cells = [repr(float(v)) for v in row]
            cells.append(str(targets[label]))
            out.write(",".join(cells) + "\n")
    print(f"wrote {path} ({len(bunch.data)} rows)")


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    out_dir.mkdir(parents=True, exist_ok=True)
    export(datasets.load_iris(), out_dir / "iris.csv")
    export(datasets.load_wine(), out_dir / "wine.csv")
    export(datasets.load_breast_cancer(), out_dir / "cancer.csv")


if __name__ == "__main__":
    main()
