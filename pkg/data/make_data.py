"""Regenerate the bundled CSV datasets from scikit-learn's packaged copies.

Run once with scikit-learn installed::

    python data/make_data.py

Sonar is not shipped with scikit-learn. It is taken, in order of preference,
from ``sonar.all-data`` (UCI) in this directory, ``sonar.dat`` (KEEL) in this
directory, or the copy packaged in the ``keel-ds`` wheel if that is installed
(``pip install keel-ds``). The KEEL copy rounds features to three decimals.
"""

import csv
from pathlib import Path

HERE = Path(__file__).resolve().parent
SOURCES = {"iris": "iris.csv", "wine": "wine_data.csv", "breast": "breast_cancer.csv"}


def convert(src: Path, dst: Path) -> None:
    with open(src, newline="") as fh:
        reader = csv.reader(fh)
        head = next(reader)
        d, names = int(head[1]), head[2:]
        rows = [r for r in reader if r]
    with open(dst, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{j + 1}" for j in range(d)] + ["label"])
        for r in rows:
            writer.writerow(r[:d] + [names[int(r[d])]])


def convert_sonar(src: Path, dst: Path) -> None:
    with open(src, newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.startswith("@")]
    rows = [[v.strip() for v in r] for r in csv.reader(lines)]
    with open(dst, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{j + 1}" for j in range(len(rows[0]) - 1)] + ["label"])
        writer.writerows(rows)


def main():
    import sklearn.datasets

    root = Path(sklearn.datasets.__file__).parent / "data"
    for name, fname in SOURCES.items():
        convert(root / fname, HERE / f"{name}.csv")
        print(f"wrote {name}.csv")
    for raw in (HERE / "sonar.all-data", HERE / "sonar.dat", _keel_sonar()):
        if raw is not None and raw.exists():
            convert_sonar(raw, HERE / "sonar.csv")
            print(f"wrote sonar.csv from {raw}")
            break
    else:
        print("sonar source not found; sonar.csv not written")


def _keel_sonar():
    try:
        import keel_ds
    except ImportError:
        return None
    return Path(keel_ds.__file__).parent / "data" / "balanced" / "raw" / "sonar.dat"


if __name__ == "__main__":
    main()
