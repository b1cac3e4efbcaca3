"""Rebuild ``data/emotions.arff`` from the copy bundled in the Orange 2.7.8 sdist.

The Mulan download host is not always reachable, while PyPI is. Orange 2.x
ships the same 593-instance emotions table (72 numeric features, 6 labels) as
a tab-separated file; this script extracts it and writes a Mulan-style ARFF
with the six labels as the last attributes.

Usage::

    python scripts/fetch_emotions.py [--sdist Orange-2.7.8.tar.gz] [--out data/emotions.arff]
"""

import argparse
import io
import tarfile
import urllib.request
from pathlib import Path

SDIST_URL = (
    "https://files.pythonhosted.org/packages/43/61/"
    "29c81c53504fb4c774eaec5218ca39f5d2625a61f0f6a52c61097be17f1c/Orange-2.7.8.tar.gz"
)
MEMBER = "Orange-2.7.8/Orange/datasets/emotions.tab"


def tab_to_arff(text: str) -> str:
    lines = [ln for ln in text.split("\n")]
    names = lines[0].split("\t")
    kinds = lines[1].split("\t")
    rows = [ln.split("\t") for ln in lines[3:] if ln.strip()]
    out = ["@relation emotions", ""]
    for name, kind in zip(names, kinds):
        if kind == "continuous":
            out.append(f"@attribute {name} numeric")
        else:
            out.append(f"@attribute {name} {{0,1}}")
    out += ["", "@data"]
    for row in rows:
        labels = [str(int(float(v))) for v in row[-6:]]
        out.append(",".join(row[:-6] + labels))
    return "\n".join(out) + "\n"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sdist", type=Path, default=None)
    parser.add_argument(
        "--out", type=Path, default=Path(__file__).resolve().parents[1] / "data" / "emotions.arff"
    )
    args = parser.parse_args()

    if args.sdist is None:
        with urllib.request.urlopen(SDIST_URL, timeout=600) as resp:
            blob = resp.read()
        tar = tarfile.open(fileobj=io.BytesIO(blob))
    else:
        tar = tarfile.open(args.sdist)
    text = tar.extractfile(MEMBER).read().decode("utf-8")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(tab_to_arff(text))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
