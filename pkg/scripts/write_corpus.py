"""Write the bundled corpus as polynomial JSON files, one per shape."""

import argparse
import json
from pathlib import Path

from tarry.corpus import corpus

ALIASES = {"prod22": "prod_r2_m2"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "corpus"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    shapes = corpus()
    for name, p in shapes.items():
        (out / f"{name}.json").write_text(json.dumps(p.to_doc()) + "\n")
    for alias, name in ALIASES.items():
        (out / f"{alias}.json").write_text(json.dumps(shapes[name].to_doc()) + "\n")
    print(f"wrote {len(shapes) + len(ALIASES)} files to {out}")


if __name__ == "__main__":
    main()
