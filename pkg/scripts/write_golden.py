"""Regenerate tests/golden/: `analyze` and `bounds` JSON reports for every corpus file.

Run from the repository root; the reports embed the relative corpus path.
"""

import io
from pathlib import Path

from tarry.cli import run

ROOT = Path(__file__).resolve().parent.parent


def main():
    out = ROOT / "tests" / "golden"
    out.mkdir(parents=True, exist_ok=True)
    files = sorted((ROOT / "corpus").glob("*.json"))
    for f in files:
        rel = f"corpus/{f.name}"
        for cmd in ("analyze", "bounds"):
            buf = io.StringIO()
            code = run([cmd, "--poly", rel], out=buf)
            assert code == 0, (cmd, rel)
            (out / f"{cmd}__{f.stem}.json").write_text(buf.getvalue())
    print(f"wrote {2 * len(files)} golden reports to {out}")


if __name__ == "__main__":
    main()
