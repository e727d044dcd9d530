"""Regenerate the CLI --help golden files under tests/golden/help/.

Run after any flag or help-text change:

    python3 scripts/update_help_goldens.py
"""

from __future__ import annotations

import contextlib
import io
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from padeval.cli import run  # noqa: E402

HELP_TARGETS: dict[str, list[str]] = {
    "padeval": ["--help"],
    "dv-score": ["dv-score", "--help"],
    "dv-batch": ["dv-batch", "--help"],
    "ocsvm-train": ["ocsvm-train", "--help"],
    "ocsvm-score": ["ocsvm-score", "--help"],
    "fuse": ["fuse", "--help"],
    "eval-pad": ["eval-pad", "--help"],
    "eval-vuln": ["eval-vuln", "--help"],
    "synth-gen": ["synth-gen", "--help"],
    "synth-gen-depth": ["synth-gen", "depth", "--help"],
    "synth-gen-features": ["synth-gen", "features", "--help"],
}


def main() -> None:
    out_dir = os.path.join(os.path.dirname(__file__), "..", "tests", "golden", "help")
    os.makedirs(out_dir, exist_ok=True)
    for name, argv in HELP_TARGETS.items():
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = run(argv)
        if code != 0:
            raise SystemExit(f"{argv} exited {code}")
        path = os.path.join(out_dir, f"{name}.txt")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        print(f"wrote {os.path.relpath(path)}")


if __name__ == "__main__":
    main()
