"""Regenerate tests/golden/ from the naive reference pipeline.

    python tests/make_golden.py
"""

from pathlib import Path

import reference

ROOT = Path(__file__).resolve().parent
MINI = ROOT.parent / "src" / "cssm" / "data" / "mini"
MODES = ("bm25", "cssm-lf", "cssm-cw")


def main():
    out = ROOT / "golden"
    out.mkdir(exist_ok=True)
    _, _, qrels, _ = reference.load_mini(MINI)
    for mode in MODES:
        run = reference.golden_run(mode, MINI)
        (out / f"{mode}.run").write_text(run)
        ranked = {}
        for line in run.splitlines():
            q, _, d, *_ = line.split()
            ranked.setdefault(q, []).append(d)
        (out / f"{mode}.eval").write_text(reference.report(ranked, qrels))


if __name__ == "__main__":
    main()
