"""Regenerate the pinned collapse fixture and its report under tests/golden/.

Run only when the report schema or the synthetic generator changes on purpose;
the golden tests exist to catch accidental changes.
"""

import argparse
from pathlib import Path

from ordinaldet.cli import main

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def run(seed: int = 42) -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    gt, pred = GOLDEN / "collapse_gt.json", GOLDEN / "collapse_pred.json"
    assert main(["synth", "--scenario", "collapse", "--seed", str(seed), "--gt-out", str(gt), "--pred-out", str(pred)]) == 0
    assert main(["evaluate", "--gt", str(gt), "--pred", str(pred), "--threads", "1",
                 "--out", str(GOLDEN / "collapse_report.json"),
                 "--confusion-csv", str(GOLDEN / "collapse_confusion.csv")]) == 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    run(parser.parse_args().seed)
