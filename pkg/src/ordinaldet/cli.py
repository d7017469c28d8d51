"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 empty ground truth, 3 failed
finite-difference check.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .damage_rules import classify_damage, observation_from_record
from .detection_metrics import EmptyGroundTruthError
from .domain import CLASS_NAMES, InputError
from .gradcheck import RTOL, central_difference, max_relative_error, noise_floor
from .ingestion import (
    dataset_stats,
    parse_ground_truth,
    parse_predictions,
    serialize_ground_truth,
    serialize_predictions,
)
from .ordinal_losses import BASES, LossConfig, base_loss, penalized_loss, penalty_factor, expected_class
from .ordinal_targets import SoftTargetConfig, soft_targets
from .report import EvaluationConfig, evaluate, render_report, sha256
from .synth import SCENARIOS, generate

EXIT_OK, EXIT_INPUT, EXIT_EMPTY_GT, EXIT_FD = 0, 1, 2, 3

log = logging.getLogger("ordinaldet")


class UsageError(Exception):
    pass


def _k_value(text) -> Optional[int]:
    if text is None or (isinstance(text, str) and text.lower() in ("inf", "unbounded", "none")):
        return None
    if isinstance(text, str):
        try:
            return int(text)
        except ValueError:
            raise UsageError(f"k must be an integer or 'inf', got {text!r}") from None
    if isinstance(text, bool) or not isinstance(text, int):
        raise UsageError(f"k must be an integer or null, got {text!r}")
    return text


def _f1_mode(text: str) -> Optional[float]:
    if text == "max":
        return None
    if text.startswith("fixed:"):
        try:
            return float(text[len("fixed:"):])
        except ValueError:
            pass
    raise UsageError(f"--f1 must be 'max' or 'fixed:<threshold>', got {text!r}")


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: Optional[str], data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def _json_lines(data: bytes):
    for lineno, line in enumerate(data.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield lineno, json.loads(line)
        except json.JSONDecodeError as exc:
            raise UsageError(f"line {lineno}: {exc.msg}") from None


def cmd_evaluate(args) -> int:
    gt_bytes, pred_bytes = _read(args.gt), _read(args.pred)
    dataset = parse_ground_truth(gt_bytes)
    preds = parse_predictions(pred_bytes)
    config = EvaluationConfig(args.iou, args.ordinal_matching, _f1_mode(args.f1))
    provenance = {"ground_truth_sha256": sha256(gt_bytes), "predictions_sha256": sha256(pred_bytes)}
    report = evaluate(dataset, preds, config, threads=args.threads, provenance=provenance)
    _write(args.out, render_report(report))
    if args.confusion_csv:
        Path(args.confusion_csv).write_text(report.confusion.to_csv())
    return EXIT_OK


def cmd_targets(args) -> int:
    config = SoftTargetConfig(args.psi, _k_value(args.k))
    dist = soft_targets(args.true_class, args.s, config)
    out = {
        "true_class": int(dist.true_class),
        "psi": config.psi,
        "k": config.k_neighbors,
        "s": dist.scale,
        "raw_weights": dist.raw_weights.tolist(),
        "targets": dist.targets.tolist(),
        "support": list(dist.support),
    }
    _write(None, (json.dumps(out) + "\n").encode())
    return EXIT_OK


def _loss_record(rec: dict, args, lineno: int) -> dict:
    if not isinstance(rec, dict):
        raise UsageError(f"line {lineno}: expected an object")
    try:
        z = np.asarray(rec["z"], dtype=np.float64)
        true_class = rec["true_class"]
        s = float(rec.get("s", 1.0))
        psi = float(rec.get("psi", args.psi))
        k = _k_value(rec["k"] if "k" in rec else args.k)
        gamma = float(rec.get("gamma", args.gamma))
        lam = float(rec.get("lambda", args.lam))
        base = rec.get("base", args.base)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"line {lineno}: bad record ({exc})") from None
    if base not in BASES:
        raise UsageError(f"line {lineno}: base must be one of {BASES}, got {base!r}")
    try:
        targets = soft_targets(true_class, s, SoftTargetConfig(psi, k))
        config = LossConfig(gamma, lam, args.penalty_detached)
        out = penalized_loss(z, targets, true_class, config, base)
    except ValueError as exc:
        raise UsageError(f"line {lineno}: {exc}") from None

    result = {
        "line": lineno,
        "value": out.value,
        "gradient": out.gradient.tolist(),
        "expected_class": out.expected_class,
        "factor": out.factor,
    }
    if args.fd_check:
        if config.detach_penalty:
            frozen = penalty_factor(expected_class(z), int(true_class), lam)
            fn = lambda v: frozen * base_loss(v, targets, base, gamma).value  # noqa: E731
        else:
            fn = lambda v: penalized_loss(v, targets, true_class, config, base).value  # noqa: E731
        result["fd_max_rel_error"] = max_relative_error(
            out.gradient, central_difference(fn, z), noise_floor(out.value))
    return result


def cmd_loss(args) -> int:
    failed = 0
    lines = []
    for lineno, rec in _json_lines(_read(args.batch)):
        result = _loss_record(rec, args, lineno)
        if args.fd_check and not result["fd_max_rel_error"] < RTOL:
            failed += 1
            log.error("line %d: finite-difference check failed (%.3g)", lineno, result["fd_max_rel_error"])
        lines.append(json.dumps(result))
    _write(args.out, ("\n".join(lines) + "\n" if lines else "").encode())
    return EXIT_FD if failed else EXIT_OK


def cmd_classify(args) -> int:
    lines = []
    for lineno, rec in _json_lines(_read(args.input)):
        try:
            state = classify_damage(observation_from_record(rec))
        except (InputError, TypeError) as exc:
            raise UsageError(f"line {lineno}: {exc}") from None
        lines.append(json.dumps({"line": lineno, "damage_state": int(state), "label": CLASS_NAMES[state]}))
    _write(args.out, ("\n".join(lines) + "\n" if lines else "").encode())
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {args.scenario!r}, expected one of {', '.join(SCENARIOS)}")
    dataset, preds = generate(args.scenario, args.seed, args.images)
    Path(args.gt_out).write_bytes(serialize_ground_truth(dataset))
    Path(args.pred_out).write_bytes(serialize_predictions(preds))
    return EXIT_OK


def cmd_stats(args) -> int:
    stats = dataset_stats(parse_ground_truth(_read(args.gt)))
    _write(args.out, (json.dumps(stats, indent=2, sort_keys=True) + "\n").encode())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordinaldet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="detection and ordinal metrics for a prediction file")
    p.add_argument("--gt", required=True, help="ground-truth document")
    p.add_argument("--pred", required=True, help="prediction document")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--confusion-csv", help="also write the confusion matrix as CSV")
    p.add_argument("--iou", type=float, default=0.5)
    p.add_argument("--ordinal-matching", choices=("class-agnostic", "class-aware"), default="class-agnostic")
    p.add_argument("--f1", default="max", help="'max' or 'fixed:<threshold>'")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("targets", help="print soft ordinal targets")
    p.add_argument("--class", dest="true_class", type=int, required=True)
    p.add_argument("--psi", type=float, default=0.5)
    p.add_argument("--k", default="inf", help="truncation radius, or 'inf'")
    p.add_argument("--s", type=float, default=1.0, help="task-aligned score in (0, 1]")
    p.set_defaults(func=cmd_targets)

    p = sub.add_parser("loss", help="loss values and gradients for a batch of records")
    p.add_argument("batch", help="line-delimited records, '-' for stdin")
    p.add_argument("--out")
    p.add_argument("--psi", type=float, default=0.5)
    p.add_argument("--k", default="inf")
    p.add_argument("--gamma", type=float, default=1.5)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--base", choices=BASES, default="bce")
    p.add_argument("--penalty-detached", action="store_true",
                   help="hold the distance factor constant when differentiating")
    p.add_argument("--fd-check", action="store_true", help="verify each gradient by finite differences")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("classify", help="damage state from element observations")
    p.add_argument("input", help="line-delimited observations, '-' for stdin")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("synth", help="write a synthetic ground-truth/prediction pair")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--images", type=int, default=100)
    p.add_argument("--gt-out", required=True)
    p.add_argument("--pred-out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stats", help="summary of a ground-truth document")
    p.add_argument("--gt", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("ORDINALDET_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyGroundTruthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY_GT
    except (InputError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
