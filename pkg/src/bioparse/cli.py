"""Command-line interface: every pipeline as a subcommand over files.

Outputs are deterministic: JSON documents are emitted with sorted keys
and reals at 17 significant digits, so identical inputs give
byte-identical bytes on every platform. Exit codes: 0 success, 1 usage
error, 2 I/O or format error, 3 domain error.

Directory inputs pair files by shared stem; an unpaired file is a usage
error rather than silently skipped. The environment variable
BIOPARSE_THREADS caps worker parallelism for batch subcommands
(0 or unset = one worker per CPU).
"""

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .dataset_io import (
    assign_entries,
    read_manifest,
    read_mask,
    read_pmap,
    read_rgb,
    split_grouped,
    write_labels,
    write_manifest,
    write_pmap,
    write_pmap_png,
)
from .errors import DomainError, FormatError, UsageError
from .geometry import shape_metrics
from .metrics import (
    auroc,
    dice,
    identification_counts,
    identification_prf,
    identification_prf_macro,
    silhouette,
    summarize,
    weighted_dice,
    wilcoxon_signed_rank,
)
from .ontology import load_ontology, resolve_prompt
from .recognition import DEFAULT_LAMBDA, TargetMaps, recognize
from .serial import canonical_json
from .shapemap import ShapeAccumulator, ensemble_volume
from .validity import (
    DEFAULT_CUTOFF,
    DEFAULT_THRESHOLD,
    extract_statistics,
    fit_validity_model,
    model_from_json,
    model_to_json,
    validity_pvalue,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}".rstrip())


def _unit_interval(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a real number")
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"{text!r} is outside [0, 1]")
    return x


def _open_unit_interval(text):
    x = _unit_interval(text)
    if x in (0.0, 1.0):
        raise argparse.ArgumentTypeError(f"{text!r} is outside (0, 1)")
    return x


def _nonnegative_real(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a real number")
    if not x >= 0.0 or x != x or x == float("inf"):
        raise argparse.ArgumentTypeError(f"{text!r} is not a finite value >= 0")
    return x


def _emit(doc) -> None:
    sys.stdout.write(canonical_json(doc) + "\n")


def worker_count() -> int:
    raw = os.environ.get("BIOPARSE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"BIOPARSE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise UsageError(f"BIOPARSE_THREADS must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def _map_ordered(fn, items):
    """Apply fn preserving item order, with bounded parallelism."""
    workers = min(worker_count(), max(len(items), 1))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _files_by_stem(directory, suffix) -> dict:
    d = Path(directory)
    if not d.is_dir():
        raise FormatError(f"{directory}: not a directory")
    return {f.stem: f for f in d.iterdir() if f.is_file() and f.suffix == suffix}


def _paired_stems(left, right, left_name, right_name):
    extra = sorted(set(left) - set(right))
    if extra:
        raise UsageError(f"{extra[0]!r} in {left_name} has no pair in {right_name}")
    extra = sorted(set(right) - set(left))
    if extra:
        raise UsageError(f"{extra[0]!r} in {right_name} has no pair in {left_name}")
    return sorted(left)


def _read_json_file(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON ({e})") from None


def _read_csv_rows(path, columns):
    """Rows of a headered CSV; every declared column parsed as text."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty CSV, expected header "
                              f"{','.join(columns)}") from None
        header = [h.strip() for h in header]
        if columns is not None and header != list(columns):
            raise FormatError(
                f"{path}: header must be {','.join(columns)}, got {','.join(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if columns is not None and len(row) != len(columns):
                raise FormatError(f"{path} line {lineno}: expected "
                                  f"{len(columns)} fields, got {len(row)}")
            rows.append((lineno, [cell.strip() for cell in row]))
    return header, rows


def _as_real(path, lineno, name, text):
    try:
        return float(text)
    except ValueError:
        raise FormatError(
            f"{path} line {lineno}: {name} {text!r} is not a real number") from None


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_irregularity(args) -> int:
    m = shape_metrics(read_mask(args.mask))
    if args.format == "csv":
        sys.stdout.write("box_ratio,convex_ratio,iri\n")
        sys.stdout.write(",".join(
            format(v, ".17g") for v in (m.box_ratio, m.convex_ratio, m.iri)) + "\n")
    else:
        _emit({"box_ratio": m.box_ratio, "convex_ratio": m.convex_ratio,
               "iri": m.iri})
    return 0


def cmd_validity_fit(args) -> int:
    entries = [e for e in read_manifest(args.manifest)
               if e.object_type == args.object_type]
    if not entries:
        raise DomainError(
            f"{args.manifest}: no entries with object type {args.object_type!r}")
    pmaps = _files_by_stem(args.pmaps, ".pmap")
    root = Path(args.images)

    def load(entry):
        stem = Path(entry.image_path).stem
        if stem not in pmaps:
            raise UsageError(f"{entry.image_path!r} has no {stem}.pmap in {args.pmaps}")
        return (read_pmap(pmaps[stem]), read_rgb(root / entry.image_path),
                read_mask(root / entry.mask_path))

    triples = _map_ordered(load, entries)
    model = fit_validity_model(triples, args.object_type,
                               channel_tests=args.channel_tests)
    text = model_to_json(model)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(text + "\n")
    _emit({"object_type": model.object_type, "sample_count": model.sample_count,
           "out": str(args.out)})
    return 0


def cmd_validity_test(args) -> int:
    with open(args.model, "r", encoding="utf-8") as f:
        model = model_from_json(f.read())
    sample = extract_statistics(read_pmap(args.pmap), read_rgb(args.image),
                                threshold=args.threshold)
    report = validity_pvalue(model, sample, cutoff=args.cutoff)
    _emit({"object_type": model.object_type, "p_prob": report.p_prob,
           "p_r": report.p_r, "p_g": report.p_g, "p_b": report.p_b,
           "summary_p": report.summary_p, "is_valid": report.is_valid})
    return 0


def cmd_recognize(args) -> int:
    legend = _read_json_file(args.legend_in)
    targets = legend.get("targets") if isinstance(legend, dict) else None
    if (not isinstance(targets, list) or not targets
            or not all(isinstance(t, str) for t in targets)):
        raise FormatError(
            f"{args.legend_in}: expected {{\"targets\": [names...]}}")
    pmaps = _files_by_stem(args.pmaps, ".pmap")
    _paired_stems(set(targets), pmaps, args.legend_in, args.pmaps)
    maps = _map_ordered(lambda t: read_pmap(pmaps[t]), targets)
    result = recognize(TargetMaps(targets, maps), lam=args.lam)
    write_labels(args.out, result.labels)
    with open(args.legend, "w", encoding="utf-8") as f:
        f.write(canonical_json({"targets": list(targets)}) + "\n")
    report = {
        "lambda": args.lam,
        "selected": sorted(result.selected),
        "original_areas": dict(result.original_areas),
        "final_areas": dict(result.final_areas),
    }
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(canonical_json(report) + "\n")
    _emit(report)
    return 0


def cmd_shapemap(args) -> int:
    pmaps = _files_by_stem(args.pmaps, ".pmap")
    if not pmaps:
        raise UsageError(f"{args.pmaps}: no .pmap files")
    stems = sorted(pmaps)
    if args.volume_groups:
        entries = read_manifest(args.volume_groups)
        group_of = {Path(e.image_path).stem: e.group_id for e in entries}
        missing = [s for s in stems if s not in group_of]
        if missing:
            raise UsageError(
                f"{missing[0]!r} in {args.pmaps} is not listed in {args.volume_groups}")
        grouped = {}
        for s in stems:
            grouped.setdefault(group_of[s], []).append(s)
        order = sorted(grouped, key=str)
        units = [ensemble_volume([read_pmap(pmaps[s]) for s in grouped[g]])
                 for g in order]
        order = [str(g) for g in order]
    else:
        order = stems
        units = [read_pmap(pmaps[s]) for s in stems]
    acc = ShapeAccumulator(units[0])
    shifts = [[0, 0]]
    for unit in units[1:]:
        s = acc.add(unit)
        shifts.append([s.d_row, s.d_col])
    ensemble = acc.normalized()
    write_pmap(args.out, ensemble)
    if args.png:
        write_pmap_png(args.png, ensemble)
    _emit({"count": len(order), "order": order, "shifts": shifts})
    return 0


def cmd_eval_dice(args) -> int:
    preds = _files_by_stem(args.pred, ".png")
    golds = _files_by_stem(args.gold, ".png")
    stems = _paired_stems(preds, golds, args.pred, args.gold)
    if not stems:
        raise UsageError(f"{args.pred}: no .png files")
    pairs = _map_ordered(
        lambda s: (read_mask(preds[s]), read_mask(golds[s])), stems)
    scores = [dice(p, g) for p, g in pairs]
    doc = dict(summarize(scores))
    doc["per_image"] = dict(zip(stems, scores))
    if args.weighted:
        doc["weighted"] = weighted_dice(pairs)
    _emit(doc)
    return 0


def _identification_sets(path):
    by_image = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as e:
                raise FormatError(f"{path} line {lineno}: {e}") from None
            if not isinstance(doc, dict) or "image" not in doc \
                    or "object_types" not in doc:
                raise FormatError(
                    f"{path} line {lineno}: expected image and object_types fields")
            if doc["image"] in by_image:
                raise FormatError(
                    f"{path} line {lineno}: duplicate image {doc['image']!r}")
            by_image[doc["image"]] = list(doc["object_types"])
    return by_image


def cmd_eval_identify(args) -> int:
    pred = _identification_sets(args.pred)
    gold = _identification_sets(args.gold)
    images = _paired_stems(pred, gold, args.pred, args.gold)
    pred_lists = [pred[i] for i in images]
    gold_lists = [gold[i] for i in images]
    c = identification_counts(pred_lists, gold_lists)
    micro = identification_prf(pred_lists, gold_lists)
    macro = identification_prf_macro(pred_lists, gold_lists)
    _emit({
        "images": len(images),
        "counts": {"tp": c.tp, "fp": c.fp, "fn": c.fn},
        "micro": dict(zip(("precision", "recall", "f1"), micro)),
        "macro": dict(zip(("precision", "recall", "f1"), macro)),
    })
    return 0


def cmd_eval_auroc(args) -> int:
    _, rows = _read_csv_rows(args.scores, ("label", "score"))
    labels, scores = [], []
    for lineno, (label, score) in rows:
        if label not in ("0", "1"):
            raise FormatError(
                f"{args.scores} line {lineno}: label must be 0 or 1, got {label!r}")
        labels.append(label == "1")
        scores.append(_as_real(args.scores, lineno, "score", score))
    value = auroc(scores, labels)
    _emit({"auroc": value, "n_negative": labels.count(False),
           "n_positive": labels.count(True)})
    return 0


def cmd_eval_wilcoxon(args) -> int:
    _, rows = _read_csv_rows(args.pairs, ("before", "after"))
    before = [_as_real(args.pairs, ln, "before", b) for ln, (b, _) in rows]
    after = [_as_real(args.pairs, ln, "after", a) for ln, (_, a) in rows]
    _emit({"n_pairs": len(before),
           "p_value": wilcoxon_signed_rank(before, after)})
    return 0


def cmd_eval_silhouette(args) -> int:
    header, rows = _read_csv_rows(args.points, None)
    if len(header) < 2 or header[-1] != "label":
        raise FormatError(
            f"{args.points}: header must be coordinate columns then 'label'")
    dim = len(header) - 1
    points, labels = [], []
    for lineno, row in rows:
        if len(row) != dim + 1:
            raise FormatError(
                f"{args.points} line {lineno}: expected {dim + 1} fields")
        points.append([_as_real(args.points, lineno, header[i], row[i])
                       for i in range(dim)])
        labels.append(row[-1])
    _emit({"silhouette": silhouette(points, labels),
           "n_points": len(points), "n_clusters": len(set(labels))})
    return 0


def cmd_split(args) -> int:
    entries = read_manifest(args.manifest)
    assignment = split_grouped(entries, args.ratio, args.seed)
    labeled = assign_entries(entries, assignment)
    write_manifest(args.out, labeled)
    trains = sum(1 for s in assignment.assignment.values() if s == "train")
    _emit({"groups": len(assignment.assignment), "train_groups": trains,
           "test_groups": len(assignment.assignment) - trains,
           "entries": len(labeled), "ratio": args.ratio, "seed": args.seed})
    return 0


def cmd_resolve(args) -> int:
    with open(args.ontology, "r", encoding="utf-8") as f:
        ontology = load_ontology(f.read())
    r = resolve_prompt(args.prompt, ontology)
    _emit({"object_type": r.object_type, "site": r.site,
           "modality": r.modality, "matched_surface": r.matched_surface})
    return 0


# ---------------------------------------------------------------------------
# parser wiring


def build_parser() -> _Parser:
    parser = _Parser(prog="bioparse",
                     description="Statistical machinery for text-promptable "
                                 "biomedical image parsing.")
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("irregularity", help="shape metrics of a mask PNG")
    p.add_argument("--mask", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(handler=cmd_irregularity)

    validity = sub.add_parser("validity", help="prompt validity model")
    vsub = validity.add_subparsers(dest="validity_command", required=True,
                                   parser_class=_Parser)
    p = vsub.add_parser("fit", help="fit a validity model from training triples")
    p.add_argument("--manifest", required=True)
    p.add_argument("--pmaps", required=True)
    p.add_argument("--images", required=True)
    p.add_argument("--object-type", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-channel-tests", dest="channel_tests",
                   action="store_false",
                   help="summarize with the probability statistic only")
    p.set_defaults(handler=cmd_validity_fit)
    p = vsub.add_parser("test", help="score one prediction against a model")
    p.add_argument("--model", required=True)
    p.add_argument("--pmap", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--cutoff", type=_unit_interval, default=DEFAULT_CUTOFF)
    p.add_argument("--threshold", type=_unit_interval, default=DEFAULT_THRESHOLD)
    p.set_defaults(handler=cmd_validity_test)

    p = sub.add_parser("recognize", help="multi-target label aggregation")
    p.add_argument("--pmaps", required=True)
    p.add_argument("--legend-in", required=True)
    p.add_argument("--lambda", dest="lam", type=_nonnegative_real,
                   default=DEFAULT_LAMBDA)
    p.add_argument("--out", required=True)
    p.add_argument("--legend", required=True)
    p.add_argument("--report")
    p.set_defaults(handler=cmd_recognize)

    p = sub.add_parser("shapemap", help="align and ensemble probability maps")
    p.add_argument("--pmaps", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--png")
    p.add_argument("--volume-groups",
                   help="manifest grouping slices into volumes, averaged "
                        "without alignment before cross-volume alignment")
    p.set_defaults(handler=cmd_shapemap)

    ev = sub.add_parser("eval", help="evaluation metrics")
    esub = ev.add_subparsers(dest="eval_command", required=True,
                             parser_class=_Parser)
    p = esub.add_parser("dice", help="per-image Dice over paired mask dirs")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--weighted", action="store_true")
    p.set_defaults(handler=cmd_eval_dice)
    p = esub.add_parser("identify", help="identification precision/recall/F1")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.set_defaults(handler=cmd_eval_identify)
    p = esub.add_parser("auroc", help="AUROC of a label,score CSV")
    p.add_argument("--scores", required=True)
    p.set_defaults(handler=cmd_eval_auroc)
    p = esub.add_parser("wilcoxon", help="signed-rank test of a before,after CSV")
    p.add_argument("--pairs", required=True)
    p.set_defaults(handler=cmd_eval_wilcoxon)
    p = esub.add_parser("silhouette", help="silhouette score of labeled points")
    p.add_argument("--points", required=True)
    p.set_defaults(handler=cmd_eval_silhouette)

    p = sub.add_parser("split", help="volume-grouped train/test split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--ratio", type=_open_unit_interval, default=0.8)
    p.add_argument("--seed", type=int, default=17)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("resolve", help="resolve a templatic prompt")
    p.add_argument("--ontology", required=True)
    p.add_argument("--prompt", required=True)
    p.set_defaults(handler=cmd_resolve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        name = e.filename if e.filename else e
        print(f"error: {name}: file not found", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
