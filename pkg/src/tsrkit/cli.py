"""Command-line entry point. Exit codes: 0 ok, 1 validation/parse error, 2 I/O error."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import align_loss, eval_logical, eval_phys, gt_prep, structure, synth
from .formats import IoFailure, read_table, write_table
from .model import TableAnnotation, TsrError

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INVALID)


def _f(v: float) -> str:
    return f"{v:.6f}"


def _load_spanned(path: str) -> TableAnnotation:
    """Read a table; recover spans from its adjacency matrices if it carries none."""
    t, adj = read_table(path)
    if not t.has_spans:
        if adj is None:
            raise TsrError(f"{path}: cells carry no spans and no adjacency matrices")
        t = structure.adjacency_to_spans(t.cells, adj)
    return t


def cmd_postprocess(args) -> int:
    t, adj = read_table(args.cells)
    if adj is None:
        raise TsrError(f"{args.cells}: postprocess needs row_adjacency and col_adjacency")
    write_table(structure.adjacency_to_spans(t.cells, adj), args.output)
    return EXIT_OK


def _pairs(pred: str, gt: str) -> list[tuple[str, str]]:
    p, g = Path(pred), Path(gt)
    if p.is_dir() != g.is_dir():
        raise TsrError("--pred and --gt must both be files or both be directories")
    if not p.is_dir():
        return [(pred, gt)]
    gt_files = {f.name: f for f in g.iterdir() if f.is_file()}
    names = sorted(f.name for f in p.iterdir() if f.is_file() and f.name in gt_files)
    if not names:
        raise TsrError(f"no matching file names in {pred} and {gt}")
    return [(str(p / n), str(gt_files[n])) for n in names]


def _score_one(pair, thresholds, mode, relation_mode):
    pred_path, gt_path = pair
    if mode == "cells":
        pred, _ = read_table(pred_path)
        gt, _ = read_table(gt_path)
        return [eval_phys.cell_prf(pred, gt, th) for th in thresholds]
    pred, gt = _load_spanned(pred_path), _load_spanned(gt_path)
    return [eval_phys.relation_f1(pred, gt, th, relation_mode) for th in thresholds]


def cmd_evaluate(args) -> int:
    thresholds = args.sweep if args.sweep else [args.iou]
    for th in thresholds:
        if not 0.0 < th <= 1.0:
            raise TsrError(f"IoU threshold must lie in (0, 1], got {th}")
    pairs = _pairs(args.pred, args.gt)
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        per_table = list(pool.map(
            lambda pr: _score_one(pr, thresholds, args.mode, args.relations), pairs))
    print("iou\tprecision\trecall\tf1\ttp\tfp\tfn")
    for k, th in enumerate(thresholds):
        s = eval_phys.micro_average(scores[k] for scores in per_table)
        print("\t".join([_f(th), _f(s.precision), _f(s.recall), _f(s.f1),
                         str(s.tp), str(s.fp), str(s.fn)]))
    return EXIT_OK


def cmd_align_loss(args) -> int:
    t, _ = read_table(args.cells)
    b = align_loss.alignment_loss(t)
    for name in ("l1", "l2", "l3", "l4", "total"):
        print(f"{name}\t{_f(getattr(b, name))}")
    if args.grad:
        grad = align_loss.alignment_loss_grad(t)
        print("cell\td_x1\td_y1\td_x2\td_y2")
        for c, g in zip(t.cells, grad):
            print("\t".join([str(c.id)] + [_f(v) for v in g]))
    return EXIT_OK


def cmd_unify(args) -> int:
    t, _ = read_table(args.gt)
    write_table(gt_prep.unify_boxes(t), args.output)
    return EXIT_OK


def cmd_synth(args) -> int:
    t = synth.generate(args.seed, args.rows, args.cols, args.merge_prob,
                       args.empty_prob, args.jitter)
    write_table(t, args.output, structure.spans_to_adjacency(t))
    return EXIT_OK


def cmd_markup(args) -> int:
    print(" ".join(eval_logical.to_markup(_load_spanned(args.cells))))
    return EXIT_OK


def cmd_bleu(args) -> int:
    cand = eval_logical.to_markup(_load_spanned(args.pred))
    ref = eval_logical.to_markup(_load_spanned(args.gt))
    print(_f(eval_logical.bleu(cand, ref, args.max_n)))
    return EXIT_OK


def cmd_teds(args) -> int:
    a = eval_logical.table_to_tree(_load_spanned(args.pred), args.content)
    b = eval_logical.table_to_tree(_load_spanned(args.gt), args.content)
    print(_f(eval_logical.teds(a, b)))
    return EXIT_OK


def _thresholds(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tsrkit", description="Table structure recognition toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("postprocess", help="assign spans from adjacency and write XML")
    s.add_argument("--cells", required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_postprocess)

    s = sub.add_parser("evaluate", help="precision/recall/F1 of cells or relations")
    s.add_argument("--pred", required=True)
    s.add_argument("--gt", required=True)
    s.add_argument("--iou", type=float, default=eval_phys.DEFAULT_IOU)
    s.add_argument("--mode", choices=["relations", "cells"], default="relations")
    s.add_argument("--relations", choices=["neighbors", "all-pairs"], default="neighbors")
    s.add_argument("--sweep", type=_thresholds, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("align-loss", help="alignment loss breakdown")
    s.add_argument("--cells", required=True)
    s.add_argument("--grad", action="store_true")
    s.set_defaults(func=cmd_align_loss)

    s = sub.add_parser("unify", help="expand content-level boxes to aligned cell boxes")
    s.add_argument("--gt", required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_unify)

    s = sub.add_parser("synth", help="generate a synthetic table")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--rows", type=int, required=True)
    s.add_argument("--cols", type=int, required=True)
    s.add_argument("--merge-prob", type=float, default=0.0)
    s.add_argument("--empty-prob", type=float, default=0.0)
    s.add_argument("--jitter", type=float, default=0.0)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("markup", help="print the structure token sequence")
    s.add_argument("--cells", required=True)
    s.set_defaults(func=cmd_markup)

    s = sub.add_parser("bleu", help="BLEU between markup sequences")
    s.add_argument("--pred", required=True)
    s.add_argument("--gt", required=True)
    s.add_argument("--max-n", type=int, default=4)
    s.set_defaults(func=cmd_bleu)

    s = sub.add_parser("teds", help="tree-edit-distance similarity")
    s.add_argument("--pred", required=True)
    s.add_argument("--gt", required=True)
    s.add_argument("--content", action="store_true")
    s.set_defaults(func=cmd_teds)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INVALID
    try:
        return args.func(args)
    except IoFailure as e:
        print(f"tsrkit: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"tsrkit: {e}", file=sys.stderr)
        return EXIT_IO
    except (TsrError, ValueError) as e:
        print(f"tsrkit: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
