"""Dataset-level scoring: pair mask files, score them, report mean ± std."""

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .exceptions import EmptyInputError, PairingError, ShapeError
from .fragment import generate_breaks
from .metrics import METRIC_NAMES, MetricReport, relative_improvement, score_pair
from .raster import read_mask
from .repair import repair_mask
from .topology import DEFAULT_CONNECTIVITY

MASK_SUFFIXES = (".pgm", ".pbm", ".pnm")
PER_IMAGE_COLUMNS = ("image_id",) + METRIC_NAMES
AGGREGATE_COLUMNS = ("metric", "mean", "std", "n")
STD_MODES = {"population": 0, "sample": 1}


@dataclass
class EvalConfig:
    pred_dir: str
    gt_dir: str
    patch_size: int = 64
    connectivity: int = DEFAULT_CONNECTIVITY
    std_mode: str = "population"
    output: str = "csv"
    threads: object = 1

    def __post_init__(self):
        for d in (self.pred_dir, self.gt_dir):
            if not os.path.isdir(d):
                raise FileNotFoundError(f"not a directory: {d}")
        if self.patch_size <= 0:
            raise ValueError("patch_size must be positive")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")
        if self.std_mode not in STD_MODES:
            raise ValueError(f"std_mode must be one of {sorted(STD_MODES)}")
        if self.output not in ("csv", "md"):
            raise ValueError("output must be 'csv' or 'md'")

    @property
    def ddof(self):
        return STD_MODES[self.std_mode]


def resolve_threads(threads):
    if threads in (None, "auto"):
        return os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise ValueError("threads must be positive")
    return threads


def list_masks(directory):
    return sorted(
        name for name in os.listdir(directory)
        if name.lower().endswith(MASK_SUFFIXES) and os.path.isfile(os.path.join(directory, name))
    )


def pair_files(pred_dir, gt_dir):
    """Filenames present in both directories; any unmatched name is an error."""
    pred = set(list_masks(pred_dir))
    gt = set(list_masks(gt_dir))
    if pred != gt:
        raise PairingError(pred - gt, gt - pred)
    if not pred:
        raise EmptyInputError(f"no mask files in {pred_dir}")
    return sorted(pred)


def _score_files(name, cfg):
    pred = read_mask(os.path.join(cfg.pred_dir, name))
    gt = read_mask(os.path.join(cfg.gt_dir, name))
    if pred.shape != gt.shape:
        raise ShapeError(f"{name}: pred is {pred.shape[1]}x{pred.shape[0]}, gt is {gt.shape[1]}x{gt.shape[0]}")
    return _row(name, score_pair(pred, gt, cfg.patch_size, cfg.connectivity))


def _row(image_id, scores):
    return (image_id,) + tuple(scores[m] for m in METRIC_NAMES)


def evaluate_dataset(cfg):
    names = pair_files(cfg.pred_dir, cfg.gt_dir)
    with ThreadPoolExecutor(resolve_threads(cfg.threads)) as pool:
        rows = list(pool.map(lambda n: _score_files(n, cfg), names))
    return MetricReport.from_rows(rows, ddof=cfg.ddof)


def score_masks(pairs, patch_size=64, connectivity=DEFAULT_CONNECTIVITY, ddof=0, threads=1):
    """Score in-memory ``(image_id, pred, gt)`` triples, sorted by id."""
    pairs = sorted(pairs, key=lambda p: p[0])

    def one(item):
        image_id, pred, gt = item
        return _row(image_id, score_pair(pred, gt, patch_size, connectivity))

    with ThreadPoolExecutor(resolve_threads(threads)) as pool:
        rows = list(pool.map(one, pairs))
    return MetricReport.from_rows(rows, ddof=ddof)


# ------------------------------------------------------------------ output


def beta0_label(patch_size, connectivity):
    return f"beta0_p{patch_size}_c{connectivity}"


def _fmt(v):
    return repr(float(v))


def per_image_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PER_IMAGE_COLUMNS)
    for row in report.per_image:
        writer.writerow((row[0],) + tuple(_fmt(v) for v in row[1:]))
    return buf.getvalue()


def aggregate_csv(report, patch_size=64, connectivity=DEFAULT_CONNECTIVITY):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AGGREGATE_COLUMNS)
    for metric in METRIC_NAMES:
        mean, std = report.aggregate[metric]
        label = beta0_label(patch_size, connectivity) if metric == "beta0" else metric
        writer.writerow((label, _fmt(mean), _fmt(std), report.n))
    return buf.getvalue()


def markdown_table(report, patch_size=64, connectivity=DEFAULT_CONNECTIVITY):
    """Mean ± std rounded to two decimals; overlap scores shown in percent."""
    headers = ["Dice (%)", "IoU (%)", "clDice (%)", f"β₀ (patch {patch_size}, conn {connectivity})"]
    cells = []
    for metric in METRIC_NAMES:
        mean, std = report.aggregate[metric]
        scale = 1.0 if metric == "beta0" else 100.0
        cells.append(f"{mean * scale:.2f} ± {std * scale:.2f}")
    lines = [
        "| n | " + " | ".join(headers) + " |",
        "|---|" + "---|" * len(headers),
        f"| {report.n} | " + " | ".join(cells) + " |",
    ]
    return "\n".join(lines) + "\n"


def write_report(report, directory, patch_size=64, connectivity=DEFAULT_CONNECTIVITY):
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "per_image.csv"), "w", newline="") as fh:
        fh.write(per_image_csv(report))
    with open(os.path.join(directory, "aggregate.csv"), "w", newline="") as fh:
        fh.write(aggregate_csv(report, patch_size, connectivity))
    with open(os.path.join(directory, "aggregate.md"), "w") as fh:
        fh.write(markdown_table(report, patch_size, connectivity))


# ---------------------------------------------------------------- pipeline


@dataclass
class PipelineResult:
    before: MetricReport
    after: MetricReport

    @property
    def improvement(self):
        """Relative reduction of mean β₀, in percent; None if β₀ was already 0."""
        base = self.before.mean("beta0")
        if base <= 0:
            return None
        return relative_improvement(base, self.after.mean("beta0"))

    def summary(self):
        b, a = self.before.mean("beta0"), self.after.mean("beta0")
        text = f"mean β₀ {b:.2f} -> {a:.2f} (reduction of {b - a:.2f})"
        if self.improvement is not None:
            text += f"; {self.improvement:.1f}% improvement in connectivity"
        return text


def run_pipeline_masks(named_gts, fparams, rparams, patch_size=64,
                       connectivity=DEFAULT_CONNECTIVITY, threads=1, ddof=0):
    """Fragment every ground truth, repair it, and score both against the original."""

    def one(item):
        name, gt = item
        frag, _ = generate_breaks(gt, fparams)
        fixed, _ = repair_mask(frag, rparams)
        return (name, frag, gt), (name, fixed, gt)

    items = sorted(named_gts, key=lambda p: p[0])
    if not items:
        raise EmptyInputError("no ground-truth masks")
    with ThreadPoolExecutor(resolve_threads(threads)) as pool:
        done = list(pool.map(one, items))
    before = score_masks([d[0] for d in done], patch_size, connectivity, ddof)
    after = score_masks([d[1] for d in done], patch_size, connectivity, ddof)
    return PipelineResult(before, after)


def run_pipeline(gt_dir, fparams, rparams, patch_size=64,
                 connectivity=DEFAULT_CONNECTIVITY, threads=1, ddof=0):
    names = list_masks(gt_dir)
    if not names:
        raise EmptyInputError(f"no mask files in {gt_dir}")
    gts = [(n, read_mask(os.path.join(gt_dir, n))) for n in names]
    return run_pipeline_masks(gts, fparams, rparams, patch_size, connectivity, threads, ddof)
