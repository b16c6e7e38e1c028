import csv
from collections import defaultdict
from pathlib import Path

from ecspade.cli import main
from ecspade.sim import DETECTOR_IDS


def pd_table(summary: Path, column: str = "pd@1e-2") -> str:
    acc = defaultdict(list)
    with open(summary, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            acc[(row["detector"], float(row["beta"]))].append(float(row[column]))
    betas = sorted({b for _, b in acc})
    names = [n for n in DETECTOR_IDS if any((n, b) in acc for b in betas)]
    lines = [f"{column:>18s} " + " ".join(f"{b:>6.2f}" for b in betas)]
    for n in names:
        vals = [sum(acc[n, b]) / len(acc[n, b]) for b in betas]
        lines.append(f"{n:>18s} " + " ".join(f"{v:6.3f}" for v in vals))
    return "\n".join(lines)


def reproduce(preset: str, extra: list) -> int:
    if "--out" not in extra:
        extra = [*extra, "--out", f"results/{preset}"]
    if "--format" not in extra:
        extra = [*extra, "--format", "both"]
    status = main(["-v", "run", "--preset", preset, *extra])
    if status == 0:
        out = Path(extra[extra.index("--out") + 1])
        if (out / "summary.csv").exists():
            print(pd_table(out / "summary.csv"))
    return status
