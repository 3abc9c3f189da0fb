"""SVG plots rendered from a scan CSV.

Strictly a formatting pass: values are read back from the CSV text, never
recomputed, so plots cannot disagree with the table.
"""

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def _read_csv(path):
    with open(path) as fh:
        reader = csv.DictReader(fh)
        rows = [{k: float(v) for k, v in row.items()} for row in reader]
        fields = reader.fieldnames
    return rows, fields


def plots_from_csv(csv_path, out_dir):
    """Write entropy_vs_L.svg and (when norms are positive) norms_loglog.svg."""
    rows, fields = _read_csv(csv_path)
    written = []
    alphas = sorted({row["alpha"] for row in rows})

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for alpha in alphas:
        sub = [r for r in rows if r["alpha"] == alpha]
        ls = [r["L"] for r in sub]
        ax.plot(ls, [r["S_unpert"] for r in sub], "o-",
                label=f"unperturbed, alpha={alpha:g}")
        ax.plot(ls, [r["S_pert"] for r in sub], "s--",
                label=f"perturbed, alpha={alpha:g}")
    ax.set_xlabel("L")
    ax.set_ylabel("S_alpha(L)")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    path = os.path.join(out_dir, "entropy_vs_L.svg")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    written.append(path)

    norm_cols = [f for f in fields if f.startswith(("cross_p", "diff_p"))]
    alpha0 = alphas[0]
    sub = [r for r in rows if r["alpha"] == alpha0]
    plotted = False
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for col in norm_cols:
        ls = [r["L"] for r in sub]
        ys = [r[col] for r in sub]
        if all(y > 0 for y in ys) and len(ys) >= 2:
            ax.loglog(ls, ys, "o-", label=col)
            plotted = True
    if plotted:
        ax.set_xlabel("L")
        ax.set_ylabel("norm^p")
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
        path = os.path.join(out_dir, "norms_loglog.svg")
        fig.savefig(path, format="svg", metadata={"Date": None})
        written.append(path)
    plt.close(fig)
    return written
