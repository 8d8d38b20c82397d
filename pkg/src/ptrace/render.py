"""Diagram and figure output: Graphviz DOT for Int paths, matplotlib plots."""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .paracat import Path


def _q(s: str) -> str:
    return '"' + s.replace('"', r"\"") + '"'


def path_dot(p: Path, name: str = "composite") -> str:
    """DOT for the composite of an Int path.

    Arrows are boxes; positive wires run left to right, negative wires run
    back. The traced region (every box, with the fed-back negative wires)
    sits inside one dashed cluster.
    """
    objs = p.objects
    n = len(p)
    lines = [
        f"digraph {_q(name)} {{",
        "  rankdir=LR;",
        '  node [shape=box, fontname="Helvetica"];',
        '  edge [fontname="Helvetica", fontsize=10];',
        f'  in_plus [shape=plaintext, label={_q(f"A0+ ({objs[0].plus})")}];',
        f'  out_plus [shape=plaintext, label={_q(f"A{n}+ ({objs[-1].plus})")}];',
        f'  in_minus [shape=plaintext, label={_q(f"A{n}- ({objs[-1].minus})")}];',
        f'  out_minus [shape=plaintext, label={_q(f"A0- ({objs[0].minus})")}];',
    ]
    if n == 0:
        lines.append(f"  in_plus -> out_plus [label={_q('id')}];")
        lines.append(f"  in_minus -> out_minus [label={_q('id')}];")
        lines.append("}")
        return "\n".join(lines) + "\n"
    lines.append("  subgraph cluster_trace {")
    lines.append("    style=dashed;")
    lines.append(f"    label={_q('Tr over ' + ' ⊗ '.join(f'A{k}-' for k in range(n)))};")
    for k, f in enumerate(p.arrows):
        d, c = f.dom, f.cod
        label = f"p{k + 1}: ({d.plus},{d.minus}) → ({c.plus},{c.minus})"
        lines.append(f"    p{k + 1} [label={_q(label)}];")
    for k in range(1, n):
        lines.append(f"    p{k} -> p{k + 1} [label={_q(f'A{k}+')}];")
        lines.append(f"    p{k + 1} -> p{k} [label={_q(f'A{k}-')}, style=bold, constraint=false];")
    lines.append("  }")
    lines.append(f"  in_plus -> p1 [label={_q('A0+')}];")
    lines.append(f"  p{n} -> out_plus [label={_q(f'A{n}+')}];")
    lines.append(f"  in_minus -> p{n} [label={_q(f'A{n}-')}, constraint=false];")
    lines.append(f"  p1 -> out_minus [label={_q('A0-')}, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_partial_sums(sums: np.ndarray, out: str, title: str = "partial sums") -> None:
    """Entries of the partial sums and their successive increments on a log scale."""
    plt = _pyplot()
    horizon = sums.shape[0]
    n = np.arange(1, horizon + 1)
    flat = sums.reshape(horizon, -1)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    finite = flat[np.isfinite(flat)]
    # large swings of both signs read better as signed decades than on symlog
    squash = bool(finite.size) and np.abs(finite).max() > 1e3
    shown = np.sign(flat) * np.log10(1 + np.abs(flat)) if squash else flat
    for idx in range(flat.shape[1]):
        ax1.plot(n, shown[:, idx], lw=1.2, label=f"entry {idx}")
    ax1.axhline(0, color="0.6", lw=0.6)
    ax1.set_xlabel("terms")
    ax1.set_ylabel("sign · log10(1 + |partial sum|)" if squash else "partial sum")
    ax1.set_title(title)
    if flat.shape[1] <= 6 and flat.shape[1]:
        ax1.legend(fontsize=8)
    with np.errstate(invalid="ignore"):
        inc = np.abs(np.diff(flat, axis=0, prepend=0.0)).max(axis=1) if flat.size else np.zeros(horizon)
    inc = np.where(np.isfinite(inc) & (inc > 0), inc, np.nan)
    ax2.semilogy(n, inc, lw=1.2, color="tab:red")
    ax2.set_xlabel("terms")
    ax2.set_ylabel("largest increment")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)


def plot_suite(summary: Mapping[str, Mapping[str, int]], out: str, title: str = "axiom suite") -> None:
    """Stacked pass / violation / unstable counts per axiom."""
    plt = _pyplot()
    names = list(summary)
    x = np.arange(len(names))
    bottom = np.zeros(len(names))
    colors = {"pass": "tab:green", "violation": "tab:red", "unstable": "tab:gray"}
    fig, ax = plt.subplots(figsize=(8, 3.6))
    for verdict, color in colors.items():
        vals = np.array([summary[a].get(verdict, 0) for a in names], dtype=float)
        ax.bar(x, vals, bottom=bottom, color=color, label=verdict)
        bottom += vals
    ax.set_xticks(x)
    ax.set_xticklabels([a.replace("_", " ") for a in names], rotation=20)
    ax.set_ylabel("instances")
    ax.set_title(title)
    ax.set_ylim(0, max(1.0, float(bottom.max())) * 1.25)
    ax.legend(fontsize=8, ncol=3, loc="upper center")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
