"""Log-scale BER curves as SVG."""
from matplotlib import rc_context
from matplotlib.figure import Figure

_MARKERS = ["o", "s", "^", "v", "D", "x", "+", "*"]


def plot_ber(reports, path, title=None):
    """Draws one BER curve per report on a log-y axis and saves it to ``path`` as SVG.

    Points without bit errors cannot be drawn on a log axis and are left out. Error bars show the
    95% interval.

    Returns:
        str: ``path``.
    """
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot(1, 1, 1)
    for i, report in enumerate(reports):
        points = [p for p in report.points if p.bit_errors > 0]
        if not points:
            continue
        snr = [p.snr_db for p in points]
        ber = [p.ber for p in points]
        # keep the lower bar above zero on the log axis
        lower = [min(p.ci95_halfwidth, p.ber * 0.999) for p in points]
        upper = [p.ci95_halfwidth for p in points]
        ax.errorbar(
            snr,
            ber,
            yerr=[lower, upper],
            marker=_MARKERS[i % len(_MARKERS)],
            linestyle="-",
            capsize=3,
            label=report.label,
        )
    ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", linestyle=":", linewidth=0.5)
    if title:
        ax.set_title(title)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="lower left")
    else:
        ax.set_ylim(1e-6, 1.0)
        ax.text(0.5, 0.5, "no bit errors observed", ha="center", transform=ax.transAxes)
    with rc_context({"svg.hashsalt": "minsumkd", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path
