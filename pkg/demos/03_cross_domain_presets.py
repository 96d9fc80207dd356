"""Named experiment presets and their reports.

Runs the two fastest presets and writes their plot-ready CSV files.
Run with ``python3 demos/03_cross_domain_presets.py [outdir]`` (about 10 s).
"""
# %%
import sys
from pathlib import Path

from xdomain_qsvm.harness import emit_plot_data, emit_report, read_plot_data, run_preset

outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
outdir.mkdir(exist_ok=True)

# %% [markdown]
# Train on psi_minus Werner states, test on phi_plus Horodecki states.

# %%
report = run_preset("xdomain_horodecki")
print(report["name"], report["selected"], report["metrics"])

# %% [markdown]
# Discord task: train on Bell-diagonal states with t in [-1, 0] and test on
# t in [0, 1]. Half of each set is constructed with zero discord.

# %%
disc = run_preset("discord_bd")
print(disc["name"], disc["selected"], disc["metrics"], disc["confusion"])

# %%
for rep in (report, disc):
    emit_report(rep, outdir / f"{rep['name']}.json")
    emit_plot_data(rep, outdir / f"{rep['name']}.csv")
rows = read_plot_data(outdir / "discord_bd.csv")
print(len(rows), "plot rows, first:", rows[0])
