//! Generated plotting scripts. Figures are never rendered here; each script
//! reads the CSVs next to it and needs only Python with matplotlib.

use crate::experiments::Experiment;

pub const PLOT_FILE: &str = "plot.py";

const PRELUDE: &str = "\
import csv
import math
import sys
from pathlib import Path

import matplotlib
matplotlib.use(\"Agg\")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent


def load(name):
    with open(HERE / name, newline=\"\") as fh:
        return list(csv.DictReader(fh))


def col(rows, key):
    return [float(r[key]) if r[key] != \"\" else math.nan for r in rows]

";

fn body(which: Experiment) -> &'static str {
    match which {
        Experiment::KernelsTable => {
            "rows = [r for r in load(\"kernels_table.csv\") if r[\"error\"] == \"\"]
fig, ax = plt.subplots()
for eps in sorted({r[\"eps\"] for r in rows}, key=float):
    for t in sorted({r[\"t\"] for r in rows}, key=float):
        sub = [r for r in rows if r[\"eps\"] == eps and r[\"t\"] == t]
        ax.plot(col(sub, \"x_norm\"), col(sub, \"phi\"), marker=\"o\", label=f\"eps={eps}, t={t}\")
ax.set_xlabel(\"|x|\")
ax.set_ylabel(\"phi\")
ax.legend(fontsize=\"small\")
fig.savefig(HERE / \"kernels_phi.png\", dpi=150)
"
        }
        Experiment::RenormSweep => {
            "rows = load(\"renorm_paths.csv\")
eps_list = sorted({r[\"eps\"] for r in rows}, key=float, reverse=True)
fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
xs, ys = [], []
for eps in eps_list:
    sub = [r for r in rows if r[\"eps\"] == eps]
    tot = [v for v in col(sub, \"s_total\") if not math.isnan(v)]
    if tot and float(eps) > 0:
        xs.append(math.log(1 / float(eps)))
        ys.append(sum(tot) / len(tot))
    b.hist(col(sub, \"s_ren\"), bins=30, histtype=\"step\", label=f\"eps={eps}\")
a.plot(xs, ys, marker=\"o\")
a.set_xlabel(\"ln(1/eps)\")
a.set_ylabel(\"mean s_total\")
b.set_xlabel(\"s_ren\")
b.legend(fontsize=\"small\")
fig.savefig(HERE / \"renorm_sweep.png\", dpi=150)
"
        }
        Experiment::ItoCheck => {
            "rows = load(\"ito_check.csv\")
fig, ax = plt.subplots()
ax.loglog(col(rows, \"dt\"), col(rows, \"rms_residual\"), marker=\"o\", label=\"rms residual\")
ax.loglog(col(rows, \"dt\"), col(rows, \"rms_s_dd\"), marker=\"s\", label=\"rms s_dd\")
ax.set_xlabel(\"dt\")
ax.legend()
fig.savefig(HERE / \"ito_check.png\", dpi=150)
"
        }
        Experiment::Semigroup => {
            "rows = load(\"semigroup.csv\")
fig, ax = plt.subplots()
for t in sorted({r[\"t_horizon\"] for r in rows}, key=float):
    sub = [r for r in rows if r[\"t_horizon\"] == t and r[\"energy_proxy\"] != \"\"]
    sub = sorted(sub, key=lambda r: float(r[\"eps\"]) if float(r[\"eps\"]) > 0 else 1e-300)
    x = [max(float(r[\"eps\"]), 1e-12) for r in sub]
    ax.errorbar(x, col(sub, \"energy_proxy\"), yerr=col(sub, \"energy_proxy_se\"), marker=\"o\", label=f\"T={t}\")
ax.set_xscale(\"log\")
ax.set_xlabel(\"eps (0 drawn at 1e-12)\")
ax.set_ylabel(\"energy proxy\")
ax.legend()
fig.savefig(HERE / \"semigroup.png\", dpi=150)
"
        }
        Experiment::YukawaSweep => {
            "rows = load(\"yukawa_sweep.csv\")
fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
a.errorbar(col(rows, \"kappa\"), col(rows, \"gap\"), yerr=col(rows, \"gap_se\"), marker=\"o\")
a.axhline(0.0, color=\"grey\", lw=0.5)
a.set_xscale(\"log\")
a.set_xlabel(\"kappa\")
a.set_ylabel(\"scaled - reference\")
k = load(\"yukawa_kernel.csv\")
for kappa in sorted({r[\"kappa\"] for r in k}, key=float):
    sub = [r for r in k if r[\"kappa\"] == kappa]
    b.plot(col(sub, \"x_norm\"), col(sub, \"phi_x_exp_nu_x\"), marker=\"o\", label=f\"kappa={kappa}\")
if k:
    b.axhline(float(k[0][\"c_y_derived\"]), color=\"k\", ls=\"--\", label=\"1/(8 pi)\")
b.set_xlabel(\"|x|\")
b.legend(fontsize=\"small\")
fig.savefig(HERE / \"yukawa_sweep.png\", dpi=150)
"
        }
        Experiment::Kato => {
            "rows = load(\"kato_criterion.csv\")
mc = load(\"kato_mc.csv\")
fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
for pot in sorted({r[\"potential\"] for r in rows}):
    sub = [r for r in rows if r[\"potential\"] == pot]
    a.loglog(col(sub, \"r\"), col(sub, \"diagnostic\"), marker=\"o\", label=f\"{pot} ({sub[0]['verdict']})\")
    m = [r for r in mc if r[\"potential\"] == pot]
    b.plot(col(m, \"t\"), col(m, \"value\"), marker=\"o\", label=pot)
a.set_xlabel(\"r\")
a.legend(fontsize=\"small\")
b.set_xlabel(\"t\")
b.legend(fontsize=\"small\")
fig.savefig(HERE / \"kato.png\", dpi=150)
"
        }
    }
}

/// The full script for one experiment.
pub fn script(which: Experiment) -> String {
    format!("#!/usr/bin/env python3\n# {} plots; run from anywhere.\n{PRELUDE}{}\nif __name__ == \"__main__\":\n    sys.exit(0)\n", which.name(), body(which))
}
