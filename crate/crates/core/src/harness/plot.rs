use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Standalone matplotlib script plotting populations and the smallest
/// eigenvalue from a trajectory CSV.
pub fn plot_script(csv_path: &Path, title: &str) -> String {
    let csv = csv_path
        .display()
        .to_string()
        .replace('\\', "\\\\")
        .replace('"', "\\\"");
    let title = title.replace('"', "\\\"");
    format!(
        r#"#!/usr/bin/env python3
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{csv}"
with open(path, newline="") as f:
    rows = list(csv.DictReader(f))
t = [float(r["t"]) for r in rows]
levels = [c for c in rows[0] if c.startswith("rho_") and c.count("_") == 2 and c.split("_")[1] == c.split("_")[2]]

fig, (ax_pop, ax_min) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
for c in levels:
    j = c.split("_")[1]
    ax_pop.plot(t, [float(r[c]) for r in rows], label=f"level {{j}}")
ax_pop.set_ylabel("population")
ax_pop.legend()
ax_pop.set_title("{title}")
ax_min.plot(t, [float(r["min_eigenvalue"]) for r in rows], color="k")
ax_min.set_xlabel("t")
ax_min.set_ylabel("min eigenvalue")
fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=120)
print(out)
"#
    )
}

/// `traj.csv` → `traj.plot.py`.
pub fn plot_script_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("plot.py")
}

pub fn write_plot_script(csv_path: &Path, title: &str) -> Result<PathBuf> {
    let path = plot_script_path(csv_path);
    std::fs::write(&path, plot_script(csv_path, title)).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
