"""
The command line, end to end
============================

Every library step has a subcommand.  This script drives them in a
scratch directory: synthesize a corpus, profile it, mine, rank rules,
validate on a holdout and export the co-occurrence graph.
"""

# %%
import json
import subprocess
import sys
import tempfile
from pathlib import Path

work = Path(tempfile.mkdtemp(prefix="basketmine-"))


def basketmine(*args):
    cmd = [sys.executable, "-m", "basketmine", *map(str, args)]
    print("$ basketmine", " ".join(map(str, args)))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(proc.stdout + proc.stderr)
    return proc.returncode


# %%
# The synth spec is JSON; items are referred to by index.
spec = {
    "n_baskets": 5000,
    "n_items": 12,
    "base_probability": [0, 0.05] + [0.08] * 10,
    "planted": [{"antecedent": [0], "consequent": 1,
                 "target_confidence": 0.7, "antecedent_probability": 0.04}],
    "seed": 1,
}
(work / "spec.json").write_text(json.dumps(spec))
basketmine("synth", "--spec", work / "spec.json", "--out-dir", work)

# %%
# Settings can live in a ``key = value`` file; flags still win.
(work / "run.cfg").write_text(
    f"input = {work / 'corpus.csv'}\nmin_support = 30\nmax_len = 2\nvirtual = gender,dow\n"
)
for command in ("profile", "mine", "rules", "validate", "graph"):
    basketmine(command, "--config", work / "run.cfg", "--out-dir", work / command)

# %%
print((work / "rules" / "rules_top_lift.csv").read_text().splitlines()[:4])
