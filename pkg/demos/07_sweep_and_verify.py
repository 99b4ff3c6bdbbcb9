"""
A checkpointed sweep, then an independent check
===============================================

The same steps are available from the shell:

    zetagaps sweep --from-n 2 --to-n 2000 --route both --out demo
    zetagaps verify --data demo.csv
"""
import json
import tempfile
from pathlib import Path

from zetagaps.cli import verify_file
from zetagaps.sweep import Route, SweepConfig, run_sweep

out = Path(tempfile.mkdtemp()) / "demo"
cfg = SweepConfig(n_lo=2, n_hi=2000, route=Route.BOTH, checkpoint_every=500, out=str(out))

# stop part way, as if the process died, then resume from the checkpoint
run_sweep(cfg, stop_after=500)
print(json.loads(cfg.paths["checkpoint"].read_text())["last_n"])
summary, monitor = run_sweep(cfg)
print(json.dumps(summary.to_json()["violations"]), summary.max_g_prime, summary.argmax_n)
print("route agreement:", monitor.max_route_diff)

report = verify_file(cfg.paths["data"])
print(report["rows"], report["corrupted_rows"], report["reference_lines"])
