"""End-to-end scenario: classify, predict, simulate, verdicts, files.

Equivalent to `trisre run coord1_dominant_kg --out ...`; the library API
returns the full report object.
"""
import json
import tempfile
from pathlib import Path

from trisre.scenarios import builtin_scenarios, emit_report, run_scenario

config = builtin_scenarios(quick=True)[0]
print("scenario:", config.name)
report = run_scenario(config, workers=2)

print("theorem case:", report.regime["theorem_case"])
print("prediction:", json.dumps(report.prediction, indent=2, sort_keys=True))
print("verdicts:")
for v in report.verdicts:
    mark = "pass" if v.passed else "FAIL"
    print(f"  [{mark}] {v.check_id}: predicted {v.predicted:.4g}, "
          f"estimated {v.estimated:.4g} ({v.band})")

out = Path(tempfile.mkdtemp(prefix="trisre_demo_"))
paths = emit_report(report, out)
print("wrote:", *[str(p) for p in paths])
