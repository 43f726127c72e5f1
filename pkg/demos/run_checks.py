"""Run a handful of identity checks and print the report summary."""
from klorth.verify import run_suite

rep = run_suite(["gen-func", "mu0-closed", "imk-identity", "mu2-closed-form", "wilson-3gamma"])
for r in rep.results:
    tag = r.status.name if r.variant is None else f"{r.status.name}:{r.variant}"
    print(f"{r.name:18s} {str(r.params):38s} rel={r.rel_err:.1e}  {tag}")
print(rep.summary, "ok" if rep.ok else "failed")
