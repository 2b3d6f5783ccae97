"""One-period propagators (Floquet maps) and their CPTP certificate.

Integrates the time-ordered propagator over one drive period with the
step-doubling convergence gate, then checks that the result is a quantum
channel: trace preserving, with a positive semidefinite Choi matrix of trace 2.

Run: python3 demos/02_floquet_map.py
"""
import numpy as np

from floqlind.propagator import cptp_report, floquet_map
from floqlind.qdyn import ModelSpec

for problem, e, w in (("I", 1.2, 0.6), ("II", 0.8, 1.5)):
    model = ModelSpec(problem, amplitude=e, omega=w, phase=np.pi / 3)
    fmap = floquet_map(model)
    rep = cptp_report(fmap)
    print(f"Problem {problem}, E={e}, omega={w}: {fmap.integrator_steps} RK4 steps, "
          f"step-doubling change {fmap.convergence_defect:.1e}")
    print(f"  trace defect {rep.trace_defect:.1e}, Choi trace defect {rep.choi_trace_defect:.1e}, "
          f"min Choi eigenvalue {rep.min_choi_eigenvalue:+.2e}, CPTP: {rep.ok()}")
