"""Lindblad generators of the two driven qubit models.

Builds the time-dependent generator L(t) of Problem I (static Delta sigma_z / 2)
and Problem II (static Delta (sigma_z + sigma_y) / 2), both driven through
sigma_x with amplitude decay sigma_minus, and checks the two structural facts
every Lindbladian obeys: it annihilates the trace and it maps Hermitian
operators to Hermitian operators.

Run: python3 demos/01_generators.py
"""
import numpy as np

from floqlind.qdyn import (
    ModelSpec,
    generator_parts,
    hamiltonian_at,
    lindbladian_at,
    trace_annihilation_defect,
    unvec,
    vec,
)

for problem in ("I", "II"):
    model = ModelSpec(problem, amplitude=1.0, omega=2.0, phase=np.pi / 4)
    print(f"Problem {problem}: period T = {model.period:.4f}")
    print("  H(0) =\n", np.round(hamiltonian_at(model, 0.0), 4))
    static, drive = generator_parts(model)
    print(f"  L(t) = S + cos(omega t + phi) D with |S| = {np.linalg.norm(static):.3f}, |D| = {np.linalg.norm(drive):.3f}")

    l = lindbladian_at(model, 0.3)
    print(f"  trace annihilation defect: {trace_annihilation_defect(l):.1e}")
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    drho = unvec(l @ vec(rho))
    print(f"  d rho/dt Hermitian: {np.allclose(drho, drho.conj().T)}, trace {np.trace(drho).real:+.1e}")
