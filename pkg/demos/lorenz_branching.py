"""Chaotic versus well-behaved Lorenz ensembles: entropy and branching.

Thirty noisy trajectories start from one initial condition.  For the chaotic
parameter set (beta = 8/3) the ensemble decoheres: the von Neumann entropy
of the trajectory mixture climbs past 10% of the 4-qubit maximum and the
branching time is finite.  The well-behaved set (beta = 10) at a hundred
times more measurements per unit time never branches in the same window,
and the trace distance to the deterministic run stays correlated with the
entropy throughout.

Run:  python3 demos/lorenz_branching.py        (about ten minutes)
"""

import numpy as np

from polyham import (
    MeasurementModel,
    SimulationConfig,
    build_artifact,
    diagnostics,
    run_ensemble,
    run_trajectory,
)
from polyham.systems import lorenz

C = 20.0
X0 = np.array([4.856, 7.291, 18.987])
DT = 0.02
T_FINAL = 2400.0
K = 30
STRIDE = 100
CASES = (("chaotic", 8.0 / 3.0, 100.0), ("well-behaved", 10.0, 1e4))

for name, beta, s in CASES:
    artifact = build_artifact(lorenz(sigma=10.0, rho=28.0, beta=beta), c=C)
    exact_config = SimulationConfig(
        dt=DT, t_final=T_FINAL, model=MeasurementModel(mode="exact"),
        record_stride=STRIDE,
    )
    reference = run_trajectory(artifact, X0, exact_config, seed=0)

    config = SimulationConfig(
        dt=DT,
        t_final=T_FINAL,
        model=MeasurementModel(mode="gaussian", m=s * DT, rng_seed=0),
        K=K,
        record_stride=STRIDE,
    )
    ensemble = run_ensemble(artifact, X0, config, base_seed=0)
    survivors = [member for member in ensemble if member.failure is None]
    series = diagnostics(survivors, reference)

    entropy = series.entropy
    distance = series.trace_distance
    # The correlation only means something once the ensemble actually
    # spreads; a never-branching run has entropy at float-dust scale.
    if entropy.max() > 1e-6 and distance.std() > 0:
        pearson = f"{float(np.corrcoef(entropy, distance)[0, 1]):.3f}"
    else:
        pearson = "n/a (no spread)"
    branch = "none" if series.branch_time is None else f"{series.branch_time:g}"

    print(f"\n{name} (beta = {beta:g}) at s = {s:g}:")
    print(f"  survivors: {len(survivors)} of {K}")
    print(f"  physical window: [0, {reference.physical_times[-1]:.2f}]")
    print(f"  S(0) = {entropy[0]:.1e}, max S = {entropy.max():.3f} "
          f"(threshold {0.1 * 4 * np.log(2):.3f})")
    print(f"  branch time (t'): {branch}")
    print(f"  entropy-error Pearson correlation: {pearson}")

    marks = np.linspace(0, len(series.times) - 1, 9).astype(int)
    print(f"  {'t_prime':>8} {'entropy':>9} {'trace dist':>11}")
    for i in marks:
        print(f"  {series.times[i]:8.0f} {entropy[i]:9.4f} {distance[i]:11.4f}")

print(
    "\nThe chaotic ensemble branches inside the window; past its noise"
    "\nthreshold the well-behaved ensemble stays on the deterministic track"
    "\nthe whole way."
)
