"""Price the measured protocol: states consumed and simulation steps.

Each measurement consumes one fresh copy of the evolving state, so a run of
T/dt rounds with M observables at m shots each consumes mMT/dt states, and
re-preparing those copies costs MT^2 m / (2 dt^2) Hamiltonian-simulation
steps in total.  The table below prices a few configurations, ending with
the published chaotic-Lorenz ensemble, whose cost is the reason this package
emulates at desk scale.

Run:  python3 demos/cost_model.py
"""

from polyham import estimate_cost

ROWS = (
    ("unit example", 1, 1.0, 0.1, 10.0),
    ("logistic demo", 2, 25.0, 1e-3, 500.0),
    ("Lorenz desk scale", 26, 2400.0, 0.02, 2.0),
    ("Lorenz published", 26, 1.0, 1e-5, 1e10),
)

print(
    f"{'configuration':<20} {'M':>3} {'T':>7} {'dt':>8} {'m':>9} "
    f"{'measurements':>13} {'sim steps':>10}"
)
for name, pairs, t_total, dt, m in ROWS:
    report = estimate_cost(pairs, t_total, dt, m=m)
    print(
        f"{name:<20} {pairs:>3} {t_total:>7g} {dt:>8g} {m:>9g} "
        f"{report.measurements:>13.3e} {report.hamiltonian_steps:>10.3e}"
    )

report = estimate_cost(26, 1.0, 1e-5, epsilon=1e-10)
print(
    "\nthe accuracy form: epsilon = 1e-10 per measurement means m = 1/epsilon"
    f" = {1 / report.epsilon:g} shots,"
)
print(
    f"so one chaotic-Lorenz trajectory costs {report.measurements:.3e} "
    "measured state preparations."
)
print("A 300-trajectory ensemble multiplies that by 300.")
