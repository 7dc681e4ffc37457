#!/usr/bin/env python3
"""Regenerates the bundled synthetic dataset and scenario file.

The numbers are frozen in the repo; rerun this only if the DGP changes.
Quarterly frame 2008Q1..2014Q4 (T=28): an LGD-like risk parameter driven by
GDP growth, an interbank default rate and unemployment through an ADL(1)
recursion, plus four stress scenario paths for 2015Q1..2016Q4.
"""
import numpy as np

rng = np.random.default_rng(20080101)

T = 28
alpha, phi = 0.8, 0.5
b_gdp, b_idr = -0.05, 0.08
b_unemp = [0.06, 0.04, 0.03, 0.02]
sigma = 0.06

# Macro drivers: smooth AR(1) paths with a 2008-09 recession bump.
gdp = np.zeros(T)
idr = np.zeros(T)
unemp = np.zeros(T)
gdp[0], idr[0], unemp[0] = 0.2, 2.5, 6.0
for t in range(1, T):
    dip = -2.2 if 2 <= t <= 6 else 0.0
    gdp[t] = 0.6 * gdp[t - 1] + 0.4 * (0.6 + dip) + 0.25 * rng.standard_normal()
    idr[t] = 0.8 * idr[t - 1] + 0.2 * (2.0 - 0.3 * gdp[t - 1]) + 0.1 * rng.standard_normal()
    unemp[t] = 0.9 * unemp[t - 1] + 0.1 * (6.5 - 0.8 * gdp[t - 1]) + 0.12 * rng.standard_normal()

lgd = np.zeros(T)
lgd[0] = 3.4
for t in range(1, T):
    lag = sum(b_unemp[j] * unemp[t - j] for j in range(4) if t - j >= 0)
    lgd[t] = (alpha + phi * lgd[t - 1] + b_gdp * gdp[t] + b_idr * idr[t] + lag
              + sigma * rng.standard_normal())

def periods(y0, q0, n):
    out = []
    y, q = y0, q0
    for _ in range(n):
        out.append(f"{y}Q{q}")
        q += 1
        if q == 5:
            y, q = y + 1, 1
    return out

with open("lgd_synthetic.csv", "w") as f:
    f.write("period,LGD,GDP,IDR,Unemp\n")
    for p, row in zip(periods(2008, 1, T), zip(lgd, gdp, idr, unemp)):
        f.write(p + "," + ",".join(f"{v:.6f}" for v in row) + "\n")

# Scenario paths: deterministic smooth continuations, ordered by severity
# Local > Global > Baseline > Optimistic on every driver.
H = 8
offsets = {  # (gdp, idr, unemp)
    "Local": (-2.5, 1.8, 2.5),
    "Global": (-1.5, 1.0, 1.5),
    "Baseline": (0.0, 0.0, 0.0),
    "Optimistic": (1.0, -0.5, -1.0),
}
with open("scenarios_synthetic.csv", "w") as f:
    f.write("scenario,period,GDP,IDR,Unemp\n")
    for name, (og, oi, ou) in offsets.items():
        for h, p in enumerate(periods(2015, 1, H)):
            ramp = min(1.0, (h + 1) / 4.0)  # shock phases in over a year
            g = 0.6 + ramp * og
            i = idr[-1] + ramp * oi + 0.05 * h
            u = unemp[-1] + ramp * ou - 0.02 * h
            f.write(f"{name},{p},{g:.6f},{i:.6f},{u:.6f}\n")
print("wrote lgd_synthetic.csv, scenarios_synthetic.csv")
