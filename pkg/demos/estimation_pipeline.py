"""Full estimation loop: simulate a transaction panel, recover the slope.

Generates annual buyer-firm transactions from the event simulation with a
known meeting-rate slope, ingests them like an external CSV and runs the
inflow-share regression, including the partial-coverage adjustment.
"""

import numpy as np

from frictional_matching import (
    FrictionParams,
    Grid,
    estimate_alpha,
    ingest_transactions,
    make_preference,
    synth_panel,
)

ALPHA_TRUE = 0.6
ell = make_preference("wrapped_gaussian", Grid(16), center=0.5, sd=0.12)
frictions = FrictionParams.from_r_f(0.5)

print(f"Simulating 8 markets x 8 years with alpha = {ALPHA_TRUE} ...")
df = synth_panel(ALPHA_TRUE, n_markets=8, years=8, frictions=frictions,
                 ell=ell, seed=5, n_agents=30_000, year_length=0.04)
print(f"{len(df)} transaction rows, "
      f"{df['buyer_id'].nunique()} distinct buyers\n")

panel = ingest_transactions(df)
print(f"single-supplier filter dropped {panel.dropped_multi_supplier} links")

for scope in ("pooled-FE", "per-market"):
    est = estimate_alpha(panel, scope=scope)
    print(f"{scope:>10}: alpha_hat = {est.alpha_hat:.3f} "
          f"(se {est.se:.3f}, n = {est.n_observations})")

print("\nPartial coverage: only 20% of relationships recorded, arrivals "
      "poached from unrecorded firms masquerade as new buyers ...")
df_cov = synth_panel(ALPHA_TRUE, n_markets=8, years=8, frictions=frictions,
                     ell=ell, seed=6, n_agents=30_000, year_length=0.08,
                     coverage=0.2)
panel_cov = ingest_transactions(df_cov)
naive = estimate_alpha(panel_cov, scope="pooled-FE", beta1=1.0)
fixed = estimate_alpha(panel_cov, scope="pooled-FE", beta1=0.2)
print(f"  unadjusted (beta1 = 1):    alpha_hat = {naive.alpha_hat:.3f}")
print(f"  adjusted   (beta1 = 0.2):  alpha_hat = {fixed.alpha_hat:.3f}  "
      f"(true {ALPHA_TRUE})")
