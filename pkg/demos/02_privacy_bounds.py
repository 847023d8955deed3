"""The privacy side: what can an adversary monitoring curious nodes infer?

Prints the closed-form guarantees for the three regimes (standard push,
muting-after-send, and the parameterized middle), sweeps the epsilon/delta
trade-off of the optimal protocol, and cross-validates two key closed
forms against Monte Carlo simulation.
"""

import numpy as np

from mutegossip import (
    EventSpec,
    GossipConfig,
    estimate_event,
    estimate_source_disclosure,
    optimal_c,
    optimal_delta,
    param_c,
    param_delta_bound,
    param_delta_exact,
    source_disclosure_prob,
    spawn_stream,
)

N, F = 1000, 100
print(f"n={N}, f={F} curious ({F/N:.0%})\n")

print("delta at epsilon=0 and prediction-uncertainty c by regime:")
print(f"  standard push (s=1):   delta=1.0    c={param_c(1.0, F, N):.4f}")
print(f"  muting (s=0):          delta={optimal_delta(0, F, N):.4f} c={optimal_c(F, N):.4f}"
      f"  -> attack success cap {1/(1+optimal_c(F, N)):.4f}")
for s in (0.05, 0.1, 0.5):
    print(f"  parameterized s={s:<5} delta<={param_delta_bound(s, F, N, 1):.4f} "
          f"(exact {param_delta_exact(s, F, N):.4f}) c={param_c(s, F, N):.4f}")

print("\nepsilon/delta trade-off of the optimal (s=0) protocol:")
for eps in (0.0, 0.5, 1.0, 2.0, np.log(F + 1)):
    print(f"  eps={eps:5.2f}  delta={optimal_delta(eps, F, N):.5f}")
print(f"  (pure DP reached at eps = ln(f+1) = {np.log(F + 1):.3f})")

print("\nMonte Carlo cross-checks (200k trials):")
cfg = GossipConfig(n=N, f=F, s=0.0)
r = estimate_event(cfg, EventSpec.first_sender_is(0), 200_000, spawn_stream(3, 0))
print(f"  P(source is first observed sender | s=0) = {r.estimate:.4f} "
      f"+/- {r.ci_half_width:.4f}  vs closed form {(F + 1) / N:.4f}")
s = 0.5
r = estimate_source_disclosure(s, F, N, 200_000, spawn_stream(3, 1))
print(f"  P(source hits curious before muting | s={s}) = {r.estimate:.4f} "
      f"+/- {r.ci_half_width:.4f}  vs closed form {source_disclosure_prob(s, F, N):.4f}")
