"""Why the source must behave like everyone else.

Delayed-start gossip (source sends once, then goes permanently quiet while
standard push continues from the receiver) looks private, but the source's
special behavior is detectable: if the first observed sender never shows
up again, it probably was the source.  Against the muting protocol with
s=0 the same attack learns nothing beyond the baseline, because everyone
goes quiet after sending once.
"""

from mutegossip import (
    GossipConfig,
    SilenceAttackSpec,
    estimate_attack_precision,
    silence_window,
    spawn_stream,
)

TRIALS = 10000
print(f"silence attack, window r = ceil(ln(n)^2), {TRIALS} trials per point\n")
print(f"{'n':>6} {'r':>4} | {'delayed-start':>32} | {'muting s=0':>22}")
print(f"{'':>6} {'':>4} | {'prec|predicted':>15} {'abstain rate':>16} | {'prec|predicted':>22}")
for n in (2**8, 2**10, 2**12):
    f = round(0.1 * n)
    ds = estimate_attack_precision(
        GossipConfig(n=n, f=f, s=1.0, variant="delayed_start"),
        SilenceAttackSpec(),
        TRIALS,
        spawn_stream(8, n),
    )
    mute = estimate_attack_precision(
        GossipConfig(n=n, f=f, s=0.0), SilenceAttackSpec(), TRIALS, spawn_stream(8, n + 1)
    )
    print(
        f"{n:>6} {silence_window(n):>4} | {ds.precision_given_prediction.estimate:>15.4f} "
        f"{ds.abstain_rate:>16.3f} | {mute.precision_given_prediction.estimate:>22.4f}"
    )
print(
    "\nAgainst delayed start the attack beats the ~0.1 baseline (that lift is\n"
    "the leak, and it widens only slowly with n at this curious fraction);\n"
    "against muting gossip it sits exactly at the baseline, because there\n"
    "going quiet after one send is what every node does."
)
