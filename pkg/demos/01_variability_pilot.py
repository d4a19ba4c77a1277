# How large should a pilot study be if its job is to pin down the outcome's
# standard deviation before sizing the main study?
#
# Running example: a two-arm trial on a disability questionnaire whose score
# has sd ~ 4; the main study wants 80% power for a 1-point effect at
# alpha = 0.05.  We ask: how big a pilot keeps the chance of ending up with
# an underpowered main study (true power below 60%) under 20%?

from pilotplan import (
    EffectSpec,
    PowerBounds,
    TestDesign,
    pilot_n_approx,
    pilot_n_exact,
    plan_variance_pilot,
    variance_underpower_prob,
)

design = TestDesign(kind="two-sample", alpha=0.05)
effect = EffectSpec(effect=1.0, sigma=4.0)
bounds = PowerBounds(underpower_prob=0.20, underpower_threshold=0.60)

plan = plan_variance_pilot(effect, design, power_target=0.80, bounds=bounds)

print("main-study N per group whose power is the 60% threshold:", plan.main_n_under)
print("sd at which the 80%%-power design is exactly adequate:    %.3f" % plan.sigma_under)
print("pilot size keeping Pr(S below that sd) under 20%:", plan.pilot_n)

# The chance the pilot's sample sd falls below the threshold sd is a
# chi-square tail; at the planned size it sits just under the bound.
ratio = (plan.sigma_under / effect.sigma) ** 2
print("underpower probability at the planned pilot: %.4f"
      % variance_underpower_prob(plan.pilot_n, ratio))

# The variance ratio depends only on the quantile sums, not on sigma or the
# effect, so the same pilot sizes serve any design with these error rates:
print()
print("pilot ladder on the canonical ratio (30/20/10 percent bounds):",
      [pilot_n_approx(ratio, p) for p in (0.30, 0.20, 0.10)])

# The closed form above is an approximation.  The exact chi-square search
# agrees at the 20% bound but is cheaper at 30% and dearer at 10%:
print("exact chi-square search at the same bounds:                  ",
      [pilot_n_exact(ratio, p) for p in (0.30, 0.20, 0.10)])

# Guarding against *overpowered* (wastefully large) main studies works the
# same way from the other side; the final size is the larger of the two.
both = plan_variance_pilot(
    effect, design, power_target=0.80,
    bounds=PowerBounds(0.20, 0.60, overpower_prob=0.20, overpower_threshold=0.90))
print()
print("with an overpower guard too: under-side %d, over-side %d -> pilot %d"
      % (both.pilot_n_under, both.pilot_n_over, both.pilot_n))
