# Sizing a pilot whose job is to pin down the *effect size* is a different
# (and harder) problem than pinning down the sd: the answer scales with
# 1/effect^2, so vague effects need big pilots.
#
# Example: two-arm comparison, prior effect 2 on an outcome with known sd 4
# (a medium effect size of 0.5).  Bound: less than a 30% chance that the main
# study, sized from the pilot's estimate, has true power below 60%.

from pilotplan import (
    EffectSpec,
    PowerBounds,
    TestDesign,
    arcsine_effect,
    main_sample_size,
    plan_effect_pilot,
)

design = TestDesign(kind="two-sample", alpha=0.05)
bounds = PowerBounds(underpower_prob=0.30, underpower_threshold=0.60)

plan = plan_effect_pilot(mu0=2.0, sigma=4.0, design=design,
                         power_target=0.80, bounds=bounds)
print("main-study N per group at the 60% threshold:", plan.main_n_under)
print("effect at which the 80%%-power design is adequate: %.3f (effect size %.3f)"
      % (plan.mu_under, plan.mu_under / plan.sigma))
print("pilot size per group:", plan.pilot_n)

# Only the effect size matters: (2, 4) and (0.5, 1) give the same plan.
reduced = plan_effect_pilot(0.5, 1.0, design, 0.80, bounds)
assert reduced.pilot_n == plan.pilot_n

# How the pilot compares with the main study it serves, across effect sizes:
print()
print("effect  main-N  pilot@30%  pilot@35%")
for eff in (0.2, 0.5, 0.8):
    main_n = main_sample_size(EffectSpec(eff), design, 0.80)
    half = plan_effect_pilot(eff, 1.0, design, 0.80, bounds).pilot_n
    quarter = plan_effect_pilot(
        eff, 1.0, design, 0.80,
        PowerBounds(0.35, 0.60)).pilot_n
    print(f"  {eff:4.1f}  {main_n:6d}  {half:9d}  {quarter:9d}")
# At the 30% bound the pilot runs about half the main study; at 35% about a
# quarter.  Tighter bounds quickly need pilots *larger* than the main study,
# which is the core difficulty of effect-sized pilots.

# Proportions fit the same machinery through the variance-stabilizing
# arcsine transform: dropping a risk from 50% to 40% is a 0.2014 effect on
# the unit-sd scale.
spec = arcsine_effect(0.5, 0.4)
print()
print("arcsine effect for 50%% -> 40%%: %.4f" % spec.effect)
fall = plan_effect_pilot(spec.effect, spec.sigma, design, 0.80, bounds)
print("pilot per group to quantify that intervention effect:", fall.pilot_n)
print("(about half of the %d per group the main study itself needs)"
      % main_sample_size(spec, design, 0.80))
