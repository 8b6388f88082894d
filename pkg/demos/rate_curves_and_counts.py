"""Walk through the rate families and the count estimates built on them.

Run with:  python3 demos/rate_curves_and_counts.py
"""

import numpy as np

import tarstop as ts


def main():
    print("=== Rate families ===")
    print("Each family models the chance of a relevant document at rank x,")
    print("declining as x grows.\n")

    families = [
        ts.RateParams(ts.RateKind.EXPONENTIAL, a=0.5, b=-0.01),
        ts.RateParams(ts.RateKind.HYPERBOLIC, a=0.5, b=0.5, c=0.01),
        ts.RateParams(ts.RateKind.POWER_LAW, a=0.5, b=-0.8),
        ts.RateParams(ts.RateKind.AP_PRIOR, a=100.0, n_total=5000),
    ]
    xs = np.array([1.0, 10.0, 100.0, 1000.0, 5000.0])
    header = "".join(f"  x={int(x):<6}" for x in xs)
    print(f"{'family':<12}{header}")
    for params in families:
        vals = np.asarray(ts.rate_value(params, xs))
        row = "".join(f"  {v:<8.4f}" for v in vals)
        print(f"{params.kind.value:<12}{row}")

    print("\n=== Interval mass: expected relevant documents in a rank range ===")
    print("A flat rate of 0.05 over ranks 10..100 gives 0.05 * 90 = 4.5:")
    flat = ts.RateParams(ts.RateKind.EXPONENTIAL, a=0.05, b=0.0)
    print("  mass(10, 100) =", ts.rate_integral(flat, 10, 100))

    print("\nA power-law rate x^-2 over the same ranks concentrates mass early:")
    steep = ts.RateParams(ts.RateKind.POWER_LAW, a=1.0, b=-2.0)
    mass = ts.rate_integral(steep, 10, 100)
    print("  mass(10, 100) =", round(mass, 6))

    print("\n=== From mass to counts ===")
    print("The count of relevant documents in the range is Poisson with that")
    print("mass as its mean. With mean 4.5:")
    for m in (0, 2, 4, 6, 9):
        print(f"  P(N = {m}) = {ts.poisson_pmf(4.5, m):.4f}")
    print("Smallest count reaching 95% cumulative probability:",
          ts.poisson_quantile(4.5, 0.95))
    print("With mean 0.09 the 95% bound is already",
          ts.poisson_quantile(0.09, 0.95), "document.")

    print("\n=== Remaining-count estimate from a fitted curve ===")
    print("Suppose ranks 1..150 are screened and the fit left noticeable")
    print("parameter variance. Estimates for the 4850 unscreened ranks:")
    curve = ts.RateCurve(
        ts.RateParams(ts.RateKind.EXPONENTIAL, a=0.5, b=-0.01),
        param_variance=(4e-3, 1.2e-6), nrmse=0.02, points_used=6,
    )
    fixed = ts.estimate_remaining_ip(curve, 151, 5000, 0.95)
    mixed = ts.estimate_remaining_cox(curve, 151, 5000, 0.95)
    print(f"fixed-mean estimate: mean {fixed.lambda_mass:.3f}, "
          f"95% upper bound {fixed.upper_bound}")
    print(f"uncertainty mixture: mean {mixed.lambda_mass:.3f}, "
          f"95% upper bound {mixed.upper_bound}")
    print("The mixture spreads the count distribution, so its bound is wider.")


if __name__ == "__main__":
    main()
