"""The constants behind the capacity-gap statements.

[2Z]/2 is Gaussian noise quantised to the half-integer lattice. Its entropy,
the cost of integer inputs and the additive constants add up to the claimed
gaps; the reference intermediate terms are set beside the recomputed ones.
"""

from wffd import appendix_table, entropy_bound_terms, gap_breakdown

for name, computed, reference in appendix_table():
    print(f"{name:34s} {computed:10.6f}   {'' if reference is None else reference}")

t = entropy_bound_terms()["tail"]
print(f"\ntail |i| >= 4: exact {t['computed']:.4f}, reference {t['reference']}, "
      f"reference integral {t['reference_integral_nats']:.4f} nats / {t['reference_integral_bits']:.4f} bits")

for mode in ("NCSI", "RCSI"):
    b = gap_breakdown(mode)
    print(f"\n{mode}: integer {b.integer_restriction:.4f} + peak {b.peak_restriction:.4f} "
          f"+ additive {b.additive_constant:g} -> {b.total_claimed:g}")
    for note in b.notes:
        print("  note:", note)
