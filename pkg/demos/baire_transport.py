"""Move a map of Baire space to the line and watch where a few rationals land."""

from fractions import Fraction

from wadgelab.baire import baire_to_real, real_to_baire, transport

for x in (Fraction(-1), Fraction(3, 2), Fraction(-1, 3)):
    print(f"{x} -> {real_to_baire(x)} -> {baire_to_real(real_to_baire(x))}")

h = transport("shift(1)")
for x in (Fraction(5, 2), Fraction(7, 4), Fraction(-3, 2)):
    print(f"shift(1): {x} -> {h(x)}")
