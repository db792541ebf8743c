"""Dimensions and bases of the diagram spaces up to order 5."""

from wsforge.span_reduce import SpaceSpec, basis

for space in ("A", "Abar", "P"):
    dims = [basis(SpaceSpec(space, n)).dim for n in range(6)]
    print(f"{space:<5}", dims)

b = basis(SpaceSpec("Abar", 4))
print("\nbasis of Abar_4:")
for key in b.representatives:
    print(" ", key)
