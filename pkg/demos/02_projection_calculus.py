"""The coset-projection calculus on a worked example.

For the germ a in F2 and the pair (1, a5 b5 a5), the family of cosets with
projection gap >= 3 consists of the base coset and its a5b5-translate, in
that order along the geodesic; the distance-formula sum bounds the tree
distance from below (up to the factor 2) and above (coarse Lipschitz).
"""

import json

from treewalk import ProjectionSystem, cayley_tree, parse_entry

F2 = parse_entry("free:2")
T = cayley_tree(F2)
system = ProjectionSystem(T, F2.from_string("a"), threshold=3)

o = F2.identity()
p = F2.from_string("a5b5a5")
chain = system.large_projections(o, p)
print("chain for (1, a5b5a5) at threshold 3:")
print(json.dumps(chain.to_json_dict(), indent=2))

total = system.distance_formula_sum(chain, o, p)
d = T.distance(T.orbit_point(o), T.orbit_point(p))
print(f"distance-formula sum = {total}, tree distance = {d} >= sum/2 = {total/2}")

print("\nat threshold 6 both overlaps (5) fall short:")
high = ProjectionSystem(T, F2.from_string("a"), threshold=6)
print("chain length:", len(high.large_projections(o, p)))

print("\nstrong Behrstock inequality, randomized (B = 0 on this catalog entry):")
violations, witnesses = system.behrstock_violations(5000, rng_seed=0)
print("violations over 5000 trials:", violations)

print("\nthe same counter doubles as a calibrator: on the Bass-Serre side the")
print("germ xt admits distinct cosets whose axes share one edge, so B = 0 is")
print("too small there while B = 1 is exact:")
from treewalk import bass_serre_tree

G = parse_entry("freeproduct:Z2,Z")
B0 = ProjectionSystem(bass_serre_tree(G), G.from_string("xt"), threshold=10)
v0, w0 = B0.behrstock_violations(5000, rng_seed=0)
B1 = ProjectionSystem(bass_serre_tree(G), G.from_string("xt"),
                      behrstock_constant=1, threshold=10)
v1, _ = B1.behrstock_violations(5000, rng_seed=0)
print(f"xt on Z2*Z: {v0} violations at B=0, {v1} at B=1")
if w0:
    print("sample witness at B=0:", w0[0])
