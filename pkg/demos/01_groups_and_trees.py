"""Tour of the group catalog and its trees.

Walks through word arithmetic in F2 and Z^2 * Z, the two tree models, axes of
loxodromic elements and closest-point projections.  Run from the repo root:

    python3 demos/01_groups_and_trees.py
"""

from treewalk import bass_serre_tree, cayley_tree, parse_entry

F2 = parse_entry("free:2")
a, b = F2.generators()
print("== free:2")
print("reduce a b b^-1 a^-1 :", F2.reduce(["a", "b", "B", "A"]).to_string())
w = F2.from_string("a5b5a5")
print("a5b5a5 has length", w.length, "and inverse", w.inverse().to_string())
print("ball sizes r=0..4:", [len(F2.ball(r)) for r in range(5)])

T = cayley_tree(F2)
x0 = T.basepoint
axis = T.axis_of(F2.from_string("ab"))
print("axis of ab around index 0:",
      [T.vertex_to_string(axis.vertex(i)) for i in range(-2, 4)])
v = T.orbit_point(F2.from_string("a3b2"))
print("projection of a3b2 onto the axis of ab:",
      T.vertex_to_string(T.project_to_axis(v, axis)))
print("translation lengths: tau(ab) =", T.translation_length(F2.from_string("ab")),
      " tau(aba^-1) =", T.translation_length(F2.from_string("abA")))

print("\n== freeproduct:Z2,Z  (generators x, y and t)")
G = parse_entry("freeproduct:Z2,Z")
g = G.from_string("x2y-1|t3")
print("normal form of x2y-1t3:", g.to_string(), "with length", g.length)
B = bass_serre_tree(G)
print("basepoint:", B.vertex_to_string(B.basepoint))
print("orbit point of x t y:", B.vertex_to_string(B.orbit_point(G.from_string("xty"))))
print("distance basepoint -> orbit(x t y):",
      B.distance(B.basepoint, B.orbit_point(G.from_string("xty"))))
xt = G.from_string("xt")
print("tau(xt) on the Bass-Serre tree:", B.translation_length(xt),
      "; x alone is elliptic: tau =", B.translation_length(G.from_string("x")))
axis = B.axis_of(xt)
print("axis of xt:", [B.vertex_to_string(axis.vertex(i)) for i in range(-2, 3)])
