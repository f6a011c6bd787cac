import sys, time, json
sys.path.insert(0, "tests")
from bluealg import *
from bluealg.scheme import _point_ident
from catalog import (cover, axes, f1, f1x, f1xy, idempotent_pair,
                     boolean_blueprint, field_two, zero_free_pair, catalog)
from bluealg.blueprint import cyclotomic, initial_blueprint, terminal_blueprint

t0 = time.time()

B = cover()
X = spec(B)
print("cover ids:", X.ids())
print("cover U_h1:", X.basis_opens["h1"])
print("cover U_h2:", X.basis_opens["h2"])
print("cover U_a1:", X.basis_opens["a1"])
print("cover specialization:", X.specialization)
print("cover complete:", X.complete.kind, X.complete.info())
print("cover undecided:", X.undecided)

# topology laws
one_open = X.open_of(B.one())
zero_open = X.open_of(B.zero())
print("U_1:", sorted(one_open), "U_0:", sorted(zero_open))
g = B.generator
gh = B.mul(g("h1"), g("h2"))
print("U_h1&U_h2 == U_h1h2:",
      (X.open_of(g("h1")) & X.open_of(g("h2"))) == X.open_of(gh))

# reduce_cover
Bxy = f1xy()
Xxy = spec(Bxy)
print("f1xy ids:", Xxy.ids())
els = [Bxy.generator("x"), Bxy.generator("y"),
       Bxy.mul(Bxy.generator("x"), Bxy.generator("y"))]
red = reduce_cover(Xxy, els)
print("f1xy reduce_cover renders:", [Bxy.render(e) for e in red])
red2 = reduce_cover(X, [g("h1"), g("h2"), g("a1")])
print("cover reduce_cover:", [B.render(e) for e in red2])

# v_closed / closure
I = ideal_generated(Bxy, [Bxy.generator("x")])
print("V(<x>):", v_closed(Xxy, I))
I2 = ideal_generated(Bxy, [Bxy.mul(Bxy.generator("x"), Bxy.generator("x"))])
from bluealg.congruence import radical
print("V(<x^2>):", v_closed(Xxy, I2), "V(rad):", v_closed(Xxy, radical(I2)))
print("closure (0):", closure_of(Xxy, "(0)"))
print("closure (x):", closure_of(Xxy, "(x)"))
try:
    v_closed(Xxy, congruence_generated(Bxy, []))
except NotAnIdeal as e:
    print("NotAnIdeal on congruence ok:", e)
try:
    v_closed(Xxy, ideal_generated(f1x(), [f1x().generator("x")]))
except NotAnIdeal as e:
    print("NotAnIdeal cross-carrier ok:", e)

# stalks / residue fields on f1x
Bx = f1x()
Xx = spec(Bx)
print("f1x ids:", Xx.ids(), "special:", Xx.specialization)
L0, i0 = stalk(Xx, "(0)")
Lx, ix = stalk(Xx, "(x)")
print("stalk (0) gens:", L0.pres.generators if hasattr(L0, "pres") else "?",
      "stalk (x) gens:", Lx.pres.generators)
print("stalk cached:", stalk(Xx, "(0)")[0] is L0)
K, pk = residue_field(Xx, "(x)")
print("kappa((x)) iso F1:", find_isomorphism(K, f1()) is not None,
      "is_blue_field:", is_blue_field(K).kind)
K0, pk0 = residue_field(Xx, "(0)")
print("kappa((0)) blue field:", is_blue_field(K0).kind, is_blue_field(K0).info())
print("kappa((0)) gens:", K0.pres.generators if hasattr(K0, "pres") else "?")

# gamma routes over the catalog
for label, C in catalog():
    rec = gamma_record(C)
    print("route %-6s complete=%-7s is_global=%s  %s" %
          (rec.route, rec.complete.kind, is_global(C).kind, label))

print("is_global(cover) info:", is_global(B).info())
rec = gamma_record(B)
print("cover extras:", [w.render(B) for w in rec.extras])
print("cover gamma gens:", rec.gamma.pres.generators)
G = rec.gamma
s = G.generator("s1")
print("s*sigma(h1)=sigma(a1):", G.eq(G.mul(s, rec.sigma(g("h1"))), rec.sigma(g("a1"))).kind
      if hasattr(G.eq(G.mul(s, rec.sigma(g("h1"))), rec.sigma(g("a1"))), "kind")
      else G.eq(G.mul(s, rec.sigma(g("h1"))), rec.sigma(g("a1"))))
print("gamma cached:", gamma_record(cover()) is rec)
print("spec cached:", spec(cover()) is X)
gamma_gamma = gamma_record(G)
print("gamma(gamma(cover)) route:", gamma_gamma.route, "extras:", gamma_gamma.extras)
print("is_global(gamma cover):", is_global(G).kind, is_global(G).info())

# initial / terminal
print("terminal spec points:", len(spec(terminal_blueprint()).points))
print("terminal is_global:", is_global(terminal_blueprint()).kind)
print("initial spec ids:", spec(initial_blueprint()).ids(),
      "route:", gamma_record(initial_blueprint()).route)

# sections
A = axes()
XA = spec(A)
print("axes ids:", XA.ids(), "U_x:", XA.basis_opens["x"], "U_y:", XA.basis_opens["y"])
S_empty = sections(XA, [])
print("sections(empty) elements:", len(S_empty.elements()))
t1 = time.time()
S_punct = sections(XA, ["(x)", "(y)"])
print("axes punctured sections elements:", len(S_punct.elements()),
      "%.2fs" % (time.time() - t1))
try:
    sections(XA, ["(zzz)"])
except KeyError as e:
    print("KeyError ok:", e)
try:
    sections(Xxy, ["(0)", "(x)", "(y)"])
except StalkNotFinite as e:
    print("StalkNotFinite ok:", e)
t1 = time.time()
S_uh1 = sections(X, X.basis_opens["h1"])
print("cover sections over U_h1: label=%r  %.2fs" % (S_uh1.label, time.time() - t1))

# verify_spec_iso on cover
t1 = time.time()
rep = verify_spec_iso(B)
print("verify cover verdict:", rep.verdict.kind, "points:", len(rep.point_map),
      "%.2fs" % (time.time() - t1))
print("as_dict keys:", sorted(rep.as_dict().keys()))

# induced morphisms
idm = induced_morphism(identity_morphism(Bx))
print("induced id point_map:", idm.point_map, idm.continuous.kind, idm.local.kind,
      [v.kind for _, _, v in idm.stalk_maps])
f_incl = BlueprintMorphism(f1(), Bx, (), name="incl")
print("validate incl:", validate_morphism(f_incl).kind)
idm2 = induced_morphism(f_incl)
print("induced incl point_map:", idm2.point_map, idm2.continuous.kind, idm2.local.kind)

# localization iso on cover h1
t1 = time.time()
locrep = localization_iso_check(B, g("h1"))
print("loc h1 open:", locrep.open_ids, "verdict:", locrep.verdict.kind,
      "%.2fs" % (time.time() - t1))
print("loc as_dict keys:", sorted(locrep.as_dict().keys()))
print("loc h=1:", localization_iso_check(B, B.one()).verdict.kind,
      len(localization_iso_check(B, B.one()).open_ids))
z = B.zero()
rep0 = localization_iso_check(B, z)
print("loc h=0:", rep0.verdict.kind, "open:", rep0.open_ids,
      "points:", rep0.point_map)

# disjoint union
U = disjoint_union([spec(f1()), spec(f1())])
print("union ids:", U.ids(), "complete:", U.complete.kind)
GU = union_sections(U)
print("union sections elements:", [GU.render(t) for t in GU.elements()])
zero_pair = GU.elements()[0]
els = list(GU.elements())
# find named tuples
def find(r):
    for t in els:
        if GU.render(t) == r:
            return t
    raise KeyError(r)
a = find("(0, 1)"); b = find("(1, 0)"); c = find("(0, 0)"); d = find("(1, 1)")
print("(0,1)+(1,0) == (0,0)+(1,1):", GU.holds([a, b], [c, d]).kind)
print("union not monoid with zero:", is_monoid_with_zero(GU).kind)
P2 = product((f1(), f1()))
print("union iso F1xF1:", find_isomorphism(GU, P2) is not None)

# fibre products
fa = BlueprintMorphism(f1(), f1x(), (), name="a")
fb = BlueprintMorphism(f1(), f1xy(), (), name="b")  # wrong: need F1[y]
from bluealg.kernel import MonoidPresentation
from bluealg.blueprint import from_monoid_with_zero
f1y = from_monoid_with_zero(MonoidPresentation(("y",), (), True), label="F1[y]")
fb = BlueprintMorphism(f1(), f1y, (), name="b")
t1 = time.time()
fp = affine_fibre_product(fa, fb)
print("fibre product ids:", fp.space.ids(), "%.2fs" % (time.time() - t1))
print("left points:", fp.left_points)
print("right points:", fp.right_points)
print("tensor gens:", fp.blueprint.pres.generators)
idx = identity_morphism(f1x())
fp2 = affine_fibre_product(idx, idx)
print("X x_X X ids:", fp2.space.ids())

# serialization
j1 = space_to_json(X)
j2 = space_to_json(spec(cover()))
print("json deterministic:", j1 == j2)
payload = json.loads(j1)
print("json keys:", sorted(payload.keys()))
print("json complete:", payload["complete"])
print("point entry:", payload["points"][0])
dot = space_to_dot(Xxy)
print(dot)
ju = space_to_json(U)
print("union json basis keys:", sorted(json.loads(ju)["basis_opens"].keys()))

print("total %.2fs" % (time.time() - t0))
