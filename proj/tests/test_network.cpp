#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "stk/corpus.hpp"
#include "stk/errors.hpp"
#include "stk/lift.hpp"
#include "stk/network.hpp"

using namespace stk;

namespace {

template <class F>
ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind;
  }
  REQUIRE_MESSAGE(false, "expected an error");
  return ErrorKind::validation_error;
}

int point_named(const FinSpace& x, const std::string& name) {
  for (int p = 0; p < x.size(); ++p)
    if (x.names[p] == name) return p;
  REQUIRE_MESSAGE(false, ("no point called " + name).c_str());
  return -1;
}

int fiber_over(const SpaceMap& e, const std::string& name) {
  return map_profile(e).fiber_degrees[point_named(e.target, name)];
}

SpaceMap point_inclusion(const FinSpace& x, const std::string& name) {
  FinSpace pt = point_space("z");
  return make_map(pt, x, {point_named(x, name)});
}

// same poset, every point renamed; used for determinism checks
SpaceMap relabel(const SpaceMap& g, const std::string& prefix) {
  auto rename = [&](const FinSpace& s) {
    std::vector<std::string> names;
    std::vector<std::vector<char>> leads(s.size(), std::vector<char>(s.size(), 0));
    for (int p = 0; p < s.size(); ++p) {
      names.push_back(prefix + s.names[p]);
      for (int r = 0; r < s.size(); ++r) leads[p][r] = s.leadsto(p, r) ? 1 : 0;
    }
    return space_from_order(names, leads);
  };
  std::vector<int> assign(g.source.size());
  for (int p = 0; p < g.source.size(); ++p) assign[p] = g(p);
  return make_map(rename(g.source), rename(g.target), assign);
}

}  // namespace

TEST_CASE("fibered power of the node curve") {
  Instance inst = builtin("NODE");
  const SpaceMap& g = inst.space_g();
  FiberedPower fp = fibered_power(g, 2);
  CHECK(fp.full.size() == 6);
  CHECK(fp.diagonal.size() == 4);
  CHECK(fp.distinct.size() == 2);
  // the two crossing tuples are closed points with no relation between them
  for (int p = 0; p < fp.distinct.size(); ++p)
    for (int r = 0; r < fp.distinct.size(); ++r)
      CHECK(fp.distinct.leadsto(p, r) == (p == r));
  CHECK(fp.proj.size() == 2);
  CHECK(fp.to_base.target == g.target);
  // coordinates recover the tuples
  int pr = point_named(fp.distinct, "(n1,n2)");
  CHECK(fp.proj[0](pr) == point_named(g.source, "n1"));
  CHECK(fp.proj[1](pr) == point_named(g.source, "n2"));
}

TEST_CASE("fibered power with one factor is the source itself") {
  Instance inst = builtin("NODE");
  FiberedPower fp = fibered_power(inst.space_g(), 1);
  CHECK(fp.distinct == inst.space("Y"));
  CHECK(fp.to_base == inst.space_g());
}

TEST_CASE("triple point: distinct triples are the six orderings") {
  Instance inst = builtin("TRIPLE");
  FiberedPower fp = fibered_power(inst.space_g(), 3);
  CHECK(fp.distinct.size() == 6);
  for (int p = 0; p < fp.distinct.size(); ++p)
    CHECK(fp.to_base.target.names[fp.to_base(p)] == "c");
}

TEST_CASE("coordinate swap is a symmetry of the distinct locus") {
  Instance inst = builtin("NODE");
  FiberedPower fp = fibered_power(inst.space_g(), 2);
  std::vector<int> sw(fp.distinct.size());
  for (int p = 0; p < fp.distinct.size(); ++p) {
    std::vector<int> rev = {fp.tuples[p][1], fp.tuples[p][0]};
    REQUIRE(fp.index_of.count(rev) == 1);
    sw[p] = fp.index_of.at(rev);
  }
  SpaceMap swap_map = make_map(fp.distinct, fp.distinct, sw);
  CHECK(map_profile(swap_map).injective);
  CHECK(compose(swap_map, fp.proj[0]) == fp.proj[1]);
  CHECK(compose(swap_map, fp.to_base) == fp.to_base);
}

TEST_CASE("repeated-coordinate locus must be clopen") {
  // a fold of a chain onto a point: pairs mix the coordinates' closures
  FinSpace y = validate_space({"a", "n"}, {{"a", "n"}});
  FinSpace x = point_space("x");
  SpaceMap g = make_map(y, x, {0, 0});
  CHECK(error_kind_of([&] { fibered_power(g, 2); }) == ErrorKind::verification_failure);
}

TEST_CASE("sheet multiplicity across the catalog") {
  CHECK(multiplicity(builtin("NODE").space_g()) == 2);
  CHECK(multiplicity(builtin("WHISKER").space_g()) == 1);
  CHECK(multiplicity(builtin("TWIN").space_g()) == 2);
  CHECK(multiplicity(builtin("TRIPLE").space_g()) == 3);
  CHECK(multiplicity(builtin("ETALE2").space_g()) == 2);
  SpaceMap empty = make_map(empty_space(), point_space("x"), {});
  CHECK(multiplicity(empty) == 0);
}

TEST_CASE("canonical network of the node curve") {
  Instance inst = builtin("NODE");
  Network net = canonical_network(inst.space_g());
  CHECK(net.labels == 2);
  CHECK(net.stage == 2);
  CHECK(net.nodes.size() == 4);
  CHECK(node_of(net, 0) == inst.space("X"));
  CHECK(node_of(net, 1) == inst.space("Y"));
  CHECK(node_of(net, 2) == inst.space("Y"));
  CHECK(node_of(net, 3).size() == 2);
  CHECK(net.edges.size() == 5);
  CHECK(edge_of(net, 1, 0) == inst.space_g());
  // top edges are the coordinate projections
  const SpaceMap& pr1 = edge_of(net, 3, 1);
  int cross = point_named(node_of(net, 3), "(n1,n2)");
  CHECK(node_of(net, 1).names[pr1(cross)] == "n1");
}

TEST_CASE("canonical network of a closed embedding has two nodes") {
  Instance inst = builtin("WHISKER");
  Network net = canonical_network(inst.space_g());
  CHECK(net.labels == 1);
  CHECK(node_of(net, 0) == inst.space("X"));
  CHECK(node_of(net, 1) == inst.space("Y"));
}

TEST_CASE("canonical network rejects bad inputs") {
  FinSpace y = validate_space({"a", "n"}, {{"a", "n"}});
  FinSpace x = point_space("x");
  SpaceMap fold = make_map(y, x, {0, 0});
  CHECK(error_kind_of([&] { canonical_network(fold); }) == ErrorKind::not_local_embedding);
  // an open point included in a chain is not proper
  FinSpace pt = point_space("a");
  FinSpace chain = validate_space({"a", "n"}, {{"a", "n"}});
  SpaceMap open_incl = make_map(pt, chain, {0});
  CHECK(error_kind_of([&] { canonical_network(open_incl); }) == ErrorKind::hypothesis_not_met);
}

TEST_CASE("network validation notices tampering") {
  Instance inst = builtin("NODE");
  Network net = canonical_network(inst.space_g());
  Network missing = net;
  missing.edges.erase({3, 1});
  CHECK(error_kind_of([&] { validate_network(missing); }) == ErrorKind::validation_error);
  // swapping the two projections is a symmetry, not tampering
  Network swapped = net;
  swapped.edges.at({3, 1}) = edge_of(net, 3, 2);
  swapped.edges.at({3, 2}) = edge_of(net, 3, 1);
  CHECK_NOTHROW(validate_network(swapped));
  // a constant edge to the base breaks functoriality through the sheets
  Network skewed = net;
  const FinSpace& top = node_of(net, 3);
  skewed.edges.at({3, 0}) = make_map(top, inst.space("X"),
                                     std::vector<int>(top.size(), point_named(inst.space("X"), "eta1")));
  CHECK(error_kind_of([&] { validate_network(skewed); }) == ErrorKind::verification_failure);
  Network early = net;
  early.stage = 1;  // now the non-injective edge to the base would need to be closed
  CHECK(error_kind_of([&] { validate_network(early); }) == ErrorKind::stage_invariant_broken);
}

TEST_CASE("gluing the two sheets of the node curve") {
  Instance inst = builtin("NODE");
  Network net = canonical_network(inst.space_g());
  GluedStack gs = glue_subnetwork(net, {1, 2});
  CHECK(gs.total.size() == 6);
  CHECK(gs.meet == 0);
  CHECK(gs.to_meet.target == inst.space("X"));
  MapProfile pm = map_profile(gs.to_meet);
  CHECK(pm.etale);
  CHECK(pm.surjective);
  CHECK(gs.piece.size() == 3);
  // both sheet pieces are closed embeddings into the glued double cover
  CHECK(map_profile(gs.piece.at(1)).closed_embedding);
  CHECK(map_profile(gs.piece.at(2)).closed_embedding);
}

TEST_CASE("gluing a single index returns that node") {
  Instance inst = builtin("NODE");
  Network net = canonical_network(inst.space_g());
  // the default meet of a single index is the index itself
  GluedStack self = glue_subnetwork(net, {1});
  CHECK(self.total == node_of(net, 1));
  CHECK(self.to_meet == identity_map(node_of(net, 1)));
  // against the base, the glued map is the original embedding
  GluedStack gs = glue_subnetwork(net, {1}, 0);
  CHECK(gs.total == node_of(net, 1));
  CHECK(gs.to_meet == inst.space_g());
  GluedStack top = glue_subnetwork(net, {3}, 0);
  CHECK(top.total == node_of(net, 3));
  CHECK(top.to_meet == edge_of(net, 3, 0));
}

TEST_CASE("redundant indices collapse before gluing") {
  Instance inst = builtin("NODE");
  Network net = canonical_network(inst.space_g());
  GluedStack gs = glue_subnetwork(net, {1, 3});  // {1,2} contains {1}
  CHECK(gs.total == node_of(net, 1));
}

TEST_CASE("gluing two pair nodes of the triple point") {
  Instance inst = builtin("TRIPLE");
  Network net = canonical_network(inst.space_g());
  GluedStack gs = glue_subnetwork(net, {3, 5}, 1);
  CHECK(gs.total.size() == 6);
  CHECK(gs.meet == 1);
  CHECK(gs.to_meet.target == inst.space("Y"));
  // two glued points over each doubled closed point, none over the branches
  CHECK(fiber_over(gs.to_meet, "n1") == 2);
  CHECK(fiber_over(gs.to_meet, "n2") == 2);
  CHECK(fiber_over(gs.to_meet, "n3") == 2);
  CHECK(fiber_over(gs.to_meet, "a1") == 0);
}

TEST_CASE("gluing rejects bad requests") {
  Instance inst = builtin("NODE");
  Network net = canonical_network(inst.space_g());
  CHECK(error_kind_of([&] { glue_subnetwork(net, {}); }) == ErrorKind::validation_error);
  CHECK(error_kind_of([&] { glue_subnetwork(net, {9}); }) == ErrorKind::validation_error);
  CHECK(error_kind_of([&] { glue_subnetwork(net, {1}, 2); }) == ErrorKind::validation_error);
}

TEST_CASE("glued stacks corepresent compatible families") {
  Instance node = builtin("NODE");
  Network nn = canonical_network(node.space_g());
  std::string why;
  CHECK(verify_glue_hom(nn, {1, 2}, 4, &why));
  CHECK(why.empty());
  Instance triple = builtin("TRIPLE");
  Network tn = canonical_network(triple.space_g());
  CHECK(verify_glue_hom(tn, {3, 5}, 4, &why));
  // gluing the one-label nodes asks for closed edges, so descend first
  Network tn2 = descend(tn).next;
  CHECK(verify_glue_hom(tn2, {1, 2, 4}, 3, &why));
}

TEST_CASE("descending the node network once lifts the base node") {
  Instance inst = builtin("NODE");
  Network net = canonical_network(inst.space_g());
  DescendStep st = descend(net);
  CHECK(st.next.stage == 1);
  CHECK(st.glued.at(0).size() == 6);
  CHECK(st.glued.at(1).size() == 2);  // the pair node over each sheet
  CHECK(st.glued.at(3).size() == 0);  // the full index has nothing above it
  CHECK(st.lifted.size() == 1);
  CHECK(st.lifted.count(0) == 1);
  const FinSpace& f = node_of(st.next, 0);
  CHECK(f.size() == 6);
  // double cover shape: four branch points each closing onto one node class
  int generic = 0, closed_pts = 0;
  for (int p = 0; p < f.size(); ++p) {
    if (f.closure_of(p).size() == 2) ++generic;
    if (f.closure_of(p).size() == 1) ++closed_pts;
  }
  CHECK(generic == 4);
  CHECK(closed_pts == 2);
  // sheets are unchanged at this stage
  CHECK(node_of(st.next, 1) == inst.space("Y"));
  CHECK(node_of(st.next, 2) == inst.space("Y"));
}

TEST_CASE("the second descent of the node network only verifies") {
  Instance inst = builtin("NODE");
  DescendStep st1 = descend(canonical_network(inst.space_g()));
  DescendStep st2 = descend(st1.next);
  CHECK(st2.next.stage == 0);
  CHECK(st2.lifted.empty());
  CHECK(node_of(st2.next, 0) == node_of(st1.next, 0));
  CHECK(error_kind_of([&] { descend(st2.next); }) == ErrorKind::validation_error);
}

TEST_CASE("descending the triple network doubles the nodes on each sheet") {
  Instance inst = builtin("TRIPLE");
  Network net = canonical_network(inst.space_g());
  DescendStep st = descend(net);
  CHECK(st.next.stage == 2);
  CHECK(st.lifted.size() == 3);
  for (int mask : {1, 2, 4}) {
    CHECK(st.glued.at(mask).size() == 6);
    CHECK(node_of(st.next, mask).size() == 9);
  }
  // base and pair nodes untouched at this stage
  CHECK(node_of(st.next, 0) == inst.space("X"));
  CHECK(node_of(st.next, 3).size() == 6);
}

TEST_CASE("a closed embedding's network descends to itself") {
  Instance inst = builtin("WHISKER");
  Network net = canonical_network(inst.space_g());
  DescendStep st = descend(net);
  CHECK(st.next.stage == 0);
  CHECK(st.lifted.empty());
  CHECK(node_of(st.next, 0) == inst.space("X"));
  CHECK(node_of(st.next, 1) == inst.space("Y"));
}

TEST_CASE("adjacent subnetworks are canonical networks of the edge") {
  // the sheet count of a top edge matches its own two-node network
  Instance inst = builtin("NODE");
  Network net = canonical_network(inst.space_g());
  const SpaceMap& pr = edge_of(net, 3, 1);
  Network sub = canonical_network(pr);
  CHECK(sub.labels == 1);
  CHECK(node_of(sub, 0) == node_of(net, 1));
  CHECK(node_of(sub, 1) == node_of(net, 3));
}

TEST_CASE("universal lift of the node curve") {
  Instance inst = builtin("NODE");
  UniversalLift ul = universal_lift(inst.space_g());
  CHECK(ul.F.size() == 6);
  CHECK(ul.steps == 2);
  CHECK(fiber_over(ul.e, "eta1") == 2);
  CHECK(fiber_over(ul.e, "eta2") == 2);
  CHECK(fiber_over(ul.e, "c") == 2);
  MapProfile pe = map_profile(ul.e);
  CHECK(pe.etale);
  CHECK(pe.surjective);
  CHECK(ul.S.size() == 6);  // the image is everything, so S fills the lift
  CHECK(map_profile(ul.s_embed).closed_embedding);
  const std::vector<std::string> want = {"etale",
                                         "universally-closed",
                                         "restriction-embedding",
                                         "restriction-gluing",
                                         "complement",
                                         "self-pullback",
                                         "identity-base-change",
                                         "oracle-agreement"};
  CHECK(ul.verified == want);
}

TEST_CASE("universal lift of the triple point") {
  Instance inst = builtin("TRIPLE");
  UniversalLift ul = universal_lift(inst.space_g());
  CHECK(ul.F.size() == 15);
  CHECK(ul.steps == 3);
  CHECK(fiber_over(ul.e, "c") == 6);
  CHECK(fiber_over(ul.e, "eta1") == 3);
  CHECK(fiber_over(ul.e, "eta2") == 3);
  CHECK(fiber_over(ul.e, "eta3") == 3);
  CHECK(map_profile(ul.e).etale);
}

TEST_CASE("universal lift of the twin sheets is not separated") {
  Instance inst = builtin("TWIN");
  UniversalLift ul = universal_lift(inst.space_g());
  CHECK(ul.F.size() == 5);
  CHECK(fiber_over(ul.e, "eta1") == 2);
  CHECK(fiber_over(ul.e, "eta2") == 1);
  CHECK(fiber_over(ul.e, "c") == 2);
  MapProfile pe = map_profile(ul.e);
  CHECK(pe.etale);
  CHECK_FALSE(pe.separated);
  // agrees with the one-step construction for maps étale on their image
  LiftResult direct = base_lift(inst.space_g());
  CHECK(find_isomorphism_over(ul.e, direct.e).has_value());
}

TEST_CASE("universal lift fixes closed embeddings and etale covers") {
  Instance wh = builtin("WHISKER");
  UniversalLift uw = universal_lift(wh.space_g());
  CHECK(uw.F.size() == 3);
  CHECK(std::count(uw.verified.begin(), uw.verified.end(), "closed-embedding-unchanged") == 1);
  CHECK(std::count(uw.verified.begin(), uw.verified.end(), "pushforward-identity") == 1);
  Instance et = builtin("ETALE2");
  UniversalLift ue = universal_lift(et.space_g());
  CHECK(ue.F.size() == 6);
  CHECK(std::count(ue.verified.begin(), ue.verified.end(), "etale-cover-source") == 1);
  CHECK(find_isomorphism_over(ue.e, et.space_g()).has_value());
}

TEST_CASE("universal lift keeps loose base points") {
  Instance inst = builtin("NODEPLUS");
  UniversalLift ul = universal_lift(inst.space_g());
  CHECK(ul.F.size() == 7);
  CHECK(fiber_over(ul.e, "xi") == 1);
  CHECK(fiber_over(ul.e, "c") == 2);
  CHECK(ul.F.size() - ul.S.size() == 1);
}

TEST_CASE("universal lift as a lift record") {
  Instance inst = builtin("NODE");
  const SpaceMap& g = inst.space_g();
  LiftResult lr = universal_lift_result(g);
  CHECK(lr.F.size() == 6);
  CHECK(map_profile(lr.i).closed_embedding);
  CHECK(compose(lr.i, lr.e) == g);
  CHECK(lr.image_pullback.total.size() == 6);
  MapProfile pp = map_profile(lr.phi);
  CHECK(pp.injective);
  CHECK(pp.surjective);
}

TEST_CASE("lift identities hold with the network construction plugged in") {
  // chain: doubled node sitting inside one sheet of the node curve
  Instance inst = builtin("NODE");
  const SpaceMap& g = inst.space_g();
  const FinSpace& y = inst.space("Y");
  FinSpace z = validate_space({"m1", "m2"}, {});
  SpaceMap h = make_map(z, y, {point_named(y, "n1"), point_named(y, "n2")});
  LiftFn lift = [](const SpaceMap& m) { return universal_lift_result(m); };
  IdentityReport it = check_iterated(h, g, lift);
  CHECK(it.holds);
  // branches crossing only at the node: product gluing over the chain
  Instance tw = builtin("TWIN");
  const FinSpace& ty = tw.space("Y");
  const FinSpace& tx = tw.space("X");
  Subspace b1 = subspace(ty, {point_named(ty, "a1"), point_named(ty, "n1")});
  Subspace b2 = subspace(ty, {point_named(ty, "a2"), point_named(ty, "n2")});
  SpaceMap g1 = compose(b1.incl, tw.space_g());
  SpaceMap g2 = compose(b2.incl, tw.space_g());
  (void)tx;
  IdentityReport pg = check_product_gluing(g1, g2, lift);
  CHECK(pg.holds);
}

TEST_CASE("base change to a point under the node") {
  Instance inst = builtin("NODE");
  const SpaceMap& g = inst.space_g();
  SpaceMap u = point_inclusion(inst.space("X"), "c");
  NetworkComparison rep = base_change_network(g, u);
  CHECK(rep.fresh.labels == 2);
  CHECK(rep.Fp.size() == 2);
  for (int p = 0; p < rep.Fp.size(); ++p)
    CHECK(rep.Fp.closure_of(p).size() == 1);  // two reduced points
  const std::vector<std::string> want = {"network-pullback", "lift-base-change"};
  CHECK(rep.verified == want);
}

TEST_CASE("base change along the identity changes nothing") {
  Instance inst = builtin("TWIN");
  const SpaceMap& g = inst.space_g();
  NetworkComparison rep = base_change_network(g, identity_map(inst.space("X")));
  CHECK(rep.Fp.size() == 5);
  CHECK(find_isomorphism_over(rep.ep, universal_lift(g).e).has_value());
}

TEST_CASE("base change to one branch of the node") {
  Instance inst = builtin("NODE");
  const FinSpace& x = inst.space("X");
  PointSet branch = {point_named(x, "eta1"), point_named(x, "c")};
  Subspace sub = subspace(x, x.closure_set(branch));
  NetworkComparison rep = base_change_network(inst.space_g(), sub.incl);
  CHECK(rep.Fp.size() == 4);
  CHECK(rep.fresh.labels == 2);
}

TEST_CASE("base change away from the image leaves a bare point") {
  Instance inst = builtin("TWIN");
  SpaceMap u = point_inclusion(inst.space("X"), "eta2");
  NetworkComparison rep = base_change_network(inst.space_g(), u);
  CHECK(rep.fresh.labels == 0);  // the pulled-back source is empty
  CHECK(rep.pulled.labels == 2);
  CHECK(rep.Fp.size() == 1);
}

TEST_CASE("base change wants a map into the base") {
  Instance inst = builtin("NODE");
  SpaceMap u = point_inclusion(builtin("TRIPLE").space("X"), "c");
  CHECK(error_kind_of([&] { base_change_network(inst.space_g(), u); }) ==
        ErrorKind::target_mismatch);
}

TEST_CASE("crossing branches: product and union lifts disagree") {
  Instance inst = builtin("NODE");
  const FinSpace& y = inst.space("Y");
  Subspace b1 = subspace(y, {point_named(y, "a1"), point_named(y, "n1")});
  Subspace b2 = subspace(y, {point_named(y, "a2"), point_named(y, "n2")});
  SpaceMap g1 = compose(b1.incl, inst.space_g());
  SpaceMap g2 = compose(b2.incl, inst.space_g());
  ProductComparison rep = product_network(g1, g2);
  CHECK(rep.product_target.size() == 3);
  CHECK(rep.union_target.size() == 6);
  CHECK_FALSE(rep.agree);
  CHECK(rep.detail.find("3") != std::string::npos);
  CHECK(rep.detail.find("6") != std::string::npos);
  CHECK(rep.combined.labels == 2);
}

TEST_CASE("disjoint closed points: product and union lifts agree") {
  Instance inst = builtin("NODEPLUS");
  const FinSpace& x = inst.space("X");
  FinSpace w1 = point_space("w1");
  FinSpace w2 = point_space("w2");
  SpaceMap f1 = make_map(w1, x, {point_named(x, "c")});
  SpaceMap f2 = make_map(w2, x, {point_named(x, "xi")});
  ProductComparison rep = product_network(f1, f2);
  CHECK(rep.agree);
  CHECK(rep.product_target.size() == 4);
  CHECK(rep.union_target.size() == 4);
}

TEST_CASE("an extra point with disjoint image still reshapes the union lift") {
  // the union carries its own degree profile: the two routes disagree
  // honestly even though the images only meet in the empty set
  Instance inst = builtin("NODEPLUS");
  const FinSpace& x = inst.space("X");
  FinSpace w = point_space("w");
  SpaceMap f = make_map(w, x, {point_named(x, "xi")});
  ProductComparison rep = product_network(inst.space_g(), f);
  CHECK_FALSE(rep.agree);
  CHECK(rep.product_target.size() == 7);
  CHECK(rep.union_target.size() == 8);
}

TEST_CASE("suitable cover of the node curve from its own lift") {
  Instance inst = builtin("NODE");
  SuitableCover sc = suitable_cover(inst.space_g());
  CHECK(sc.U.size() == 6);
  CHECK(sc.sheets.size() == 2);
  CHECK(sc.sheets[0].size() == 4);
  CHECK(sc.sheets[1].size() == 4);
  CHECK(set_intersect(sc.sheets[0], sc.sheets[1]).size() == 2);
  CHECK(sc.strata.size() == 2);
  CHECK(sc.strata[0].size() == 4);  // everything
  CHECK(sc.strata[1].size() == 2);  // the doubled closed points
  REQUIRE(sc.meets.size() == 2);
  CHECK(sc.meets[1].size() == 2);
  CHECK(sc.sections[0].size() == 1);
  CHECK(sc.sections[1].size() == 1);
  CHECK(sc.verified.size() == 4);
}

TEST_CASE("suitable cover of a closed embedding is the base itself") {
  Instance inst = builtin("WHISKER");
  SuitableCover sc = suitable_cover(inst.space_g());
  CHECK(sc.U.size() == 3);
  CHECK(sc.sheets.size() == 1);
  CHECK(sc.sheets[0].size() == 2);
}

TEST_CASE("twin sheets share one cover curve with two sections") {
  Instance inst = builtin("TWIN");
  SuitableCover sc = suitable_cover(inst.space_g());
  CHECK(sc.U.size() == 5);
  CHECK(sc.sheets.size() == 1);
  CHECK(sc.sheets[0].size() == 4);
  CHECK(sc.sections[0].size() == 2);
}

TEST_CASE("triple point cover carries three sheet curves") {
  Instance inst = builtin("TRIPLE");
  SuitableCover sc = suitable_cover(inst.space_g());
  CHECK(sc.U.size() == 15);
  CHECK(sc.sheets.size() == 3);
  CHECK(sc.verified.size() == 4);
}

TEST_CASE("the base itself is not a suitable cover of the node") {
  Instance inst = builtin("NODE");
  CHECK(error_kind_of([&] {
          cover_from_atlas(inst.space_g(), identity_map(inst.space("X")));
        }) == ErrorKind::cover_not_suitable);
  // and a non-cover atlas is refused up front
  Instance wh = builtin("WHISKER");
  CHECK(error_kind_of([&] {
          cover_from_atlas(inst.space_g(), wh.space_g());
        }) == ErrorKind::cover_not_suitable);
}

TEST_CASE("rebuilding the node network from its suitable cover") {
  Instance inst = builtin("NODE");
  const SpaceMap& g = inst.space_g();
  SuitableCover sc = suitable_cover(g);
  Network net = network_from_cover(g, sc);
  CHECK(net.labels == 2);
  CHECK(node_of(net, 0) == inst.space("X"));
  CHECK(node_of(net, 1).size() == 4);
  CHECK(node_of(net, 2).size() == 4);
  CHECK(node_of(net, 3).size() == 2);
}

TEST_CASE("rebuilding a closed embedding network from its cover") {
  Instance inst = builtin("WHISKER");
  const SpaceMap& g = inst.space_g();
  Network net = network_from_cover(g, suitable_cover(g));
  CHECK(net.labels == 1);
  CHECK(node_of(net, 1).size() == 2);
}

TEST_CASE("a duplicated cover is pruned before rebuilding") {
  Instance inst = builtin("NODE");
  const SpaceMap& g = inst.space_g();
  UniversalLift ul = universal_lift(g);
  DisjointUnion du = disjoint_union(ul.F, ul.F);
  std::vector<int> assign(du.total.size());
  for (int p = 0; p < ul.F.size(); ++p) {
    assign[du.in1(p)] = ul.e(p);
    assign[du.in2(p)] = ul.e(p);
  }
  SpaceMap atlas = make_map(du.total, inst.space("X"), assign);
  SuitableCover sc = cover_from_atlas(g, atlas);
  CHECK(sc.U.size() == 12);
  CHECK(sc.sheets.size() == 4);
  Network net = network_from_cover(g, sc);
  CHECK(net.labels == 2);
  CHECK(node_of(net, 3).size() == 2);
}

TEST_CASE("folded sheets do not present a network directly") {
  Instance inst = builtin("TWIN");
  const SpaceMap& g = inst.space_g();
  SuitableCover sc = suitable_cover(g);
  CHECK(error_kind_of([&] { network_from_cover(g, sc); }) == ErrorKind::hypothesis_not_met);
}

TEST_CASE("constructions are stable under renaming every point") {
  Instance inst = builtin("NODE");
  SpaceMap zg = relabel(inst.space_g(), "z_");
  UniversalLift a = universal_lift(inst.space_g());
  UniversalLift b = universal_lift(zg);
  CHECK(a.F.size() == b.F.size());
  CHECK(find_isomorphism(a.F, b.F).has_value());
  Network na = canonical_network(inst.space_g());
  Network nb = canonical_network(zg);
  for (const auto& [idx, sp] : na.nodes) CHECK(sp.size() == node_of(nb, idx).size());
}
