#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "stk/corpus.hpp"
#include "stk/errors.hpp"
#include "stk/lift.hpp"

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

// The one-point probe sitting at a named point of x.
SpaceMap point_probe(const FinSpace& x, const std::string& name) {
  FinSpace pt = point_space("z");
  return make_map(pt, x, {point_named(x, name)});
}

SpaceMap reversed_relabel(const SpaceMap& g) {
  const FinSpace& y = g.source;
  const int n = y.size();
  std::vector<std::string> names(y.names.rbegin(), y.names.rend());
  std::vector<std::vector<char>> leads(n, std::vector<char>(n, 0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) leads[a][b] = y.leads[n - 1 - a][n - 1 - b];
  std::vector<int> assign(n);
  for (int a = 0; a < n; ++a) assign[a] = g(n - 1 - a);
  return make_map(space_from_order(std::move(names), std::move(leads)), g.target,
                  std::move(assign));
}

std::vector<int> sorted_fibers(const SpaceMap& e) {
  auto f = map_profile(e).fiber_degrees;
  std::sort(f.begin(), f.end());
  return f;
}

}  // namespace

TEST_CASE("closed embedding lifts isomorphically to the base") {
  auto g = builtin("WHISKER").space_g();
  LiftResult lift = base_lift(g);
  CHECK(lift.F.size() == 3);
  CHECK(find_isomorphism_over(lift.e, identity_map(g.target)).has_value());
  IdentityReport rep = check_closed_target(g);
  CHECK(rep.holds);
  CHECK(rep.key == "lift.closed-embedding-identity");
}

TEST_CASE("etale proper cover of a connected base lifts to the source") {
  auto g = builtin("ETALE2").space_g();
  LiftResult lift = base_lift(g);
  CHECK(lift.F.size() == g.source.size());  // nothing outside the image
  CHECK(find_isomorphism_over(lift.e, g).has_value());
  IdentityReport rep = check_etale_cover(g);
  CHECK(rep.holds);
  CHECK(rep.key == "lift.etale-cover-identity");
}

TEST_CASE("folded sheets lift with the complement glued along closures") {
  auto inst = builtin("TWIN");
  auto g = inst.space_g();
  LiftResult lift = base_lift(g);
  CHECK(lift.F.size() == 5);
  CHECK(std::to_string(lift.F.size()) == inst.expect_value("lift.points"));
  CHECK(fiber_over(lift.e, "eta1") == 2);
  CHECK(fiber_over(lift.e, "eta2") == 1);
  CHECK(fiber_over(lift.e, "c") == 2);
  // the stray branch point closes down onto both folded closed points, so
  // the lift map is etale and universally closed but not separated
  CHECK_FALSE(map_profile(lift.e).separated);
  PointSet cl = lift.F.closure_of(point_named(lift.F, "eta2"));
  std::vector<std::string> names;
  for (int p : cl) names.push_back(lift.F.names[p]);
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"eta2", "n1", "n2"});
}

TEST_CASE("maps with branch points are rejected") {
  CHECK(error_kind_of([] { base_lift(builtin("NODE").space_g()); }) ==
        ErrorKind::not_etale_on_image);
  CHECK(error_kind_of([] { base_lift(builtin("NODEPLUS").space_g()); }) ==
        ErrorKind::not_etale_on_image);
}

TEST_CASE("every certificate is re-verified and recorded") {
  LiftResult lift = base_lift(builtin("TWIN").space_g());
  std::vector<std::string> want = {"factorization",
                                   "etale",
                                   "universally-closed",
                                   "surjective",
                                   "closed-embedding",
                                   "fiber-degrees",
                                   "image-pullback-onto-source",
                                   "image-pullback-covers-source",
                                   "image-pullback",
                                   "triangles",
                                   "complement"};
  CHECK(lift.verified == want);
}

TEST_CASE("the lift is unique up to a unique isomorphism") {
  for (const char* name : {"WHISKER", "TWIN", "ETALE2"}) {
    IdentityReport rep = check_uniqueness(builtin(name).space_g());
    CHECK_MESSAGE(rep.holds, name, ": ", rep.detail);
  }
}

TEST_CASE("maps into the lift correspond to sections over the image") {
  for (const char* name : {"WHISKER", "TWIN", "ETALE2"}) {
    auto g = builtin(name).space_g();
    for (const FinSpace& t : all_posets_up_to(3))
      for (const SpaceMap& alpha : all_maps(t, g.target)) {
        IdentityReport rep = check_sections(g, alpha);
        CHECK_MESSAGE(rep.holds, name, ": ", rep.detail);
      }
  }
}

TEST_CASE("designated section counts") {
  auto twin = builtin("TWIN").space_g();
  CHECK(section_correspondence(twin, point_probe(twin.target, "c")).homs.size() == 2);
  CHECK(section_correspondence(twin, identity_map(twin.target)).homs.size() == 2);

  auto whisker = builtin("WHISKER").space_g();
  for (const FinSpace& t : all_posets_up_to(2))
    for (const SpaceMap& alpha : all_maps(t, whisker.target))
      CHECK(section_correspondence(whisker, alpha).homs.size() == 1);

  auto etale2 = builtin("ETALE2").space_g();
  CHECK(section_correspondence(etale2, point_probe(etale2.target, "c")).homs.size() == 2);
  CHECK(section_correspondence(etale2, identity_map(etale2.target)).homs.size() == 2);
}

TEST_CASE("sheet folding produces a generically one-to-one factor") {
  auto twin = builtin("TWIN").space_g();
  SplitResult s = degree_one_split(twin);
  CHECK(s.D.size() == 2);
  CHECK(map_profile(s.g1).injective);
  CHECK(sorted_fibers(s.e) == std::vector<int>{2, 2});

  auto node = builtin("NODE").space_g();
  SplitResult sn = degree_one_split(node);
  CHECK(sn.D.size() == node.source.size());  // nothing folds

  auto whisker = builtin("WHISKER").space_g();
  CHECK(degree_one_split(whisker).D.size() == 2);

  auto etale2 = builtin("ETALE2").space_g();
  SplitResult se = degree_one_split(etale2);
  CHECK(se.D.size() == 3);
  MapProfile p1 = map_profile(se.g1);
  CHECK(p1.injective);
  CHECK(p1.surjective);
  CHECK(p1.etale);  // bijective etale map: an isomorphism onto the base
}

TEST_CASE("sheet folding is stable under relabeling") {
  for (const char* name : {"TWIN", "ETALE2", "NODE"}) {
    auto g = builtin(name).space_g();
    SplitResult a = degree_one_split(g);
    SplitResult b = degree_one_split(reversed_relabel(g));
    CHECK(a.D.size() == b.D.size());
    CHECK(sorted_fibers(a.e) == sorted_fibers(b.e));
    CHECK(sorted_fibers(a.g1) == sorted_fibers(b.g1));
  }
}

TEST_CASE("lifting commutes with every small base change") {
  for (const char* name : {"WHISKER", "TWIN", "ETALE2"}) {
    auto g = builtin(name).space_g();
    for (const FinSpace& t : all_posets_up_to(2))
      for (const SpaceMap& u : all_maps(t, g.target)) {
        IdentityReport rep = check_base_change(g, u);
        CHECK_MESSAGE(rep.holds, name, ": ", rep.detail);
      }
  }
}

TEST_CASE("pushing forward along a closed embedding pulls the lift back") {
  auto g = builtin("WHISKER").space_g();
  SpaceMap h = point_probe(g.source, "n1");
  IdentityReport rep = check_pushforward(h, g);
  CHECK(rep.holds);
  CHECK(rep.detail == "2/2");
}

TEST_CASE("iterating the lift down a chain matches lifting over the lift") {
  auto whisker = builtin("WHISKER").space_g();
  const FinSpace& y = whisker.source;
  FinSpace x4 = builtin("NODEPLUS").space("X");
  SpaceMap g = make_map_by_names(y, x4, {{"a1", "eta1"}, {"n1", "c"}});
  SpaceMap h = point_probe(y, "n1");
  IdentityReport rep = check_iterated(h, g, base_lift);
  CHECK(rep.holds);
  CHECK(rep.detail == "4/4");
}

TEST_CASE("lifting a chain composite agrees with both stagewise routes") {
  auto g = builtin("WHISKER").space_g();
  SpaceMap h = point_probe(g.source, "n1");
  IdentityReport rep = check_composite(h, g);
  CHECK(rep.holds);
  CHECK(rep.detail == "3/3/3");

  // folded sheets break the pullback hypothesis: the image of the composite
  // pulls back to both sheets, not just the chosen one
  auto twin = builtin("TWIN").space_g();
  SpaceMap ht = point_probe(twin.source, "n1");
  CHECK(error_kind_of([&] { check_composite(ht, twin); }) == ErrorKind::hypothesis_not_met);
}

TEST_CASE("the lift of a product glues the partial lifts") {
  auto g = builtin("WHISKER").space_g();
  IdentityReport rep = check_product_gluing(g, g, base_lift);
  CHECK(rep.holds);
  CHECK(rep.detail == "3/3/3/3");
}

TEST_CASE("preconditions are rejected with the right diagnosis") {
  auto whisker = builtin("WHISKER").space_g();
  const FinSpace& y = whisker.source;
  SpaceMap open_pt = point_probe(y, "a1");  // specializations do not lift
  CHECK(error_kind_of([&] { base_lift(open_pt); }) == ErrorKind::hypothesis_not_met);
  CHECK(error_kind_of([&] { degree_one_split(open_pt); }) == ErrorKind::hypothesis_not_met);

  FinSpace chain = space_from_order({"a", "b"}, {{1, 1}, {0, 1}});
  FinSpace pt = point_space("p");
  SpaceMap crush = make_map(chain, pt, {0, 0});
  CHECK(error_kind_of([&] { degree_one_split(crush); }) == ErrorKind::not_local_embedding);
}

TEST_CASE("mismatched diagrams are reported before any lifting") {
  auto whisker = builtin("WHISKER").space_g();
  SpaceMap into_y = point_probe(whisker.source, "n1");
  CHECK(error_kind_of([&] { section_correspondence(whisker, into_y); }) ==
        ErrorKind::target_mismatch);
  CHECK(error_kind_of([&] { check_base_change(whisker, into_y); }) ==
        ErrorKind::target_mismatch);
  SpaceMap into_x = point_probe(whisker.target, "c");
  CHECK(error_kind_of([&] { check_pushforward(into_x, whisker); }) ==
        ErrorKind::target_mismatch);
  CHECK(error_kind_of([&] { check_iterated(into_x, whisker, base_lift); }) ==
        ErrorKind::target_mismatch);
  CHECK(error_kind_of([&] { check_composite(into_x, whisker); }) ==
        ErrorKind::target_mismatch);

  FinSpace x4 = builtin("NODEPLUS").space("X");
  SpaceMap other_base =
      make_map_by_names(whisker.source, x4, {{"a1", "eta1"}, {"n1", "c"}});
  CHECK(error_kind_of([&] { check_product_gluing(whisker, other_base, base_lift); }) ==
        ErrorKind::target_mismatch);
}
