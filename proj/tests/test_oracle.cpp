#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "doctest.h"
#include "stk/corpus.hpp"
#include "stk/errors.hpp"
#include "stk/lift.hpp"
#include "stk/oracle.hpp"

using namespace stk;

namespace {

int point_named(const FinSpace& x, const std::string& name) {
  for (int p = 0; p < x.size(); ++p)
    if (x.names[p] == name) return p;
  REQUIRE_MESSAGE(false, ("no point called " + name).c_str());
  return -1;
}

SpaceMap point_probe(const FinSpace& x, const std::string& name) {
  FinSpace pt = point_space("z");
  return make_map(pt, x, {point_named(x, name)});
}

size_t global_count(const char* name, FunctorReading r = FunctorReading::corrected) {
  auto g = builtin(name).space_g();
  return enumerate_points(g, identity_map(g.target), r).size();
}

}  // namespace

TEST_CASE("sheet counts") {
  CHECK(sheet_count(builtin("NODE").space_g()) == 2);
  CHECK(sheet_count(builtin("TRIPLE").space_g()) == 3);
  CHECK(sheet_count(builtin("WHISKER").space_g()) == 1);
  CHECK(sheet_count(builtin("ETALE2").space_g()) == 2);
  CHECK(sheet_count(builtin("TWIN").space_g()) == 2);
  CHECK(sheet_count(builtin("NODEPLUS").space_g()) == 2);
}

TEST_CASE("one-point fibers follow the seating formula") {
  for (const char* name : {"NODE", "TRIPLE", "WHISKER", "ETALE2", "TWIN", "NODEPLUS"}) {
    IdentityReport rep = check_fiber_formula(builtin(name).space_g());
    CHECK_MESSAGE(rep.holds, name, ": ", rep.detail);
    CHECK(rep.key == "oracle.fiber-formula");
  }
  // spot values: two sheets seat a single local sheet two ways
  auto node = builtin("NODE").space_g();
  CHECK(enumerate_points(node, point_probe(node.target, "eta1")).size() == 2);
  CHECK(enumerate_points(node, point_probe(node.target, "c")).size() == 2);
  auto triple = builtin("TRIPLE").space_g();
  CHECK(enumerate_points(triple, point_probe(triple.target, "eta1")).size() == 3);
  CHECK(enumerate_points(triple, point_probe(triple.target, "c")).size() == 6);
}

TEST_CASE("designated whole-base counts") {
  CHECK(global_count("NODE") == 2);
  CHECK(global_count("TRIPLE") == 6);
  CHECK(global_count("TWIN") == 2);
  CHECK(global_count("WHISKER") == 1);
  CHECK(global_count("ETALE2") == 2);
  CHECK(global_count("NODEPLUS") == 2);
}

TEST_CASE("the literal locus exponent empties every locus meeting the image") {
  CHECK(global_count("NODE", FunctorReading::literal) == 0);
  auto node = builtin("NODE").space_g();
  CHECK(enumerate_points(node, point_probe(node.target, "eta1"),
                         FunctorReading::literal)
            .empty());
  // away from the image both readings agree on the single empty datum
  auto nodeplus = builtin("NODEPLUS").space_g();
  CHECK(enumerate_points(nodeplus, point_probe(nodeplus.target, "xi"),
                         FunctorReading::literal)
            .size() == 1);
  CHECK(enumerate_points(nodeplus, point_probe(nodeplus.target, "xi")).size() == 1);
}

TEST_CASE("constructed lifts represent the sheet-data functor") {
  for (const char* name : {"WHISKER", "TWIN", "ETALE2"}) {
    auto g = builtin(name).space_g();
    LiftResult lift = base_lift(g);
    AgreementReport rep = functor_agreement(g, lift.e, 3);
    CHECK_MESSAGE(rep.agrees, name, ": ", rep.counterexample);
    CHECK(rep.probes > 0);
  }
}

TEST_CASE("agreement fails against an impostor lift") {
  auto twin = builtin("TWIN").space_g();
  // right base, wrong fibers
  AgreementReport undersized = functor_agreement(twin, identity_map(twin.target), 2);
  CHECK_FALSE(undersized.agrees);
  CHECK(undersized.counterexample.find("fiber over") == 0);

  // right fiber sizes, wrong topology: forget every specialization
  LiftResult lift = base_lift(twin);
  const FinSpace& f = lift.F;
  std::vector<std::vector<char>> discrete(f.size(), std::vector<char>(f.size(), 0));
  for (int p = 0; p < f.size(); ++p) discrete[p][p] = 1;
  FinSpace scattered = space_from_order(f.names, discrete);
  SpaceMap fake = make_map(scattered, twin.target, lift.e.assign);
  AgreementReport wrong = functor_agreement(twin, fake, 2);
  CHECK_FALSE(wrong.agrees);
  CHECK(wrong.counterexample.find("probe") == 0);
}

TEST_CASE("oracle counts are stable under relabeling the source") {
  auto twin = builtin("TWIN").space_g();
  const FinSpace& y = twin.source;
  const int n = y.size();
  std::vector<std::string> names(y.names.rbegin(), y.names.rend());
  std::vector<std::vector<char>> leads(n, std::vector<char>(n, 0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) leads[a][b] = y.leads[n - 1 - a][n - 1 - b];
  std::vector<int> assign(n);
  for (int a = 0; a < n; ++a) assign[a] = twin(n - 1 - a);
  SpaceMap relabeled =
      make_map(space_from_order(std::move(names), std::move(leads)), twin.target,
               std::move(assign));
  for (const FinSpace& t : all_posets_up_to(2))
    for (const SpaceMap& alpha : all_maps(t, twin.target))
      CHECK(enumerate_points(twin, alpha).size() ==
            enumerate_points(relabeled, alpha).size());
}

TEST_CASE("probes into a foreign base are rejected") {
  auto twin = builtin("TWIN").space_g();
  SpaceMap into_y = point_probe(twin.source, "n1");
  CHECK_THROWS_AS(enumerate_points(twin, into_y), Error);
  try {
    enumerate_points(twin, into_y);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::target_mismatch);
  }
  try {
    functor_agreement(twin, into_y, 2);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::target_mismatch);
  }
}
