#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "stk/corpus.hpp"
#include "stk/errors.hpp"

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

template <class F>
std::string error_message_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  REQUIRE_MESSAGE(false, "expected an error");
  return {};
}

}  // namespace

TEST_CASE("builtin catalog is well formed") {
  auto names = builtin_names();
  CHECK(names.size() == 8);
  for (const auto& n : names) {
    Instance inst = builtin(n);
    CHECK(inst.name == n);
    if (inst.tier == Tier::space) {
      // Every space-tier instance designates a proper local embedding.
      const SpaceMap& g = inst.space_g();
      MapProfile p = map_profile(g);
      CHECK(p.local_embedding);
      CHECK(p.proper);
    } else {
      CHECK(!inst.groupoids.empty());
    }
  }
  CHECK(error_kind_of([] { builtin("NOSUCH"); }) == ErrorKind::unknown_instance);
}

TEST_CASE("designated maps have their advertised profiles") {
  for (const auto& n : builtin_names()) {
    Instance inst = builtin(n);
    CAPTURE(n);
    for (const auto& e : inst.expects) {
      if (e.key.rfind("profile.", 0) != 0) continue;
      bool expected = e.value == "true";
      bool got = false;
      if (inst.tier == Tier::space) {
        MapProfile p = map_profile(inst.space_g());
        if (e.key == "profile.local_embedding") got = p.local_embedding;
        else if (e.key == "profile.proper") got = p.proper;
        else if (e.key == "profile.etale") got = p.etale;
        else if (e.key == "profile.closed_embedding") got = p.closed_embedding;
        else FAIL("unhandled expect key " << e.key);
      } else {
        StackProfile p = stack_map_profile(inst.stack_g());
        if (e.key == "profile.representable") got = p.representable;
        else if (e.key == "profile.etale") got = p.etale;
        else if (e.key == "profile.closed_embedding") got = p.closed_embedding;
        else FAIL("unhandled expect key " << e.key);
      }
      CAPTURE(e.key);
      CHECK(got == expected);
    }
  }
}

TEST_CASE("instances round trip through text byte for byte") {
  for (const auto& n : builtin_names()) {
    Instance inst = builtin(n);
    std::string text = save_instance(inst);
    Instance back = load_instance_text(text, "<roundtrip>");
    CAPTURE(n);
    CHECK(back == inst);
    CHECK(save_instance(back) == text);
  }
}

TEST_CASE("instances round trip through files") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "stk-corpus-test";
  fs::create_directories(dir);
  Instance inst = builtin("TWIN");
  std::string path = (dir / "twin.stk").string();
  save_instance_file(inst, path);
  CHECK(load_instance_file(path) == inst);
  CHECK(error_kind_of([&] { load_instance_file((dir / "missing.stk").string()); }) ==
        ErrorKind::parse_error);
  fs::remove_all(dir);
}

TEST_CASE("comments and blank lines are ignored") {
  std::string text =
      "# a catalog file\n"
      "\n"
      "space X { points: a b; spec: a>b }  # chain\n"
      "map f : X -> X { a->a; b->b }\n"
      "instance I { tier: space; g: f }\n";
  Instance inst = load_instance_text(text);
  CHECK(inst.name == "I");
  CHECK(inst.space("X").size() == 2);
  CHECK(inst.space_g().assign == std::vector<int>{0, 1});
  CHECK(inst.expects.empty());
}

TEST_CASE("parse errors name the offending line") {
  // Undeclared point inside a map body: reported as a parse error on line 3.
  std::string bad_point =
      "space X { points: a b }\n"
      "space Y { points: p }\n"
      "map f : Y -> X { p->zz }\n"
      "instance I { tier: space; g: f }\n";
  CHECK(error_kind_of([&] { load_instance_text(bad_point, "f"); }) == ErrorKind::parse_error);
  std::string msg = error_message_of([&] { load_instance_text(bad_point, "f"); });
  CHECK(msg.find("f:3:") != std::string::npos);

  // Groupoid block with a missing structure map field.
  std::string no_inv =
      "space U { points: pt }\n"
      "space R { points: e }\n"
      "map s : R -> U { e->pt }\n"
      "map u : U -> R { pt->e }\n"
      "groupoid G { objects: U; arrows: R; src: s; tgt: s; unit: u; comp: (e,e)->e }\n"
      "instance I { tier: groupoid }\n";
  CHECK(error_message_of([&] { load_instance_text(no_inv, "f"); }).find("missing field 'inv'") !=
        std::string::npos);

  std::string bad_head = "space X Y { points: a }\ninstance I { tier: space }\n";
  CHECK(error_kind_of([&] { load_instance_text(bad_head); }) == ErrorKind::parse_error);

  std::string no_instance = "space X { points: a }\n";
  CHECK(error_kind_of([&] { load_instance_text(no_instance); }) == ErrorKind::parse_error);

  std::string two_instances =
      "instance I { tier: space }\n"
      "instance J { tier: space }\n";
  CHECK(error_kind_of([&] { load_instance_text(two_instances); }) == ErrorKind::parse_error);

  std::string bad_tag = "instance I { tier: space; expect: k = 1 [guessed] }\n";
  CHECK(error_kind_of([&] { load_instance_text(bad_tag); }) == ErrorKind::parse_error);

  std::string unbalanced = "space X { points: (a }\ninstance I { tier: space }\n";
  CHECK(error_kind_of([&] { load_instance_text(unbalanced); }) == ErrorKind::parse_error);

  std::string missing_g = "space X { points: a }\ninstance I { tier: space; g: nope }\n";
  CHECK(error_kind_of([&] { load_instance_text(missing_g); }) == ErrorKind::parse_error);
}

TEST_CASE("structural errors pass through with their own kinds") {
  // A cyclic specialization order is not a parse problem.
  std::string cyclic = "space X { points: a b; spec: a>b, b>a }\ninstance I { tier: space }\n";
  CHECK(error_kind_of([&] { load_instance_text(cyclic); }) == ErrorKind::antisymmetry_violation);

  // An assignment that misses a source point is a validation problem.
  std::string partial =
      "space X { points: a b }\n"
      "map f : X -> X { a->a }\n"
      "instance I { tier: space; g: f }\n";
  CHECK(error_kind_of([&] { load_instance_text(partial); }) == ErrorKind::validation_error);

  // A non-monotone assignment violates continuity.
  std::string discont =
      "space C { points: a b; spec: a>b }\n"
      "space D { points: p q }\n"
      "map f : C -> D { a->p; b->q }\n"
      "instance I { tier: space; g: f }\n";
  CHECK(error_kind_of([&] { load_instance_text(discont); }) == ErrorKind::not_continuous);

  // A corrupted composition table violates the groupoid axioms.
  std::string bad_comp =
      "space U { points: pt }\n"
      "space R { points: e s }\n"
      "map sr : R -> U { e->pt; s->pt }\n"
      "map un : U -> R { pt->e }\n"
      "map iv : R -> R { e->e; s->s }\n"
      "groupoid G { objects: U; arrows: R; src: sr; tgt: sr; unit: un; inv: iv;"
      " comp: (e,e)->e, (e,s)->s, (s,e)->s, (s,s)->s }\n"
      "instance I { tier: groupoid }\n";
  CHECK(error_kind_of([&] { load_instance_text(bad_comp); }) == ErrorKind::axiom_violation);
}

TEST_CASE("groupoid instances survive the text format") {
  Instance inst = builtin("BZ2DIAG");
  CHECK(inst.tier == Tier::groupoid);
  CHECK(inst.stack_g().on_objects.target.names == std::vector<std::string>{"(pt,pt)"});
  // Composite names like (e,s) must parse back through the comp table.
  std::string text = save_instance(inst);
  Instance back = load_instance_text(text);
  CHECK(back == inst);
  CHECK(back.named_groupoid("BZ2xBZ2").groupoid.arrows.size() == 4);
}

TEST_CASE("frozen inertia counts for the symmetric group instance") {
  Instance inst = builtin("BS3INERTIA");
  const GroupoidPresentation& g = inst.named_groupoid("BS3").groupoid;
  GroupoidPresentation in1 = inertia(g, 1);
  CHECK(std::to_string(in1.objects.size()) == *inst.expect_value("inertia.objects"));
  CHECK(std::to_string(in1.arrows.size()) == *inst.expect_value("inertia.arrows"));
  CHECK(std::to_string(clopen_components(in1).size()) == *inst.expect_value("inertia.components"));
}

TEST_CASE("expect lookup") {
  Instance inst = builtin("NODE");
  CHECK(inst.expect_value("multiplicity") == std::string("2"));
  CHECK(!inst.expect_value("no.such.key").has_value());
  for (const auto& e : inst.expects) CHECK((e.tag == "enumerated" || e.tag == "definitional"));
}

TEST_CASE("result cache stores and recalls by key") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "stk-cache-test";
  fs::remove_all(dir);
  setenv("STK_CACHE_DIR", dir.string().c_str(), 1);
  CHECK(cache_enabled());

  Instance node = builtin("NODE");
  Instance twin = builtin("TWIN");
  std::string k1 = cache_key(node, "lift");
  CHECK(k1 == cache_key(node, "lift"));          // deterministic
  CHECK(k1 != cache_key(node, "network"));       // operation is part of the key
  CHECK(k1 != cache_key(twin, "lift"));          // instance is part of the key
  CHECK(!cache_get(k1).has_value());
  cache_put(k1, "payload\nline two\n");
  CHECK(cache_get(k1) == std::string("payload\nline two\n"));

  unsetenv("STK_CACHE_DIR");
  CHECK(!cache_enabled());
  CHECK(!cache_get(k1).has_value());
  fs::remove_all(dir);
}
