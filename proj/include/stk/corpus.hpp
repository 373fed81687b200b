#pragma once
#include <optional>
#include <string>
#include <vector>

#include "stk/finspace.hpp"
#include "stk/groupoid.hpp"

namespace stk {

inline constexpr const char* engine_version = "stk-core 1.0";

// A named catalog object.  Maps and groupoids remember the *names* of the
// objects they were built from so instances serialize without duplication.
struct NamedSpace {
  std::string name;
  FinSpace space;
  bool operator==(const NamedSpace&) const = default;
};

struct NamedMap {
  std::string name;
  std::string source, target;  // names of declared spaces
  SpaceMap map;
  bool operator==(const NamedMap&) const = default;
};

struct NamedGroupoid {
  std::string name;
  std::string objects, arrows;          // space names
  std::string src, tgt, unit, inv;      // map names
  GroupoidPresentation groupoid;
  bool operator==(const NamedGroupoid&) const = default;
};

struct NamedStackMap {
  std::string name;
  std::string source, target;  // groupoid names
  StackMap map;
  bool operator==(const NamedStackMap&) const = default;
};

// Recorded expectation: key = value [tag].  Tag says how the value was
// obtained: "enumerated" (recomputable by exhaustive search) or
// "definitional" (a direct consequence of the construction).
struct ExpectEntry {
  std::string key, value, tag;
  bool operator==(const ExpectEntry&) const = default;
};

enum class Tier { space, groupoid };

std::string tier_name(Tier t);
Tier tier_from_name(const std::string& s);

struct Instance {
  std::string name;
  Tier tier = Tier::space;
  std::vector<NamedSpace> spaces;
  std::vector<NamedMap> maps;
  std::vector<NamedGroupoid> groupoids;
  std::vector<NamedStackMap> stackmaps;
  std::string g_name;  // designated morphism; empty if none
  std::vector<ExpectEntry> expects;

  bool operator==(const Instance&) const = default;

  const FinSpace& space(const std::string& n) const;
  const NamedMap& named_map(const std::string& n) const;
  const NamedGroupoid& named_groupoid(const std::string& n) const;
  const NamedStackMap& named_stackmap(const std::string& n) const;

  // The designated morphism, by tier.
  const SpaceMap& space_g() const;
  const StackMap& stack_g() const;

  std::optional<std::string> expect_value(const std::string& key) const;
};

// Built-in catalog.
std::vector<std::string> builtin_names();
Instance builtin(const std::string& name);

// Text format.  One declaration per line, '#' starts a comment:
//   space X { points: a b c; spec: a>c, b>c }
//   map g : Y -> X { a->x; b->y }
//   groupoid G { objects: U; arrows: R; src: s; tgt: t; unit: u; inv: i;
//                comp: (r,s)->t, ... }
//   stackmap d : G -> H { objects: p->q, ...; arrows: r->s, ... }
//   instance NAME { tier: space; g: g; expect: key = value [tag]; ... }
std::string save_instance(const Instance& inst);
Instance load_instance_text(const std::string& text,
                            const std::string& origin = "<text>");
Instance load_instance_file(const std::string& path);
void save_instance_file(const Instance& inst, const std::string& path);

// Result cache, enabled by setting STK_CACHE_DIR.  Keys bind the serialized
// instance, the operation name and the engine version, so stale entries can
// never be confused for current ones.
bool cache_enabled();
std::string cache_key(const Instance& inst, const std::string& op);
std::optional<std::string> cache_get(const std::string& key);
void cache_put(const std::string& key, const std::string& value);

}  // namespace stk
