#include "stk/corpus.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "stk/errors.hpp"

namespace stk {

std::string tier_name(Tier t) { return t == Tier::space ? "space" : "groupoid"; }

Tier tier_from_name(const std::string& s) {
  if (s == "space") return Tier::space;
  if (s == "groupoid") return Tier::groupoid;
  fail(ErrorKind::validation_error, "unknown tier '" + s + "'", s);
}

// ---- instance lookups ------------------------------------------------------

const FinSpace& Instance::space(const std::string& n) const {
  for (const auto& s : spaces)
    if (s.name == n) return s.space;
  fail(ErrorKind::validation_error, "instance " + name + " has no space '" + n + "'", n);
}

const NamedMap& Instance::named_map(const std::string& n) const {
  for (const auto& m : maps)
    if (m.name == n) return m;
  fail(ErrorKind::validation_error, "instance " + name + " has no map '" + n + "'", n);
}

const NamedGroupoid& Instance::named_groupoid(const std::string& n) const {
  for (const auto& g : groupoids)
    if (g.name == n) return g;
  fail(ErrorKind::validation_error, "instance " + name + " has no groupoid '" + n + "'", n);
}

const NamedStackMap& Instance::named_stackmap(const std::string& n) const {
  for (const auto& m : stackmaps)
    if (m.name == n) return m;
  fail(ErrorKind::validation_error, "instance " + name + " has no stack map '" + n + "'", n);
}

const SpaceMap& Instance::space_g() const {
  if (tier != Tier::space || g_name.empty())
    fail(ErrorKind::validation_error, "instance " + name + " has no designated space map");
  return named_map(g_name).map;
}

const StackMap& Instance::stack_g() const {
  if (tier != Tier::groupoid || g_name.empty())
    fail(ErrorKind::validation_error, "instance " + name + " has no designated stack map");
  return named_stackmap(g_name).map;
}

std::optional<std::string> Instance::expect_value(const std::string& key) const {
  for (const auto& e : expects)
    if (e.key == key) return e.value;
  return std::nullopt;
}

// ---- serialization ---------------------------------------------------------

namespace {

// Names are written verbatim, so they must survive the tokenizer: no blanks
// or structural characters outside balanced parentheses.
void check_token(const std::string& n) {
  bool bad = n.empty();
  int depth = 0;
  for (size_t i = 0; i < n.size() && !bad; ++i) {
    char c = n[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == ';' || c == '#' || c == '{' ||
        c == '}' || c == '[' || c == ']' || c == '=')
      bad = true;
    else if (c == '(')
      ++depth;
    else if (c == ')')
      bad = bad || --depth < 0;
    else if (depth == 0 && (c == ',' || c == '>'))
      bad = true;
    else if (depth == 0 && c == '-' && i + 1 < n.size() && n[i + 1] == '>')
      bad = true;
  }
  if (bad || depth != 0)
    fail(ErrorKind::validation_error, "name '" + n + "' is not serializable", n);
}

std::vector<std::pair<int, int>> covering_pairs(const FinSpace& x) {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < x.size(); ++a)
    for (int b = 0; b < x.size(); ++b) {
      if (a == b || !x.leadsto(a, b)) continue;
      bool covering = true;
      for (int c = 0; c < x.size() && covering; ++c)
        if (c != a && c != b && x.leadsto(a, c) && x.leadsto(c, b)) covering = false;
      if (covering) out.emplace_back(a, b);
    }
  return out;
}

void write_space(std::ostream& os, const NamedSpace& s) {
  check_token(s.name);
  for (const auto& p : s.space.names) check_token(p);
  os << "space " << s.name << " { points:";
  for (const auto& p : s.space.names) os << " " << p;
  auto cov = covering_pairs(s.space);
  if (!cov.empty()) {
    os << "; spec: ";
    for (size_t i = 0; i < cov.size(); ++i) {
      if (i) os << ", ";
      os << s.space.names[cov[i].first] << ">" << s.space.names[cov[i].second];
    }
  }
  os << " }\n";
}

void write_assignments(std::ostream& os, const SpaceMap& m, const char* sep) {
  for (int p = 0; p < m.source.size(); ++p) {
    if (p) os << sep;
    os << m.source.names[p] << "->" << m.target.names[m.assign[p]];
  }
}

void write_map(std::ostream& os, const NamedMap& m) {
  check_token(m.name);
  os << "map " << m.name << " : " << m.source << " -> " << m.target << " { ";
  write_assignments(os, m.map, "; ");
  os << " }\n";
}

void write_groupoid(std::ostream& os, const NamedGroupoid& g) {
  check_token(g.name);
  os << "groupoid " << g.name << " { objects: " << g.objects << "; arrows: " << g.arrows
     << "; src: " << g.src << "; tgt: " << g.tgt << "; unit: " << g.unit << "; inv: " << g.inv
     << "; comp:";
  bool first = true;
  const auto& G = g.groupoid;
  for (int r = 0; r < G.arrows.size(); ++r)
    for (int s = 0; s < G.arrows.size(); ++s)
      if (G.comp[r][s] >= 0) {
        os << (first ? " " : ", ") << "(" << G.arrows.names[r] << "," << G.arrows.names[s]
           << ")->" << G.arrows.names[G.comp[r][s]];
        first = false;
      }
  os << " }\n";
}

void write_stackmap(std::ostream& os, const NamedStackMap& m) {
  check_token(m.name);
  os << "stackmap " << m.name << " : " << m.source << " -> " << m.target << " { objects: ";
  write_assignments(os, m.map.on_objects, ", ");
  os << "; arrows: ";
  write_assignments(os, m.map.on_arrows, ", ");
  os << " }\n";
}

}  // namespace

std::string save_instance(const Instance& inst) {
  std::ostringstream os;
  for (const auto& s : inst.spaces) write_space(os, s);
  for (const auto& m : inst.maps) write_map(os, m);
  for (const auto& g : inst.groupoids) write_groupoid(os, g);
  for (const auto& m : inst.stackmaps) write_stackmap(os, m);
  check_token(inst.name);
  os << "instance " << inst.name << " { tier: " << tier_name(inst.tier);
  if (!inst.g_name.empty()) os << "; g: " << inst.g_name;
  for (const auto& e : inst.expects) {
    check_token(e.key);
    os << "; expect: " << e.key << " = " << e.value << " [" << e.tag << "]";
  }
  os << " }\n";
  return os.str();
}

// ---- parsing ---------------------------------------------------------------

namespace {

struct ParseCtx {
  std::string origin;
  int line_no = 0;
  std::string line;
  [[noreturn]] void err(const std::string& what) const {
    fail(ErrorKind::parse_error, origin + ":" + std::to_string(line_no) + ": " + what, line);
  }
};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

// Split on `sep` at parenthesis depth zero; pieces are trimmed.
std::vector<std::string> split_top(const std::string& s, char sep, const ParseCtx& cx) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) cx.err("unbalanced ')'");
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) cx.err("unbalanced '('");
  out.push_back(trim(cur));
  return out;
}

// "a->b" with exactly one arrow at depth zero.
std::pair<std::string, std::string> split_arrow(const std::string& s, const ParseCtx& cx) {
  int depth = 0;
  size_t pos = std::string::npos;
  for (size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth == 0 && s[i] == '-' && s[i + 1] == '>') {
      if (pos != std::string::npos) cx.err("more than one '->' in '" + s + "'");
      pos = i;
    }
  }
  if (pos == std::string::npos) cx.err("expected 'a->b', got '" + s + "'");
  auto a = trim(s.substr(0, pos)), b = trim(s.substr(pos + 2));
  if (a.empty() || b.empty()) cx.err("expected 'a->b', got '" + s + "'");
  return {a, b};
}

// Block fields "key: payload", in declaration order.
std::vector<std::pair<std::string, std::string>> parse_fields(const std::string& body,
                                                              const ParseCtx& cx) {
  std::vector<std::pair<std::string, std::string>> out;
  if (trim(body).empty()) return out;
  for (const auto& field : split_top(body, ';', cx)) {
    size_t pos = field.find(':');
    if (pos == std::string::npos) cx.err("expected 'key: value' field, got '" + field + "'");
    out.emplace_back(trim(field.substr(0, pos)), trim(field.substr(pos + 1)));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_assignments(const std::string& body,
                                                                   char sep, const ParseCtx& cx) {
  std::vector<std::pair<std::string, std::string>> out;
  if (trim(body).empty()) return out;
  for (const auto& piece : split_top(body, sep, cx)) out.push_back(split_arrow(piece, cx));
  return out;
}

struct Builder {
  Instance inst;
  bool have_instance = false;

  const FinSpace* find_space(const std::string& n) const {
    for (const auto& s : inst.spaces)
      if (s.name == n) return &s.space;
    return nullptr;
  }
  const NamedMap* find_map(const std::string& n) const {
    for (const auto& m : inst.maps)
      if (m.name == n) return &m;
    return nullptr;
  }
  const NamedGroupoid* find_groupoid(const std::string& n) const {
    for (const auto& g : inst.groupoids)
      if (g.name == n) return &g;
    return nullptr;
  }

  void add_space(const std::string& name, const std::string& body, const ParseCtx& cx) {
    if (find_space(name)) cx.err("space '" + name + "' declared twice");
    std::vector<std::string> pts;
    std::vector<std::pair<std::string, std::string>> rel;
    bool have_points = false;
    for (const auto& [key, payload] : parse_fields(body, cx)) {
      if (key == "points") {
        pts = split_ws(payload);
        have_points = true;
      } else if (key == "spec") {
        for (const auto& entry : split_top(payload, ',', cx)) {
          if (entry.empty()) continue;
          size_t pos = entry.find('>');
          if (pos == std::string::npos || pos == 0 || pos + 1 == entry.size())
            cx.err("expected 'a>b' in spec, got '" + entry + "'");
          rel.emplace_back(trim(entry.substr(0, pos)), trim(entry.substr(pos + 1)));
        }
      } else {
        cx.err("unknown space field '" + key + "'");
      }
    }
    if (!have_points) cx.err("space block missing field 'points'");
    inst.spaces.push_back({name, validate_space(pts, rel)});
  }

  void add_map(const std::string& name, const std::string& sname, const std::string& tname,
               const std::string& body, const ParseCtx& cx) {
    if (find_map(name)) cx.err("map '" + name + "' declared twice");
    const FinSpace* s = find_space(sname);
    const FinSpace* t = find_space(tname);
    if (!s) cx.err("map '" + name + "' uses undeclared space '" + sname + "'");
    if (!t) cx.err("map '" + name + "' uses undeclared space '" + tname + "'");
    auto assign = parse_assignments(body, ';', cx);
    inst.maps.push_back({name, sname, tname, make_map_by_names(*s, *t, assign)});
  }

  void add_groupoid(const std::string& name, const std::string& body, const ParseCtx& cx) {
    if (find_groupoid(name)) cx.err("groupoid '" + name + "' declared twice");
    std::map<std::string, std::string> f;
    std::string comp_payload;
    bool have_comp = false;
    for (const auto& [key, payload] : parse_fields(body, cx)) {
      if (key == "comp") {
        comp_payload = payload;
        have_comp = true;
      } else if (key == "objects" || key == "arrows" || key == "src" || key == "tgt" ||
                 key == "unit" || key == "inv") {
        if (!f.emplace(key, payload).second) cx.err("duplicate groupoid field '" + key + "'");
      } else {
        cx.err("unknown groupoid field '" + key + "'");
      }
    }
    for (const char* req : {"objects", "arrows", "src", "tgt", "unit", "inv"})
      if (!f.count(req)) cx.err("groupoid block missing field '" + std::string(req) + "'");
    if (!have_comp) cx.err("groupoid block missing field 'comp'");
    const FinSpace* obj = find_space(f["objects"]);
    const FinSpace* arr = find_space(f["arrows"]);
    if (!obj) cx.err("undeclared space '" + f["objects"] + "'");
    if (!arr) cx.err("undeclared space '" + f["arrows"] + "'");
    auto structure_map = [&](const std::string& n) {
      const NamedMap* m = find_map(n);
      if (!m) cx.err("undeclared map '" + n + "'");
      return m->map;
    };
    const int nr = arr->size();
    std::vector<std::vector<int>> comp(nr, std::vector<int>(nr, -1));
    for (const auto& entry : split_top(comp_payload, ',', cx)) {
      auto [pair_part, result] = split_arrow(entry, cx);
      if (pair_part.size() < 2 || pair_part.front() != '(' || pair_part.back() != ')')
        cx.err("expected '(r,s)->t' composition entry, got '" + entry + "'");
      auto parts = split_top(pair_part.substr(1, pair_part.size() - 2), ',', cx);
      if (parts.size() != 2) cx.err("expected '(r,s)->t' composition entry, got '" + entry + "'");
      int r = arr->index_of(parts[0]), s = arr->index_of(parts[1]), t = arr->index_of(result);
      if (comp[r][s] != -1) cx.err("duplicate composition entry for (" + parts[0] + "," + parts[1] + ")");
      comp[r][s] = t;
    }
    inst.groupoids.push_back({name, f["objects"], f["arrows"], f["src"], f["tgt"], f["unit"],
                              f["inv"],
                              validate_groupoid(*obj, *arr, structure_map(f["src"]),
                                                structure_map(f["tgt"]), structure_map(f["unit"]),
                                                structure_map(f["inv"]), comp)});
  }

  void add_stackmap(const std::string& name, const std::string& sname, const std::string& tname,
                    const std::string& body, const ParseCtx& cx) {
    for (const auto& m : inst.stackmaps)
      if (m.name == name) cx.err("stackmap '" + name + "' declared twice");
    const NamedGroupoid* s = find_groupoid(sname);
    const NamedGroupoid* t = find_groupoid(tname);
    if (!s) cx.err("stackmap '" + name + "' uses undeclared groupoid '" + sname + "'");
    if (!t) cx.err("stackmap '" + name + "' uses undeclared groupoid '" + tname + "'");
    std::optional<std::string> obj_payload, arr_payload;
    for (const auto& [key, payload] : parse_fields(body, cx)) {
      if (key == "objects")
        obj_payload = payload;
      else if (key == "arrows")
        arr_payload = payload;
      else
        cx.err("unknown stackmap field '" + key + "'");
    }
    if (!obj_payload) cx.err("stackmap block missing field 'objects'");
    if (!arr_payload) cx.err("stackmap block missing field 'arrows'");
    SpaceMap fu = make_map_by_names(s->groupoid.objects, t->groupoid.objects,
                                    parse_assignments(*obj_payload, ',', cx));
    SpaceMap fr = make_map_by_names(s->groupoid.arrows, t->groupoid.arrows,
                                    parse_assignments(*arr_payload, ',', cx));
    inst.stackmaps.push_back({name, sname, tname, make_stack_map(s->groupoid, t->groupoid, fu, fr)});
  }

  void add_instance(const std::string& name, const std::string& body, const ParseCtx& cx) {
    if (have_instance) cx.err("more than one instance declaration");
    have_instance = true;
    inst.name = name;
    bool have_tier = false;
    for (const auto& [key, payload] : parse_fields(body, cx)) {
      if (key == "tier") {
        if (payload != "space" && payload != "groupoid")
          cx.err("tier must be 'space' or 'groupoid', got '" + payload + "'");
        inst.tier = tier_from_name(payload);
        have_tier = true;
      } else if (key == "g") {
        inst.g_name = payload;
      } else if (key == "expect") {
        size_t eq = payload.find('=');
        if (eq == std::string::npos) cx.err("expected 'key = value [tag]', got '" + payload + "'");
        std::string key_part = trim(payload.substr(0, eq));
        std::string rest = trim(payload.substr(eq + 1));
        size_t lb = rest.rfind('[');
        if (rest.empty() || rest.back() != ']' || lb == std::string::npos)
          cx.err("expect entry missing '[tag]': '" + payload + "'");
        std::string value = trim(rest.substr(0, lb));
        std::string tag = rest.substr(lb + 1, rest.size() - lb - 2);
        if (tag != "enumerated" && tag != "definitional")
          cx.err("expect tag must be 'enumerated' or 'definitional', got '" + tag + "'");
        if (key_part.empty() || value.empty()) cx.err("empty expect key or value in '" + payload + "'");
        inst.expects.push_back({key_part, value, tag});
      } else {
        cx.err("unknown instance field '" + key + "'");
      }
    }
    if (!have_tier) cx.err("instance block missing field 'tier'");
    if (!inst.g_name.empty()) {
      if (inst.tier == Tier::space && !find_map(inst.g_name))
        cx.err("designated map '" + inst.g_name + "' not declared");
      bool found = false;
      for (const auto& m : inst.stackmaps) found = found || m.name == inst.g_name;
      if (inst.tier == Tier::groupoid && !found)
        cx.err("designated stack map '" + inst.g_name + "' not declared");
    }
  }
};

}  // namespace

Instance load_instance_text(const std::string& text, const std::string& origin) {
  Builder b;
  ParseCtx cx{origin, 0, ""};
  std::istringstream is(text);
  std::string raw;
  while (std::getline(is, raw)) {
    ++cx.line_no;
    if (size_t hash = raw.find('#'); hash != std::string::npos) raw = raw.substr(0, hash);
    cx.line = trim(raw);
    if (cx.line.empty()) continue;
    size_t open = cx.line.find('{');
    if (open == std::string::npos || cx.line.back() != '}')
      cx.err("expected '<decl> ... { ... }' on one line");
    std::string body = cx.line.substr(open + 1, cx.line.size() - open - 2);
    auto head = split_ws(cx.line.substr(0, open));
    try {
      if (head.size() == 2 && head[0] == "space") {
        b.add_space(head[1], body, cx);
      } else if (head.size() == 6 && head[0] == "map" && head[2] == ":" && head[4] == "->") {
        b.add_map(head[1], head[3], head[5], body, cx);
      } else if (head.size() == 2 && head[0] == "groupoid") {
        b.add_groupoid(head[1], body, cx);
      } else if (head.size() == 6 && head[0] == "stackmap" && head[2] == ":" && head[4] == "->") {
        b.add_stackmap(head[1], head[3], head[5], body, cx);
      } else if (head.size() == 2 && head[0] == "instance") {
        b.add_instance(head[1], body, cx);
      } else {
        cx.err("unrecognized declaration");
      }
    } catch (const Error& e) {
      // A name that never resolved is a parse-level mistake; genuine axiom or
      // continuity failures pass through with their own kinds.
      if (e.kind == ErrorKind::unknown_point)
        cx.err(std::string("undeclared name (") + e.what() + ")");
      throw;
    }
  }
  if (!b.have_instance)
    fail(ErrorKind::parse_error, origin + ": missing instance declaration", origin);
  return std::move(b.inst);
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::parse_error, "cannot open '" + path + "'", path);
  std::ostringstream os;
  os << in.rdbuf();
  return load_instance_text(os.str(), path);
}

void save_instance_file(const Instance& inst, const std::string& path) {
  std::string text = save_instance(inst);
  std::ofstream out(path);
  if (!out) fail(ErrorKind::validation_error, "cannot write '" + path + "'", path);
  out << text;
}

// ---- builtin catalog -------------------------------------------------------

namespace {

const char* node_text =
    "space X { points: eta1 eta2 c; spec: eta1>c, eta2>c }\n"
    "space Y { points: a1 n1 a2 n2; spec: a1>n1, a2>n2 }\n"
    "map g : Y -> X { a1->eta1; n1->c; a2->eta2; n2->c }\n"
    "instance NODE { tier: space; g: g;"
    " expect: multiplicity = 2 [enumerated];"
    " expect: lift.points = 6 [enumerated];"
    " expect: lift.fiber.eta1 = 2 [enumerated];"
    " expect: lift.fiber.eta2 = 2 [enumerated];"
    " expect: lift.fiber.c = 2 [enumerated];"
    " expect: sections.X = 2 [enumerated];"
    " expect: profile.local_embedding = true [definitional];"
    " expect: profile.proper = true [definitional];"
    " expect: profile.etale = false [definitional] }\n";

const char* triple_text =
    "space X { points: eta1 eta2 eta3 c; spec: eta1>c, eta2>c, eta3>c }\n"
    "space Y { points: a1 n1 a2 n2 a3 n3; spec: a1>n1, a2>n2, a3>n3 }\n"
    "map g : Y -> X { a1->eta1; n1->c; a2->eta2; n2->c; a3->eta3; n3->c }\n"
    "instance TRIPLE { tier: space; g: g;"
    " expect: multiplicity = 3 [enumerated];"
    " expect: lift.points = 15 [enumerated];"
    " expect: lift.fiber.eta1 = 3 [enumerated];"
    " expect: lift.fiber.eta2 = 3 [enumerated];"
    " expect: lift.fiber.eta3 = 3 [enumerated];"
    " expect: lift.fiber.c = 6 [enumerated];"
    " expect: sections.X = 6 [enumerated];"
    " expect: profile.local_embedding = true [definitional] }\n";

const char* whisker_text =
    "space X { points: eta1 eta2 c; spec: eta1>c, eta2>c }\n"
    "space Y { points: a1 n1; spec: a1>n1 }\n"
    "map g : Y -> X { a1->eta1; n1->c }\n"
    "instance WHISKER { tier: space; g: g;"
    " expect: multiplicity = 1 [enumerated];"
    " expect: lift.points = 3 [enumerated];"
    " expect: lift.iso_to_target = true [enumerated];"
    " expect: sections.X = 1 [enumerated];"
    " expect: profile.closed_embedding = true [definitional] }\n";

const char* etale2_text =
    "space X { points: eta1 eta2 c; spec: eta1>c, eta2>c }\n"
    "space Y { points: a1 b1 a2 b2 d1 d2; spec: a1>d1, b2>d1, a2>d2, b1>d2 }\n"
    "map g : Y -> X { a1->eta1; b1->eta1; a2->eta2; b2->eta2; d1->c; d2->c }\n"
    "instance ETALE2 { tier: space; g: g;"
    " expect: multiplicity = 2 [enumerated];"
    " expect: lift.points = 6 [enumerated];"
    " expect: lift.iso_to_source = true [enumerated];"
    " expect: profile.etale = true [definitional];"
    " expect: profile.proper = true [definitional] }\n";

const char* nodeplus_text =
    "space X { points: eta1 eta2 c xi; spec: eta1>c, eta2>c }\n"
    "space Y { points: a1 n1 a2 n2; spec: a1>n1, a2>n2 }\n"
    "map g : Y -> X { a1->eta1; n1->c; a2->eta2; n2->c }\n"
    "instance NODEPLUS { tier: space; g: g;"
    " expect: multiplicity = 2 [enumerated];"
    " expect: lift.points = 7 [enumerated];"
    " expect: lift.fiber.xi = 1 [enumerated];"
    " expect: lift.fiber.c = 2 [enumerated] }\n";

const char* twin_text =
    "space X { points: eta1 eta2 c; spec: eta1>c, eta2>c }\n"
    "space Y { points: a1 n1 a2 n2; spec: a1>n1, a2>n2 }\n"
    "map g : Y -> X { a1->eta1; n1->c; a2->eta1; n2->c }\n"
    "instance TWIN { tier: space; g: g;"
    " expect: multiplicity = 2 [enumerated];"
    " expect: lift.points = 5 [enumerated];"
    " expect: lift.fiber.eta1 = 2 [enumerated];"
    " expect: lift.fiber.eta2 = 1 [enumerated];"
    " expect: lift.fiber.c = 2 [enumerated];"
    " expect: split.points = 2 [enumerated] }\n";

void wrap_groupoid(Instance& inst, const std::string& gname, const GroupoidPresentation& g) {
  std::string obj = gname + ".obj", arr = gname + ".arr";
  inst.spaces.push_back({obj, g.objects});
  inst.spaces.push_back({arr, g.arrows});
  inst.maps.push_back({gname + ".src", arr, obj, g.src});
  inst.maps.push_back({gname + ".tgt", arr, obj, g.tgt});
  inst.maps.push_back({gname + ".unit", obj, arr, g.unit});
  inst.maps.push_back({gname + ".inv", arr, arr, g.inv});
  inst.groupoids.push_back({gname, obj, arr, gname + ".src", gname + ".tgt", gname + ".unit",
                            gname + ".inv", g});
}

GroupoidPresentation bz2_presentation() {
  return group_groupoid({"e", "s"}, 0, {{0, 1}, {1, 0}});
}

GroupoidPresentation bs3_presentation() {
  // S3 as permutations of {0,1,2}; composition reads left to right.
  const std::vector<std::array<int, 3>> perms = {
      {0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  const std::vector<std::string> names = {"e", "r", "rr", "s0", "s1", "s2"};
  const int n = 6;
  std::vector<std::vector<int>> mult(n, std::vector<int>(n, -1));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::array<int, 3> ab{};
      for (int x = 0; x < 3; ++x) ab[x] = perms[b][perms[a][x]];
      for (int c = 0; c < n; ++c)
        if (perms[c] == ab) mult[a][b] = c;
    }
  return group_groupoid(names, 0, mult);
}

Instance bz2diag_instance() {
  Instance inst;
  inst.name = "BZ2DIAG";
  inst.tier = Tier::groupoid;
  GroupoidPresentation bz2 = bz2_presentation();
  ProductGroupoid pg = product_groupoid(bz2, bz2);
  wrap_groupoid(inst, "BZ2", bz2);
  wrap_groupoid(inst, "BZ2xBZ2", pg.total);
  StackMap d = diagonal_map(bz2);
  inst.stackmaps.push_back({"d", "BZ2", "BZ2xBZ2", d});
  inst.g_name = "d";
  inst.expects = {{"multiplicity", "2", "enumerated"},
                  {"network.nodes", "4", "enumerated"},
                  {"lift.morita.bz2", "true", "enumerated"},
                  {"functor.classes.point", "2", "enumerated"},
                  {"profile.representable", "true", "definitional"},
                  {"profile.etale", "true", "definitional"},
                  {"profile.closed_embedding", "false", "definitional"}};
  return inst;
}

Instance bs3inertia_instance() {
  Instance inst;
  inst.name = "BS3INERTIA";
  inst.tier = Tier::groupoid;
  wrap_groupoid(inst, "BS3", bs3_presentation());
  inst.expects = {{"inertia.components", "3", "enumerated"},
                  {"inertia.objects", "36", "definitional"},
                  {"inertia.arrows", "1296", "definitional"}};
  return inst;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"NODE", "TRIPLE", "WHISKER", "ETALE2", "NODEPLUS", "TWIN", "BZ2DIAG", "BS3INERTIA"};
}

Instance builtin(const std::string& name) {
  if (name == "NODE") return load_instance_text(node_text, "<builtin:NODE>");
  if (name == "TRIPLE") return load_instance_text(triple_text, "<builtin:TRIPLE>");
  if (name == "WHISKER") return load_instance_text(whisker_text, "<builtin:WHISKER>");
  if (name == "ETALE2") return load_instance_text(etale2_text, "<builtin:ETALE2>");
  if (name == "NODEPLUS") return load_instance_text(nodeplus_text, "<builtin:NODEPLUS>");
  if (name == "TWIN") return load_instance_text(twin_text, "<builtin:TWIN>");
  if (name == "BZ2DIAG") return bz2diag_instance();
  if (name == "BS3INERTIA") return bs3inertia_instance();
  fail(ErrorKind::unknown_instance, "no builtin instance named '" + name + "'", name);
}

// ---- cache -----------------------------------------------------------------

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::optional<std::filesystem::path> cache_dir() {
  const char* dir = std::getenv("STK_CACHE_DIR");
  if (!dir || !*dir) return std::nullopt;
  return std::filesystem::path(dir);
}

}  // namespace

bool cache_enabled() { return cache_dir().has_value(); }

std::string cache_key(const Instance& inst, const std::string& op) {
  std::string payload = save_instance(inst);
  payload += '\n';
  payload += op;
  payload += '\n';
  payload += engine_version;
  std::ostringstream os;
  os << std::hex << fnv1a(payload);
  std::string safe_op;
  for (char c : op) safe_op += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return safe_op + "-" + os.str();
}

std::optional<std::string> cache_get(const std::string& key) {
  auto dir = cache_dir();
  if (!dir) return std::nullopt;
  std::ifstream in(*dir / (key + ".txt"));
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void cache_put(const std::string& key, const std::string& value) {
  auto dir = cache_dir();
  if (!dir) return;
  std::filesystem::create_directories(*dir);
  std::ofstream out(*dir / (key + ".txt"));
  out << value;
}

}  // namespace stk
