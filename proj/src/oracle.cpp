#include "stk/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace stk {

namespace {

std::vector<PointSet> fibers_of(const SpaceMap& g) {
  std::vector<PointSet> fib(g.target.size());
  for (int y = 0; y < g.source.size(); ++y) fib[g(y)].push_back(y);
  return fib;
}

bool literal_locus_ok(int active, int d, int n) {
  // Pointwise reading of the published locus condition: for every pinned set
  // I inside the active set (only its size s matters) and every k, the point
  // lies on the k-fold distinct locus iff some active J with |J| = k + s
  // contains I.
  for (int s = 0; s <= active; ++s)
    for (int k = 1; k <= n; ++k)
      if ((d >= k) != (active >= k + s)) return false;
  return true;
}

void fill_rows(const PointSet& fiber, const std::vector<int>& pos, size_t at,
               std::vector<int>& row, std::vector<char>& used,
               std::vector<std::vector<int>>& out) {
  if (at == pos.size()) {
    out.push_back(row);
    return;
  }
  for (size_t f = 0; f < fiber.size(); ++f) {
    if (used[f]) continue;
    used[f] = 1;
    row[pos[at]] = fiber[f];
    fill_rows(fiber, pos, at + 1, row, used, out);
    row[pos[at]] = -1;
    used[f] = 0;
  }
}

std::vector<std::vector<int>> candidate_rows(const PointSet& fiber, int n,
                                             FunctorReading reading) {
  const int d = static_cast<int>(fiber.size());
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    int active = 0;
    std::vector<int> pos;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        ++active;
        pos.push_back(i);
      }
    if (active > d) continue;  // not enough distinct sheets to seat
    bool admissible = reading == FunctorReading::corrected
                          ? active == d
                          : literal_locus_ok(active, d, n);
    if (!admissible) continue;
    std::vector<int> row(n, -1);
    std::vector<char> used(fiber.size(), 0);
    fill_rows(fiber, pos, 0, row, used, out);
  }
  return out;
}

std::string describe_probe(const SpaceMap& alpha) {
  const FinSpace& t = alpha.source;
  std::string s = "probe " + std::to_string(t.size()) + " pts (";
  for (int z = 0; z < t.size(); ++z) {
    if (z) s += ",";
    s += alpha.target.names[alpha(z)];
  }
  s += ")";
  std::string rel;
  for (int a = 0; a < t.size(); ++a)
    for (int b = 0; b < t.size(); ++b) {
      if (a == b || !t.leadsto(a, b)) continue;
      if (!rel.empty()) rel += ",";
      rel += std::to_string(a) + ">" + std::to_string(b);
    }
  if (!rel.empty()) s += " spec " + rel;
  return s;
}

}  // namespace

int sheet_count(const SpaceMap& g) {
  int n = 0;
  for (const auto& f : fibers_of(g)) n = std::max(n, static_cast<int>(f.size()));
  return n;
}

long falling_factorial(int n, int d) {
  long r = 1;
  for (int i = 0; i < d; ++i) r *= n - i;
  return r;
}

std::vector<FunctorPoint> enumerate_points(const SpaceMap& g, const SpaceMap& alpha,
                                           FunctorReading reading) {
  if (!(alpha.target == g.target))
    fail(ErrorKind::target_mismatch, "probe must land in the base of the classified map");
  const FinSpace& z = alpha.source;
  const int n = sheet_count(g);
  auto fib = fibers_of(g);

  std::vector<std::vector<std::vector<int>>> opts(z.size());
  for (int p = 0; p < z.size(); ++p) opts[p] = candidate_rows(fib[alpha(p)], n, reading);

  std::vector<FunctorPoint> out;
  std::vector<std::vector<int>> rows(z.size());
  auto consistent = [&](int p, const std::vector<int>& row) {
    for (int q = 0; q < p; ++q) {
      for (int i = 0; i < n; ++i) {
        if (z.leadsto(q, p)) {
          // loci are specialization-closed, sheet lifts are continuous
          if (rows[q][i] >= 0 && (row[i] < 0 || !g.source.leadsto(rows[q][i], row[i])))
            return false;
        }
        if (z.leadsto(p, q)) {
          if (row[i] >= 0 && (rows[q][i] < 0 || !g.source.leadsto(row[i], rows[q][i])))
            return false;
        }
      }
    }
    return true;
  };
  auto rec = [&](auto&& self, int p) -> void {
    if (p == z.size()) {
      out.push_back(FunctorPoint{n, rows});
      return;
    }
    for (const auto& row : opts[p]) {
      if (!consistent(p, row)) continue;
      rows[p] = row;
      self(self, p + 1);
    }
  };
  rec(rec, 0);
  return out;
}

IdentityReport check_fiber_formula(const SpaceMap& g) {
  const int n = sheet_count(g);
  auto fib = fibers_of(g);
  FinSpace pt = point_space("z");
  bool ok = true;
  std::string detail = "sheets: " + std::to_string(n);
  for (int x = 0; x < g.target.size() && ok; ++x) {
    long got = static_cast<long>(enumerate_points(g, make_map(pt, g.target, {x})).size());
    long want = falling_factorial(n, static_cast<int>(fib[x].size()));
    if (got != want) {
      ok = false;
      detail = g.target.names[x] + ": " + std::to_string(got) + " vs " +
               std::to_string(want);
    }
  }
  return IdentityReport{"oracle.fiber-formula", ok, detail};
}

AgreementReport functor_agreement(const SpaceMap& g, const SpaceMap& e, int max_probe,
                                  FunctorReading reading) {
  if (!(e.target == g.target))
    fail(ErrorKind::target_mismatch, "candidate lift must land in the base of the classified map");
  const FinSpace& x = g.target;
  const FinSpace& f = e.source;
  AgreementReport rep;

  std::vector<PointSet> efib(x.size());
  for (int p = 0; p < f.size(); ++p) efib[e(p)].push_back(p);

  FinSpace pt = point_space("z");
  std::vector<std::vector<FunctorPoint>> pts(x.size());
  std::vector<std::map<std::vector<int>, int>> row_index(x.size());
  for (int v = 0; v < x.size(); ++v) {
    pts[v] = enumerate_points(g, make_map(pt, x, {v}), reading);
    if (pts[v].size() != efib[v].size()) {
      rep.counterexample = "fiber over " + x.names[v] + ": " +
                           std::to_string(pts[v].size()) + " vs " +
                           std::to_string(efib[v].size());
      return rep;
    }
    for (int k = 0; k < static_cast<int>(pts[v].size()); ++k)
      row_index[v][pts[v][k].slot[0]] = k;
  }

  struct Probe {
    SpaceMap alpha;
    std::vector<FunctorPoint> points;
    int top;  // largest base point the probe touches
  };
  std::vector<Probe> probes;
  for (const FinSpace& t : all_posets_up_to(max_probe))
    for (const SpaceMap& alpha : all_maps(t, x)) {
      if (t.size() == 0) continue;  // nothing to match
      Probe pr{alpha, enumerate_points(g, alpha, reading), 0};
      for (int z2 = 0; z2 < t.size(); ++z2) pr.top = std::max(pr.top, alpha(z2));
      auto homs = maps_over(alpha, e);
      if (pr.points.size() != homs.size()) {
        rep.counterexample = describe_probe(alpha) + ": " +
                             std::to_string(pr.points.size()) + " vs " +
                             std::to_string(homs.size());
        return rep;
      }
      probes.push_back(std::move(pr));
    }
  rep.probes = static_cast<int>(probes.size());

  // Search for slot-to-fiber matchings, one per base point, that send every
  // sheet datum to a continuous map.  Counts already agree, and distinct
  // data give distinct maps, so full validation exhibits a bijection; the
  // pointwise shape makes it natural in the probe.
  std::vector<std::vector<int>> match(x.size());
  std::string last_fail;
  auto probe_ok = [&](const Probe& pr) {
    const FinSpace& t = pr.alpha.source;
    for (const FunctorPoint& p : pr.points) {
      std::vector<int> u(t.size());
      for (int z2 = 0; z2 < t.size(); ++z2) {
        int v = pr.alpha(z2);
        u[z2] = efib[v][match[v][row_index[v].at(p.slot[z2])]];
      }
      for (int a = 0; a < t.size(); ++a)
        for (int b = 0; b < t.size(); ++b)
          if (t.leadsto(a, b) && !f.leadsto(u[a], u[b])) {
            last_fail = describe_probe(pr.alpha);
            return false;
          }
    }
    return true;
  };
  auto assign = [&](auto&& self, int v) -> bool {
    if (v == x.size()) return true;
    std::vector<int> perm(pts[v].size());
    for (size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<int>(k);
    std::sort(perm.begin(), perm.end());
    do {
      match[v] = perm;
      bool ok = true;
      for (const Probe& pr : probes)
        if (pr.top == v && !probe_ok(pr)) {
          ok = false;
          break;
        }
      if (ok && self(self, v + 1)) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  };
  if (assign(assign, 0)) {
    rep.agrees = true;
    return rep;
  }
  rep.counterexample = last_fail.empty() ? "no matching of fibers works" : last_fail;
  return rep;
}

namespace {

// Union-find over pairs (object, identification arrow into the probe point),
// merged along one generator rule supplied by the caller.
int pair_classes(const GroupoidPresentation& s, const GroupoidPresentation& t,
                 const SpaceMap& on_objects, const SpaceMap& on_arrows, int atlas_point) {
  std::vector<std::pair<int, int>> pts;
  std::map<std::pair<int, int>, int> idx;
  for (int w = 0; w < s.objects.size(); ++w)
    for (int rho = 0; rho < t.arrows.size(); ++rho)
      if (t.src(rho) == on_objects(w) && t.tgt(rho) == atlas_point) {
        idx[{w, rho}] = static_cast<int>(pts.size());
        pts.emplace_back(w, rho);
      }
  std::vector<int> parent(pts.size());
  for (size_t k = 0; k < pts.size(); ++k) parent[k] = static_cast<int>(k);
  auto root = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int b = 0; b < s.arrows.size(); ++b)
    for (int rho = 0; rho < t.arrows.size(); ++rho) {
      auto from = idx.find({s.src(b), rho});
      if (from == idx.end()) continue;
      int moved = t.comp[t.inv(on_arrows(b))][rho];
      if (moved < 0) continue;
      auto to = idx.find({s.tgt(b), moved});
      if (to == idx.end()) continue;
      parent[root(from->second)] = root(to->second);
    }
  std::set<int> roots;
  for (size_t k = 0; k < pts.size(); ++k) roots.insert(root(static_cast<int>(k)));
  return static_cast<int>(roots.size());
}

}  // namespace

int stack_point_classes(const StackMap& g, int atlas_point) {
  int n = pair_classes(g.source, g.target, g.on_objects, g.on_arrows, atlas_point);
  // the glued functor: a probe the source misses entirely classifies itself
  return n == 0 ? 1 : n;
}

int stack_hom_classes(const StackMap& e, int atlas_point) {
  return pair_classes(e.source, e.target, e.on_objects, e.on_arrows, atlas_point);
}

AgreementReport stack_point_agreement(const StackMap& g, const StackMap& e) {
  if (!(g.target == e.target))
    fail(ErrorKind::target_mismatch, "point agreement needs a common target");
  AgreementReport rep;
  rep.agrees = true;
  for (int x = 0; x < g.target.objects.size(); ++x) {
    ++rep.probes;
    int want = stack_point_classes(g, x);
    int got = stack_hom_classes(e, x);
    if (want != got) {
      rep.agrees = false;
      rep.counterexample = g.target.objects.names[x] + ": " + std::to_string(want) +
                           " section classes vs " + std::to_string(got) + " map classes";
      return rep;
    }
  }
  return rep;
}

}  // namespace stk
