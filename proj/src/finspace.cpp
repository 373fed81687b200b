#include "stk/finspace.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace stk {

PointSet set_union(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PointSet set_intersect(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PointSet set_minus(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool set_contains(const PointSet& a, int p) {
  return std::binary_search(a.begin(), a.end(), p);
}

bool set_subset(const PointSet& a, const PointSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::optional<int> FinSpace::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

int FinSpace::index_of(const std::string& name) const {
  if (auto i = find(name)) return *i;
  fail(ErrorKind::unknown_point, "unknown point '" + name + "'", name);
}

PointSet FinSpace::closure_of(int p) const {
  PointSet out;
  for (int b = 0; b < size(); ++b)
    if (leadsto(p, b)) out.push_back(b);
  return out;
}

PointSet FinSpace::minimal_open(int p) const {
  PointSet out;
  for (int a = 0; a < size(); ++a)
    if (leadsto(a, p)) out.push_back(a);
  return out;
}

PointSet FinSpace::closure_set(const PointSet& s) const {
  PointSet out;
  for (int b = 0; b < size(); ++b) {
    for (int a : s)
      if (leadsto(a, b)) {
        out.push_back(b);
        break;
      }
  }
  return out;
}

PointSet FinSpace::open_hull(const PointSet& s) const {
  PointSet out;
  for (int a = 0; a < size(); ++a) {
    for (int b : s)
      if (leadsto(a, b)) {
        out.push_back(a);
        break;
      }
  }
  return out;
}

bool FinSpace::is_closed_set(const PointSet& s) const { return closure_set(s) == s; }

bool FinSpace::is_open_set(const PointSet& s) const { return open_hull(s) == s; }

PointSet FinSpace::all_points() const {
  PointSet out(size());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::vector<PointSet> FinSpace::components() const {
  std::vector<int> comp(size(), -1);
  int next = 0;
  for (int seed = 0; seed < size(); ++seed) {
    if (comp[seed] != -1) continue;
    std::vector<int> stack{seed};
    comp[seed] = next;
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      for (int q = 0; q < size(); ++q) {
        if (comp[q] == -1 && (leadsto(p, q) || leadsto(q, p))) {
          comp[q] = next;
          stack.push_back(q);
        }
      }
    }
    ++next;
  }
  std::vector<PointSet> out(next);
  for (int p = 0; p < size(); ++p) out[comp[p]].push_back(p);
  return out;
}

PointSet FinSpace::generic_points() const {
  PointSet out;
  for (int p = 0; p < size(); ++p) {
    bool generic = true;
    for (int q = 0; q < size(); ++q)
      if (q != p && leadsto(q, p)) {
        generic = false;
        break;
      }
    if (generic) out.push_back(p);
  }
  return out;
}

FinSpace space_from_order(std::vector<std::string> names, std::vector<std::vector<char>> leads) {
  const int n = static_cast<int>(names.size());
  {
    std::set<std::string> seen;
    for (const auto& nm : names)
      if (!seen.insert(nm).second)
        fail(ErrorKind::validation_error, "duplicate point name '" + nm + "'", nm);
  }
  for (int a = 0; a < n; ++a) leads[a][a] = 1;
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      if (leads[a][k])
        for (int b = 0; b < n; ++b)
          if (leads[k][b]) leads[a][b] = 1;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (leads[a][b] && leads[b][a])
        fail(ErrorKind::antisymmetry_violation,
             "specialization cycle between '" + names[a] + "' and '" + names[b] + "'",
             names[a] + "<->" + names[b]);
  return FinSpace{std::move(names), std::move(leads)};
}

FinSpace validate_space(std::vector<std::string> names,
                        const std::vector<std::pair<std::string, std::string>>& rel) {
  const int n = static_cast<int>(names.size());
  std::vector<std::vector<char>> leads(n, std::vector<char>(n, 0));
  FinSpace lookup{names, {}};
  for (const auto& [a, b] : rel) {
    int ia = lookup.index_of(a), ib = lookup.index_of(b);
    leads[ia][ib] = 1;
  }
  return space_from_order(std::move(names), std::move(leads));
}

FinSpace empty_space() { return FinSpace{{}, {}}; }

FinSpace point_space(const std::string& name) { return FinSpace{{name}, {{1}}}; }

SpaceMap make_map(FinSpace source, FinSpace target, std::vector<int> assign) {
  if (static_cast<int>(assign.size()) != source.size())
    fail(ErrorKind::validation_error, "assignment size does not match source");
  for (int v : assign)
    if (v < 0 || v >= target.size())
      fail(ErrorKind::validation_error, "assignment hits a point outside the target");
  for (int a = 0; a < source.size(); ++a)
    for (int b = 0; b < source.size(); ++b)
      if (source.leadsto(a, b) && !target.leadsto(assign[a], assign[b]))
        fail(ErrorKind::not_continuous,
             "not continuous at " + source.names[a] + " > " + source.names[b],
             source.names[a] + ">" + source.names[b]);
  return SpaceMap{std::move(source), std::move(target), std::move(assign)};
}

SpaceMap make_map_by_names(const FinSpace& source, const FinSpace& target,
                           const std::vector<std::pair<std::string, std::string>>& assign) {
  std::vector<int> a(source.size(), -1);
  for (const auto& [p, q] : assign) a[source.index_of(p)] = target.index_of(q);
  for (int p = 0; p < source.size(); ++p)
    if (a[p] == -1)
      fail(ErrorKind::validation_error, "no value assigned for point '" + source.names[p] + "'",
           source.names[p]);
  return make_map(source, target, std::move(a));
}

SpaceMap identity_map(const FinSpace& x) {
  std::vector<int> a(x.size());
  std::iota(a.begin(), a.end(), 0);
  return SpaceMap{x, x, std::move(a)};
}

SpaceMap compose(const SpaceMap& f, const SpaceMap& g) {
  if (!(f.target == g.source))
    fail(ErrorKind::target_mismatch, "composition: middle spaces differ");
  std::vector<int> a(f.source.size());
  for (int p = 0; p < f.source.size(); ++p) a[p] = g.assign[f.assign[p]];
  return SpaceMap{f.source, g.target, std::move(a)};
}

MapProfile map_profile(const SpaceMap& f) {
  MapProfile out;
  const FinSpace& a = f.source;
  const FinSpace& x = f.target;

  out.fiber_degrees.assign(x.size(), 0);
  for (int p = 0; p < a.size(); ++p) out.fiber_degrees[f(p)]++;

  out.injective = true;
  for (int p = 0; p < a.size() && out.injective; ++p)
    for (int q = p + 1; q < a.size(); ++q)
      if (f(p) == f(q)) {
        out.injective = false;
        out.notes.emplace_back("injective", a.names[p] + "," + a.names[q]);
        break;
      }

  out.surjective = true;
  for (int v = 0; v < x.size(); ++v)
    if (out.fiber_degrees[v] == 0) {
      out.surjective = false;
      out.notes.emplace_back("surjective", x.names[v]);
      break;
    }

  out.local_embedding = true;
  out.etale = true;
  for (int p = 0; p < a.size(); ++p) {
    PointSet up = a.minimal_open(p);
    std::set<int> images;
    bool inj_here = true;
    for (int q : up)
      if (!images.insert(f(q)).second) inj_here = false;
    if (!inj_here) {
      if (out.local_embedding) out.notes.emplace_back("local_embedding", a.names[p]);
      out.local_embedding = false;
      out.etale = false;
      continue;
    }
    if (images.size() != x.minimal_open(f(p)).size()) {
      if (out.etale) out.notes.emplace_back("etale", a.names[p]);
      out.etale = false;
    }
  }

  out.open_embedding = out.injective && out.etale;

  out.closed_embedding = out.injective;
  if (out.closed_embedding) {
    PointSet im = image_of(f);
    if (!x.is_closed_set(im)) {
      out.closed_embedding = false;
      out.notes.emplace_back("closed_embedding", "image not specialization-closed");
    }
    for (int p = 0; p < a.size() && out.closed_embedding; ++p)
      for (int q = 0; q < a.size(); ++q)
        if (x.leadsto(f(p), f(q)) && !a.leadsto(p, q)) {
          out.closed_embedding = false;
          out.notes.emplace_back("closed_embedding",
                                 "order not reflected at " + a.names[p] + "," + a.names[q]);
          break;
        }
  } else if (a.size() > 0) {
    out.closed_embedding = false;
  }

  // separated: the diagonal is specialization-closed inside the self fiber product
  {
    FiberProduct ff = fiber_product(f, f);
    PointSet diag;
    for (int t = 0; t < ff.total.size(); ++t)
      if (ff.pairs[t].first == ff.pairs[t].second) diag.push_back(t);
    out.separated = ff.total.is_closed_set(diag);
    if (!out.separated) {
      PointSet cl = ff.total.closure_set(diag);
      PointSet extra = set_minus(cl, diag);
      out.notes.emplace_back("separated", ff.total.names[extra.front()]);
    }
  }

  // specialization lifting: every specialization of f(p) is hit from some
  // specialization of p (the decidable stand-in for universal closedness)
  bool lifting = true;
  for (int p = 0; p < a.size() && lifting; ++p)
    for (int v = 0; v < x.size(); ++v) {
      if (!x.leadsto(f(p), v)) continue;
      bool hit = false;
      for (int q = 0; q < a.size(); ++q)
        if (a.leadsto(p, q) && f(q) == v) {
          hit = true;
          break;
        }
      if (!hit) {
        lifting = false;
        out.notes.emplace_back("specialization_lifting", a.names[p] + " vs " + x.names[v]);
        break;
      }
    }
  out.proper = out.separated && lifting;

  return out;
}

Subspace subspace(const FinSpace& x, const PointSet& pts) {
  const int m = static_cast<int>(pts.size());
  std::vector<std::string> names(m);
  std::vector<std::vector<char>> leads(m, std::vector<char>(m, 0));
  for (int i = 0; i < m; ++i) {
    names[i] = x.names[pts[i]];
    for (int j = 0; j < m; ++j) leads[i][j] = x.leadsto(pts[i], pts[j]) ? 1 : 0;
  }
  FinSpace sub{std::move(names), std::move(leads)};
  SpaceMap incl{sub, x, PointSet(pts)};
  return Subspace{std::move(sub), std::move(incl)};
}

Subspace complement_of_closed(const FinSpace& x, const PointSet& closed_pts) {
  if (!x.is_closed_set(closed_pts))
    fail(ErrorKind::not_closed, "subset is not specialization-closed");
  return subspace(x, set_minus(x.all_points(), closed_pts));
}

PointSet image_of(const SpaceMap& f) {
  PointSet im(f.assign);
  std::sort(im.begin(), im.end());
  im.erase(std::unique(im.begin(), im.end()), im.end());
  return im;
}

ImageFactorization image_factorization(const SpaceMap& f) {
  PointSet im = image_of(f);
  Subspace s = subspace(f.target, im);
  std::vector<int> onto(f.source.size());
  for (int p = 0; p < f.source.size(); ++p) {
    onto[p] = static_cast<int>(std::lower_bound(im.begin(), im.end(), f(p)) - im.begin());
  }
  return ImageFactorization{SpaceMap{f.source, s.space, std::move(onto)}, s.incl};
}

std::optional<int> FiberProduct::pair_index(int a, int b) const {
  for (int t = 0; t < static_cast<int>(pairs.size()); ++t)
    if (pairs[t].first == a && pairs[t].second == b) return t;
  return std::nullopt;
}

FiberProduct fiber_product(const SpaceMap& f, const SpaceMap& g) {
  if (!(f.target == g.target)) fail(ErrorKind::target_mismatch, "fiber product: targets differ");
  const FinSpace& a = f.source;
  const FinSpace& b = g.source;
  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p < a.size(); ++p)
    for (int q = 0; q < b.size(); ++q)
      if (f(p) == g(q)) pairs.emplace_back(p, q);
  const int m = static_cast<int>(pairs.size());
  std::vector<std::string> names(m);
  std::vector<std::vector<char>> leads(m, std::vector<char>(m, 0));
  for (int s = 0; s < m; ++s) {
    names[s] = "(" + a.names[pairs[s].first] + "," + b.names[pairs[s].second] + ")";
    for (int t = 0; t < m; ++t)
      leads[s][t] =
          (a.leadsto(pairs[s].first, pairs[t].first) && b.leadsto(pairs[s].second, pairs[t].second))
              ? 1
              : 0;
  }
  FinSpace total{std::move(names), std::move(leads)};
  std::vector<int> a1(m), a2(m);
  for (int s = 0; s < m; ++s) {
    a1[s] = pairs[s].first;
    a2[s] = pairs[s].second;
  }
  return FiberProduct{total, SpaceMap{total, a, std::move(a1)}, SpaceMap{total, b, std::move(a2)},
                      std::move(pairs)};
}

namespace {

std::vector<std::string> merge_names(const FinSpace& a, const FinSpace& b) {
  bool clash = false;
  for (const auto& na : a.names)
    if (b.find(na)) {
      clash = true;
      break;
    }
  std::vector<std::string> names;
  names.reserve(a.size() + b.size());
  for (const auto& n : a.names) names.push_back(clash ? "1." + n : n);
  for (const auto& n : b.names) names.push_back(clash ? "2." + n : n);
  return names;
}

}  // namespace

DisjointUnion disjoint_union(const FinSpace& a, const FinSpace& b) {
  const int n = a.size(), m = b.size();
  std::vector<std::vector<char>> leads(n + m, std::vector<char>(n + m, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) leads[i][j] = a.leads[i][j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) leads[n + i][n + j] = b.leads[i][j];
  FinSpace total{merge_names(a, b), std::move(leads)};
  std::vector<int> i1(n), i2(m);
  std::iota(i1.begin(), i1.end(), 0);
  std::iota(i2.begin(), i2.end(), n);
  return DisjointUnion{total, SpaceMap{a, total, std::move(i1)}, SpaceMap{b, total, std::move(i2)}};
}

Glued glue_along_closed(const SpaceMap& i, const SpaceMap& j) {
  if (!(i.source == j.source))
    fail(ErrorKind::target_mismatch, "gluing legs have different sources");
  MapProfile pi = map_profile(i), pj = map_profile(j);
  if (!pi.closed_embedding)
    fail(ErrorKind::not_closed_embedding, "first gluing leg is not a closed embedding");
  if (!pj.closed_embedding)
    fail(ErrorKind::not_closed_embedding, "second gluing leg is not a closed embedding");

  const FinSpace& a = i.target;
  const FinSpace& b = j.target;
  const int n = a.size(), m = b.size();
  // classes: {i(z), j(z)} pairs, singletons elsewhere (legs are injective)
  std::vector<int> mate_a(n, -1), mate_b(m, -1);
  for (int z = 0; z < i.source.size(); ++z) {
    mate_a[i(z)] = j(z);
    mate_b[j(z)] = i(z);
  }
  std::vector<int> class_of_a(n, -1), class_of_b(m, -1);
  int next = 0;
  for (int p = 0; p < n; ++p) {
    class_of_a[p] = next;
    if (mate_a[p] != -1) class_of_b[mate_a[p]] = next;
    ++next;
  }
  std::vector<int> b_order;  // unmatched b points, in b order
  for (int q = 0; q < m; ++q)
    if (class_of_b[q] == -1) {
      class_of_b[q] = next++;
      b_order.push_back(q);
    }

  const int k = next;
  std::vector<std::string> names(k);
  std::set<std::string> used;
  for (int p = 0; p < n; ++p) {
    names[class_of_a[p]] = a.names[p];
    used.insert(a.names[p]);
  }
  for (int q : b_order) {
    std::string nm = b.names[q];
    while (used.count(nm)) nm = "2." + nm;
    used.insert(nm);
    names[class_of_b[q]] = nm;
  }

  std::vector<std::vector<char>> rel(k, std::vector<char>(k, 0));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (a.leadsto(p, q)) rel[class_of_a[p]][class_of_a[q]] = 1;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      if (b.leadsto(p, q)) rel[class_of_b[p]][class_of_b[q]] = 1;
  FinSpace total = space_from_order(std::move(names), std::move(rel));

  SpaceMap from_a = make_map(a, total, std::move(class_of_a));
  SpaceMap from_b = make_map(b, total, std::move(class_of_b));
  if (!map_profile(from_a).closed_embedding || !map_profile(from_b).closed_embedding)
    fail(ErrorKind::verification_failure, "pushout legs failed to stay closed embeddings");
  return Glued{std::move(total), std::move(from_a), std::move(from_b)};
}

Quotient quotient_space(const FinSpace& x, const std::vector<int>& class_of) {
  std::vector<int> ids;  // distinct class labels, renumbered by first occurrence
  std::vector<int> renum(x.size(), -1);
  std::map<int, int> seen;
  for (int p = 0; p < x.size(); ++p) {
    auto it = seen.find(class_of[p]);
    if (it == seen.end()) {
      it = seen.emplace(class_of[p], static_cast<int>(ids.size())).first;
      ids.push_back(class_of[p]);
    }
    renum[p] = it->second;
  }
  const int k = static_cast<int>(ids.size());
  std::vector<std::string> names(k);
  for (int c = 0; c < k; ++c) {
    std::string best;
    for (int p = 0; p < x.size(); ++p)
      if (renum[p] == c && (best.empty() || x.names[p] < best)) best = x.names[p];
    names[c] = best;
  }
  std::vector<std::vector<char>> rel(k, std::vector<char>(k, 0));
  for (int p = 0; p < x.size(); ++p)
    for (int q = 0; q < x.size(); ++q)
      if (x.leadsto(p, q)) rel[renum[p]][renum[q]] = 1;
  FinSpace total = space_from_order(std::move(names), std::move(rel));
  SpaceMap proj = make_map(x, total, std::move(renum));
  return Quotient{std::move(total), std::move(proj)};
}

namespace {

// degree-style invariant used to prune isomorphism search
std::vector<long> iso_invariant(const FinSpace& x) {
  std::vector<long> inv(x.size());
  for (int p = 0; p < x.size(); ++p)
    inv[p] = static_cast<long>(x.minimal_open(p).size()) * 1000 +
             static_cast<long>(x.closure_of(p).size());
  std::vector<long> out(x.size());
  for (int p = 0; p < x.size(); ++p) {
    long h = inv[p] * 31;
    std::vector<long> up, down;
    for (int q = 0; q < x.size(); ++q) {
      if (q == p) continue;
      if (x.leadsto(q, p)) up.push_back(inv[q]);
      if (x.leadsto(p, q)) down.push_back(inv[q]);
    }
    std::sort(up.begin(), up.end());
    std::sort(down.begin(), down.end());
    for (long v : up) h = h * 1000003 + v;
    h = h * 7 + 13;
    for (long v : down) h = h * 1000003 + v;
    out[p] = h;
  }
  return out;
}

bool iso_backtrack(const FinSpace& a, const FinSpace& b, const std::vector<std::vector<int>>& cand,
                   std::vector<int>& img, std::vector<char>& used, int p) {
  if (p == a.size()) return true;
  for (int q : cand[p]) {
    if (used[q]) continue;
    bool ok = true;
    for (int r = 0; r < p && ok; ++r) {
      if (a.leadsto(p, r) != b.leadsto(q, img[r])) ok = false;
      if (a.leadsto(r, p) != b.leadsto(img[r], q)) ok = false;
    }
    if (!ok) continue;
    img[p] = q;
    used[q] = 1;
    if (iso_backtrack(a, b, cand, img, used, p + 1)) return true;
    used[q] = 0;
  }
  return false;
}

std::optional<SpaceMap> find_iso_with(const FinSpace& a, const FinSpace& b,
                                      const std::vector<std::vector<int>>& cand) {
  for (const auto& c : cand)
    if (c.empty()) return std::nullopt;
  std::vector<int> img(a.size(), -1);
  std::vector<char> used(b.size(), 0);
  if (!iso_backtrack(a, b, cand, img, used, 0)) return std::nullopt;
  return SpaceMap{a, b, img};
}

}  // namespace

std::optional<SpaceMap> find_isomorphism(const FinSpace& a, const FinSpace& b) {
  if (a.size() != b.size()) return std::nullopt;
  auto ia = iso_invariant(a), ib = iso_invariant(b);
  {
    auto sa = ia, sb = ib;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return std::nullopt;
  }
  std::vector<std::vector<int>> cand(a.size());
  for (int p = 0; p < a.size(); ++p)
    for (int q = 0; q < b.size(); ++q)
      if (ia[p] == ib[q]) cand[p].push_back(q);
  return find_iso_with(a, b, cand);
}

std::optional<SpaceMap> find_isomorphism_over(const SpaceMap& ea, const SpaceMap& eb) {
  if (!(ea.target == eb.target)) fail(ErrorKind::target_mismatch, "bases differ");
  const FinSpace& a = ea.source;
  const FinSpace& b = eb.source;
  if (a.size() != b.size()) return std::nullopt;
  auto ia = iso_invariant(a), ib = iso_invariant(b);
  std::vector<std::vector<int>> cand(a.size());
  for (int p = 0; p < a.size(); ++p)
    for (int q = 0; q < b.size(); ++q)
      if (ia[p] == ib[q] && ea(p) == eb(q)) cand[p].push_back(q);
  return find_iso_with(a, b, cand);
}

namespace {

void maps_backtrack(const FinSpace& t, const FinSpace& x,
                    const std::vector<std::vector<int>>& cand, std::vector<int>& img, int p,
                    std::vector<SpaceMap>& out) {
  if (p == t.size()) {
    out.push_back(SpaceMap{t, x, img});
    return;
  }
  for (int v : cand[p]) {
    bool ok = true;
    for (int r = 0; r < p && ok; ++r) {
      if (t.leadsto(p, r) && !x.leadsto(v, img[r])) ok = false;
      if (t.leadsto(r, p) && !x.leadsto(img[r], v)) ok = false;
    }
    if (!ok) continue;
    img[p] = v;
    maps_backtrack(t, x, cand, img, p + 1, out);
  }
}

}  // namespace

std::vector<SpaceMap> all_maps(const FinSpace& t, const FinSpace& x) {
  std::vector<std::vector<int>> cand(t.size());
  for (int p = 0; p < t.size(); ++p) {
    cand[p].resize(x.size());
    std::iota(cand[p].begin(), cand[p].end(), 0);
  }
  std::vector<SpaceMap> out;
  std::vector<int> img(t.size(), -1);
  maps_backtrack(t, x, cand, img, 0, out);
  return out;
}

std::vector<SpaceMap> maps_over(const SpaceMap& alpha, const SpaceMap& e) {
  if (!(alpha.target == e.target)) fail(ErrorKind::target_mismatch, "bases differ");
  const FinSpace& t = alpha.source;
  const FinSpace& f = e.source;
  std::vector<std::vector<int>> cand(t.size());
  for (int p = 0; p < t.size(); ++p)
    for (int q = 0; q < f.size(); ++q)
      if (e(q) == alpha(p)) cand[p].push_back(q);
  std::vector<SpaceMap> out;
  std::vector<int> img(t.size(), -1);
  maps_backtrack(t, f, cand, img, 0, out);
  return out;
}

namespace {

std::string canonical_order_string(const std::vector<std::vector<char>>& m) {
  const int n = static_cast<int>(m.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    std::string s;
    s.reserve(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.push_back(m[perm[i]][perm[j]] ? '1' : '0');
    if (best.empty() || s < best) best = s;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

std::vector<FinSpace> all_posets_up_to(int max_points) {
  std::vector<FinSpace> out;
  out.push_back(empty_space());
  for (int n = 1; n <= max_points; ++n) {
    std::vector<std::string> names(n);
    for (int i = 0; i < n; ++i) names[i] = "t" + std::to_string(i);
    const int bits = n * (n - 1);
    std::set<std::string> seen;
    for (long mask = 0; mask < (1L << bits); ++mask) {
      std::vector<std::vector<char>> m(n, std::vector<char>(n, 0));
      int bit = 0;
      for (int i = 0; i < n; ++i) {
        m[i][i] = 1;
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          m[i][j] = (mask >> bit) & 1 ? 1 : 0;
          ++bit;
        }
      }
      bool ok = true;
      for (int i = 0; i < n && ok; ++i)
        for (int j = i + 1; j < n && ok; ++j)
          if (m[i][j] && m[j][i]) ok = false;
      for (int i = 0; i < n && ok; ++i)
        for (int j = 0; j < n && ok; ++j) {
          if (!m[i][j]) continue;
          for (int k = 0; k < n; ++k)
            if (m[j][k] && !m[i][k]) {
              ok = false;
              break;
            }
        }
      if (!ok) continue;
      if (seen.insert(canonical_order_string(m)).second) out.push_back(FinSpace{names, m});
    }
  }
  return out;
}

std::string render_dot(const FinSpace& x, const std::string& graph_name) {
  std::ostringstream os;
  os << "digraph \"" << graph_name << "\" {\n";
  os << "  rankdir=BT;\n";
  for (int p = 0; p < x.size(); ++p) os << "  n" << p << " [label=\"" << x.names[p] << "\"];\n";
  // covering relation only: a > b with nothing strictly between
  for (int a = 0; a < x.size(); ++a)
    for (int b = 0; b < x.size(); ++b) {
      if (a == b || !x.leadsto(a, b)) continue;
      bool covering = true;
      for (int c = 0; c < x.size(); ++c)
        if (c != a && c != b && x.leadsto(a, c) && x.leadsto(c, b)) {
          covering = false;
          break;
        }
      if (covering) os << "  n" << a << " -> n" << b << ";\n";
    }
  os << "}\n";
  return os.str();
}

}  // namespace stk
