#include "stk/groupoid.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace stk {

namespace {

// étale without the rest of map_profile (validation runs on arrow spaces
// whose self fiber products would be large)
bool is_etale_map(const SpaceMap& f, std::string* witness = nullptr) {
  const FinSpace& a = f.source;
  const FinSpace& x = f.target;
  for (int p = 0; p < a.size(); ++p) {
    PointSet up = a.minimal_open(p);
    std::set<int> images;
    for (int q : up) images.insert(f(q));
    if (images.size() != up.size() ||
        images.size() != x.minimal_open(f(p)).size()) {
      if (witness) *witness = a.names[p];
      return false;
    }
  }
  return true;
}

std::string triple_name(const std::string& a, const std::string& b, const std::string& c) {
  return "(" + a + "|" + b + "|" + c + ")";
}

}  // namespace

int GroupoidPresentation::compose_arrows(int r, int s) const {
  int t = comp[r][s];
  if (t < 0)
    fail(ErrorKind::validation_error,
         "arrows not composable: " + arrows.names[r] + ", " + arrows.names[s]);
  return t;
}

PointSet GroupoidPresentation::automorphisms_at(int u) const {
  PointSet out;
  for (int r = 0; r < arrows.size(); ++r)
    if (src(r) == u && tgt(r) == u) out.push_back(r);
  return out;
}

GroupoidPresentation validate_groupoid(FinSpace objects, FinSpace arrows, SpaceMap src,
                                       SpaceMap tgt, SpaceMap unit, SpaceMap inv,
                                       std::vector<std::vector<int>> comp) {
  auto check_shape = [&](const SpaceMap& m, const FinSpace& s, const FinSpace& t,
                         const char* which) {
    if (!(m.source == s) || !(m.target == t))
      fail(ErrorKind::validation_error, std::string("structure map ") + which +
                                            " has the wrong source or target");
  };
  check_shape(src, arrows, objects, "src");
  check_shape(tgt, arrows, objects, "tgt");
  check_shape(unit, objects, arrows, "unit");
  check_shape(inv, arrows, arrows, "inv");

  std::string w;
  if (!is_etale_map(src, &w))
    fail(ErrorKind::non_etale_structure_map, "src is not étale at arrow " + w, w);
  if (!is_etale_map(tgt, &w))
    fail(ErrorKind::non_etale_structure_map, "tgt is not étale at arrow " + w, w);

  const int nr = arrows.size();
  if (static_cast<int>(comp.size()) != nr)
    fail(ErrorKind::validation_error, "composition table has the wrong size");
  for (const auto& row : comp)
    if (static_cast<int>(row.size()) != nr)
      fail(ErrorKind::validation_error, "composition table has the wrong size");

  auto bad = [&](const std::string& axiom, const std::string& witness) {
    fail(ErrorKind::axiom_violation, axiom + " fails at " + witness, witness);
  };

  for (int u = 0; u < objects.size(); ++u)
    if (src(unit(u)) != u || tgt(unit(u)) != u)
      bad("unit endpoints", objects.names[u]);
  for (int r = 0; r < nr; ++r) {
    if (src(inv(r)) != tgt(r) || tgt(inv(r)) != src(r)) bad("inverse endpoints", arrows.names[r]);
    if (inv(inv(r)) != r) bad("inverse involution", arrows.names[r]);
  }
  for (int r = 0; r < nr; ++r)
    for (int s = 0; s < nr; ++s) {
      bool composable = tgt(r) == src(s);
      if (composable != (comp[r][s] >= 0))
        bad("composability domain", arrows.names[r] + ";" + arrows.names[s]);
      if (comp[r][s] >= 0) {
        int t = comp[r][s];
        if (t >= nr) bad("composition range", arrows.names[r] + ";" + arrows.names[s]);
        if (src(t) != src(r) || tgt(t) != tgt(s))
          bad("composition endpoints", arrows.names[r] + ";" + arrows.names[s]);
      }
    }
  for (int r = 0; r < nr; ++r) {
    if (comp[unit(src(r))][r] != r) bad("left unit law", arrows.names[r]);
    if (comp[r][unit(tgt(r))] != r) bad("right unit law", arrows.names[r]);
    if (comp[r][inv(r)] != unit(src(r))) bad("right inverse law", arrows.names[r]);
    if (comp[inv(r)][r] != unit(tgt(r))) bad("left inverse law", arrows.names[r]);
  }
  // associativity over composable triples
  std::vector<std::vector<int>> by_src(objects.size());
  for (int r = 0; r < nr; ++r) by_src[src(r)].push_back(r);
  for (int r = 0; r < nr; ++r)
    for (int s : by_src[tgt(r)])
      for (int t : by_src[tgt(s)])
        if (comp[comp[r][s]][t] != comp[r][comp[s][t]])
          bad("associativity",
              arrows.names[r] + ";" + arrows.names[s] + ";" + arrows.names[t]);
  // composition is continuous on the composable-pair space
  std::vector<std::pair<int, int>> lead_pairs;
  for (int r = 0; r < nr; ++r)
    for (int s = 0; s < nr; ++s)
      if (arrows.leadsto(r, s)) lead_pairs.emplace_back(r, s);
  for (auto [r, r2] : lead_pairs)
    for (auto [s, s2] : lead_pairs) {
      if (comp[r][s] < 0 || comp[r2][s2] < 0) continue;
      if (!arrows.leadsto(comp[r][s], comp[r2][s2]))
        bad("composition continuity",
            arrows.names[r] + ";" + arrows.names[s]);
    }

  return GroupoidPresentation{std::move(objects), std::move(arrows), std::move(src),
                              std::move(tgt),     std::move(unit),   std::move(inv),
                              std::move(comp)};
}

GroupoidPresentation trivial_groupoid(const FinSpace& a) {
  SpaceMap id = identity_map(a);
  const int n = a.size();
  std::vector<std::vector<int>> comp(n, std::vector<int>(n, -1));
  for (int r = 0; r < n; ++r) comp[r][r] = r;
  return validate_groupoid(a, a, id, id, id, id, std::move(comp));
}

GroupoidPresentation group_groupoid(std::vector<std::string> element_names, int unit_element,
                                    const std::vector<std::vector<int>>& mult) {
  const int n = static_cast<int>(element_names.size());
  FinSpace pt = point_space("pt");
  std::vector<std::vector<char>> discrete(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) discrete[i][i] = 1;
  FinSpace r{std::move(element_names), std::move(discrete)};
  SpaceMap to_pt = make_map(r, pt, std::vector<int>(n, 0));
  SpaceMap unit = make_map(pt, r, {unit_element});
  std::vector<int> inv_assign(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b)
      if (mult[a][b] == unit_element) inv_assign[a] = b;
    if (inv_assign[a] == -1) inv_assign[a] = a;  // let the axiom check name the culprit
  }
  SpaceMap inv = make_map(r, r, std::move(inv_assign));
  std::vector<std::vector<int>> comp = mult;
  return validate_groupoid(pt, r, to_pt, to_pt, unit, inv, std::move(comp));
}

GroupoidPresentation cech_groupoid(const SpaceMap& cover) {
  FiberProduct fp = fiber_product(cover, cover);
  const FinSpace& u = cover.source;
  const int nr = fp.total.size();
  std::vector<int> unit_assign(u.size()), inv_assign(nr);
  for (int p = 0; p < u.size(); ++p) unit_assign[p] = *fp.pair_index(p, p);
  for (int r = 0; r < nr; ++r)
    inv_assign[r] = *fp.pair_index(fp.pairs[r].second, fp.pairs[r].first);
  std::vector<std::vector<int>> comp(nr, std::vector<int>(nr, -1));
  for (int r = 0; r < nr; ++r)
    for (int s = 0; s < nr; ++s)
      if (fp.pairs[r].second == fp.pairs[s].first)
        comp[r][s] = *fp.pair_index(fp.pairs[r].first, fp.pairs[s].second);
  return validate_groupoid(u, fp.total, fp.pr1, fp.pr2, make_map(u, fp.total, unit_assign),
                           make_map(fp.total, fp.total, inv_assign), std::move(comp));
}

namespace {

bool stack_map_is_strict(const GroupoidPresentation& s, const GroupoidPresentation& t,
                         const SpaceMap& fu, const SpaceMap& fr, std::string* why) {
  for (int r = 0; r < s.arrows.size(); ++r) {
    if (t.src(fr(r)) != fu(s.src(r)) || t.tgt(fr(r)) != fu(s.tgt(r))) {
      if (why) *why = "endpoints not preserved at arrow " + s.arrows.names[r];
      return false;
    }
    if (fr(s.inv(r)) != t.inv(fr(r))) {
      if (why) *why = "inverses not preserved at arrow " + s.arrows.names[r];
      return false;
    }
  }
  for (int u = 0; u < s.objects.size(); ++u)
    if (fr(s.unit(u)) != t.unit(fu(u))) {
      if (why) *why = "units not preserved at object " + s.objects.names[u];
      return false;
    }
  for (int r = 0; r < s.arrows.size(); ++r)
    for (int q = 0; q < s.arrows.size(); ++q) {
      if (s.comp[r][q] < 0) continue;
      if (fr(s.comp[r][q]) != t.comp[fr(r)][fr(q)]) {
        if (why)
          *why = "composition not preserved at " + s.arrows.names[r] + ";" + s.arrows.names[q];
        return false;
      }
    }
  return true;
}

}  // namespace

StackMap make_stack_map(GroupoidPresentation source, GroupoidPresentation target,
                        SpaceMap on_objects, SpaceMap on_arrows) {
  if (!(on_objects.source == source.objects) || !(on_objects.target == target.objects) ||
      !(on_arrows.source == source.arrows) || !(on_arrows.target == target.arrows))
    fail(ErrorKind::validation_error, "stack map components have wrong endpoints");
  std::string why;
  if (!stack_map_is_strict(source, target, on_objects, on_arrows, &why))
    fail(ErrorKind::validation_error, "not a strict map: " + why);
  return StackMap{std::move(source), std::move(target), std::move(on_objects),
                  std::move(on_arrows)};
}

StackMap identity_stack_map(const GroupoidPresentation& g) {
  return StackMap{g, g, identity_map(g.objects), identity_map(g.arrows)};
}

StackMap compose_stack_maps(const StackMap& f, const StackMap& g) {
  if (!(f.target == g.source)) fail(ErrorKind::target_mismatch, "composition: middle stacks differ");
  return StackMap{f.source, g.target, compose(f.on_objects, g.on_objects),
                  compose(f.on_arrows, g.on_arrows)};
}

StackMap trivial_stack_map(const SpaceMap& f) {
  return StackMap{trivial_groupoid(f.source), trivial_groupoid(f.target), f, f};
}

StackMap atlas_map(const GroupoidPresentation& g) {
  GroupoidPresentation t = trivial_groupoid(g.objects);
  return StackMap{t, g, identity_map(g.objects), g.unit};
}

RefinedStackMap validate_refined(StackMap map, std::optional<StackMap> refinement) {
  if (refinement) {
    if (!(refinement->source == map.source))
      fail(ErrorKind::validation_error, "refinement leg must share the refined source");
    MoritaReport r = morita_check(*refinement);
    if (!r.ok())
      fail(ErrorKind::verification_failure, "refinement leg is not a Morita morphism: " + r.witness);
  }
  return RefinedStackMap{std::move(map), std::move(refinement)};
}

std::optional<SpaceMap> find_two_cell(const StackMap& f, const StackMap& g) {
  if (!(f.source == g.source) || !(f.target == g.target))
    fail(ErrorKind::target_mismatch, "two-cell endpoints differ");
  const GroupoidPresentation& s = f.source;
  const GroupoidPresentation& t = f.target;
  const int n = s.objects.size();
  std::vector<std::vector<int>> cand(n);
  for (int u = 0; u < n; ++u)
    for (int rho = 0; rho < t.arrows.size(); ++rho)
      if (t.src(rho) == f.on_objects(u) && t.tgt(rho) == g.on_objects(u)) cand[u].push_back(rho);
  std::vector<int> theta(n, -1);
  auto natural_at = [&](int r) {
    int a = s.src(r), b = s.tgt(r);
    if (theta[a] < 0 || theta[b] < 0) return true;  // not decidable yet
    return t.comp[f.on_arrows(r)][theta[b]] == t.comp[theta[a]][g.on_arrows(r)];
  };
  std::function<bool(int)> go = [&](int u) -> bool {
    if (u == n) return true;
    for (int rho : cand[u]) {
      bool ok = true;
      for (int v = 0; v < u && ok; ++v) {
        if (s.objects.leadsto(u, v) && !t.arrows.leadsto(rho, theta[v])) ok = false;
        if (s.objects.leadsto(v, u) && !t.arrows.leadsto(theta[v], rho)) ok = false;
      }
      if (!ok) continue;
      theta[u] = rho;
      for (int r = 0; r < s.arrows.size() && ok; ++r)
        if (s.src(r) == u || s.tgt(r) == u) ok = natural_at(r);
      if (ok && go(u + 1)) return true;
      theta[u] = -1;
    }
    return false;
  };
  if (!go(0)) return std::nullopt;
  return make_map(s.objects, t.arrows, theta);
}

namespace {

struct ProductSpace {
  FinSpace total;
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<int>> index;  // [a][b] -> point
};

ProductSpace product_space(const FinSpace& a, const FinSpace& b) {
  ProductSpace out;
  out.index.assign(a.size(), std::vector<int>(b.size(), -1));
  std::vector<std::string> names;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) {
      out.index[i][j] = static_cast<int>(out.pairs.size());
      out.pairs.emplace_back(i, j);
      names.push_back("(" + a.names[i] + "," + b.names[j] + ")");
    }
  const int m = static_cast<int>(out.pairs.size());
  std::vector<std::vector<char>> leads(m, std::vector<char>(m, 0));
  for (int s = 0; s < m; ++s)
    for (int t = 0; t < m; ++t)
      leads[s][t] = (a.leadsto(out.pairs[s].first, out.pairs[t].first) &&
                     b.leadsto(out.pairs[s].second, out.pairs[t].second))
                        ? 1
                        : 0;
  out.total = FinSpace{std::move(names), std::move(leads)};
  return out;
}

}  // namespace

ProductGroupoid product_groupoid(const GroupoidPresentation& a, const GroupoidPresentation& b) {
  ProductSpace objs = product_space(a.objects, b.objects);
  ProductSpace arrs = product_space(a.arrows, b.arrows);
  const int nr = arrs.total.size();
  std::vector<int> src_a(nr), tgt_a(nr), inv_a(nr);
  for (int r = 0; r < nr; ++r) {
    auto [r1, r2] = arrs.pairs[r];
    src_a[r] = objs.index[a.src(r1)][b.src(r2)];
    tgt_a[r] = objs.index[a.tgt(r1)][b.tgt(r2)];
    inv_a[r] = arrs.index[a.inv(r1)][b.inv(r2)];
  }
  std::vector<int> unit_a(objs.total.size());
  for (int u = 0; u < objs.total.size(); ++u) {
    auto [u1, u2] = objs.pairs[u];
    unit_a[u] = arrs.index[a.unit(u1)][b.unit(u2)];
  }
  std::vector<std::vector<int>> comp(nr, std::vector<int>(nr, -1));
  for (int r = 0; r < nr; ++r)
    for (int s = 0; s < nr; ++s) {
      auto [r1, r2] = arrs.pairs[r];
      auto [s1, s2] = arrs.pairs[s];
      if (a.comp[r1][s1] >= 0 && b.comp[r2][s2] >= 0)
        comp[r][s] = arrs.index[a.comp[r1][s1]][b.comp[r2][s2]];
    }
  GroupoidPresentation total = validate_groupoid(
      objs.total, arrs.total, make_map(arrs.total, objs.total, src_a),
      make_map(arrs.total, objs.total, tgt_a), make_map(objs.total, arrs.total, unit_a),
      make_map(arrs.total, arrs.total, inv_a), std::move(comp));
  std::vector<int> po1(objs.total.size()), po2(objs.total.size()), pa1(nr), pa2(nr);
  for (int u = 0; u < objs.total.size(); ++u) {
    po1[u] = objs.pairs[u].first;
    po2[u] = objs.pairs[u].second;
  }
  for (int r = 0; r < nr; ++r) {
    pa1[r] = arrs.pairs[r].first;
    pa2[r] = arrs.pairs[r].second;
  }
  StackMap pr1 = make_stack_map(total, a, make_map(total.objects, a.objects, po1),
                                make_map(total.arrows, a.arrows, pa1));
  StackMap pr2 = make_stack_map(total, b, make_map(total.objects, b.objects, po2),
                                make_map(total.arrows, b.arrows, pa2));
  return ProductGroupoid{std::move(total), std::move(pr1), std::move(pr2)};
}

StackMap diagonal_map(const GroupoidPresentation& g) {
  ProductGroupoid p = product_groupoid(g, g);
  std::vector<int> ou(g.objects.size()), oa(g.arrows.size());
  for (int u = 0; u < g.objects.size(); ++u)
    ou[u] = u * g.objects.size() + u;  // row-major pair (u,u)
  for (int r = 0; r < g.arrows.size(); ++r) oa[r] = r * g.arrows.size() + r;
  return make_stack_map(g, p.total, make_map(g.objects, p.total.objects, ou),
                        make_map(g.arrows, p.total.arrows, oa));
}

std::optional<int> StackFiberProduct::object_index(int u1, int rho, int u2) const {
  for (int i = 0; i < static_cast<int>(object_triples.size()); ++i)
    if (object_triples[i] == std::make_tuple(u1, rho, u2)) return i;
  return std::nullopt;
}

StackFiberProduct stack_fiber_product(const StackMap& f, const StackMap& g) {
  if (!(f.target == g.target)) fail(ErrorKind::target_mismatch, "fiber product: targets differ");
  const GroupoidPresentation& t = f.target;
  const GroupoidPresentation& a = f.source;
  const GroupoidPresentation& b = g.source;

  std::vector<std::tuple<int, int, int>> objs;
  std::map<std::tuple<int, int, int>, int> obj_index;
  std::vector<std::string> obj_names;
  for (int u1 = 0; u1 < a.objects.size(); ++u1)
    for (int rho = 0; rho < t.arrows.size(); ++rho) {
      if (t.src(rho) != f.on_objects(u1)) continue;
      for (int u2 = 0; u2 < b.objects.size(); ++u2) {
        if (t.tgt(rho) != g.on_objects(u2)) continue;
        obj_index[{u1, rho, u2}] = static_cast<int>(objs.size());
        objs.emplace_back(u1, rho, u2);
        obj_names.push_back(
            triple_name(a.objects.names[u1], t.arrows.names[rho], b.objects.names[u2]));
      }
    }
  const int no = static_cast<int>(objs.size());
  std::vector<std::vector<char>> obj_leads(no, std::vector<char>(no, 0));
  for (int s = 0; s < no; ++s)
    for (int q = 0; q < no; ++q) {
      auto [a1, r1, b1] = objs[s];
      auto [a2, r2, b2] = objs[q];
      obj_leads[s][q] = (a.objects.leadsto(a1, a2) && t.arrows.leadsto(r1, r2) &&
                         b.objects.leadsto(b1, b2))
                            ? 1
                            : 0;
    }
  FinSpace obj_space{obj_names, std::move(obj_leads)};

  // arrows carry the connecting arrow of their source object
  std::vector<std::tuple<int, int, int>> arrs;
  std::vector<std::string> arr_names;
  for (int r1 = 0; r1 < a.arrows.size(); ++r1)
    for (int rho = 0; rho < t.arrows.size(); ++rho) {
      if (t.src(rho) != f.on_objects(a.src(r1))) continue;
      for (int r2 = 0; r2 < b.arrows.size(); ++r2) {
        if (t.tgt(rho) != g.on_objects(b.src(r2))) continue;
        arrs.emplace_back(r1, rho, r2);
        arr_names.push_back(
            triple_name(a.arrows.names[r1], t.arrows.names[rho], b.arrows.names[r2]));
      }
    }
  const int nr = static_cast<int>(arrs.size());
  std::map<std::tuple<int, int, int>, int> arr_index;
  for (int r = 0; r < nr; ++r) arr_index[arrs[r]] = r;
  std::vector<std::vector<char>> arr_leads(nr, std::vector<char>(nr, 0));
  for (int s = 0; s < nr; ++s)
    for (int q = 0; q < nr; ++q) {
      auto [x1, r1, y1] = arrs[s];
      auto [x2, r2, y2] = arrs[q];
      arr_leads[s][q] =
          (a.arrows.leadsto(x1, x2) && t.arrows.leadsto(r1, r2) && b.arrows.leadsto(y1, y2)) ? 1
                                                                                             : 0;
    }
  FinSpace arr_space{arr_names, std::move(arr_leads)};

  auto transported = [&](int r1, int rho, int r2) {
    // connecting arrow at the target object
    int left = t.inv(f.on_arrows(r1));
    return t.comp[t.comp[left][rho]][g.on_arrows(r2)];
  };

  std::vector<int> src_a(nr), tgt_a(nr), inv_a(nr);
  for (int r = 0; r < nr; ++r) {
    auto [r1, rho, r2] = arrs[r];
    src_a[r] = obj_index.at({a.src(r1), rho, b.src(r2)});
    int rho2 = transported(r1, rho, r2);
    tgt_a[r] = obj_index.at({a.tgt(r1), rho2, b.tgt(r2)});
    inv_a[r] = arr_index.at({a.inv(r1), rho2, b.inv(r2)});
  }
  std::vector<int> unit_a(no);
  for (int u = 0; u < no; ++u) {
    auto [u1, rho, u2] = objs[u];
    unit_a[u] = arr_index.at({a.unit(u1), rho, b.unit(u2)});
  }
  std::vector<std::vector<int>> comp(nr, std::vector<int>(nr, -1));
  for (int r = 0; r < nr; ++r)
    for (int s = 0; s < nr; ++s) {
      if (tgt_a[r] != src_a[s]) continue;
      auto [r1, rho, r2] = arrs[r];
      auto [s1, sigma, s2] = arrs[s];
      (void)sigma;
      comp[r][s] = arr_index.at({a.comp[r1][s1], rho, b.comp[r2][s2]});
    }

  GroupoidPresentation total = validate_groupoid(
      obj_space, arr_space, make_map(arr_space, obj_space, src_a),
      make_map(arr_space, obj_space, tgt_a), make_map(obj_space, arr_space, unit_a),
      make_map(arr_space, arr_space, inv_a), std::move(comp));

  std::vector<int> po1(no), po2(no), pa1(nr), pa2(nr), cell(no);
  for (int u = 0; u < no; ++u) {
    po1[u] = std::get<0>(objs[u]);
    po2[u] = std::get<2>(objs[u]);
    cell[u] = std::get<1>(objs[u]);
  }
  for (int r = 0; r < nr; ++r) {
    pa1[r] = std::get<0>(arrs[r]);
    pa2[r] = std::get<2>(arrs[r]);
  }
  StackMap pr1 = make_stack_map(total, a, make_map(total.objects, a.objects, po1),
                                make_map(total.arrows, a.arrows, pa1));
  StackMap pr2 = make_stack_map(total, b, make_map(total.objects, b.objects, po2),
                                make_map(total.arrows, b.arrows, pa2));
  SpaceMap two_cell = make_map(total.objects, t.arrows, cell);
  return StackFiberProduct{std::move(total), std::move(pr1),  std::move(pr2),
                           std::move(two_cell), std::move(objs), std::move(arrs)};
}

GroupoidPresentation inertia(const GroupoidPresentation& g, int n) {
  if (n < 1) fail(ErrorKind::validation_error, "inertia order must be at least 1");
  StackMap d = diagonal_map(g);
  StackMap cur = d;
  GroupoidPresentation result = g;
  for (int k = 1; k <= n; ++k) {
    StackFiberProduct fp = stack_fiber_product(cur, d);
    result = fp.total;
    cur = compose_stack_maps(fp.pr2, d);
  }
  return result;
}

std::vector<PointSet> clopen_components(const GroupoidPresentation& g) {
  const int n = g.objects.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int x, int y) { parent[root(x)] = root(y); };
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (g.objects.leadsto(p, q)) unite(p, q);
  for (int r = 0; r < g.arrows.size(); ++r) unite(g.src(r), g.tgt(r));
  std::map<int, PointSet> classes;
  for (int p = 0; p < n; ++p) classes[root(p)].push_back(p);
  std::vector<PointSet> out;
  for (auto& [_, pts] : classes) out.push_back(pts);
  std::sort(out.begin(), out.end());
  return out;
}

GroupoidPresentation full_subgroupoid(const GroupoidPresentation& g, const PointSet& atlas_pts) {
  Subspace u = subspace(g.objects, atlas_pts);
  PointSet arrow_pts;
  for (int r = 0; r < g.arrows.size(); ++r)
    if (set_contains(atlas_pts, g.src(r)) && set_contains(atlas_pts, g.tgt(r)))
      arrow_pts.push_back(r);
  Subspace rr = subspace(g.arrows, arrow_pts);
  auto obj_new = [&](int p) {
    return static_cast<int>(std::lower_bound(atlas_pts.begin(), atlas_pts.end(), p) -
                            atlas_pts.begin());
  };
  auto arr_new = [&](int r) {
    return static_cast<int>(std::lower_bound(arrow_pts.begin(), arrow_pts.end(), r) -
                            arrow_pts.begin());
  };
  const int nr = static_cast<int>(arrow_pts.size());
  std::vector<int> src_a(nr), tgt_a(nr), inv_a(nr);
  for (int i = 0; i < nr; ++i) {
    src_a[i] = obj_new(g.src(arrow_pts[i]));
    tgt_a[i] = obj_new(g.tgt(arrow_pts[i]));
    inv_a[i] = arr_new(g.inv(arrow_pts[i]));
  }
  std::vector<int> unit_a(atlas_pts.size());
  for (size_t i = 0; i < atlas_pts.size(); ++i) unit_a[i] = arr_new(g.unit(atlas_pts[i]));
  std::vector<std::vector<int>> comp(nr, std::vector<int>(nr, -1));
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j) {
      int c = g.comp[arrow_pts[i]][arrow_pts[j]];
      if (c >= 0) comp[i][j] = arr_new(c);
    }
  return validate_groupoid(u.space, rr.space, make_map(rr.space, u.space, src_a),
                           make_map(rr.space, u.space, tgt_a),
                           make_map(u.space, rr.space, unit_a),
                           make_map(rr.space, rr.space, inv_a), std::move(comp));
}

std::vector<GroupoidPresentation> clopen_decomposition(const GroupoidPresentation& g) {
  std::vector<GroupoidPresentation> out;
  for (const auto& pts : clopen_components(g)) out.push_back(full_subgroupoid(g, pts));
  return out;
}

Quotient orbit_space(const GroupoidPresentation& g) {
  const int n = g.objects.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int r = 0; r < g.arrows.size(); ++r) parent[root(g.src(r))] = root(g.tgt(r));
  std::vector<int> cls(n);
  for (int p = 0; p < n; ++p) cls[p] = root(p);
  return quotient_space(g.objects, cls);
}

MoritaReport morita_check(const StackMap& m) {
  MoritaReport out;
  const GroupoidPresentation& s = m.source;
  const GroupoidPresentation& t = m.target;

  // fully faithful: arrows are exactly triples (a, b, connecting target arrow)
  std::vector<std::tuple<int, int, int>> triples;
  std::map<std::tuple<int, int, int>, int> tri_index;
  for (int a = 0; a < s.objects.size(); ++a)
    for (int b = 0; b < s.objects.size(); ++b)
      for (int rho = 0; rho < t.arrows.size(); ++rho)
        if (t.src(rho) == m.on_objects(a) && t.tgt(rho) == m.on_objects(b)) {
          tri_index[{a, b, rho}] = static_cast<int>(triples.size());
          triples.emplace_back(a, b, rho);
        }
  out.fully_faithful = true;
  if (static_cast<int>(triples.size()) != s.arrows.size()) {
    out.fully_faithful = false;
    out.witness = "arrow square: " + std::to_string(s.arrows.size()) + " arrows vs " +
                  std::to_string(triples.size()) + " triples";
  } else {
    std::vector<char> hit(triples.size(), 0);
    for (int r = 0; r < s.arrows.size() && out.fully_faithful; ++r) {
      auto it = tri_index.find({s.src(r), s.tgt(r), m.on_arrows(r)});
      if (it == tri_index.end() || hit[it->second]) {
        out.fully_faithful = false;
        out.witness = "arrow square not bijective at " + s.arrows.names[r];
      } else {
        hit[it->second] = 1;
      }
    }
    // order compatibility both ways
    for (int r = 0; r < s.arrows.size() && out.fully_faithful; ++r)
      for (int q = 0; q < s.arrows.size(); ++q) {
        bool lead_src = s.arrows.leadsto(r, q);
        bool lead_tri = s.objects.leadsto(s.src(r), s.src(q)) &&
                        s.objects.leadsto(s.tgt(r), s.tgt(q)) &&
                        t.arrows.leadsto(m.on_arrows(r), m.on_arrows(q));
        if (lead_src != lead_tri) {
          out.fully_faithful = false;
          out.witness = "arrow square order mismatch at " + s.arrows.names[r] + ";" +
                        s.arrows.names[q];
          break;
        }
      }
  }

  // essentially surjective: target objects are reached étale-ly from the source
  std::vector<std::pair<int, int>> qpts;
  for (int u = 0; u < s.objects.size(); ++u)
    for (int rho = 0; rho < t.arrows.size(); ++rho)
      if (t.src(rho) == m.on_objects(u)) qpts.emplace_back(u, rho);
  const int nq = static_cast<int>(qpts.size());
  std::vector<std::string> qnames(nq);
  std::vector<std::vector<char>> qleads(nq, std::vector<char>(nq, 0));
  for (int i = 0; i < nq; ++i) {
    qnames[i] = "(" + s.objects.names[qpts[i].first] + "|" + t.arrows.names[qpts[i].second] + ")";
    for (int j = 0; j < nq; ++j)
      qleads[i][j] = (s.objects.leadsto(qpts[i].first, qpts[j].first) &&
                      t.arrows.leadsto(qpts[i].second, qpts[j].second))
                         ? 1
                         : 0;
  }
  FinSpace qspace{std::move(qnames), std::move(qleads)};
  std::vector<int> qassign(nq);
  for (int i = 0; i < nq; ++i) qassign[i] = t.tgt(qpts[i].second);
  SpaceMap qmap = make_map(qspace, t.objects, qassign);
  std::string w;
  bool etale = is_etale_map(qmap, &w);
  bool surj = image_of(qmap).size() == static_cast<size_t>(t.objects.size());
  out.essentially_surjective = etale && surj;
  if (!out.essentially_surjective && out.witness.empty())
    out.witness = etale ? "not essentially surjective onto the atlas" : "descent map not étale at " + w;
  return out;
}

SpaceMap atlas_realization(const StackMap& m) {
  StackFiberProduct p = stack_fiber_product(m, atlas_map(m.target));
  for (int u = 0; u < p.total.objects.size(); ++u)
    if (p.total.automorphisms_at(u).size() != 1)
      fail(ErrorKind::hypothesis_not_met,
           "map is not representable: the atlas pullback has a stabilizer",
           p.total.objects.names[u]);
  Quotient v = orbit_space(p.total);
  std::vector<int> assign(v.space.size(), -1);
  for (int obj = 0; obj < p.total.objects.size(); ++obj)
    assign[v.proj(obj)] = std::get<2>(p.object_triples[obj]);
  return make_map(v.space, m.target.objects, std::move(assign));
}

StackProfile stack_map_profile(const StackMap& m) {
  StackProfile out;
  const GroupoidPresentation& s = m.source;

  out.representable = true;
  for (int u = 0; u < s.objects.size() && out.representable; ++u) {
    PointSet aut = s.automorphisms_at(u);
    std::set<int> images;
    for (int r : aut)
      if (!images.insert(m.on_arrows(r)).second) {
        out.representable = false;
        break;
      }
  }

  // base change to the target atlas, then classify the resulting space map
  StackFiberProduct p = stack_fiber_product(m, atlas_map(m.target));
  Quotient v = orbit_space(p.total);
  std::vector<int> assign(v.space.size(), -1);
  for (int obj = 0; obj < p.total.objects.size(); ++obj)
    assign[v.proj(obj)] = std::get<2>(p.object_triples[obj]);
  SpaceMap vmap = make_map(v.space, m.target.objects, assign);
  MapProfile prof = map_profile(vmap);
  out.etale = prof.etale;
  out.local_embedding = prof.local_embedding;
  out.closed_embedding = prof.closed_embedding;
  out.separated = prof.separated;
  out.proper = prof.proper;
  out.surjective = prof.surjective;
  return out;
}

std::vector<StackMap> all_stack_maps(const GroupoidPresentation& g,
                                     const GroupoidPresentation& h) {
  std::vector<StackMap> out;
  for (const auto& obj : all_maps(g.objects, h.objects)) {
    // forced values: units
    std::vector<std::vector<int>> cand(g.arrows.size());
    bool feasible = true;
    std::vector<int> forced(g.arrows.size(), -1);
    for (int u = 0; u < g.objects.size(); ++u) forced[g.unit(u)] = h.unit(obj(u));
    for (int r = 0; r < g.arrows.size() && feasible; ++r) {
      if (forced[r] >= 0) {
        cand[r] = {forced[r]};
        continue;
      }
      for (int rho = 0; rho < h.arrows.size(); ++rho)
        if (h.src(rho) == obj(g.src(r)) && h.tgt(rho) == obj(g.tgt(r))) cand[r].push_back(rho);
      if (cand[r].empty()) feasible = false;
    }
    if (!feasible) continue;
    std::vector<int> arr(g.arrows.size(), -1);
    std::function<void(int)> go = [&](int r) {
      if (r == g.arrows.size()) {
        SpaceMap oa{g.arrows, h.arrows, arr};
        // continuity was enforced incrementally; verify strictness fully
        if (stack_map_is_strict(g, h, obj, oa, nullptr))
          out.push_back(StackMap{g, h, obj, oa});
        return;
      }
      for (int rho : cand[r]) {
        bool ok = true;
        for (int q = 0; q < r && ok; ++q) {
          if (g.arrows.leadsto(r, q) && !h.arrows.leadsto(rho, arr[q])) ok = false;
          if (g.arrows.leadsto(q, r) && !h.arrows.leadsto(arr[q], rho)) ok = false;
        }
        if (ok && g.inv(r) < r && arr[g.inv(r)] != h.inv(rho)) ok = false;
        if (!ok) continue;
        arr[r] = rho;
        go(r + 1);
        arr[r] = -1;
      }
    };
    go(0);
  }
  return out;
}

MoritaSearchResult morita_equivalent_search(const GroupoidPresentation& g,
                                            const GroupoidPresentation& h) {
  for (const auto& m : all_stack_maps(g, h))
    if (morita_check(m).ok()) return MoritaSearchResult{m, false};
  for (const auto& m : all_stack_maps(h, g))
    if (morita_check(m).ok()) return MoritaSearchResult{m, true};
  return MoritaSearchResult{};
}

std::string render_dot(const GroupoidPresentation& g, const std::string& graph_name) {
  std::ostringstream os;
  os << "digraph \"" << graph_name << "\" {\n  rankdir=BT;\n";
  for (int p = 0; p < g.objects.size(); ++p)
    os << "  u" << p << " [label=\"" << g.objects.names[p] << "\"];\n";
  for (int a = 0; a < g.objects.size(); ++a)
    for (int b = 0; b < g.objects.size(); ++b) {
      if (a == b || !g.objects.leadsto(a, b)) continue;
      bool covering = true;
      for (int c = 0; c < g.objects.size(); ++c)
        if (c != a && c != b && g.objects.leadsto(a, c) && g.objects.leadsto(c, b)) {
          covering = false;
          break;
        }
      if (covering) os << "  u" << a << " -> u" << b << ";\n";
    }
  for (int r = 0; r < g.arrows.size(); ++r) {
    if (g.unit(g.src(r)) == r) continue;  // skip identity arrows
    os << "  u" << g.src(r) << " -> u" << g.tgt(r) << " [style=dashed, label=\""
       << g.arrows.names[r] << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace stk
