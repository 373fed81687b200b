#include "stk/lift.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>

namespace stk {

namespace {

std::string witness_for(const MapProfile& p, const std::string& key) {
  for (const auto& [k, w] : p.notes)
    if (k == key) return w;
  return {};
}

bool is_isomorphism(const SpaceMap& m) {
  if (m.source.size() != m.target.size()) return false;
  std::vector<char> hit(m.target.size(), 0);
  for (int p = 0; p < m.source.size(); ++p) {
    if (hit[m(p)]) return false;
    hit[m(p)] = 1;
  }
  for (int a = 0; a < m.source.size(); ++a)
    for (int b = 0; b < m.source.size(); ++b)
      if (m.source.leadsto(a, b) != m.target.leadsto(m(a), m(b))) return false;
  return true;
}

// Positions of each target point inside a subspace inclusion, -1 when absent.
std::vector<int> inclusion_index(const SpaceMap& incl) {
  std::vector<int> at(incl.target.size(), -1);
  for (int p = 0; p < incl.source.size(); ++p) at[incl(p)] = p;
  return at;
}

std::string sizes(std::initializer_list<int> xs) {
  std::string out;
  for (int x : xs) {
    if (!out.empty()) out += "/";
    out += std::to_string(x);
  }
  return out;
}

}  // namespace

LiftResult base_lift(const SpaceMap& g) {
  const FinSpace& Y = g.source;
  const FinSpace& X = g.target;

  MapProfile prof = map_profile(g);
  // Universal closedness of the input is required; a closed diagonal is not.
  // Glued neighbourhoods of deeper crossings carry doubled classes over a
  // shared generization, and the construction never uses uniqueness of
  // specialization lifts.
  if (std::string w = witness_for(prof, "specialization_lifting"); !w.empty())
    fail(ErrorKind::hypothesis_not_met,
         "lift requires a universally closed map (specialization lifting)", w);
  ImageFactorization fac = image_factorization(g);
  MapProfile onto = map_profile(fac.onto_image);
  if (!onto.etale)
    fail(ErrorKind::not_etale_on_image, "map is not étale onto its image",
         witness_for(onto, onto.local_embedding ? "etale" : "local_embedding"));

  PointSet im = image_of(g);
  PointSet comp = set_minus(X.all_points(), im);

  std::set<std::string> used(Y.names.begin(), Y.names.end());
  std::vector<std::string> names = Y.names;
  for (int x : comp) {
    std::string nm = X.names[x];
    while (used.count(nm)) nm = "x:" + nm;
    used.insert(nm);
    names.push_back(nm);
  }
  const int ny = Y.size();
  const int nc = static_cast<int>(comp.size());
  std::vector<std::vector<char>> leads(ny + nc, std::vector<char>(ny + nc, 0));
  for (int a = 0; a < ny; ++a)
    for (int b = 0; b < ny; ++b) leads[a][b] = Y.leads[a][b];
  for (int a = 0; a < nc; ++a)
    for (int b = 0; b < nc; ++b) leads[ny + a][ny + b] = X.leads[comp[a]][comp[b]];
  for (int a = 0; a < nc; ++a)
    for (int y = 0; y < ny; ++y) {
      if (X.leadsto(comp[a], g(y))) leads[ny + a][y] = 1;
      if (X.leadsto(g(y), comp[a])) leads[y][ny + a] = 1;
    }
  FinSpace F = space_from_order(std::move(names), std::move(leads));

  std::vector<int> ea(ny + nc);
  for (int y = 0; y < ny; ++y) ea[y] = g(y);
  for (int a = 0; a < nc; ++a) ea[ny + a] = comp[a];
  SpaceMap e = make_map(F, X, std::move(ea));

  std::vector<int> ia(ny);
  for (int y = 0; y < ny; ++y) ia[y] = y;
  SpaceMap i = make_map(Y, F, std::move(ia));

  std::vector<std::string> verified;
  auto certify = [&](const char* name, bool ok, const std::string& witness) {
    if (!ok)
      fail(ErrorKind::verification_failure, std::string("lift check failed: ") + name, witness);
    verified.push_back(name);
  };

  certify("factorization", compose(i, e) == g, {});
  MapProfile pe = map_profile(e);
  certify("etale", pe.etale, witness_for(pe, "etale"));
  {
    // Every specialization downstairs lifts: closedness survives any base
    // change.  (The lift need not be separated: distinct sheets glued over a
    // common closed image share their outside generizations.)
    bool ok = true;
    std::string w;
    for (int p = 0; p < F.size() && ok; ++p)
      for (int v = 0; v < X.size() && ok; ++v) {
        if (!X.leadsto(e(p), v)) continue;
        bool lifted = false;
        for (int q = 0; q < F.size() && !lifted; ++q)
          if (F.leadsto(p, q) && e(q) == v) lifted = true;
        if (!lifted) {
          ok = false;
          w = F.names[p] + " vs " + X.names[v];
        }
      }
    certify("universally-closed", ok, w);
  }
  certify("surjective", pe.surjective, witness_for(pe, "surjective"));
  MapProfile pi = map_profile(i);
  certify("closed-embedding", pi.closed_embedding, witness_for(pi, "closed_embedding"));

  {
    bool ok = true;
    std::string w;
    for (int x = 0; x < X.size() && ok; ++x) {
      int want = set_contains(im, x) ? prof.fiber_degrees[x] : 1;
      if (pe.fiber_degrees[x] != want) {
        ok = false;
        w = X.names[x];
      }
    }
    certify("fiber-degrees", ok, w);
  }

  FiberProduct fp = fiber_product(fac.embedding, e);
  {
    std::vector<int> pa(fp.total.size());
    bool parts = true;
    std::string w;
    for (int t = 0; t < fp.total.size(); ++t) {
      if (fp.pairs[t].second >= ny) {
        parts = false;
        w = fp.total.names[t];
        break;
      }
      pa[t] = fp.pairs[t].second;
    }
    certify("image-pullback-onto-source", parts, w);
    SpaceMap phi = make_map(fp.total, Y, pa);
    std::vector<int> qa(ny);
    bool inv = true;
    for (int y = 0; y < ny; ++y) {
      auto t = fp.pair_index(fac.onto_image(y), y);
      if (!t) {
        inv = false;
        break;
      }
      qa[y] = *t;
    }
    certify("image-pullback-covers-source", inv, {});
    SpaceMap psi = make_map(Y, fp.total, qa);
    certify("image-pullback",
            compose(psi, phi) == identity_map(Y) && compose(phi, psi) == identity_map(fp.total),
            {});
    certify("triangles",
            compose(phi, g) == compose(fp.pr1, fac.embedding) && compose(phi, i) == fp.pr2, {});

    Subspace cf = complement_of_closed(F, image_of(i));
    Subspace cx = complement_of_closed(X, im);
    bool comp_ok = cf.space.size() == cx.space.size();
    if (comp_ok) {
      std::vector<int> cx_at = inclusion_index(cx.incl);
      std::vector<int> ra(cf.space.size());
      for (int p = 0; p < cf.space.size(); ++p) ra[p] = cx_at[e(cf.incl(p))];
      try {
        comp_ok = is_isomorphism(make_map(cf.space, cx.space, ra));
      } catch (const Error&) {
        comp_ok = false;
      }
    }
    certify("complement", comp_ok, {});

    return LiftResult{std::move(F), std::move(e), std::move(i), std::move(phi), std::move(fp),
                      std::move(verified)};
  }
}

SectionCorrespondence section_correspondence(const SpaceMap& g, const SpaceMap& alpha) {
  if (!(alpha.target == g.target))
    fail(ErrorKind::target_mismatch, "probe must land in the base of the lifted map");
  LiftResult lift = base_lift(g);
  const FinSpace& Y = g.source;
  const FinSpace& Z = alpha.source;
  ImageFactorization fac = image_factorization(g);

  FiberProduct zy = fiber_product(g, alpha);              // Y ×_X Z
  FiberProduct zim = fiber_product(fac.embedding, alpha); // g(Y) ×_X Z
  std::vector<int> pa(zy.total.size());
  for (int t = 0; t < zy.total.size(); ++t) {
    auto [y, z] = zy.pairs[t];
    auto w = zim.pair_index(fac.onto_image(y), z);
    if (!w)
      fail(ErrorKind::verification_failure, "image pullback misses a pulled-back point",
           zy.total.names[t]);
    pa[t] = *w;
  }
  SpaceMap proj = make_map(zy.total, zim.total, std::move(pa));

  SectionCorrespondence out;
  out.sections = maps_over(identity_map(zim.total), proj);
  out.homs = maps_over(alpha, lift.e);

  std::vector<int> im_at = inclusion_index(fac.embedding);
  std::vector<int> comp_at(g.target.size(), -1);
  for (int p = Y.size(); p < lift.F.size(); ++p) comp_at[lift.e(p)] = p;

  std::vector<int> seen(out.homs.size(), 0);
  for (const auto& s : out.sections) {
    std::vector<int> ua(Z.size());
    for (int z = 0; z < Z.size(); ++z) {
      int x = alpha(z);
      std::optional<int> w;
      if (im_at[x] >= 0) w = zim.pair_index(im_at[x], z);
      if (w)
        ua[z] = zy.pairs[s(*w)].first;  // Y part of F
      else
        ua[z] = comp_at[x];
    }
    int found = -1;
    try {
      SpaceMap u = make_map(Z, lift.F, ua);
      for (int k = 0; k < static_cast<int>(out.homs.size()); ++k)
        if (out.homs[k] == u) {
          found = k;
          break;
        }
    } catch (const Error&) {
      found = -1;
    }
    if (found < 0)
      fail(ErrorKind::verification_failure, "a section does not induce a map into the lift");
    if (seen[found]++)
      fail(ErrorKind::verification_failure, "two sections induce the same map into the lift",
           std::to_string(found));
    out.hom_of_section.push_back(found);
  }
  if (out.sections.size() != out.homs.size())
    fail(ErrorKind::verification_failure, "section count differs from map count",
         std::to_string(out.sections.size()) + " vs " + std::to_string(out.homs.size()));
  return out;
}

SplitResult degree_one_split(const SpaceMap& g) {
  const FinSpace& Y = g.source;
  MapProfile prof = map_profile(g);
  if (!prof.local_embedding)
    fail(ErrorKind::not_local_embedding, "split requires a local embedding",
         witness_for(prof, "local_embedding"));
  if (!prof.proper)
    fail(ErrorKind::hypothesis_not_met, "split requires a proper map",
         witness_for(prof, prof.separated ? "specialization_lifting" : "separated"));

  // Sheets fold when they share the image point and the image branch.
  std::vector<PointSet> branch(Y.size());
  for (int y = 0; y < Y.size(); ++y) {
    PointSet img;
    for (int q : Y.minimal_open(y)) img.push_back(g(q));
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    branch[y] = std::move(img);
  }
  std::vector<int> class_of(Y.size());
  for (int y = 0; y < Y.size(); ++y) {
    class_of[y] = y;
    for (int p = 0; p < y; ++p)
      if (g(p) == g(y) && branch[p] == branch[y]) {
        class_of[y] = class_of[p];
        break;
      }
  }
  Quotient q = quotient_space(Y, class_of);
  std::vector<int> ga(q.space.size(), -1);
  for (int y = 0; y < Y.size(); ++y) ga[q.proj(y)] = g(y);
  SpaceMap g1 = make_map(q.space, g.target, std::move(ga));

  std::vector<std::string> verified;
  auto certify = [&](const char* name, bool ok, const std::string& witness) {
    if (!ok)
      fail(ErrorKind::verification_failure, std::string("split check failed: ") + name, witness);
    verified.push_back(name);
  };
  certify("factorization", compose(q.proj, g1) == g, {});
  MapProfile pe = map_profile(q.proj);
  certify("etale-projection", pe.etale, witness_for(pe, "etale"));
  certify("surjective-projection", pe.surjective, {});
  MapProfile p1 = map_profile(g1);
  certify("local-embedding", p1.local_embedding, witness_for(p1, "local_embedding"));
  certify("proper", p1.proper, {});
  {
    ImageFactorization f1 = image_factorization(g1);
    MapProfile ponto = map_profile(f1.onto_image);
    bool ok = true;
    std::string w;
    for (int gp : f1.onto_image.target.generic_points())
      if (ponto.fiber_degrees[gp] != 1) {
        ok = false;
        w = f1.onto_image.target.names[gp];
        break;
      }
    certify("generic-degree-one", ok, w);
  }
  return SplitResult{q.space, q.proj, std::move(g1), std::move(verified)};
}

IdentityReport check_closed_target(const SpaceMap& g) {
  MapProfile prof = map_profile(g);
  if (!prof.closed_embedding)
    fail(ErrorKind::hypothesis_not_met, "identity applies to closed embeddings only",
         witness_for(prof, "closed_embedding"));
  LiftResult lift = base_lift(g);
  bool ok = find_isomorphism_over(lift.e, identity_map(g.target)).has_value();
  return IdentityReport{"lift.closed-embedding-identity", ok,
                        sizes({lift.F.size(), g.target.size()})};
}

IdentityReport check_etale_cover(const SpaceMap& g) {
  MapProfile prof = map_profile(g);
  if (!prof.etale || !prof.proper || !prof.surjective)
    fail(ErrorKind::hypothesis_not_met,
         "identity applies to étale proper surjections only");
  if (g.target.components().size() > 1)
    fail(ErrorKind::hypothesis_not_met, "identity requires a connected base");
  LiftResult lift = base_lift(g);
  bool ok = find_isomorphism_over(lift.e, g).has_value();
  return IdentityReport{"lift.etale-cover-identity", ok, sizes({lift.F.size(), g.source.size()})};
}

IdentityReport check_uniqueness(const SpaceMap& g) {
  const FinSpace& Y = g.source;
  const int ny = Y.size();
  LiftResult l1 = base_lift(g);

  std::vector<std::string> pn(Y.names.rbegin(), Y.names.rend());
  std::vector<std::vector<char>> pl(ny, std::vector<char>(ny, 0));
  for (int a = 0; a < ny; ++a)
    for (int b = 0; b < ny; ++b) pl[a][b] = Y.leads[ny - 1 - a][ny - 1 - b];
  FinSpace Yp = space_from_order(std::move(pn), std::move(pl));
  std::vector<int> ga(ny);
  for (int a = 0; a < ny; ++a) ga[a] = g(ny - 1 - a);
  SpaceMap gp = make_map(Yp, g.target, std::move(ga));
  LiftResult l2 = base_lift(gp);

  std::vector<int> pa(ny);
  for (int y = 0; y < ny; ++y) pa[y] = ny - 1 - y;
  SpaceMap pi = make_map(Y, Yp, std::move(pa));

  int count = 0;
  for (const auto& cand : maps_over(l1.e, l2.e))
    if (is_isomorphism(cand) && compose(l1.i, cand) == compose(pi, l2.i)) ++count;
  return IdentityReport{"lift.uniqueness", count == 1, "isomorphisms: " + std::to_string(count)};
}

IdentityReport check_sections(const SpaceMap& g, const SpaceMap& alpha) {
  bool ok = true;
  std::string detail;
  try {
    SectionCorrespondence sc = section_correspondence(g, alpha);
    detail = sizes({static_cast<int>(sc.sections.size()), static_cast<int>(sc.homs.size())});
  } catch (const Error& err) {
    if (err.kind != ErrorKind::verification_failure) throw;
    ok = false;
    detail = err.what();
  }
  return IdentityReport{"lift.sections", ok, detail};
}

IdentityReport check_base_change(const SpaceMap& g, const SpaceMap& u) {
  if (!(u.target == g.target))
    fail(ErrorKind::target_mismatch, "base change map must land in the base of the lifted map");
  LiftResult lift = base_lift(g);

  FiberProduct yp = fiber_product(g, u);  // Y' with pr1 -> Y, pr2 -> X'
  LiftResult lift2 = base_lift(yp.pr2);
  FiberProduct xf = fiber_product(u, lift.e);  // X' ×_X F with pr1 -> X'

  auto iso = find_isomorphism_over(lift2.e, xf.pr1);
  bool ok = iso.has_value();
  if (ok) {
    SpaceMap fu = compose(*iso, xf.pr2);  // F' -> F
    ok = compose(fu, lift.e) == compose(lift2.e, u) &&
         compose(lift2.i, fu) == compose(yp.pr1, lift.i);
    if (ok) {
      // left square Cartesian: Y' is F' ×_F Y
      FiberProduct q = fiber_product(fu, lift.i);
      std::vector<int> ca(yp.total.size());
      for (int t = 0; t < yp.total.size() && ok; ++t) {
        auto idx = q.pair_index(lift2.i(t), yp.pairs[t].first);
        if (!idx)
          ok = false;
        else
          ca[t] = *idx;
      }
      if (ok) {
        try {
          ok = is_isomorphism(make_map(yp.total, q.total, ca));
        } catch (const Error&) {
          ok = false;
        }
      }
    }
  }
  return IdentityReport{"lift.base-change", ok,
                        sizes({lift2.F.size(), xf.total.size()})};
}

IdentityReport check_pushforward(const SpaceMap& h, const SpaceMap& g) {
  if (!(h.target == g.source))
    fail(ErrorKind::target_mismatch, "chain maps must compose");
  MapProfile pg = map_profile(g);
  if (!pg.closed_embedding)
    fail(ErrorKind::hypothesis_not_met, "identity requires a closed embedding below",
         witness_for(pg, "closed_embedding"));
  LiftResult lzy = base_lift(h);
  LiftResult lzx = base_lift(compose(h, g));
  FiberProduct rhs = fiber_product(g, lzx.e);  // Y ×_X F(Z/X) with pr1 -> Y
  bool ok = find_isomorphism_over(lzy.e, rhs.pr1).has_value();
  return IdentityReport{"lift.pushforward", ok, sizes({lzy.F.size(), rhs.total.size()})};
}

IdentityReport check_iterated(const SpaceMap& h, const SpaceMap& g, const LiftFn& lift) {
  if (!(h.target == g.source))
    fail(ErrorKind::target_mismatch, "chain maps must compose");
  LiftResult lzy = base_lift(h);
  LiftResult lhs = lift(compose(lzy.e, g));
  LiftResult ly = lift(g);
  LiftResult rhs = lift(compose(h, ly.i));
  bool ok = find_isomorphism_over(lhs.e, compose(rhs.e, ly.e)).has_value();
  return IdentityReport{"lift.iterated", ok, sizes({lhs.F.size(), rhs.F.size()})};
}

namespace {

// The canonical comparison F(Z/Y) -> F(Z/X) over a chain: identity on the
// lifted part, the image under the lower map on the complement. Well defined
// whenever no complement point maps into the image of the composite.
SpaceMap chain_comparison(const LiftResult& lzy, const LiftResult& lzx, const SpaceMap& g) {
  const int nz = lzy.i.source.size();
  std::vector<int> comp_at(lzx.e.target.size(), -1);
  for (int p = lzx.i.source.size(); p < lzx.F.size(); ++p) comp_at[lzx.e(p)] = p;
  std::vector<int> ma(lzy.F.size());
  for (int p = 0; p < lzy.F.size(); ++p) {
    if (p < nz) {
      ma[p] = p;  // Z part to Z part
    } else {
      int x = g(lzy.e(p));
      if (comp_at[x] < 0)
        fail(ErrorKind::hypothesis_not_met,
             "a complement point maps into the image of the composite",
             lzy.F.names[p]);
      ma[p] = comp_at[x];
    }
  }
  return make_map(lzy.F, lzx.F, std::move(ma));
}

}  // namespace

IdentityReport check_composite(const SpaceMap& h, const SpaceMap& g) {
  if (!(h.target == g.source))
    fail(ErrorKind::target_mismatch, "chain maps must compose");
  const FinSpace& Y = g.source;

  // Pullback hypothesis: g(h(Z)) ×_X Y ≅ h(Z) over Y.
  ImageFactorization hfac = image_factorization(h);
  ImageFactorization ghfac = image_factorization(compose(h, g));
  FiberProduct pull = fiber_product(ghfac.embedding, g);  // g(h(Z)) ×_X Y, pr2 -> Y
  Subspace hz = subspace(Y, image_of(h));
  if (!find_isomorphism_over(pull.pr2, hz.incl).has_value())
    fail(ErrorKind::hypothesis_not_met,
         "pullback of the composite image differs from the middle image",
         sizes({pull.total.size(), hz.space.size()}));

  LiftResult lzy = base_lift(h);
  LiftResult lzx = base_lift(compose(h, g));
  LiftResult ly = base_lift(g);

  LiftResult side_a = base_lift(chain_comparison(lzy, lzx, g));
  LiftResult side_b = base_lift(compose(lzy.e, g));
  LiftResult side_c = base_lift(compose(h, ly.i));

  SpaceMap ea = compose(side_a.e, lzx.e);
  const SpaceMap& eb = side_b.e;
  SpaceMap ec = compose(side_c.e, ly.e);
  bool ok = find_isomorphism_over(ea, eb).has_value() &&
            find_isomorphism_over(eb, ec).has_value();
  return IdentityReport{"lift.composite", ok,
                        sizes({side_a.F.size(), side_b.F.size(), side_c.F.size()})};
}

StackLiftResult stack_base_lift(const StackMap& g) {
  const GroupoidPresentation& Y = g.source;
  const GroupoidPresentation& X = g.target;

  // Pull the source back to the target atlas and realize it as a space; a
  // stabilizer in the pullback groupoid means the map is not representable.
  StackFiberProduct pb = stack_fiber_product(g, atlas_map(X));
  for (int u = 0; u < pb.total.objects.size(); ++u)
    if (pb.total.automorphisms_at(u).size() != 1)
      fail(ErrorKind::hypothesis_not_met,
           "lift requires a representable map: the atlas pullback has a stabilizer",
           pb.total.objects.names[u]);
  Quotient v0 = orbit_space(pb.total);
  std::vector<int> v0_to_u0(v0.space.size(), -1);
  std::vector<std::vector<int>> reps(v0.space.size());
  for (int obj = 0; obj < pb.total.objects.size(); ++obj) {
    v0_to_u0[v0.proj(obj)] = std::get<2>(pb.object_triples[obj]);
    reps[v0.proj(obj)].push_back(obj);
  }
  SpaceMap vmap = make_map(v0.space, X.objects, std::move(v0_to_u0));

  // The cover is the space-tier lift of the realized pullback; it splits off
  // a tautological copy of the pullback inside V = Y ×_X U.
  LiftResult base = base_lift(vmap);
  const FinSpace& U = base.F;
  const SpaceMap& a = base.e;   // U -> target atlas
  const SpaceMap& i0 = base.i;  // V0 -> U

  // Ambient arrow space U ×_X U: pairs of cover points with a comparison.
  std::vector<std::tuple<int, int, int>> amb;
  std::map<std::tuple<int, int, int>, int> amb_index;
  std::vector<std::string> amb_names;
  for (int u = 0; u < U.size(); ++u)
    for (int s = 0; s < X.arrows.size(); ++s) {
      if (X.src(s) != a(u)) continue;
      for (int u2 = 0; u2 < U.size(); ++u2) {
        if (X.tgt(s) != a(u2)) continue;
        amb_index[{u, s, u2}] = static_cast<int>(amb.size());
        amb.emplace_back(u, s, u2);
        amb_names.push_back("(" + U.names[u] + "|" + X.arrows.names[s] + "|" + U.names[u2] + ")");
      }
    }
  const int na = static_cast<int>(amb.size());
  std::vector<std::vector<char>> amb_leads(na, std::vector<char>(na, 0));
  for (int r = 0; r < na; ++r)
    for (int q = 0; q < na; ++q) {
      auto [u1, s1, w1] = amb[r];
      auto [u2, s2, w2] = amb[q];
      amb_leads[r][q] =
          (U.leadsto(u1, u2) && X.arrows.leadsto(s1, s2) && U.leadsto(w1, w2)) ? 1 : 0;
    }
  FinSpace amb_space{std::move(amb_names), std::move(amb_leads)};

  // V = V0 ×_{U0} U with the tautological sheet V1 = graph of the embedding.
  FiberProduct V = fiber_product(vmap, a);
  PointSet v1;
  for (int t = 0; t < V.total.size(); ++t)
    if (V.pairs[t].second == i0(V.pairs[t].first)) v1.push_back(t);
  if (!V.total.is_open_set(v1) || !V.total.is_closed_set(v1))
    fail(ErrorKind::cover_not_suitable,
         "the canonical cover does not split off the tautological sheet", {});

  // S[a][b]: comparisons between a sheet of kind a and one of kind b
  // (1 = tautological, 2 = the rest), as subsets of the ambient arrows.
  std::set<int> s_set[3][3];
  for (int t = 0; t < V.total.size(); ++t)
    for (int t2 = 0; t2 < V.total.size(); ++t2) {
      int kind1 = set_contains(v1, t) ? 1 : 2;
      int kind2 = set_contains(v1, t2) ? 1 : 2;
      for (int obj : reps[V.pairs[t].first])
        for (int obj2 : reps[V.pairs[t2].first]) {
          int w = std::get<0>(pb.object_triples[obj]);
          int rho = std::get<1>(pb.object_triples[obj]);
          int w2 = std::get<0>(pb.object_triples[obj2]);
          int rho2 = std::get<1>(pb.object_triples[obj2]);
          for (int b = 0; b < Y.arrows.size(); ++b) {
            if (Y.src(b) != w || Y.tgt(b) != w2) continue;
            int sigma = X.comp[X.comp[X.inv(rho)][g.on_arrows(b)]][rho2];
            if (sigma < 0)
              fail(ErrorKind::verification_failure, "comparison arrows failed to compose",
                   Y.arrows.names[b]);
            s_set[kind1][kind2].insert(amb_index.at({V.pairs[t].second, sigma, V.pairs[t2].second}));
          }
        }
    }

  std::set<int> keep;
  for (int r = 0; r < na; ++r) keep.insert(r);
  for (int r : s_set[1][2]) keep.erase(r);
  for (int r : s_set[2][1]) keep.erase(r);
  for (int r : s_set[2][2])
    if (!s_set[1][1].count(r)) keep.erase(r);
  for (int u = 0; u < U.size(); ++u) keep.insert(amb_index.at({u, X.unit(a(u)), u}));

  // The pruned relation set must still be a groupoid.
  for (int r : keep) {
    auto [u1, s1, w1] = amb[r];
    int ri = amb_index.at({w1, X.inv(s1), u1});
    if (!keep.count(ri))
      fail(ErrorKind::verification_failure,
           "pruned relation set is not closed under inversion", amb_space.names[r]);
    for (int q : keep) {
      auto [u2, s2, w2] = amb[q];
      if (w1 != u2) continue;
      int c = X.comp[s1][s2];
      if (c < 0 || !keep.count(amb_index.at({u1, c, w2})))
        fail(ErrorKind::verification_failure,
             "pruned relation set is not closed under composition",
             amb_space.names[r] + ";" + amb_space.names[q]);
    }
  }

  PointSet keep_pts(keep.begin(), keep.end());
  Subspace arr = subspace(amb_space, keep_pts);
  auto arr_at = [&](int ambidx) {
    return static_cast<int>(std::lower_bound(keep_pts.begin(), keep_pts.end(), ambidx) -
                            keep_pts.begin());
  };
  const int nr = static_cast<int>(keep_pts.size());
  std::vector<int> src_a(nr), tgt_a(nr), inv_a(nr), sigma_a(nr);
  for (int r = 0; r < nr; ++r) {
    auto [u1, s1, w1] = amb[keep_pts[r]];
    src_a[r] = u1;
    tgt_a[r] = w1;
    sigma_a[r] = s1;
    inv_a[r] = arr_at(amb_index.at({w1, X.inv(s1), u1}));
  }
  std::vector<int> unit_a(U.size());
  for (int u = 0; u < U.size(); ++u) unit_a[u] = arr_at(amb_index.at({u, X.unit(a(u)), u}));
  std::vector<std::vector<int>> comp(nr, std::vector<int>(nr, -1));
  for (int r = 0; r < nr; ++r)
    for (int q = 0; q < nr; ++q) {
      if (tgt_a[r] != src_a[q]) continue;
      comp[r][q] = arr_at(amb_index.at({src_a[r], X.comp[sigma_a[r]][sigma_a[q]], tgt_a[q]}));
    }

  GroupoidPresentation F;
  try {
    F = validate_groupoid(U, arr.space, make_map(arr.space, U, src_a),
                          make_map(arr.space, U, tgt_a), make_map(U, arr.space, unit_a),
                          make_map(arr.space, arr.space, inv_a), std::move(comp));
  } catch (const Error& err) {
    fail(ErrorKind::verification_failure,
         std::string("pruned presentation is not an étale groupoid: ") + err.what(),
         err.witness);
  }

  StackMap e = make_stack_map(F, X, make_map(U, X.objects, a.assign),
                              make_map(arr.space, X.arrows, sigma_a));

  std::vector<int> iobj(Y.objects.size()), iarr(Y.arrows.size());
  for (int w = 0; w < Y.objects.size(); ++w) {
    int gx = g.on_objects(w);
    auto obj = pb.object_index(w, X.unit(gx), gx);
    if (!obj)
      fail(ErrorKind::verification_failure, "source object missing from the atlas pullback",
           Y.objects.names[w]);
    iobj[w] = i0(v0.proj(*obj));
  }
  for (int b = 0; b < Y.arrows.size(); ++b) {
    auto it = amb_index.find({iobj[Y.src(b)], g.on_arrows(b), iobj[Y.tgt(b)]});
    if (it == amb_index.end() || !keep.count(it->second))
      fail(ErrorKind::verification_failure, "a source relation was pruned away",
           Y.arrows.names[b]);
    iarr[b] = arr_at(it->second);
  }
  StackMap i = make_stack_map(Y, F, make_map(Y.objects, U, std::move(iobj)),
                              make_map(Y.arrows, arr.space, std::move(iarr)));

  std::vector<std::string> verified;
  auto certify = [&](const char* name, bool ok, const std::string& witness) {
    if (!ok)
      fail(ErrorKind::verification_failure, std::string("stack lift check failed: ") + name,
           witness);
    verified.push_back(name);
  };

  certify("triangle", compose_stack_maps(i, e) == g, {});
  StackProfile pe = stack_map_profile(e);
  certify("etale-cover", pe.representable && pe.etale && pe.surjective, {});
  certify("source-embeds", morita_check(i).fully_faithful, {});

  {
    // Fibers over the atlas: classes over the image match the realized
    // pullback, classes outside it are untouched singletons.
    StackFiberProduct fib = stack_fiber_product(e, atlas_map(X));
    Quotient vf = orbit_space(fib.total);
    std::vector<int> to_atlas(vf.space.size(), -1);
    for (int obj = 0; obj < fib.total.objects.size(); ++obj)
      to_atlas[vf.proj(obj)] = std::get<2>(fib.object_triples[obj]);
    PointSet im = image_of(vmap);
    PointSet over_im, over_out;
    for (int p = 0; p < vf.space.size(); ++p)
      (set_contains(im, to_atlas[p]) ? over_im : over_out).push_back(p);
    Subspace fim = subspace(vf.space, over_im);
    std::vector<int> fim_assign(over_im.size());
    for (size_t k = 0; k < over_im.size(); ++k) fim_assign[k] = to_atlas[over_im[k]];
    bool fibers_ok =
        find_isomorphism_over(make_map(fim.space, X.objects, fim_assign), vmap).has_value();
    certify("fiber-correspondence", fibers_ok, {});

    PointSet out_atlas = set_minus(X.objects.all_points(), im);
    Subspace fout = subspace(vf.space, over_out);
    Subspace xout = subspace(X.objects, out_atlas);
    std::vector<int> fo_assign(over_out.size());
    for (size_t k = 0; k < over_out.size(); ++k) fo_assign[k] = to_atlas[over_out[k]];
    std::vector<int> xo_assign(out_atlas.size());
    for (size_t k = 0; k < out_atlas.size(); ++k) xo_assign[k] = out_atlas[k];
    bool comp_ok = find_isomorphism_over(make_map(fout.space, X.objects, fo_assign),
                                         make_map(xout.space, X.objects, xo_assign))
                       .has_value();
    certify("complement-untouched", comp_ok, {});
  }

  return StackLiftResult{std::move(F),       std::move(e), std::move(i),
                         U,                  a,            std::move(verified)};
}

IdentityReport check_product_gluing(const SpaceMap& g, const SpaceMap& f, const LiftFn& lift) {
  if (!(g.target == f.target))
    fail(ErrorKind::target_mismatch, "product factors must share the base");

  FiberProduct z = fiber_product(g, f);  // Z = Y ×_X T, pr1 -> Y, pr2 -> T
  LiftResult ly = lift(g);
  LiftResult lt = lift(f);
  LiftResult lzy = base_lift(z.pr1);
  LiftResult lzt = base_lift(z.pr2);
  LiftResult lzx = base_lift(compose(z.pr1, g));

  // Complement points of the full lifts, indexed by base point.
  auto complement_table = [](const LiftResult& l) {
    std::vector<int> at(l.e.target.size(), -1);
    PointSet img = image_of(l.i);
    for (int p = 0; p < l.F.size(); ++p)
      if (!set_contains(img, p)) {
        if (at[l.e(p)] >= 0)
          fail(ErrorKind::verification_failure,
               "lift complement is not reduced over the base", l.F.names[p]);
        at[l.e(p)] = p;
      }
    return at;
  };
  std::vector<int> comp_y = complement_table(ly);
  std::vector<int> comp_t = complement_table(lt);

  const int nz = z.total.size();
  auto tower_map = [&](const LiftResult& lz, const SpaceMap& other_coord,
                       const LiftResult& lower, const std::vector<int>& comp_at,
                       const SpaceMap& lower_map) {
    std::vector<int> ma(lz.F.size());
    for (int p = 0; p < lz.F.size(); ++p) {
      if (p < nz) {
        ma[p] = lower.i(other_coord(p));
      } else {
        int x = lower_map(lz.e(p));
        if (comp_at[x] < 0)
          fail(ErrorKind::hypothesis_not_met,
               "a complement point maps into the partner image", lz.F.names[p]);
        ma[p] = comp_at[x];
      }
    }
    return make_map(lz.F, lower.F, std::move(ma));
  };
  // F(Z/T) -> F(Y/X) over the Y coordinate; F(Z/Y) -> F(T/X) over the T one.
  SpaceMap zc1 = make_map(z.total, g.source, z.pr1.assign);
  SpaceMap zc2 = make_map(z.total, f.source, z.pr2.assign);
  LiftResult t1 = lift(tower_map(lzt, zc1, ly, comp_y, f));
  LiftResult t2 = lift(tower_map(lzy, zc2, lt, comp_t, g));

  // The gluing of the two partial lifts along Z, over F(Z/X).
  Glued glued = glue_along_closed(lzy.i, lzt.i);
  SpaceMap ra = chain_comparison(lzy, lzx, g);
  SpaceMap rb = chain_comparison(lzt, lzx, f);
  std::vector<int> qa(glued.total.size(), -1);
  for (int p = 0; p < lzy.F.size(); ++p) qa[glued.from_a(p)] = ra(p);
  for (int p = 0; p < lzt.F.size(); ++p) {
    int tgt = rb(p);
    int at = glued.from_b(p);
    if (qa[at] >= 0 && qa[at] != tgt)
      fail(ErrorKind::verification_failure, "glued comparison maps disagree",
           glued.total.names[at]);
    qa[at] = tgt;
  }
  LiftResult t4 = lift(make_map(glued.total, lzx.F, std::move(qa)));

  FiberProduct prod = fiber_product(ly.e, lt.e);
  SpaceMap lhs = compose(prod.pr1, ly.e);
  SpaceMap e1 = compose(t1.e, ly.e);
  SpaceMap e2 = compose(t2.e, lt.e);
  SpaceMap e4 = compose(t4.e, lzx.e);
  bool ok = find_isomorphism_over(lhs, e1).has_value() &&
            find_isomorphism_over(e1, e2).has_value() &&
            find_isomorphism_over(e2, e4).has_value();
  return IdentityReport{"lift.product-gluing", ok,
                        sizes({prod.total.size(), t1.F.size(), t2.F.size(), t4.F.size()})};
}

}  // namespace stk
