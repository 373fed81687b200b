#include "stk/network.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stk/errors.hpp"
#include "stk/oracle.hpp"

namespace stk {

namespace {

int popcount(int mask) { return std::popcount(static_cast<unsigned>(mask)); }

std::string witness_for(const MapProfile& p, const std::string& key) {
  for (const auto& [k, w] : p.notes)
    if (k == key) return w;
  return {};
}

std::string sizes(std::initializer_list<int> xs) {
  std::string out;
  for (int v : xs) {
    if (!out.empty()) out += "/";
    out += std::to_string(v);
  }
  return out;
}

}  // namespace

std::string subset_name(int mask) {
  std::string out = "{";
  for (int l = 0; mask >> l; ++l) {
    if (!(mask >> l & 1)) continue;
    if (out.size() > 1) out += ",";
    out += std::to_string(l + 1);
  }
  return out + "}";
}

FiberedPower fibered_power(const SpaceMap& g, int n) {
  if (n < 1) fail(ErrorKind::validation_error, "fiber power needs at least one factor");
  FiberedPower fp;
  fp.n = n;
  const FinSpace& y = g.source;
  if (n == 1) {
    fp.full = y;
    fp.full_proj = {identity_map(y)};
    fp.distinct = y;
    fp.proj = {identity_map(y)};
    fp.to_base = g;
    fp.tuples.resize(y.size());
    for (int p = 0; p < y.size(); ++p) {
      fp.tuples[p] = {p};
      fp.index_of[{p}] = p;
    }
    return fp;
  }
  // all tuples over a common base point, in tuple-lexicographic order
  std::vector<std::vector<int>> tup;
  std::vector<int> cur(n, 0);
  const int m = y.size();
  if (m > 0) {
    while (true) {
      bool same = true;
      for (int i = 1; i < n && same; ++i) same = g(cur[i]) == g(cur[0]);
      if (same) tup.push_back(cur);
      int i = n - 1;
      while (i >= 0 && cur[i] == m - 1) cur[i--] = 0;
      if (i < 0) break;
      ++cur[i];
    }
  }
  std::vector<std::string> names(tup.size());
  std::vector<std::vector<char>> leads(tup.size(), std::vector<char>(tup.size(), 0));
  for (size_t p = 0; p < tup.size(); ++p) {
    std::string nm = "(";
    for (int i = 0; i < n; ++i) nm += (i ? "," : "") + y.names[tup[p][i]];
    names[p] = nm + ")";
    for (size_t q = 0; q < tup.size(); ++q) {
      bool le = true;
      for (int i = 0; i < n && le; ++i) le = y.leadsto(tup[p][i], tup[q][i]);
      leads[p][q] = le ? 1 : 0;
    }
  }
  fp.full = space_from_order(std::move(names), std::move(leads));
  for (int i = 0; i < n; ++i) {
    std::vector<int> assign(tup.size());
    for (size_t p = 0; p < tup.size(); ++p) assign[p] = tup[p][i];
    fp.full_proj.push_back(make_map(fp.full, y, assign));
  }
  PointSet plain;
  for (size_t p = 0; p < tup.size(); ++p) {
    bool repeat = false;
    for (int i = 0; i < n && !repeat; ++i)
      for (int j = i + 1; j < n && !repeat; ++j) repeat = tup[p][i] == tup[p][j];
    if (repeat)
      fp.diagonal.push_back(static_cast<int>(p));
    else
      plain.push_back(static_cast<int>(p));
  }
  if (!fp.full.is_closed_set(fp.diagonal) || !fp.full.is_open_set(fp.diagonal))
    fail(ErrorKind::verification_failure, "repeated-coordinate locus is not clopen",
         "power " + std::to_string(n));
  Subspace sub = subspace(fp.full, plain);
  fp.distinct = sub.space;
  for (int i = 0; i < n; ++i) fp.proj.push_back(compose(sub.incl, fp.full_proj[i]));
  {
    std::vector<int> assign(plain.size());
    for (size_t p = 0; p < plain.size(); ++p) assign[p] = g(tup[plain[p]][0]);
    fp.to_base = make_map(fp.distinct, g.target, assign);
  }
  fp.tuples.resize(plain.size());
  for (size_t p = 0; p < plain.size(); ++p) {
    fp.tuples[p] = tup[plain[p]];
    fp.index_of[tup[plain[p]]] = static_cast<int>(p);
  }
  return fp;
}

int multiplicity(const SpaceMap& g) {
  std::vector<int> deg(g.target.size(), 0);
  for (int p = 0; p < g.source.size(); ++p) ++deg[g(p)];
  int n = 0;
  for (int d : deg) n = std::max(n, d);
  return n;
}

const FinSpace& node_of(const Network& net, int index) {
  auto it = net.nodes.find(index);
  if (it == net.nodes.end())
    fail(ErrorKind::validation_error, "network has no such node", subset_name(index));
  return it->second;
}

const SpaceMap& edge_of(const Network& net, int from, int to) {
  auto it = net.edges.find({from, to});
  if (it == net.edges.end())
    fail(ErrorKind::validation_error, "network has no such edge",
         subset_name(from) + "->" + subset_name(to));
  return it->second;
}

void validate_network(const Network& net) {
  const int total = 1 << net.labels;
  if (static_cast<int>(net.nodes.size()) != total)
    fail(ErrorKind::validation_error, "network is missing nodes",
         sizes({static_cast<int>(net.nodes.size()), total}));
  for (const auto& [idx, sp] : net.nodes)
    if (idx < 0 || idx >= total)
      fail(ErrorKind::validation_error, "node index out of range", subset_name(idx));
  for (int j = 0; j < total; ++j)
    for (int i = 0; i < total; ++i) {
      if (i == j || (i & ~j)) continue;
      const SpaceMap& m = edge_of(net, j, i);
      if (!(m.source == net.nodes.at(j)) || !(m.target == net.nodes.at(i)))
        fail(ErrorKind::validation_error, "edge endpoints do not match their nodes",
             subset_name(j) + "->" + subset_name(i));
    }
  for (int k = 0; k < total; ++k)
    for (int j = 0; j < total; ++j) {
      if (j == k || (j & ~k)) continue;
      for (int i = 0; i < total; ++i) {
        if (i == j || (i & ~j)) continue;
        if (!(edge_of(net, k, i) == compose(edge_of(net, k, j), edge_of(net, j, i))))
          fail(ErrorKind::verification_failure, "network edges are not functorial",
               subset_name(k) + "->" + subset_name(j) + "->" + subset_name(i));
      }
    }
  for (const auto& [key, m] : net.edges)
    if (popcount(key.second) >= net.stage - 1 && !map_profile(m).closed_embedding)
      fail(ErrorKind::stage_invariant_broken,
           "an edge required closed at this stage is not a closed embedding",
           subset_name(key.first) + "->" + subset_name(key.second));
}

Network canonical_network(const SpaceMap& g) {
  MapProfile pg = map_profile(g);
  if (!pg.local_embedding)
    fail(ErrorKind::not_local_embedding, "the map is not a local embedding",
         witness_for(pg, "local_embedding"));
  if (!pg.proper) {
    std::string w = witness_for(pg, "separated");
    if (w.empty()) w = witness_for(pg, "specialization_lifting");
    fail(ErrorKind::hypothesis_not_met, "the map is not proper", w);
  }
  const int n = multiplicity(g);
  Network net;
  net.labels = n;
  net.stage = n;
  if (n == 0) {
    net.nodes[0] = g.target;
    return net;
  }
  // the split must exist, and its degree-one factor can only fold sheets down
  SplitResult split = degree_one_split(g);
  if (multiplicity(split.g1) > n)
    fail(ErrorKind::verification_failure, "split factor exceeds the sheet count",
         sizes({multiplicity(split.g1), n}));
  std::vector<FiberedPower> pw(n + 1);
  for (int k = 1; k <= n; ++k) pw[k] = fibered_power(g, k);
  for (int mask = 0; mask < (1 << n); ++mask)
    net.nodes[mask] = mask == 0 ? g.target : pw[popcount(mask)].distinct;
  for (int j = 1; j < (1 << n); ++j) {
    const FiberedPower& fj = pw[popcount(j)];
    for (int i = 0; i < (1 << n); ++i) {
      if (i == j || (i & ~j)) continue;
      if (i == 0) {
        net.edges[{j, 0}] = fj.to_base;
        continue;
      }
      // coordinates of i inside the sorted label list of j
      std::vector<int> sel;
      int pos = 0;
      for (int l = 0; l < n; ++l) {
        if (!(j >> l & 1)) continue;
        if (i >> l & 1) sel.push_back(pos);
        ++pos;
      }
      const FiberedPower& fi = pw[popcount(i)];
      std::vector<int> assign(fj.distinct.size());
      for (int p = 0; p < fj.distinct.size(); ++p) {
        std::vector<int> sub;
        for (int s : sel) sub.push_back(fj.tuples[p][s]);
        auto it = fi.index_of.find(sub);
        if (it == fi.index_of.end())
          fail(ErrorKind::verification_failure, "projection leaves the distinct locus",
               fj.distinct.names[p]);
        assign[p] = it->second;
      }
      net.edges[{j, i}] = make_map(fj.distinct, fi.distinct, assign);
    }
  }
  validate_network(net);
  return net;
}

namespace {

// map out of a glued space determined by legs on covering pieces; every point
// must be covered and all legs must agree where they overlap
SpaceMap map_out(const FinSpace& total, const FinSpace& target,
                 const std::vector<std::pair<const SpaceMap*, const SpaceMap*>>& legs,
                 const char* what) {
  std::vector<int> val(total.size(), -1);
  for (const auto& [piece, leg] : legs)
    for (int p = 0; p < piece->source.size(); ++p) {
      const int t = (*piece)(p), v = (*leg)(p);
      if (val[t] >= 0 && val[t] != v)
        fail(ErrorKind::verification_failure, std::string(what) + ": glued legs disagree",
             total.names[t]);
      val[t] = v;
    }
  for (int t = 0; t < total.size(); ++t)
    if (val[t] < 0)
      fail(ErrorKind::verification_failure, std::string(what) + ": a glued point is uncovered",
           total.names[t]);
  return make_map(total, target, val);
}

std::vector<int> normalize_family(std::vector<int> q) {
  std::sort(q.begin(), q.end(), [](int a, int b) {
    return std::pair(popcount(a), a) < std::pair(popcount(b), b);
  });
  q.erase(std::unique(q.begin(), q.end()), q.end());
  std::vector<int> keep;
  for (int j : q) {
    bool covered = false;
    for (int i : keep)
      if ((i & ~j) == 0) covered = true;  // i ⊆ j: j is redundant
    if (!covered) keep.push_back(j);
  }
  return keep;
}

struct GlueCore {
  FinSpace total;
  std::map<int, SpaceMap> piece;
};

GlueCore glue_core(const Network& net, const std::vector<int>& q) {
  const int total_masks = 1 << net.labels;
  if (q.size() == 1) {
    const int i0 = q[0];
    GlueCore out{node_of(net, i0), {}};
    out.piece.emplace(i0, identity_map(out.total));
    for (int k = 0; k < total_masks; ++k)
      if (k != i0 && (i0 & ~k) == 0) out.piece.emplace(k, edge_of(net, k, i0));
    return out;
  }
  std::vector<int> rest(q.begin(), q.end() - 1);
  const int j = q.back();
  GlueCore s = glue_core(net, rest);
  std::vector<int> qj;
  for (int i : rest) qj.push_back(i | j);
  qj = normalize_family(qj);
  GlueCore t = glue_core(net, qj);
  std::vector<std::pair<const SpaceMap*, const SpaceMap*>> legs_j, legs_s;
  for (int k : qj) {
    legs_j.push_back({&t.piece.at(k), &edge_of(net, k, j)});
    legs_s.push_back({&t.piece.at(k), &s.piece.at(k)});
  }
  SpaceMap embed_j = map_out(t.total, node_of(net, j), legs_j, "glue");
  SpaceMap embed_s = map_out(t.total, s.total, legs_s, "glue");
  if (!map_profile(embed_j).closed_embedding)
    fail(ErrorKind::not_closed_embedding, "overlap does not embed closed into the node",
         subset_name(j));
  if (!map_profile(embed_s).closed_embedding)
    fail(ErrorKind::not_closed_embedding, "overlap does not embed closed into the partial gluing",
         subset_name(j));
  Glued gl = glue_along_closed(embed_s, embed_j);
  GlueCore out{gl.total, {}};
  for (int k = 0; k < total_masks; ++k) {
    const bool via_s = s.piece.count(k) != 0;
    const bool via_j = (j & ~k) == 0;
    if (!via_s && !via_j) continue;
    std::optional<SpaceMap> a, b;
    if (via_s) a = compose(s.piece.at(k), gl.from_a);
    if (via_j)
      b = compose(k == j ? identity_map(node_of(net, j)) : edge_of(net, k, j), gl.from_b);
    if (a && b && !(*a == *b))
      fail(ErrorKind::verification_failure, "glued piece depends on the chosen leg",
           subset_name(k));
    out.piece.emplace(k, a ? std::move(*a) : std::move(*b));
  }
  return out;
}

}  // namespace

GluedStack glue_subnetwork(const Network& net, std::vector<int> q, int meet) {
  if (q.empty()) fail(ErrorKind::validation_error, "gluing needs at least one index");
  for (int i : q) node_of(net, i);
  q = normalize_family(std::move(q));
  int m = meet;
  if (m < 0) {
    m = q[0];
    for (int i : q) m &= i;
  }
  for (int i : q)
    if (m & ~i)
      fail(ErrorKind::validation_error, "meet is not contained in every glued index",
           subset_name(m));
  GlueCore core = glue_core(net, q);
  std::vector<SpaceMap> hold;
  hold.reserve(q.size());
  for (int i : q) hold.push_back(i == m ? identity_map(node_of(net, i)) : edge_of(net, i, m));
  std::vector<std::pair<const SpaceMap*, const SpaceMap*>> legs;
  for (size_t s = 0; s < q.size(); ++s) legs.push_back({&core.piece.at(q[s]), &hold[s]});
  SpaceMap tm = map_out(core.total, node_of(net, m), legs, "glue meet");
  return GluedStack{std::move(core.total), std::move(core.piece), std::move(tm), m};
}

DescendStep descend(const Network& net) {
  if (net.stage <= 0)
    fail(ErrorKind::validation_error, "network is already fully descended");
  validate_network(net);
  const int stage = net.stage;
  const int total = 1 << net.labels;
  DescendStep st;
  st.next = net;
  st.next.stage = stage - 1;
  for (int idx = 0; idx < total; ++idx) {
    const int sz = popcount(idx);
    if (sz < stage - 2) continue;  // its gluing would need edges not yet closed
    std::vector<int> q;
    for (int l = 0; l < net.labels; ++l)
      if (!(idx >> l & 1)) q.push_back(idx | (1 << l));
    if (q.empty()) {
      st.glued.emplace(idx, empty_space());
      continue;
    }
    GluedStack gs = glue_subnetwork(net, q, idx);
    st.glued.emplace(idx, gs.total);
    if (sz >= stage - 1) {
      // lifts to the node itself: only the closed embedding needs checking
      if (!map_profile(gs.to_meet).closed_embedding)
        fail(ErrorKind::stage_invariant_broken,
             "glued neighbourhood does not embed closed into its node", subset_name(idx));
      continue;
    }
    // sz == stage - 2: the construction asserts this map is universally
    // closed and étale on its image; we check both before lifting.  A closed
    // diagonal is not asserted — glued neighbourhoods of triple and deeper
    // crossings are honestly non-separated.
    if (!map_profile(image_factorization(gs.to_meet).onto_image).etale)
      fail(ErrorKind::etale_on_image_failed,
           "glued neighbourhood is not étale on its image", subset_name(idx));
    if (std::string w = witness_for(map_profile(gs.to_meet), "specialization_lifting");
        !w.empty())
      fail(ErrorKind::etale_on_image_failed,
           "glued neighbourhood is not universally closed over its node: " + w,
           subset_name(idx));
    LiftResult lr = base_lift(gs.to_meet);
    st.next.nodes[idx] = lr.F;
    for (int k = 0; k < total; ++k) {
      if (k != idx && (idx & ~k) == 0)
        st.next.edges[{k, idx}] = compose(gs.piece.at(k), lr.i);
      if (k != idx && (k & ~idx) == 0)
        st.next.edges[{idx, k}] = compose(lr.e, edge_of(net, idx, k));
    }
    st.lifted.emplace(idx, std::move(lr));
  }
  validate_network(st.next);
  return st;
}

namespace {

SpaceMap union_over(const FinSpace& x, const std::vector<std::pair<FinSpace, SpaceMap>>& parts,
                    FinSpace* out_total) {
  FinSpace acc = parts[0].first;
  SpaceMap acc_map = parts[0].second;
  for (size_t c = 1; c < parts.size(); ++c) {
    DisjointUnion du = disjoint_union(acc, parts[c].first);
    std::vector<int> assign(du.total.size());
    for (int p = 0; p < acc.size(); ++p) assign[du.in1(p)] = acc_map(p);
    for (int p = 0; p < parts[c].first.size(); ++p) assign[du.in2(p)] = parts[c].second(p);
    acc = du.total;
    acc_map = make_map(acc, x, assign);
  }
  *out_total = acc;
  return acc_map;
}

}  // namespace

UniversalLift universal_lift(const SpaceMap& g, int max_probe) {
  Network net = canonical_network(g);
  const FinSpace& x = g.target;
  UniversalLift ul;
  SpaceMap efinal = identity_map(x);
  while (net.stage > 0) {
    DescendStep st = descend(net);
    if (auto it = st.lifted.find(0); it != st.lifted.end()) efinal = it->second.e;
    net = std::move(st.next);
    ++ul.steps;
  }
  ul.F = node_of(net, 0);
  if (!(efinal.source == ul.F))
    fail(ErrorKind::verification_failure, "final node does not carry the lifted map",
         sizes({efinal.source.size(), ul.F.size()}));
  ul.e = efinal;
  std::vector<std::string> done;
  auto certify = [&](const char* name, bool ok, const std::string& wit) {
    if (!ok)
      fail(ErrorKind::verification_failure, std::string("lift check failed: ") + name, wit);
    done.push_back(name);
  };
  MapProfile pe = map_profile(ul.e);
  certify("etale", pe.etale, witness_for(pe, "etale"));
  {
    // universally closed = every specialization below lifts; checked directly
    // because the lift need not be separated
    bool ok = true;
    std::string wit;
    for (int p = 0; p < ul.F.size() && ok; ++p)
      for (int v = 0; v < x.size() && ok; ++v) {
        if (!x.leadsto(ul.e(p), v)) continue;
        bool lifts = false;
        for (int qq = 0; qq < ul.F.size() && !lifts; ++qq)
          lifts = ul.F.leadsto(p, qq) && ul.e(qq) == v;
        if (!lifts) {
          ok = false;
          wit = ul.F.names[p] + " vs " + x.names[v];
        }
      }
    certify("universally-closed", ok, wit);
  }
  if (net.labels == 0) {
    ul.S = empty_space();
    ul.s_embed = make_map(ul.S, ul.F, {});
  } else {
    std::vector<int> q;
    for (int l = 0; l < net.labels; ++l) q.push_back(1 << l);
    GluedStack gs = glue_subnetwork(net, q, 0);
    ul.S = gs.total;
    ul.s_embed = gs.to_meet;
  }
  certify("restriction-embedding", map_profile(ul.s_embed).closed_embedding, "");
  ImageFactorization gi = image_factorization(g);
  {
    FiberProduct rp = fiber_product(gi.embedding, ul.e);
    SpaceMap rp_x = compose(rp.pr1, gi.embedding);
    SpaceMap s_x = compose(ul.s_embed, ul.e);
    certify("restriction-gluing", find_isomorphism_over(rp_x, s_x).has_value(),
            sizes({rp.total.size(), ul.S.size()}));
  }
  {
    Subspace fc = complement_of_closed(ul.F, image_of(ul.s_embed));
    Subspace xc = complement_of_closed(x, image_of(g));
    certify("complement",
            find_isomorphism_over(compose(fc.incl, ul.e), xc.incl).has_value(),
            sizes({fc.space.size(), xc.space.size()}));
  }
  for (int k = 1; k <= net.labels; ++k) {
    FiberedPower pk = fibered_power(g, k);
    FiberProduct lhs = fiber_product(pk.to_base, ul.e);
    SpaceMap lhs_x = compose(lhs.pr1, pk.to_base);
    const int kmask = (1 << k) - 1;
    SpaceMap node_x = compose(edge_of(net, kmask, 0), ul.e);
    const long copies = falling_factorial(net.labels, k);
    std::vector<std::pair<FinSpace, SpaceMap>> parts(
        static_cast<size_t>(copies), {node_of(net, kmask), node_x});
    FinSpace rhs;
    SpaceMap rhs_x = union_over(x, parts, &rhs);
    if (!find_isomorphism_over(lhs_x, rhs_x))
      fail(ErrorKind::verification_failure, "lift check failed: self-pullback",
           "k=" + std::to_string(k) + ": " + sizes({lhs.total.size(), rhs.size()}));
  }
  done.push_back("self-pullback");
  MapProfile pg = map_profile(g);
  {
    FiberProduct idf = fiber_product(identity_map(x), ul.e);
    certify("identity-base-change", find_isomorphism_over(idf.pr1, ul.e).has_value(),
            sizes({idf.total.size(), ul.F.size()}));
  }
  if (pg.closed_embedding) {
    certify("closed-embedding-unchanged",
            find_isomorphism_over(ul.e, identity_map(x)).has_value(),
            sizes({ul.F.size(), x.size()}));
    FiberProduct yf = fiber_product(g, ul.e);
    certify("pushforward-identity",
            find_isomorphism_over(compose(yf.pr1, g), g).has_value(),
            sizes({yf.total.size(), g.source.size()}));
  }
  if (pg.etale && pg.proper && g.source.size() > 0 && x.components().size() == 1)
    certify("etale-cover-source", find_isomorphism_over(ul.e, g).has_value(),
            sizes({ul.F.size(), g.source.size()}));
  {
    AgreementReport rep = functor_agreement(g, ul.e, max_probe);
    if (!rep.agrees)
      fail(ErrorKind::oracle_disagreement, "lift disagrees with the sheet-data functor",
           rep.counterexample);
    done.push_back("oracle-agreement");
  }
  ul.final_net = std::move(net);
  ul.verified = std::move(done);
  return ul;
}

LiftResult universal_lift_result(const SpaceMap& g, int max_probe) {
  UniversalLift ul = universal_lift(g, max_probe);
  LiftResult out;
  out.F = ul.F;
  out.e = ul.e;
  std::optional<SpaceMap> emb;
  for (const SpaceMap& m : maps_over(g, ul.e))
    if (map_profile(m).closed_embedding) {
      emb = m;
      break;
    }
  if (!emb && g.source.size() > 0)
    fail(ErrorKind::verification_failure, "no closed sheet embedding of the source into the lift");
  out.i = emb ? *emb : make_map(g.source, ul.F, {});
  // the image pullback is the glued restriction: each of its points is a lift
  // point over the image, matched through the sheet gluing
  out.image_pullback = fiber_product(image_factorization(g).embedding, ul.e);
  std::vector<int> at_s(ul.F.size(), -1);
  for (int p = 0; p < ul.S.size(); ++p) at_s[ul.s_embed(p)] = p;
  std::vector<int> assign(out.image_pullback.total.size());
  for (size_t t = 0; t < out.image_pullback.pairs.size(); ++t) {
    const int f = out.image_pullback.pairs[t].second;
    if (at_s[f] < 0)
      fail(ErrorKind::verification_failure,
           "a lift point over the image misses the glued restriction", ul.F.names[f]);
    assign[t] = at_s[f];
  }
  out.phi = make_map(out.image_pullback.total, ul.S, assign);
  MapProfile pp = map_profile(out.phi);
  if (!pp.injective || !pp.surjective || !pp.closed_embedding)
    fail(ErrorKind::verification_failure,
         "image pullback does not match the glued restriction",
         sizes({out.image_pullback.total.size(), ul.S.size()}));
  out.verified = ul.verified;
  return out;
}

namespace {

std::optional<SpaceMap> find_iso_constrained(
    const FinSpace& a, const FinSpace& b,
    const std::vector<std::pair<SpaceMap, SpaceMap>>& cons) {
  if (a.size() != b.size()) return std::nullopt;
  std::vector<std::vector<int>> cand(a.size());
  for (int p = 0; p < a.size(); ++p)
    for (int q = 0; q < b.size(); ++q) {
      if (a.minimal_open(p).size() != b.minimal_open(q).size() ||
          a.closure_of(p).size() != b.closure_of(q).size())
        continue;
      bool ok = true;
      for (const auto& [fa, fb] : cons)
        if (fa(p) != fb(q)) {
          ok = false;
          break;
        }
      if (ok) cand[p].push_back(q);
    }
  std::vector<int> img(a.size(), -1);
  std::vector<char> used(b.size(), 0);
  auto rec = [&](auto&& self, int p) -> bool {
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
      if (self(self, p + 1)) return true;
      used[q] = 0;
    }
    return false;
  };
  if (!rec(rec, 0)) return std::nullopt;
  return make_map(a, b, img);
}

// node-wise comparison of two networks over matched targets, with the
// isomorphisms constrained to commute with every edge
void compare_networks(const Network& small, const Network& big, const char* what) {
  const int n = big.labels, nf = small.labels;
  if (nf > n)
    fail(ErrorKind::verification_failure,
         std::string(what) + ": comparison network has extra labels", sizes({nf, n}));
  FinSpace empty = empty_space();
  auto small_node = [&](int mask) -> const FinSpace& {
    return mask < (1 << nf) ? node_of(small, mask) : empty;
  };
  std::map<int, SpaceMap> psi;
  if (!(small_node(0) == node_of(big, 0)))
    fail(ErrorKind::verification_failure, std::string(what) + ": targets differ");
  psi.emplace(0, identity_map(node_of(big, 0)));
  for (int mask = 1; mask < (1 << n); ++mask) {
    const FinSpace& fn = small_node(mask);
    const FinSpace& pn = node_of(big, mask);
    if (fn.size() != pn.size())
      fail(ErrorKind::verification_failure,
           std::string(what) + ": node sizes differ at " + subset_name(mask),
           sizes({fn.size(), pn.size()}));
    if (fn.size() == 0) {
      psi.emplace(mask, make_map(empty, empty, {}));
      continue;
    }
    std::vector<std::pair<SpaceMap, SpaceMap>> cons;
    for (int k = 0; k < mask; ++k) {
      if (k & ~mask) continue;
      cons.push_back({compose(edge_of(small, mask, k), psi.at(k)), edge_of(big, mask, k)});
    }
    auto iso = find_iso_constrained(fn, pn, cons);
    if (!iso)
      fail(ErrorKind::verification_failure,
           std::string(what) + ": no edge-compatible isomorphism at " + subset_name(mask));
    psi.emplace(mask, std::move(*iso));
  }
}

}  // namespace

NetworkComparison base_change_network(const SpaceMap& g, const SpaceMap& u, int max_probe) {
  if (!(u.target == g.target))
    fail(ErrorKind::target_mismatch, "base change does not land in the base of the map");
  Network base = canonical_network(g);
  FiberProduct yp = fiber_product(g, u);
  NetworkComparison rep;
  rep.fresh = canonical_network(yp.pr2);
  const int n = base.labels;
  Network pl;
  pl.labels = n;
  pl.stage = base.stage;
  std::vector<FiberProduct> pfb(1 << n);
  pl.nodes[0] = u.source;
  for (int mask = 1; mask < (1 << n); ++mask) {
    pfb[mask] = fiber_product(edge_of(base, mask, 0), u);
    pl.nodes[mask] = pfb[mask].total;
  }
  for (int j = 1; j < (1 << n); ++j)
    for (int i = 0; i < j; ++i) {
      if (i & ~j) continue;
      if (i == 0) {
        pl.edges[{j, 0}] = pfb[j].pr2;
        continue;
      }
      const SpaceMap& ed = edge_of(base, j, i);
      std::vector<int> assign(pfb[j].total.size());
      for (size_t p = 0; p < pfb[j].pairs.size(); ++p) {
        auto id = pfb[i].pair_index(ed(pfb[j].pairs[p].first), pfb[j].pairs[p].second);
        if (!id)
          fail(ErrorKind::verification_failure, "pulled-back edge leaves the pulled-back node",
               pfb[j].total.names[p]);
        assign[p] = *id;
      }
      pl.edges[{j, i}] = make_map(pfb[j].total, pfb[i].total, assign);
    }
  validate_network(pl);
  rep.pulled = pl;
  compare_networks(rep.fresh, rep.pulled, "base change");
  rep.verified.push_back("network-pullback");
  UniversalLift ug = universal_lift(g, max_probe);
  UniversalLift up = universal_lift(yp.pr2, max_probe);
  rep.Fp = up.F;
  rep.ep = up.e;
  FiberProduct xf = fiber_product(u, ug.e);
  if (!find_isomorphism_over(up.e, xf.pr1))
    fail(ErrorKind::verification_failure, "base-changed lift is not the pullback of the lift",
         sizes({up.F.size(), xf.total.size()}));
  rep.verified.push_back("lift-base-change");
  return rep;
}

ProductComparison product_network(const SpaceMap& g, const SpaceMap& f, int max_probe) {
  if (!(g.target == f.target))
    fail(ErrorKind::target_mismatch, "product factors live over different bases");
  const FinSpace& x = g.target;
  UniversalLift ug = universal_lift(g, max_probe);
  UniversalLift uf = universal_lift(f, max_probe);
  const int ng = ug.final_net.labels;
  const int nf = uf.final_net.labels;
  auto to_x = [&](const UniversalLift& ul, int mask) {
    return mask == 0 ? ul.e : compose(edge_of(ul.final_net, mask, 0), ul.e);
  };
  ProductComparison rep;
  Network comb;
  comb.labels = ng + nf;
  comb.stage = 0;
  const int tot = 1 << comb.labels;
  std::vector<FiberProduct> pfb(tot);
  for (int mask = 0; mask < tot; ++mask) {
    pfb[mask] = fiber_product(to_x(ug, mask & ((1 << ng) - 1)), to_x(uf, mask >> ng));
    comb.nodes[mask] = pfb[mask].total;
  }
  for (int j = 1; j < tot; ++j)
    for (int i = 0; i < j; ++i) {
      if (i & ~j) continue;
      const int aj = j & ((1 << ng) - 1), bj = j >> ng;
      const int ai = i & ((1 << ng) - 1), bi = i >> ng;
      SpaceMap ca = ai == aj ? identity_map(node_of(ug.final_net, aj))
                             : edge_of(ug.final_net, aj, ai);
      SpaceMap cb = bi == bj ? identity_map(node_of(uf.final_net, bj))
                             : edge_of(uf.final_net, bj, bi);
      std::vector<int> assign(pfb[j].total.size());
      for (size_t p = 0; p < pfb[j].pairs.size(); ++p) {
        auto id = pfb[i].pair_index(ca(pfb[j].pairs[p].first), cb(pfb[j].pairs[p].second));
        if (!id)
          fail(ErrorKind::verification_failure, "product edge leaves the product node",
               pfb[j].total.names[p]);
        assign[p] = *id;
      }
      comb.edges[{j, i}] = make_map(pfb[j].total, pfb[i].total, assign);
    }
  validate_network(comb);
  rep.combined = comb;
  rep.product_target = comb.nodes.at(0);
  rep.product_e = compose(pfb[0].pr1, ug.e);
  DisjointUnion du = disjoint_union(g.source, f.source);
  std::vector<int> assign(du.total.size());
  for (int p = 0; p < g.source.size(); ++p) assign[du.in1(p)] = g(p);
  for (int p = 0; p < f.source.size(); ++p) assign[du.in2(p)] = f(p);
  SpaceMap union_map = make_map(du.total, x, assign);
  UniversalLift uu = universal_lift(union_map, max_probe);
  rep.union_target = uu.F;
  rep.union_e = uu.e;
  rep.agree = find_isomorphism_over(rep.product_e, rep.union_e).has_value();
  rep.detail = "product target " + std::to_string(rep.product_target.size()) +
               " points vs disjoint-union lift " + std::to_string(rep.union_target.size()) +
               " points" + (rep.agree ? ", isomorphic over the base" : ", no isomorphism over the base");
  return rep;
}

SuitableCover cover_from_atlas(const SpaceMap& g, const SpaceMap& atlas) {
  if (!(atlas.target == g.target))
    fail(ErrorKind::target_mismatch, "atlas does not cover the base of the map");
  MapProfile pa = map_profile(atlas);
  if (!pa.etale || !pa.surjective)
    fail(ErrorKind::cover_not_suitable, "the atlas is not an étale cover of the base",
         "etale-cover");
  MapProfile pg = map_profile(g);
  if (!pg.local_embedding)
    fail(ErrorKind::not_local_embedding, "the map is not a local embedding",
         witness_for(pg, "local_embedding"));
  if (!pg.proper)
    fail(ErrorKind::hypothesis_not_met, "the map is not proper");
  SuitableCover sc;
  sc.U = atlas.source;
  sc.to_base = atlas;
  std::vector<int> deg(g.target.size(), 0);
  for (int p = 0; p < g.source.size(); ++p) ++deg[g(p)];
  if (g.source.size() > 0) {
    // The sheet shape is the finalized one-label node of the descending
    // sequence: the source itself for double points, but a strictly larger
    // space once triple crossings appear (no closed copy of the source fits
    // into the cover then).
    Network tnet = canonical_network(g);
    while (tnet.stage > 2) tnet = descend(tnet).next;
    SpaceMap tmpl = tnet.edges.at({1, 0});
    std::vector<PointSet> cand;
    for (const SpaceMap& w : maps_over(tmpl, atlas)) {
      if (!map_profile(w).closed_embedding) continue;
      PointSet im = image_of(w);
      if (std::find(cand.begin(), cand.end(), im) == cand.end()) cand.push_back(im);
    }
    std::sort(cand.begin(), cand.end());
    // Distinct sheets may only meet over doubled base points; a candidate
    // that touches a kept sheet over a simple point mixes two sheets.
    for (const PointSet& im : cand) {
      bool mixes = false;
      for (const PointSet& kept : sc.sheets) {
        for (int p : set_intersect(im, kept))
          if (deg[atlas(p)] < 2) {
            mixes = true;
            break;
          }
        if (mixes) break;
      }
      if (!mixes) sc.sheets.push_back(im);
    }
  }
  if (g.source.size() > 0 && sc.sheets.empty())
    fail(ErrorKind::cover_not_suitable, "no closed sheet of the source embeds into the cover",
         "sheets");
  PointSet gimg = image_of(g);
  PointSet gpart;
  for (int p = 0; p < sc.U.size(); ++p)
    if (set_contains(gimg, atlas(p))) gpart.push_back(p);
  PointSet covered;
  for (const PointSet& w : sc.sheets) covered = set_union(covered, w);
  if (covered != gpart)
    fail(ErrorKind::cover_not_suitable, "sheets do not cover the image part of the cover",
         "covering");
  for (size_t l = 1; l < sc.sheets.size(); ++l)
    if (!find_isomorphism(subspace(sc.U, sc.sheets[0]).space,
                          subspace(sc.U, sc.sheets[l]).space))
      fail(ErrorKind::cover_not_suitable, "sheets are not pairwise isomorphic",
           "isomorphic-sheets");
  // One stratum per distinct fiber degree: the filtration jumps only where
  // the degree does (a constant-degree map has a single stratum).
  std::vector<int> degs_present;
  for (int p = 0; p < g.source.size(); ++p) degs_present.push_back(deg[g(p)]);
  std::sort(degs_present.begin(), degs_present.end());
  degs_present.erase(std::unique(degs_present.begin(), degs_present.end()),
                     degs_present.end());
  for (int d : degs_present) {
    PointSet raw;
    for (int p = 0; p < g.source.size(); ++p)
      if (deg[g(p)] >= d) raw.push_back(p);
    sc.strata.push_back(g.source.closure_set(raw));
  }
  const int ks = static_cast<int>(sc.strata.size());
  const int ls = static_cast<int>(sc.sheets.size());
  std::vector<std::vector<int>> families(ks);
  for (int k = 0; k < ks; ++k) {
    PointSet simg;
    for (int p : sc.strata[k]) simg = set_union(simg, {g(p)});
    PointSet target;
    for (int p = 0; p < sc.U.size(); ++p)
      if (set_contains(simg, atlas(p))) target.push_back(p);
    bool found = false;
    for (int s = 1; s <= ls && !found; ++s) {
      std::vector<std::pair<int, PointSet>> meets;
      for (int mask = 1; mask < (1 << ls); ++mask) {
        if (popcount(mask) != s) continue;
        PointSet w;
        bool first = true;
        for (int l = 0; l < ls; ++l) {
          if (!(mask >> l & 1)) continue;
          w = first ? sc.sheets[l] : set_intersect(w, sc.sheets[l]);
          first = false;
        }
        if (!w.empty()) meets.push_back({mask, w});
      }
      if (meets.empty()) continue;
      bool iso_ok = true;
      for (size_t i = 1; i < meets.size() && iso_ok; ++i)
        iso_ok = find_isomorphism(subspace(sc.U, meets[0].second).space,
                                  subspace(sc.U, meets[i].second).space)
                     .has_value();
      if (!iso_ok) continue;
      PointSet un;
      for (const auto& [mask, w] : meets) un = set_union(un, w);
      if (un != target) continue;
      found = true;
      sc.meets.push_back(un);
      for (const auto& [mask, w] : meets) families[k].push_back(mask);
    }
    if (!found)
      fail(ErrorKind::cover_not_suitable,
           "no sheet-intersection family matches a degree stratum",
           "stratum " + std::to_string(k));
  }
  FiberProduct v = fiber_product(g, atlas);
  sc.V = v.total;
  sc.v_to_source = v.pr1;
  sc.v_to_cover = v.pr2;
  sc.sections.resize(sc.sheets.size());
  for (size_t l = 0; l < sc.sheets.size(); ++l) {
    Subspace ws = subspace(sc.U, sc.sheets[l]);
    for (const SpaceMap& s : maps_over(ws.incl, v.pr2)) {
      PointSet im = image_of(s);
      // a sheet section must spread over the whole source, not one branch
      PointSet src;
      for (int p : im) src = set_union(src, {v.pr1(p)});
      if (src != g.source.all_points()) continue;
      if (std::find(sc.sections[l].begin(), sc.sections[l].end(), im) == sc.sections[l].end())
        sc.sections[l].push_back(im);
    }
    std::sort(sc.sections[l].begin(), sc.sections[l].end());
    if (sc.sections[l].empty())
      fail(ErrorKind::cover_not_suitable, "a sheet carries no section of the pullback",
           "sections");
  }
  for (int k = 0; k < ks; ++k) {
    PointSet expect;
    for (int p = 0; p < sc.V.size(); ++p)
      if (set_contains(sc.strata[k], v.pr1(p))) expect.push_back(p);
    PointSet got;
    for (int mask : families[k]) {
      PointSet w;
      bool first = true;
      for (int l = 0; l < ls; ++l) {
        if (!(mask >> l & 1)) continue;
        w = first ? sc.sheets[l] : set_intersect(w, sc.sheets[l]);
        first = false;
      }
      for (int l = 0; l < ls; ++l) {
        if (!(mask >> l & 1)) continue;
        for (const PointSet& sec : sc.sections[l]) {
          PointSet restricted, src;
          for (int p : sec)
            if (set_contains(w, v.pr2(p))) restricted.push_back(p);
          for (int p : restricted) src = set_union(src, {v.pr1(p)});
          if (src != sc.strata[k])
            fail(ErrorKind::cover_not_suitable,
                 "a restricted section does not spread over its stratum",
                 "stratum sections " + std::to_string(k));
          got = set_union(got, restricted);
        }
      }
    }
    if (got != expect)
      fail(ErrorKind::cover_not_suitable, "sections do not cover a degree stratum",
           "stratum sections " + std::to_string(k));
  }
  sc.verified = {"etale-cover", "sheet-isomorphism", "stratum-matching", "section-covering"};
  return sc;
}

SuitableCover suitable_cover(const SpaceMap& g) {
  UniversalLift ul = universal_lift(g);
  return cover_from_atlas(g, ul.e);
}

Network network_from_cover(const SpaceMap& g, const SuitableCover& cover) {
  const int n = multiplicity(g);
  for (const auto& secs : cover.sections)
    if (secs.size() != 1)
      fail(ErrorKind::hypothesis_not_met,
           "cover presentation needs one section per sheet; split the map first",
           std::to_string(secs.size()) + " sections");
  SuitableCover use = cover;
  if (static_cast<int>(cover.sheets.size()) > n) {
    PointSet drop;
    for (size_t l = n; l < cover.sheets.size(); ++l) drop = set_union(drop, cover.sheets[l]);
    PointSet keep = set_minus(cover.U.all_points(), drop);
    Subspace su = subspace(cover.U, keep);
    use = cover_from_atlas(g, compose(su.incl, cover.to_base));
  }
  if (static_cast<int>(use.sheets.size()) != n)
    fail(ErrorKind::cover_not_suitable, "sheet count differs from the sheet multiplicity",
         sizes({static_cast<int>(use.sheets.size()), n}));
  Network net;
  net.labels = n;
  net.stage = n;
  net.nodes[0] = g.target;
  std::vector<PointSet> kept(1 << n);
  for (int mask = 1; mask < (1 << n); ++mask) {
    PointSet w;
    bool first = true;
    for (int l = 0; l < n; ++l) {
      if (!(mask >> l & 1)) continue;
      w = first ? use.sheets[l] : set_intersect(w, use.sheets[l]);
      first = false;
    }
    for (int u : w) {
      std::vector<int> coords;
      for (int l = 0; l < n; ++l) {
        if (!(mask >> l & 1)) continue;
        int y = -1;
        for (int p : use.sections[l][0])
          if (use.v_to_cover(p) == u) y = use.v_to_source(p);
        if (y < 0)
          fail(ErrorKind::verification_failure, "a sheet section misses a meet point",
               use.U.names[u]);
        coords.push_back(y);
      }
      std::sort(coords.begin(), coords.end());
      if (std::adjacent_find(coords.begin(), coords.end()) == coords.end())
        kept[mask].push_back(u);
    }
    net.nodes[mask] = subspace(use.U, kept[mask]).space;
  }
  for (int j = 1; j < (1 << n); ++j)
    for (int i = 0; i < j; ++i) {
      if (i & ~j) continue;
      std::vector<int> assign(kept[j].size());
      for (size_t p = 0; p < kept[j].size(); ++p) {
        if (i == 0) {
          assign[p] = use.to_base(kept[j][p]);
          continue;
        }
        auto it = std::find(kept[i].begin(), kept[i].end(), kept[j][p]);
        if (it == kept[i].end())
          fail(ErrorKind::verification_failure, "meet points do not nest along the index order",
               use.U.names[kept[j][p]]);
        assign[p] = static_cast<int>(it - kept[i].begin());
      }
      net.edges[{j, i}] = make_map(net.nodes.at(j), i == 0 ? g.target : net.nodes.at(i), assign);
    }
  validate_network(net);
  compare_networks(net, canonical_network(g), "cover network");
  return net;
}

bool verify_glue_hom(const Network& net, const std::vector<int>& q0, int max_probe,
                     std::string* why) {
  auto explain = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  GluedStack gs = glue_subnetwork(net, q0);
  std::vector<int> q = q0;
  q = normalize_family(std::move(q));
  // every map off the glued total restricts to a join-compatible family, and
  // distinct maps restrict to distinct families (the pieces cover), so the
  // universal property is exactly: #families == #maps, on every probe
  for (const FinSpace& t : all_posets_up_to(max_probe)) {
    std::vector<std::vector<SpaceMap>> fam;
    for (int i : q) fam.push_back(all_maps(node_of(net, i), t));
    std::vector<std::map<std::vector<int>, std::vector<const SpaceMap*>>> bucket(q.size());
    for (size_t i = 1; i < q.size(); ++i) {
      const SpaceMap& ei = edge_of(net, q[0] | q[i], q[i]);
      for (const SpaceMap& f : fam[i]) {
        std::vector<int> sig(ei.source.size());
        for (int p = 0; p < ei.source.size(); ++p) sig[p] = f(ei(p));
        bucket[i][sig].push_back(&f);
      }
    }
    long families = 0;
    std::vector<const SpaceMap*> chosen(q.size(), nullptr);
    auto rec = [&](auto&& self, size_t i) -> void {
      if (i == q.size()) {
        ++families;
        return;
      }
      const SpaceMap& e0 = edge_of(net, q[0] | q[i], q[0]);
      std::vector<int> sig(e0.source.size());
      for (int p = 0; p < e0.source.size(); ++p) sig[p] = (*chosen[0])(e0(p));
      auto it = bucket[i].find(sig);
      if (it == bucket[i].end()) return;
      for (const SpaceMap* f : it->second) {
        bool ok = true;
        for (size_t jj = 1; jj < i && ok; ++jj) {
          const int join = q[i] | q[jj];
          const SpaceMap& ei = edge_of(net, join, q[i]);
          const SpaceMap& ej = edge_of(net, join, q[jj]);
          for (int p = 0; p < ei.source.size() && ok; ++p)
            ok = (*f)(ei(p)) == (*chosen[jj])(ej(p));
        }
        if (!ok) continue;
        chosen[i] = f;
        self(self, i + 1);
      }
    };
    if (q.size() == 1) {
      families = static_cast<long>(fam[0].size());
    } else {
      for (const SpaceMap& f0 : fam[0]) {
        chosen[0] = &f0;
        rec(rec, 1);
      }
    }
    const long direct = static_cast<long>(all_maps(gs.total, t).size());
    if (families != direct)
      return explain("family count " + std::to_string(families) + " vs map count " +
                     std::to_string(direct) + " on a probe with " + std::to_string(t.size()) +
                     " points");
  }
  return true;
}

namespace {

// Composite comparison of coordinates i < j inside an anchored tuple:
// τ_j ∘ τ_i^{-1}, with τ_1 the (virtual) unit at the anchor.
int tuple_comparison(const GroupoidPresentation& X, const std::vector<int>& tup, int n, int i,
                     int j, int anchor_obj) {
  int ti = i == 0 ? X.unit(anchor_obj) : tup[n + i - 1];
  int tj = j == 0 ? X.unit(anchor_obj) : tup[n + j - 1];
  return X.comp[X.inv(ti)][tj];
}

}  // namespace

StackFiberedPower stack_fibered_power(const StackMap& g, int n) {
  if (n < 1) fail(ErrorKind::validation_error, "fiber power order must be at least 1");
  const GroupoidPresentation& Y = g.source;
  const GroupoidPresentation& X = g.target;

  StackFiberedPower out;
  out.n = n;
  if (n == 1) {
    out.full = Y;
    out.full_proj = {identity_stack_map(Y)};
    out.full_to_base = g;
    out.distinct = Y;
    out.proj = {identity_stack_map(Y)};
    out.to_base = g;
    for (int p = 0; p < Y.objects.size(); ++p) {
      out.tuples.push_back({p});
      out.index_of[{p}] = p;
    }
    return out;
  }

  // objects: [y_1..y_n, τ_2..τ_n], τ_i: g(y_1) -> g(y_i)
  std::vector<std::vector<int>> objs;
  std::map<std::vector<int>, int> obj_index;
  std::vector<std::string> obj_names;
  {
    std::vector<int> cur(2 * n - 1, 0);
    auto rec = [&](auto&& self, int slot) -> void {
      if (slot == 2 * n - 1) {
        obj_index[cur] = static_cast<int>(objs.size());
        objs.push_back(cur);
        std::string nm = "(" + Y.objects.names[cur[0]];
        for (int i = 1; i < n; ++i)
          nm += "|" + X.arrows.names[cur[n + i - 1]] + "|" + Y.objects.names[cur[i]];
        obj_names.push_back(nm + ")");
        return;
      }
      if (slot < n) {
        for (int y = 0; y < Y.objects.size(); ++y) {
          cur[slot] = y;
          self(self, slot + 1);
        }
      } else {
        int i = slot - n + 1;
        for (int t = 0; t < X.arrows.size(); ++t) {
          if (X.src(t) != g.on_objects(cur[0]) || X.tgt(t) != g.on_objects(cur[i])) continue;
          cur[slot] = t;
          self(self, slot + 1);
        }
      }
    };
    rec(rec, 0);
  }
  const int no = static_cast<int>(objs.size());
  std::vector<std::vector<char>> obj_leads(no, std::vector<char>(no, 0));
  for (int p = 0; p < no; ++p)
    for (int q = 0; q < no; ++q) {
      bool le = true;
      for (int k = 0; k < n && le; ++k) le = Y.objects.leadsto(objs[p][k], objs[q][k]);
      for (int k = n; k < 2 * n - 1 && le; ++k) le = X.arrows.leadsto(objs[p][k], objs[q][k]);
      obj_leads[p][q] = le ? 1 : 0;
    }
  FinSpace obj_space{std::move(obj_names), std::move(obj_leads)};

  // arrows: a source object together with one source arrow per coordinate
  std::vector<std::pair<int, std::vector<int>>> arrs;
  std::map<std::pair<int, std::vector<int>>, int> arr_index;
  std::vector<std::string> arr_names;
  std::vector<int> src_a, tgt_a;
  for (int o = 0; o < no; ++o) {
    std::vector<int> bs(n, 0);
    auto rec = [&](auto&& self, int k) -> void {
      if (k == n) {
        std::vector<int> to(2 * n - 1);
        for (int c = 0; c < n; ++c) to[c] = Y.tgt(bs[c]);
        bool ok = true;
        for (int i = 1; i < n && ok; ++i) {
          int moved = X.comp[X.comp[X.inv(g.on_arrows(bs[0]))][objs[o][n + i - 1]]]
                            [g.on_arrows(bs[i])];
          if (moved < 0)
            ok = false;
          else
            to[n + i - 1] = moved;
        }
        if (!ok) return;
        auto it = obj_index.find(to);
        if (it == obj_index.end()) return;
        arr_index[{o, bs}] = static_cast<int>(arrs.size());
        src_a.push_back(o);
        tgt_a.push_back(it->second);
        std::string nm = "[" + Y.arrows.names[bs[0]];
        for (int c = 1; c < n; ++c) nm += "," + Y.arrows.names[bs[c]];
        arr_names.push_back(nm + "@" + std::to_string(o) + "]");
        arrs.emplace_back(o, bs);
        return;
      }
      for (int b = 0; b < Y.arrows.size(); ++b) {
        if (Y.src(b) != objs[o][k]) continue;
        bs[k] = b;
        self(self, k + 1);
      }
    };
    rec(rec, 0);
  }
  const int nr = static_cast<int>(arrs.size());
  std::vector<std::vector<char>> arr_leads(nr, std::vector<char>(nr, 0));
  for (int p = 0; p < nr; ++p)
    for (int q = 0; q < nr; ++q) {
      bool le = true;
      for (int k = 0; k < n && le; ++k) le = Y.arrows.leadsto(arrs[p].second[k], arrs[q].second[k]);
      for (int k = n; k < 2 * n - 1 && le; ++k)
        le = X.arrows.leadsto(objs[arrs[p].first][k], objs[arrs[q].first][k]);
      arr_leads[p][q] = le ? 1 : 0;
    }
  FinSpace arr_space{std::move(arr_names), std::move(arr_leads)};

  std::vector<int> inv_a(nr), unit_a(no);
  for (int r = 0; r < nr; ++r) {
    std::vector<int> ib(n);
    for (int k = 0; k < n; ++k) ib[k] = Y.inv(arrs[r].second[k]);
    inv_a[r] = arr_index.at({tgt_a[r], ib});
  }
  for (int o = 0; o < no; ++o) {
    std::vector<int> ub(n);
    for (int k = 0; k < n; ++k) ub[k] = Y.unit(objs[o][k]);
    unit_a[o] = arr_index.at({o, ub});
  }
  std::vector<std::vector<int>> comp(nr, std::vector<int>(nr, -1));
  for (int r = 0; r < nr; ++r)
    for (int q = 0; q < nr; ++q) {
      if (tgt_a[r] != src_a[q]) continue;
      std::vector<int> cb(n);
      for (int k = 0; k < n; ++k) cb[k] = Y.comp[arrs[r].second[k]][arrs[q].second[k]];
      comp[r][q] = arr_index.at({src_a[r], cb});
    }

  out.full = validate_groupoid(obj_space, arr_space, make_map(arr_space, obj_space, src_a),
                               make_map(arr_space, obj_space, tgt_a),
                               make_map(obj_space, arr_space, unit_a),
                               make_map(arr_space, arr_space, inv_a), std::move(comp));

  for (int c = 0; c < n; ++c) {
    std::vector<int> po(no), pa(nr);
    for (int o = 0; o < no; ++o) po[o] = objs[o][c];
    for (int r = 0; r < nr; ++r) pa[r] = arrs[r].second[c];
    out.full_proj.push_back(make_stack_map(out.full, Y,
                                           make_map(out.full.objects, Y.objects, po),
                                           make_map(out.full.arrows, Y.arrows, pa)));
  }
  {
    std::vector<int> po(no), pa(nr);
    for (int o = 0; o < no; ++o) po[o] = g.on_objects(objs[o][0]);
    for (int r = 0; r < nr; ++r) pa[r] = g.on_arrows(arrs[r].second[0]);
    out.full_to_base = make_stack_map(out.full, X, make_map(out.full.objects, X.objects, po),
                                      make_map(out.full.arrows, X.arrows, pa));
  }

  // repeated locus: components containing a tuple with two coordinates
  // literally equal under a unit comparison
  std::vector<PointSet> comps = clopen_components(out.full);
  for (const PointSet& cpts : comps) {
    bool hit = false;
    for (int o : cpts) {
      for (int i = 0; i < n && !hit; ++i)
        for (int j = i + 1; j < n && !hit; ++j)
          if (objs[o][i] == objs[o][j] &&
              tuple_comparison(X, objs[o], n, i, j, g.on_objects(objs[o][0])) ==
                  X.unit(g.on_objects(objs[o][i])))
            hit = true;
      if (hit) break;
    }
    if (hit) out.diagonal = set_union(out.diagonal, cpts);
  }

  PointSet keep = set_minus(out.full.objects.all_points(), out.diagonal);
  out.distinct = full_subgroupoid(out.full, keep);
  PointSet kept_arrows;
  for (int r = 0; r < nr; ++r)
    if (set_contains(keep, src_a[r]) && set_contains(keep, tgt_a[r])) kept_arrows.push_back(r);
  for (int c = 0; c < n; ++c) {
    std::vector<int> po(keep.size()), pa(kept_arrows.size());
    for (size_t k = 0; k < keep.size(); ++k) po[k] = objs[keep[k]][c];
    for (size_t k = 0; k < kept_arrows.size(); ++k) pa[k] = arrs[kept_arrows[k]].second[c];
    out.proj.push_back(make_stack_map(out.distinct, Y,
                                      make_map(out.distinct.objects, Y.objects, po),
                                      make_map(out.distinct.arrows, Y.arrows, pa)));
  }
  {
    std::vector<int> po(keep.size()), pa(kept_arrows.size());
    for (size_t k = 0; k < keep.size(); ++k) po[k] = g.on_objects(objs[keep[k]][0]);
    for (size_t k = 0; k < kept_arrows.size(); ++k)
      pa[k] = g.on_arrows(arrs[kept_arrows[k]].second[0]);
    out.to_base = make_stack_map(out.distinct, X, make_map(out.distinct.objects, X.objects, po),
                                 make_map(out.distinct.arrows, X.arrows, pa));
  }
  for (size_t k = 0; k < keep.size(); ++k) {
    out.tuples.push_back(objs[keep[k]]);
    out.index_of[objs[keep[k]]] = static_cast<int>(k);
  }
  return out;
}

int stack_multiplicity(const StackMap& g) {
  if (g.source.objects.size() == 0) return 0;
  // fiber class bound: orbits of the atlas pullback over a single atlas point
  StackFiberProduct pb = stack_fiber_product(g, atlas_map(g.target));
  Quotient v0 = orbit_space(pb.total);
  std::map<int, int> per_point;
  for (int obj = 0; obj < pb.total.objects.size(); ++obj)
    per_point[std::get<2>(pb.object_triples[obj])] = 0;
  {
    std::set<std::pair<int, int>> seen;
    for (int obj = 0; obj < pb.total.objects.size(); ++obj)
      if (seen.insert({std::get<2>(pb.object_triples[obj]), v0.proj(obj)}).second)
        ++per_point[std::get<2>(pb.object_triples[obj])];
  }
  int bound = 0;
  for (const auto& [_, c] : per_point) bound = std::max(bound, c);
  int best = 0;
  for (int k = 1; k <= bound; ++k) {
    if (stack_fibered_power(g, k).distinct.objects.size() == 0) break;
    best = k;
  }
  return best;
}

void validate_stack_network(const StackNetwork& net) {
  const int full = (1 << net.labels) - 1;
  for (int i = 0; i <= full; ++i)
    if (!net.nodes.count(i))
      fail(ErrorKind::validation_error, "network is missing node " + subset_name(i));
  for (int j = 0; j <= full; ++j)
    for (int i = 0; i < j; ++i) {
      if ((i & j) != i) continue;
      auto it = net.edges.find({j, i});
      if (it == net.edges.end())
        fail(ErrorKind::validation_error,
             "network is missing edge " + subset_name(j) + " -> " + subset_name(i));
      const StackMap& m = it->second;
      if (!(m.source == net.nodes.at(j)) || !(m.target == net.nodes.at(i)))
        fail(ErrorKind::validation_error,
             "edge endpoints disagree with the nodes at " + subset_name(j));
    }
  for (int k = 0; k <= full; ++k)
    for (int j = 0; j < k; ++j) {
      if ((j & k) != j) continue;
      for (int i = 0; i < j; ++i) {
        if ((i & j) != i) continue;
        StackMap through = compose_stack_maps(net.edges.at({k, j}), net.edges.at({j, i}));
        const StackMap& direct = net.edges.at({k, i});
        if (through == direct) continue;
        if (!find_two_cell(direct, through))
          fail(ErrorKind::verification_failure,
               "edge composite not even two-isomorphic to the direct edge",
               subset_name(k) + " -> " + subset_name(j) + " -> " + subset_name(i));
      }
    }
}

StackNetwork stack_canonical_network(const StackMap& g) {
  StackProfile prof = stack_map_profile(g);
  if (!prof.representable || !prof.local_embedding)
    fail(ErrorKind::not_local_embedding,
         "stack network requires a representable local embedding");
  if (!prof.proper)
    fail(ErrorKind::hypothesis_not_met, "stack network requires a proper map");
  if (clopen_components(g.source).size() > 1)
    fail(ErrorKind::hypothesis_not_met,
         "stack network of a disconnected source presentation is not supported; "
         "split it at the space tier first");

  int labels = stack_multiplicity(g);
  if (labels == 0)
    fail(ErrorKind::hypothesis_not_met, "stack network needs a non-empty source");

  std::vector<StackFiberedPower> pw(labels + 1);
  for (int k = 1; k <= labels; ++k) pw[k] = stack_fibered_power(g, k);

  StackNetwork net;
  net.labels = labels;
  net.stage = labels;
  net.nodes[0] = g.target;
  const int full = (1 << labels) - 1;
  for (int m = 1; m <= full; ++m) net.nodes[m] = pw[popcount(m)].distinct;

  for (int j = 1; j <= full; ++j) {
    std::vector<int> jbits;
    for (int b = 0; b < labels; ++b)
      if (j & (1 << b)) jbits.push_back(b);
    const StackFiberedPower& pj = pw[popcount(j)];
    for (int i = 0; i < j; ++i) {
      if ((i & j) != i) continue;
      if (i == 0) {
        net.edges[{j, 0}] = pj.to_base;
        continue;
      }
      std::vector<int> pos;  // positions of i's labels inside j's tuple
      for (size_t k = 0; k < jbits.size(); ++k)
        if (i & (1 << jbits[k])) pos.push_back(static_cast<int>(k));
      const StackFiberedPower& pi = pw[popcount(i)];
      const GroupoidPresentation& X = g.target;
      const int nj = pj.distinct.objects.size();
      std::vector<int> po(nj), pa(pj.distinct.arrows.size());
      std::vector<int> sub(2 * static_cast<int>(pos.size()) - 1);
      for (int o = 0; o < nj; ++o) {
        const std::vector<int>& tup = pj.tuples[o];
        const int m = static_cast<int>(pos.size());
        for (int c = 0; c < m; ++c) sub[c] = tup[pos[c]];
        for (int c = 1; c < m; ++c)
          sub[m + c - 1] = tuple_comparison(X, tup, popcount(j), pos[0], pos[c],
                                            g.on_objects(tup[0]));
        auto it = pi.index_of.find(sub);
        if (it == pi.index_of.end())
          fail(ErrorKind::verification_failure,
               "a distinct tuple projected into the repeated locus",
               pj.distinct.objects.names[o]);
        po[o] = it->second;
      }
      // arrows of the distinct locus are named and ordered like the kept
      // arrows of the full power; recover their coordinates via projections
      for (int r = 0; r < pj.distinct.arrows.size(); ++r) {
        int src_o = pj.distinct.src(r);
        std::vector<int> bs;
        for (int c : pos) bs.push_back(pj.proj[c].on_arrows(r));
        // locate the arrow of the smaller power with these coordinates
        bool found = false;
        for (int r2 = 0; r2 < pi.distinct.arrows.size() && !found; ++r2) {
          if (pi.distinct.src(r2) != po[src_o]) continue;
          bool same = true;
          for (size_t c = 0; c < pos.size() && same; ++c)
            same = pi.proj[c].on_arrows(r2) == bs[c];
          if (same) {
            pa[r] = r2;
            found = true;
          }
        }
        if (!found)
          fail(ErrorKind::verification_failure,
               "a power arrow has no projection in the smaller power",
               pj.distinct.arrows.names[r]);
      }
      net.edges[{j, i}] = make_stack_map(pj.distinct, pi.distinct,
                                         make_map(pj.distinct.objects, pi.distinct.objects, po),
                                         make_map(pj.distinct.arrows, pi.distinct.arrows, pa));
    }
  }
  validate_stack_network(net);
  return net;
}

StackUniversalLift stack_universal_lift(const StackMap& g) {
  SpaceMap vmap = atlas_realization(g);
  if (!map_profile(image_factorization(vmap).onto_image).etale)
    fail(ErrorKind::hypothesis_not_met,
         "groupoid-tier descent beyond the étale-on-image base case is not supported");
  StackUniversalLift out;
  out.net = stack_canonical_network(g);
  out.lift = stack_base_lift(g);
  out.verified = out.lift.verified;
  out.verified.push_back("network");
  return out;
}

}  // namespace stk
