#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stk/errors.hpp"

namespace stk {

// Sorted, duplicate-free point index set.
using PointSet = std::vector<int>;

PointSet set_union(const PointSet& a, const PointSet& b);
PointSet set_intersect(const PointSet& a, const PointSet& b);
PointSet set_minus(const PointSet& a, const PointSet& b);
bool set_contains(const PointSet& a, int p);
bool set_subset(const PointSet& a, const PointSet& b);  // a ⊆ b

// A finite T0 space, stored as its specialization order.
// Convention (fixed everywhere, including the serialization format):
// leadsto(a,b) — written a > b in files — means b ∈ closure({a}).
// Open sets are the generization-closed subsets, closed sets the
// specialization-closed ones; both are derived on demand, never stored.
struct FinSpace {
  std::vector<std::string> names;
  std::vector<std::vector<char>> leads;  // leads[a][b] != 0 iff b ∈ closure(a)

  int size() const { return static_cast<int>(names.size()); }
  bool leadsto(int a, int b) const { return leads[a][b] != 0; }
  std::optional<int> find(const std::string& name) const;
  int index_of(const std::string& name) const;  // UnknownPoint on miss

  PointSet closure_of(int p) const;    // specializations of p
  PointSet minimal_open(int p) const;  // generizations of p
  PointSet closure_set(const PointSet& s) const;
  PointSet open_hull(const PointSet& s) const;
  bool is_closed_set(const PointSet& s) const;
  bool is_open_set(const PointSet& s) const;
  PointSet all_points() const;
  std::vector<PointSet> components() const;  // connected components
  // Points that are not in the closure of any other point; in this model the
  // closure of such a point is a whole irreducible piece.
  PointSet generic_points() const;

  bool operator==(const FinSpace&) const = default;
};

// Builds a space from a raw relation: takes the reflexive-transitive closure,
// then rejects cycles (the input would not be T0).
FinSpace validate_space(std::vector<std::string> names,
                        const std::vector<std::pair<std::string, std::string>>& rel);
FinSpace space_from_order(std::vector<std::string> names,
                          std::vector<std::vector<char>> leads);
FinSpace empty_space();
FinSpace point_space(const std::string& name);

struct SpaceMap {
  FinSpace source;
  FinSpace target;
  std::vector<int> assign;  // target index per source point

  int operator()(int p) const { return assign[p]; }
  bool operator==(const SpaceMap&) const = default;
};

// Checks continuity (a ⤳ b forces assign(a) ⤳ assign(b)); NotContinuous otherwise.
SpaceMap make_map(FinSpace source, FinSpace target, std::vector<int> assign);
SpaceMap make_map_by_names(const FinSpace& source, const FinSpace& target,
                           const std::vector<std::pair<std::string, std::string>>& assign);
SpaceMap identity_map(const FinSpace& x);
// Diagrammatic order: first f, then g.
SpaceMap compose(const SpaceMap& f, const SpaceMap& g);

struct MapProfile {
  bool injective = false;
  bool surjective = false;
  bool local_embedding = false;
  bool etale = false;
  bool open_embedding = false;
  bool closed_embedding = false;
  bool separated = false;
  bool proper = false;
  std::vector<int> fiber_degrees;  // per target point
  // failed property -> witness, for diagnostics
  std::vector<std::pair<std::string, std::string>> notes;
};

MapProfile map_profile(const SpaceMap& f);

struct Subspace {
  FinSpace space;
  SpaceMap incl;
};

Subspace subspace(const FinSpace& x, const PointSet& pts);
Subspace complement_of_closed(const FinSpace& x, const PointSet& closed_pts);

struct ImageFactorization {
  SpaceMap onto_image;  // source -> Im(f), surjective
  SpaceMap embedding;   // Im(f) -> target
};

ImageFactorization image_factorization(const SpaceMap& f);
PointSet image_of(const SpaceMap& f);

struct FiberProduct {
  FinSpace total;                         // points are pairs "(a,b)" with f(a) = g(b)
  SpaceMap pr1;                           // -> source of f
  SpaceMap pr2;                           // -> source of g
  std::vector<std::pair<int, int>> pairs; // per total point
  std::optional<int> pair_index(int a, int b) const;
};

FiberProduct fiber_product(const SpaceMap& f, const SpaceMap& g);

struct DisjointUnion {
  FinSpace total;
  SpaceMap in1;
  SpaceMap in2;
};

DisjointUnion disjoint_union(const FinSpace& a, const FinSpace& b);

struct Glued {
  FinSpace total;  // (A ⊔ B)/(i(z) ~ j(z))
  SpaceMap from_a;
  SpaceMap from_b;
};

// Pushout of two closed embeddings; re-verifies T0 and that both legs land
// as closed embeddings again.
Glued glue_along_closed(const SpaceMap& i, const SpaceMap& j);

struct Quotient {
  FinSpace space;
  SpaceMap proj;
};

// Quotient by a partition; spec order is the transitive closure of the induced
// relation, rejected if it collapses to a cycle.
Quotient quotient_space(const FinSpace& x, const std::vector<int>& class_of);

std::optional<SpaceMap> find_isomorphism(const FinSpace& a, const FinSpace& b);
// Isomorphism commuting with the structure maps to a common base.
std::optional<SpaceMap> find_isomorphism_over(const SpaceMap& ea, const SpaceMap& eb);

std::vector<SpaceMap> all_maps(const FinSpace& t, const FinSpace& x);
// All u: T -> F with e ∘ u = alpha.
std::vector<SpaceMap> maps_over(const SpaceMap& alpha, const SpaceMap& e);

// All T0 spaces with 0..max_points points, one per isomorphism class.
std::vector<FinSpace> all_posets_up_to(int max_points);

std::string render_dot(const FinSpace& x, const std::string& graph_name);

}  // namespace stk
