#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "stk/finspace.hpp"

namespace stk {

// Étale groupoid internal to FinSpace: arrows R over objects U with étale
// source/target. Composition is diagrammatic: comp[r][s] is "first r, then s",
// defined exactly when tgt(r) = src(s).
struct GroupoidPresentation {
  FinSpace objects;  // U
  FinSpace arrows;   // R
  SpaceMap src;      // R -> U
  SpaceMap tgt;      // R -> U
  SpaceMap unit;     // U -> R
  SpaceMap inv;      // R -> R
  std::vector<std::vector<int>> comp;  // -1 when not composable

  int compose_arrows(int r, int s) const;
  PointSet automorphisms_at(int u) const;  // arrows u -> u
  bool operator==(const GroupoidPresentation&) const = default;
};

GroupoidPresentation validate_groupoid(FinSpace objects, FinSpace arrows, SpaceMap src,
                                       SpaceMap tgt, SpaceMap unit, SpaceMap inv,
                                       std::vector<std::vector<int>> comp);

GroupoidPresentation trivial_groupoid(const FinSpace& a);
// One-object groupoid from a finite group given by its multiplication table.
GroupoidPresentation group_groupoid(std::vector<std::string> element_names, int unit_element,
                                    const std::vector<std::vector<int>>& mult);
// Cech groupoid [U ×_X U ⇉ U] of an étale map; presents the image substack.
GroupoidPresentation cech_groupoid(const SpaceMap& cover);

struct StackMap {
  GroupoidPresentation source;
  GroupoidPresentation target;
  SpaceMap on_objects;
  SpaceMap on_arrows;
  bool operator==(const StackMap&) const = default;
};

StackMap make_stack_map(GroupoidPresentation source, GroupoidPresentation target,
                        SpaceMap on_objects, SpaceMap on_arrows);
StackMap identity_stack_map(const GroupoidPresentation& g);
StackMap compose_stack_maps(const StackMap& f, const StackMap& g);
// A continuous space map as a map of trivial groupoids.
StackMap trivial_stack_map(const SpaceMap& f);
// trivial(U_G) -> G: the presenting atlas.
StackMap atlas_map(const GroupoidPresentation& g);

// A morphism presented on a refinement of its declared source: the refinement
// leg must be a Morita morphism.
struct RefinedStackMap {
  StackMap map;                         // refined source -> target
  std::optional<StackMap> refinement;   // refined source -> declared source
};

RefinedStackMap validate_refined(StackMap map, std::optional<StackMap> refinement);

// Natural transformation f => g between strict maps with common endpoints:
// a continuous family of target arrows indexed by source objects.
std::optional<SpaceMap> find_two_cell(const StackMap& f, const StackMap& g);

struct ProductGroupoid {
  GroupoidPresentation total;
  StackMap pr1;
  StackMap pr2;
};

ProductGroupoid product_groupoid(const GroupoidPresentation& a, const GroupoidPresentation& b);
StackMap diagonal_map(const GroupoidPresentation& g);

struct StackFiberProduct {
  GroupoidPresentation total;
  StackMap pr1;
  StackMap pr2;
  SpaceMap two_cell;  // tautological cell filling the square, objects -> target arrows
  // bookkeeping: per total object (obj1, connecting arrow, obj2); same for arrows
  std::vector<std::tuple<int, int, int>> object_triples;
  std::vector<std::tuple<int, int, int>> arrow_triples;
  std::optional<int> object_index(int u1, int rho, int u2) const;
};

StackFiberProduct stack_fiber_product(const StackMap& f, const StackMap& g);

// (n+1)-fold fiber power of g over g x g along the diagonal; n = 1 is the
// classical inertia presentation.
GroupoidPresentation inertia(const GroupoidPresentation& g, int n);

std::vector<GroupoidPresentation> clopen_decomposition(const GroupoidPresentation& g);
std::vector<PointSet> clopen_components(const GroupoidPresentation& g);  // atlas point sets
GroupoidPresentation full_subgroupoid(const GroupoidPresentation& g, const PointSet& atlas_pts);
Quotient orbit_space(const GroupoidPresentation& g);  // coarse space of the atlas

struct MoritaReport {
  bool fully_faithful = false;
  bool essentially_surjective = false;
  std::string witness;
  bool ok() const { return fully_faithful && essentially_surjective; }
};

MoritaReport morita_check(const StackMap& m);

// Realizes the base change of a representable map to the target atlas as a
// space over the atlas (errors on a stabilizer in the pullback groupoid).
SpaceMap atlas_realization(const StackMap& m);

struct StackProfile {
  bool representable = false;
  bool etale = false;
  bool local_embedding = false;
  bool closed_embedding = false;
  bool separated = false;
  bool proper = false;
  bool surjective = false;
};

StackProfile stack_map_profile(const StackMap& m);

// All strict maps between two presentations (exhaustive; small atlases only).
std::vector<StackMap> all_stack_maps(const GroupoidPresentation& g,
                                     const GroupoidPresentation& h);
// Searches for a Morita morphism in either direction.
struct MoritaSearchResult {
  std::optional<StackMap> witness;
  bool reversed = false;  // witness runs h -> g
};
MoritaSearchResult morita_equivalent_search(const GroupoidPresentation& g,
                                            const GroupoidPresentation& h);

std::string render_dot(const GroupoidPresentation& g, const std::string& graph_name);

}  // namespace stk
