#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stk/finspace.hpp"
#include "stk/groupoid.hpp"
#include "stk/lift.hpp"

namespace stk {

// n-fold fiber power of a map g: Y -> X. `full` holds all tuples of source
// points over a common base point; the diagonal locus (some coordinate
// repeated) is verified clopen, and `distinct` is its complement with the
// coordinate projections and the common map to the base.
struct FiberedPower {
  int n = 0;
  FinSpace full;
  std::vector<SpaceMap> full_proj;  // full -> Y, one per coordinate
  PointSet diagonal;                // points of full with a repeated coordinate
  FinSpace distinct;
  std::vector<SpaceMap> proj;       // distinct -> Y
  SpaceMap to_base;                 // distinct -> X
  std::vector<std::vector<int>> tuples;      // distinct point -> source points
  std::map<std::vector<int>, int> index_of;  // inverse of `tuples`
};

FiberedPower fibered_power(const SpaceMap& g, int n);

// Largest n with a fiber of n pairwise distinct points (0 for an empty source).
int multiplicity(const SpaceMap& g);

// Diagram of spaces indexed by subsets of {1..labels} (stored as bitmasks),
// with one morphism node_J -> node_I per strict inclusion I ⊂ J. The index 0
// node is the target. At stage s every edge into a node with |I| >= s-1 is a
// closed embedding; stage 0 means fully descended.
struct Network {
  int labels = 0;
  int stage = 0;
  std::map<int, FinSpace> nodes;
  std::map<std::pair<int, int>, SpaceMap> edges;  // (J, I) with I ⊂ J
};

const FinSpace& node_of(const Network& net, int index);
const SpaceMap& edge_of(const Network& net, int from, int to);
std::string subset_name(int mask);

// Functoriality of all edge composites plus the stage closedness invariant;
// stage_invariant_broken names the offending edge.
void validate_network(const Network& net);

// Power network of a proper local embedding: node_J is the |J|-fold distinct
// fiber power (node_∅ = X) and the edges are coordinate projections. The
// degree-one split of g is computed first and its factor is cross-checked.
Network canonical_network(const SpaceMap& g);

// Colimit of the nodes indexed by an upward-closed family: the members of q
// glued along their joins, one member adjoined at a time. `piece` maps every
// node whose index contains a member into the total; `to_meet` lands in the
// node at `meet` (defaults to the intersection of q).
struct GluedStack {
  FinSpace total;
  std::map<int, SpaceMap> piece;
  SpaceMap to_meet;
  int meet = 0;
};

GluedStack glue_subnetwork(const Network& net, std::vector<int> q, int meet = -1);

// One descending step: indices of size stage-2 are replaced by the lift of
// their glued neighbourhood (recorded in `lifted`), larger indices are
// verified unchanged, smaller ones wait for later stages.
struct DescendStep {
  Network next;
  std::map<int, FinSpace> glued;      // S_I per processed index
  std::map<int, LiftResult> lifted;   // indices whose node was replaced
};

DescendStep descend(const Network& net);

// Full descent of the canonical network to stage 0, with every structural
// property of the result re-verified (the names are listed in `verified`) and
// the sheet-data oracle consulted; an oracle mismatch is a hard failure.
struct UniversalLift {
  Network final_net;
  FinSpace F;
  SpaceMap e;        // F -> X
  FinSpace S;        // restriction of F over the image, glued from the nodes
  SpaceMap s_embed;  // S -> F, closed embedding
  int steps = 0;
  std::vector<std::string> verified;
};

UniversalLift universal_lift(const SpaceMap& g, int max_probe = 3);

// Same construction packaged with a chosen source embedding and the complement
// data, so it can stand in wherever a LiftFn is expected.
LiftResult universal_lift_result(const SpaceMap& g, int max_probe = 3);

// Base change along u: X' -> X: the network rebuilt from scratch against the
// node-wise pullback (edge-compatible isomorphisms required), and the lifted
// target against X' ×_X F. Any mismatch is a verification failure.
struct NetworkComparison {
  Network fresh;   // canonical network of the pulled-back map
  Network pulled;  // node-wise pullback of the original network
  FinSpace Fp;     // lift of the pulled-back map
  SpaceMap ep;     // Fp -> X'
  std::vector<std::string> verified;
};

NetworkComparison base_change_network(const SpaceMap& g, const SpaceMap& u,
                                      int max_probe = 2);

// Component product: the stage-0 networks of g and f combined over pair
// indices, compared with the lift of the disjoint union g ⊔ f. Disagreement is
// an expected, structured outcome (crossing images), never an exception.
struct ProductComparison {
  Network combined;  // stage-0 pair-index network; node 0 is the product target
  FinSpace product_target;
  SpaceMap product_e;
  FinSpace union_target;
  SpaceMap union_e;
  bool agree = false;
  std::string detail;
};

ProductComparison product_network(const SpaceMap& g, const SpaceMap& f,
                                  int max_probe = 2);

// Étale cover of the base carrying a sheet decomposition over the image:
// `sheets` lists the images W_l of the closed embeddings of Y into the cover,
// `sections` the graphs V_l^a of the sections of Y ×_X U over each sheet, and
// `strata` the fiber-degree filtration of the source. Properties verified:
// sheets pairwise isomorphic and covering the image part, every stratum
// matched by equal-size sheet intersections, sections covering the pullback.
struct SuitableCover {
  FinSpace U;
  SpaceMap to_base;  // U -> X, étale and surjective
  std::vector<PointSet> sheets;
  std::vector<PointSet> meets;  // one per stratum: the matched intersections, unioned
  FinSpace V;                   // Y ×_X U
  SpaceMap v_to_source;         // V -> Y
  SpaceMap v_to_cover;          // V -> U
  std::vector<std::vector<PointSet>> sections;  // per sheet, as point sets of V
  std::vector<PointSet> strata;                 // filtration of Y, descending
  std::vector<std::string> verified;
};

// Derives and verifies the cover data for an arbitrary étale atlas of X.
SuitableCover cover_from_atlas(const SpaceMap& g, const SpaceMap& atlas);
// The canonical choice: the lift itself as the atlas.
SuitableCover suitable_cover(const SpaceMap& g);

// Network presented by the cover: node_I lives on the sheet intersection W_I
// with the degenerate points (two sheets agreeing in the source) removed.
// Extra sheets are pruned first; the result is verified isomorphic to the
// canonical network node by node. Needs one section per sheet (generic degree
// one); folded maps must be split first.
Network network_from_cover(const SpaceMap& g, const SuitableCover& cover);

// Mapping property of a glued subnetwork: families of maps on the members of
// q, compatible on joins, correspond bijectively to maps out of the total.
// Checked exhaustively against all probe spaces with up to max_probe points.
bool verify_glue_hom(const Network& net, const std::vector<int>& q, int max_probe,
                     std::string* why = nullptr);

// Groupoid-tier fiber power. Objects of `full` are tuples of source objects
// anchored at the first coordinate: (y_1..y_n, τ_2..τ_n) with each comparison
// τ_i running g(y_1) → g(y_i) in the base; arrows act coordinatewise and
// twist the comparisons. The repeated locus is completed to a union of clopen
// components (components meeting a tuple with two literally equal, unit-
// compared coordinates); `distinct` is the complementary full subgroupoid.
struct StackFiberedPower {
  int n = 0;
  GroupoidPresentation full;
  std::vector<StackMap> full_proj;  // full -> Y, one per coordinate
  StackMap full_to_base;            // full -> X via the anchor coordinate
  PointSet diagonal;                // atlas points of the repeated-locus components
  GroupoidPresentation distinct;
  std::vector<StackMap> proj;  // distinct -> Y
  StackMap to_base;            // distinct -> X
  std::vector<std::vector<int>> tuples;      // distinct object -> [y..., τ...]
  std::map<std::vector<int>, int> index_of;  // inverse of `tuples`
};

StackFiberedPower stack_fibered_power(const StackMap& g, int n);

// Largest n whose distinct locus is non-empty (0 for an empty source); bounded
// by the largest fiber class count over the target atlas.
int stack_multiplicity(const StackMap& g);

// Subset-indexed diagram of presentations; same layout as Network, with
// coordinate projections as edges. Composites commute up to verified
// two-cells (the anchor comparison), strictly wherever anchors align.
struct StackNetwork {
  int labels = 0;
  int stage = 0;
  std::map<int, GroupoidPresentation> nodes;
  std::map<std::pair<int, int>, StackMap> edges;  // (J, I) with I ⊂ J
};

void validate_stack_network(const StackNetwork& net);

// Power network of a representable proper local embedding of presented
// stacks with a connected source: node_J is the |J|-fold distinct fiber
// power, node_∅ the target, edges the coordinate projections.
StackNetwork stack_canonical_network(const StackMap& g);

// Full groupoid-tier lift: the canonical network plus the base-case lift of
// g itself. Only maps étale on their image are descended (their lift is the
// base case); anything deeper is refused.
struct StackUniversalLift {
  StackNetwork net;
  StackLiftResult lift;
  std::vector<std::string> verified;
};

StackUniversalLift stack_universal_lift(const StackMap& g);

}  // namespace stk
