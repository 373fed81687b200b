#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stk/finspace.hpp"
#include "stk/groupoid.hpp"

namespace stk {

// Universal étale lift of a proper map that is étale onto its image.
// F = Y ⊔ (X ∖ g(Y)) with cross specializations: a complement point x leads to
// a Y-point y exactly when g(y) ∈ closure({x}), and y leads to x exactly when
// x ∈ closure({g(y)}). Every structural claim listed in `verified` is
// re-checked before the result is returned; a failed check raises
// verification_failure with a witness.
struct LiftResult {
  FinSpace F;
  SpaceMap e;    // F -> X: étale and specialization-lifting (not separated in
                 // general: folded sheets share a complement generization)
  SpaceMap i;    // Y -> F: closed embedding with e ∘ i = g
  SpaceMap phi;  // g(Y) ×_X F -> Y: isomorphism
  FiberProduct image_pullback;        // g(Y) ×_X F, the source of phi
  std::vector<std::string> verified;  // names of the checks that ran
};

LiftResult base_lift(const SpaceMap& g);

// Any construction that produces a lift for a proper local embedding; the
// network layer supplies the general one, base_lift covers the étale-on-image
// case.
using LiftFn = std::function<LiftResult(const SpaceMap&)>;

// Sections of Y ×_X Z -> g(Y) ×_X Z in verified bijection with maps Z -> F
// over X.
struct SectionCorrespondence {
  std::vector<SpaceMap> sections;   // s with proj ∘ s = id on g(Y) ×_X Z
  std::vector<SpaceMap> homs;       // u: Z -> F with e ∘ u = alpha
  std::vector<int> hom_of_section;  // index into homs per section (a bijection)
};

SectionCorrespondence section_correspondence(const SpaceMap& g, const SpaceMap& alpha);

// Factors a proper local embedding as an étale surjection e onto an
// intermediate space D followed by a local embedding g1 of generic degree one.
// Two sheets are folded exactly when they have the same image point and the
// same image branch (image of the minimal open neighbourhood).
struct SplitResult {
  FinSpace D;
  SpaceMap e;   // Y -> D
  SpaceMap g1;  // D -> X
  std::vector<std::string> verified;
};

SplitResult degree_one_split(const SpaceMap& g);

// Groupoid-tier base-case lift. The target is re-presented on a canonical
// étale cover U: the atlas-level pullback of the source splits off a
// tautological copy V1 inside Y ×_X U, and the arrow space U ×_X U is pruned
// down to the relations that never identify V1 with the other sheets:
//   R' = (U ×_X U) ∖ (S12 ∪ S21 ∪ (S22 ∖ S11)) ∪ units,
// where S_ab collects the comparisons between sheet a and sheet b. The result
// [R' ⇉ U] carries an étale map to the target and a strict embedding of the
// source, with e ∘ i = g on the nose.
struct StackLiftResult {
  GroupoidPresentation F;  // [R' ⇉ U]
  StackMap e;              // F -> X, étale, atlas-surjective
  StackMap i;              // Y -> F, fully faithful, e ∘ i = g
  FinSpace cover;          // U, étale over the target atlas
  SpaceMap cover_to_atlas;
  std::vector<std::string> verified;
};

StackLiftResult stack_base_lift(const StackMap& g);

// One verified structural identity of the lift construction.
struct IdentityReport {
  std::string key;     // stable catalog key, e.g. "lift.base-change"
  bool holds = false;
  std::string detail;  // comparison summary (point counts, witness names)
};

// lift.closed-embedding-identity: a closed embedding lifts to the base itself.
IdentityReport check_closed_target(const SpaceMap& g);
// lift.etale-cover-identity: an étale proper surjection onto a connected base
// lifts to itself.
IdentityReport check_etale_cover(const SpaceMap& g);
// lift.uniqueness: rebuilding from a permuted presentation is connected to the
// original by a unique isomorphism respecting e and i.
IdentityReport check_uniqueness(const SpaceMap& g);
// lift.sections: the section correspondence is a bijection for one probe.
IdentityReport check_sections(const SpaceMap& g, const SpaceMap& alpha);
// lift.base-change: F(Y' / X') ≅ X' ×_X F(Y / X) along u: X' -> X, with both
// squares of the pulled-back factorization Cartesian.
IdentityReport check_base_change(const SpaceMap& g, const SpaceMap& u);
// lift.pushforward: for closed g: Y -> X and h: Z -> Y étale on its image,
// F(Z / Y) ≅ Y ×_X F(Z / X).
IdentityReport check_pushforward(const SpaceMap& h, const SpaceMap& g);
// lift.iterated: F(F(Z/Y) / X) ≅ F(Z / F(Y/X)); general proper local
// embeddings need the supplied lift function.
IdentityReport check_iterated(const SpaceMap& h, const SpaceMap& g, const LiftFn& lift);
// lift.composite: when both maps are étale on their images and
// g(h(Z)) ×_X Y ≅ h(Z) over Y, the three lifts of the chain agree.
IdentityReport check_composite(const SpaceMap& h, const SpaceMap& g);
// lift.product-gluing: F(Y/X) ×_X F(T/X) against the two towers over the
// partner lifts and the gluing of the two partial lifts along Y ×_X T.
IdentityReport check_product_gluing(const SpaceMap& g, const SpaceMap& f, const LiftFn& lift);

}  // namespace stk
