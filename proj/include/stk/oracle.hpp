#pragma once
#include <string>
#include <vector>

#include "stk/finspace.hpp"
#include "stk/groupoid.hpp"
#include "stk/lift.hpp"

namespace stk {

// Independent functor-of-points oracle.  A candidate lift is certified by
// enumerating, for small probes, the sheet data the lift is supposed to
// classify and matching it bijectively against actual maps into the lift.
// Nothing here looks at how the lift was constructed.

// Largest number of sheets of g over a single base point.
int sheet_count(const SpaceMap& g);

// n(n-1)...(n-d+1): ways to seat d distinct sheets in n labeled slots.
long falling_factorial(int n, int d);

// The published sheet-locus condition admits two readings.  `literal` keeps
// the stated exponent (the k-fold distinct locus against |J| = k + |I|),
// which empties every locus meeting the image; `corrected` counts the
// sheets already pinned by I into the exponent, so a point lies on exactly
// as many loci as the map has sheets over it.  `corrected` is normative.
enum class FunctorReading { corrected, literal };

// A sheet datum over a probe alpha: Z -> X: per probe point one row of
// slots; slot[z][i] is the source point lifting alpha(z) on sheet i, or -1
// where sheet i is not active.  Loci T_i = { z : slot[z][i] >= 0 } are
// specialization-closed, rows are injective where active, and each active
// entry lifts alpha through g.
struct FunctorPoint {
  int sheets = 0;
  std::vector<std::vector<int>> slot;
  bool operator==(const FunctorPoint&) const = default;
};

std::vector<FunctorPoint> enumerate_points(
    const SpaceMap& g, const SpaceMap& alpha,
    FunctorReading reading = FunctorReading::corrected);

// Over every one-point probe the oracle count must equal
// falling_factorial(sheet_count, local sheet count).
IdentityReport check_fiber_formula(const SpaceMap& g);

struct AgreementReport {
  bool agrees = false;
  int probes = 0;
  std::string counterexample;  // first probe (or fiber) that broke, if any
};

// Certifies a candidate lift map e : F -> X of g against the oracle: looks
// for slot-to-fiber bijections over every base point that turn each sheet
// datum into a continuous map into F, probe by probe, for every probe with
// at most max_probe points.  Pointwise matching makes naturality automatic,
// so success exhibits a natural bijection of functors.
AgreementReport functor_agreement(const SpaceMap& g, const SpaceMap& e,
                                  int max_probe,
                                  FunctorReading reading = FunctorReading::corrected);

// Groupoid-tier point probe: sections of the source over one atlas point of
// the target, carried by an explicit identification arrow, counted up to
// simultaneous re-identification.  A point no section reaches (even through
// a target arrow) counts once: the glued functor leaves such a probe
// untouched.  Enumerated directly from the presentation tables; nothing
// here touches the fiber-product machinery.
int stack_point_classes(const StackMap& g, int atlas_point);

// Maps from the one-point probe over the same atlas point into a candidate
// lift presentation: pairs (object, comparison to the probe) up to the
// relation arrows of the lift.
int stack_hom_classes(const StackMap& e, int atlas_point);

// The two counts must match over every atlas point of the common target.
AgreementReport stack_point_agreement(const StackMap& g, const StackMap& e);

}  // namespace stk
