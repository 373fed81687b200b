#include "stk/errors.hpp"

namespace stk {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::antisymmetry_violation: return "AntisymmetryViolation";
    case ErrorKind::not_continuous: return "NotContinuous";
    case ErrorKind::axiom_violation: return "AxiomViolation";
    case ErrorKind::non_etale_structure_map: return "NonEtaleStructureMap";
    case ErrorKind::validation_error: return "ValidationError";
    case ErrorKind::not_etale_on_image: return "NotEtaleOnImage";
    case ErrorKind::not_local_embedding: return "NotLocalEmbedding";
    case ErrorKind::not_closed_embedding: return "NotClosedEmbedding";
    case ErrorKind::hypothesis_not_met: return "HypothesisNotMet";
    case ErrorKind::target_mismatch: return "TargetMismatch";
    case ErrorKind::unknown_point: return "UnknownPoint";
    case ErrorKind::unknown_instance: return "UnknownInstance";
    case ErrorKind::not_closed: return "NotClosed";
    case ErrorKind::cover_not_suitable: return "CoverNotSuitable";
    case ErrorKind::verification_failure: return "VerificationFailure";
    case ErrorKind::oracle_disagreement: return "OracleDisagreement";
    case ErrorKind::stage_invariant_broken: return "StageInvariantBroken";
    case ErrorKind::etale_on_image_failed: return "EtaleOnImageFailed";
  }
  return "Error";
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse_error:
    case ErrorKind::antisymmetry_violation:
    case ErrorKind::not_continuous:
    case ErrorKind::axiom_violation:
    case ErrorKind::non_etale_structure_map:
    case ErrorKind::validation_error:
      return 1;
    case ErrorKind::not_etale_on_image:
    case ErrorKind::not_local_embedding:
    case ErrorKind::not_closed_embedding:
    case ErrorKind::hypothesis_not_met:
    case ErrorKind::target_mismatch:
    case ErrorKind::unknown_point:
    case ErrorKind::unknown_instance:
    case ErrorKind::not_closed:
    case ErrorKind::cover_not_suitable:
      return 2;
    case ErrorKind::verification_failure:
    case ErrorKind::oracle_disagreement:
    case ErrorKind::stage_invariant_broken:
    case ErrorKind::etale_on_image_failed:
      return 3;
  }
  return 1;
}

}  // namespace stk
