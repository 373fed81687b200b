#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace stk {

// Every failure the engine can signal, grouped by how the CLI reports it:
// input rejected (exit 1), precondition unmet (exit 2), verification failed (exit 3).
enum class ErrorKind {
  // input / validation
  parse_error,
  antisymmetry_violation,
  not_continuous,
  axiom_violation,
  non_etale_structure_map,
  validation_error,
  // preconditions
  not_etale_on_image,
  not_local_embedding,
  not_closed_embedding,
  hypothesis_not_met,
  target_mismatch,
  unknown_point,
  unknown_instance,
  not_closed,
  cover_not_suitable,
  // verification
  verification_failure,
  oracle_disagreement,
  stage_invariant_broken,
  etale_on_image_failed,
};

const char* kind_name(ErrorKind k);
int exit_code_for(ErrorKind k);

struct Error : std::runtime_error {
  ErrorKind kind;
  std::string witness;  // offending point, arrow, pair, ... (printable)

  Error(ErrorKind k, const std::string& message, std::string witness_ = {})
      : std::runtime_error(message), kind(k), witness(std::move(witness_)) {}
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& message,
                              const std::string& witness = {}) {
  throw Error(k, message, witness);
}

}  // namespace stk
