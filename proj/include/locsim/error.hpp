#pragma once

// Error reporting used across the library. Every throwing operation names a
// stable code so the CLI can print diagnostics of the form
//   error[<code>@<where>] <message>
// without string-matching exception texts.

#include <stdexcept>
#include <string>
#include <utility>

namespace locsim {

enum class Errc {
  space_mismatch,
  no_subballs,
  not_a_subball,
  domain_mismatch,
  empty_set,
  domains_not_partition,
  codomains_not_partition,
  entry_not_in_sim,
  not_equalizing,
  not_dually_contracting,
  malformed_witness,
  witness_invalid,
  carrier_mismatch,
  not_refinement,
  too_many_blocks,
  not_finite_space,
  budget_exceeded,
  syntax_error,
  validation_error,
  invalid_argument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::space_mismatch: return "space-mismatch";
    case Errc::no_subballs: return "no-subballs";
    case Errc::not_a_subball: return "not-a-subball";
    case Errc::domain_mismatch: return "domain-mismatch";
    case Errc::empty_set: return "empty-set";
    case Errc::domains_not_partition: return "domains-not-partition";
    case Errc::codomains_not_partition: return "codomains-not-partition";
    case Errc::entry_not_in_sim: return "entry-not-in-sim";
    case Errc::not_equalizing: return "not-equalizing";
    case Errc::not_dually_contracting: return "not-dually-contracting";
    case Errc::malformed_witness: return "malformed-witness";
    case Errc::witness_invalid: return "witness-invalid";
    case Errc::carrier_mismatch: return "carrier-mismatch";
    case Errc::not_refinement: return "not-refinement";
    case Errc::too_many_blocks: return "too-many-blocks";
    case Errc::not_finite_space: return "not-finite-space";
    case Errc::budget_exceeded: return "budget-exceeded";
    case Errc::syntax_error: return "syntax-error";
    case Errc::validation_error: return "validation-error";
    case Errc::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::string where = {})
      : std::runtime_error(std::move(message)), code_(code), where_(std::move(where)) {}

  Errc code() const noexcept { return code_; }
  const std::string& where() const noexcept { return where_; }

 private:
  Errc code_;
  std::string where_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg, const std::string& where = {}) {
  throw Error(c, msg, where);
}

}  // namespace locsim
