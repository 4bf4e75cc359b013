#pragma once

#include <stdexcept>
#include <string>

namespace oforge {

// Error codes shared across the library; the CLI maps parse/validate to
// exit code 2 and every mathematical failure to exit code 1.
enum class errc {
  ring,        // unsupported ring for the operation
  dim,         // dimension mismatch
  arity,       // arity out of range
  ringmap,     // no canonical ring map
  trunc,       // request exceeds stored truncation
  degree,      // non-homogeneous input where a single degree is required
  antisym,     // bracket table not antisymmetric
  module,      // module axioms fail
  operad,      // unsupported operad kind
  scope,       // no computation route applies
  setup,       // incompatible objects wired together
  jacobi,      // Jacobi identity required but fails
  obstructed,  // a prolongation obstructed where theory forbids it
  chain,       // incompatible deformation chain
  parse,       // input file syntax error
  validate,    // input file semantic error
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::ring: return "E_RING";
    case errc::dim: return "E_DIM";
    case errc::arity: return "E_ARITY";
    case errc::ringmap: return "E_RINGMAP";
    case errc::trunc: return "E_TRUNC";
    case errc::degree: return "E_DEGREE";
    case errc::antisym: return "E_ANTISYM";
    case errc::module: return "E_MODULE";
    case errc::operad: return "E_OPERAD";
    case errc::scope: return "E_SCOPE";
    case errc::setup: return "E_SETUP";
    case errc::jacobi: return "E_JACOBI";
    case errc::obstructed: return "E_OBSTRUCTED";
    case errc::chain: return "E_CHAIN";
    case errc::parse: return "E_PARSE";
    case errc::validate: return "E_VALIDATE";
  }
  return "E_UNKNOWN";
}

class forge_error : public std::runtime_error {
 public:
  forge_error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw forge_error(code, what);
}

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace oforge
