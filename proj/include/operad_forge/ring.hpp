#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "operad_forge/errors.hpp"

namespace oforge {

using Int = boost::multiprecision::cpp_int;

// Exact scalar value. Rationals are stored reduced; integers and prime-field
// residues keep denominator 1, residues normalized to [0, p).
// All arithmetic goes through GroundRing so the ring invariants hold.
using Scalar = boost::multiprecision::cpp_rational;

enum class RingKind { rationals, integers, prime_field };

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

struct GroundRing {
  RingKind kind = RingKind::rationals;
  std::uint64_t characteristic = 0;  // 0 for QQ and ZZ, p for F_p

  static GroundRing rationals() { return {RingKind::rationals, 0}; }
  static GroundRing integers() { return {RingKind::integers, 0}; }
  static GroundRing prime_field(std::uint64_t p) {
    require(is_prime_u64(p), errc::validate,
            "prime-field characteristic must be prime, got " + std::to_string(p));
    return {RingKind::prime_field, p};
  }

  bool operator==(const GroundRing&) const = default;
  bool is_field() const { return kind != RingKind::integers; }

  std::string name() const {
    switch (kind) {
      case RingKind::rationals: return "QQ";
      case RingKind::integers: return "ZZ";
      case RingKind::prime_field: return "F" + std::to_string(characteristic);
    }
    return "?";
  }

  Scalar normalize(const Scalar& x) const {
    switch (kind) {
      case RingKind::rationals:
        return x;  // cpp_rational keeps itself reduced
      case RingKind::integers:
        require(denominator(x) == 1, errc::ring, "non-integral value over ZZ");
        return x;
      case RingKind::prime_field: {
        Int p(characteristic);
        Int den = denominator(x) % p;
        if (den < 0) den += p;
        require(den != 0, errc::ring, "denominator divisible by p over " + name());
        Int num = numerator(x) % p;
        if (num < 0) num += p;
        if (den == 1) return Scalar(num);
        return Scalar(num * inv_mod(den, p) % p);
      }
    }
    return x;
  }

  Scalar from_long(long long v) const { return normalize(Scalar(v)); }

  Scalar add(const Scalar& a, const Scalar& b) const {
    Scalar r = a + b;
    return kind == RingKind::prime_field ? normalize(r) : r;
  }
  Scalar sub(const Scalar& a, const Scalar& b) const {
    Scalar r = a - b;
    return kind == RingKind::prime_field ? normalize(r) : r;
  }
  Scalar mul(const Scalar& a, const Scalar& b) const {
    Scalar r = a * b;
    return kind == RingKind::prime_field ? normalize(r) : r;
  }
  Scalar neg(const Scalar& a) const {
    Scalar r = -a;
    return kind == RingKind::prime_field ? normalize(r) : r;
  }

  bool is_invertible(const Scalar& a) const {
    if (a == 0) return false;
    if (kind == RingKind::integers) return a == 1 || a == -1;
    return true;
  }

  Scalar inv(const Scalar& a) const {
    require(a != 0, errc::ring, "division by zero");
    if (kind == RingKind::integers)
      require(a == 1 || a == -1, errc::ring, "non-unit inverse over ZZ");
    if (kind == RingKind::prime_field)
      return Scalar(inv_mod(numerator(a), Int(characteristic)));
    return Scalar(1) / a;
  }

  // Over ZZ this is exact division and fails otherwise.
  Scalar div(const Scalar& a, const Scalar& b) const {
    require(b != 0, errc::ring, "division by zero");
    if (kind == RingKind::integers) {
      Int q = numerator(a), d = numerator(b);
      require(q % d == 0, errc::ring, "inexact division over ZZ");
      return Scalar(q / d);
    }
    if (kind == RingKind::prime_field) return normalize(mul(a, inv(b)));
    return a / b;
  }

  // Canonical ring maps: ZZ -> anything, QQ -> QQ, F_p -> F_p (same p).
  bool has_canonical_map_to(const GroundRing& target) const {
    if (kind == RingKind::integers) return true;
    return *this == target;
  }

  Scalar convert_to(const GroundRing& target, const Scalar& x) const {
    require(has_canonical_map_to(target), errc::ringmap,
            "no canonical map " + name() + " -> " + target.name());
    return target.normalize(x);
  }

  static std::string to_string(const Scalar& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
  }

 private:
  static Int inv_mod(Int a, const Int& p) {
    a %= p;
    if (a < 0) a += p;
    // extended Euclid
    Int t = 0, newt = 1, r = p, newr = a;
    while (newr != 0) {
      Int q = r / newr;
      Int tmp = t - q * newt;
      t = newt;
      newt = tmp;
      tmp = r - q * newr;
      r = newr;
      newr = tmp;
    }
    require(r == 1, errc::ring, "non-invertible residue");
    if (t < 0) t += p;
    return t;
  }
};

}  // namespace oforge
