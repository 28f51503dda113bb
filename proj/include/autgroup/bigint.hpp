#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace autgroup {

/// Group orders overflow 64 bits routinely (|S_20 x S_20| ~ 5.9e36).
using BigInt = boost::multiprecision::cpp_int;

inline BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i)
    r *= i;
  return r;
}

/// |A_k|, with |A_1| = 1.
inline BigInt alternating_order(unsigned k) {
  return k < 2 ? BigInt(1) : factorial(k) / 2;
}

inline BigInt pow_big(BigInt base, unsigned exp) {
  BigInt r = 1;
  for (unsigned i = 0; i < exp; ++i)
    r *= base;
  return r;
}

inline std::string to_string(BigInt const &x) { return x.str(); }

} // namespace autgroup
