#pragma once

#include <map>
#include <optional>
#include <utility>

#include "dsq/error.hpp"
#include "dsq/model.hpp"

namespace testing {

/// Kind of the dsq::Error thrown by fn, or nullopt when it returns normally.
template <class Fn>
std::optional<dsq::ErrorKind> error_kind(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const dsq::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline dsq::Rational q(long num, long den = 1) {
  dsq::Rational r(num, den);
  r.canonicalize();
  return r;
}

inline dsq::WeightFunction weights(std::initializer_list<std::pair<const std::uint64_t, dsq::Rational>> table) {
  return dsq::WeightFunction(std::map<std::uint64_t, dsq::Rational>(table));
}

inline dsq::PairSystem totient_system(dsq::WeightFunction psi, dsq::WeightFunction theta, dsq::EdgeSet edges = {}) {
  return dsq::PairSystem(std::move(psi), std::move(theta), dsq::MultiplicativeFunction::totient(),
                         dsq::MultiplicativeFunction::totient(), std::move(edges));
}

}  // namespace testing
