#pragma once

// Prime-slice compression. Fixing the p-adic valuations (i, j) of both sides
// strips p from every support and rescales the weights so that quality is
// preserved:
//
//   psi~(v)   = p^{j - min(i,j)} psi(p^i v)      for p not dividing v
//   theta~(w) = p^{i - min(i,j)} theta(p^j w)    for p not dividing w
//   E~        = {(v, w) : (p^i v, p^j w) in E, nu_p = (i, j)}

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsq/quality.hpp"

namespace dsq {

struct Slice {
  std::uint64_t p = 0;
  int i = 0;
  int j = 0;
  PairSystem tilde;
  std::vector<std::uint64_t> source_v;  // V_i
  std::vector<std::uint64_t> source_w;  // W_j
  EdgeSet source_edges;                 // E restricted to V_i x W_j
};

/// Builds the (p, i, j) slice of system.edges(). Empty cells give an empty
/// slice. Throws invalid-parameter when p is not prime or i, j < 0.
Slice make_slice(const PairSystem& system, std::uint64_t p, int i, int j);

enum class IdentityStatus { holds, fails, vacuous };

const char* to_string(IdentityStatus status) noexcept;

struct IdentityRow {
  std::string name;
  IdentityStatus status = IdentityStatus::holds;
  /// Rows with asserted = false are reported for comparison only.
  bool asserted = true;
  std::string lhs;
  std::string rhs;
  std::optional<Edge> witness;
  std::string detail;
};

struct SliceReport {
  std::uint64_t p = 0;
  int i = 0;
  int j = 0;
  std::vector<IdentityRow> rows;

  /// No asserted row failed.
  bool ok() const;
  const IdentityRow* find(std::string_view name) const;
};

/// Checks, as exact equalities, the measure identities for V, W and E, the
/// quality transport D~(v, w) = D(p^i v, p^j w), the omega shift, the prime
/// set shrinkage and the edge-set containment with the shifted K.
SliceReport verify_slice_identities(const PairSystem& source, const Slice& slice, const Params& params);

}  // namespace dsq
