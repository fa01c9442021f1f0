#pragma once

#include <cstdint>
#include <vector>

#include "qpaec/bitmatrix.hpp"
#include "qpaec/rational.hpp"

namespace qpaec {

/// Default cap on total enumeration work (members, member x input pairs).
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// A linear function {0,1}^n -> {0,1}^m given by an m x n matrix acting on
/// column vectors, f(x) = f x^T. A zero-row matrix is the trivial map onto
/// the empty string; it shows up as the surjective hull of the zero matrix
/// and as the dual partner when m = n.
struct LinearHash {
  BitMatrix matrix;
  bool surjective = false;

  LinearHash() = default;
  explicit LinearHash(BitMatrix mat);

  std::size_t input_bits() const { return matrix.cols(); }
  std::size_t output_bits() const { return matrix.rows(); }
  std::uint64_t operator()(std::uint64_t x) const { return matrix.apply(x); }

  friend bool operator==(const LinearHash&, const LinearHash&) = default;
};

/// Drops linearly dependent output rows, keeping the first maximal
/// independent set; the result is surjective with output_bits() = rank.
LinearHash make_surjective(const LinearHash& f);

/// The canonical dual g with f g^T = 0, g surjective onto n-m bits, built
/// from the row-reduced kernel basis of f. Requires f surjective and m < n.
LinearHash dual_of(const LinearHash& f);

/// Finite weighted family of linear hashes with common (n, m).
struct HashFamily {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<LinearHash> members;
  std::vector<Rational> probs;

  /// Checks shared dimensions and that probs are nonnegative rationals
  /// summing to exactly 1. Throws on violation.
  void validate() const;
};

/// Uniform family of all m x n binary matrices (2^{mn} members, including
/// non-surjective ones).
HashFamily family_all_linear(std::size_t n, std::size_t m,
                             std::uint64_t cap = kDefaultEnumerationCap);

/// Uniform family of the 2^{n+m-1} Toeplitz matrices. The seed bits, read
/// MSB-first, give the first row followed by the rest of the first column.
HashFamily family_toeplitz(std::size_t n, std::size_t m,
                           std::uint64_t cap = kDefaultEnumerationCap);

/// Member-by-member canonical dual with the same probs. Every member must
/// already be surjective.
HashFamily dual_family(const HashFamily& fam);

struct FamilyCertificate {
  Rational delta_universal;       // 2^m  * max_{x!=0} Pr[F(x) = 0]
  Rational delta_dual_universal;  // 2^{n-m} * max_{x!=0} Pr[x in rowspace(F)]
  std::size_t family_size = 0;
  bool all_surjective = false;
};

/// Exhaustive certification in exact rational arithmetic. Asserts the
/// universal lower bound on delta_universal, the dual lower bound when all
/// members are surjective, and the universal -> dual conversion bound
/// 2(1 - 2^{-m} delta) + (delta - 1) 2^{n-m} >= delta_dual.
FamilyCertificate certify_family(const HashFamily& fam,
                                 std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace qpaec
