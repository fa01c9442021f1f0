#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qpaec {

/// Dense binary matrix over GF(2). Bit (i, j) is the entry in row i,
/// column j; column 0 is the leftmost bit of a row string. Matrices with
/// zero rows are valid and stand for empty bases (e.g. the kernel basis of
/// a full-rank square matrix).
///
/// Values in {0,1}^k are packed into integers with bit 0 (the leftmost bit
/// of the string) as the most significant of the k bits. Columns are capped
/// at 64; everything in this toolkit stays far below that.
class BitMatrix {
public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);

  static BitMatrix identity(std::size_t n);
  /// Rows given as strings of '0'/'1'; leftmost character is column 0.
  static BitMatrix from_rows(const std::vector<std::string>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, bool v);

  /// Row i as a packed value (bit 0 of the row = MSB of the cols()-bit value).
  std::uint64_t row_value(std::size_t i) const;
  void set_row_value(std::size_t i, std::uint64_t v);

  BitMatrix operator*(const BitMatrix& rhs) const;
  BitMatrix transposed() const;
  bool is_zero() const;

  /// y = M x over GF(2), x packed as described above in cols() bits; the
  /// result is packed the same way in rows() bits.
  std::uint64_t apply(std::uint64_t x) const;

  std::string row_string(std::size_t i) const;
  /// Row as lowercase hex, ceil(cols/4) digits, same MSB-first packing.
  std::string row_hex(std::size_t i) const;
  static std::uint64_t row_value_from_hex(const std::string& hex, std::size_t cols);

  friend bool operator==(const BitMatrix& a, const BitMatrix& b) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint64_t> row_bits_;
};

/// GF(2) rank via row reduction; the input is not modified.
std::size_t gf2_rank(const BitMatrix& m);

/// Reduced row echelon form with zero rows dropped.
BitMatrix gf2_rref(const BitMatrix& m);

/// Canonical basis of {x : m x^T = 0}: one row per free column of the RREF,
/// ordered by free-column index. A full-rank square input yields the explicit
/// empty basis (0 x cols), not an error.
BitMatrix gf2_kernel_basis(const BitMatrix& m);

/// True iff x lies in the row space of m.
bool gf2_in_rowspace(const BitMatrix& m, std::uint64_t x);

}  // namespace qpaec
