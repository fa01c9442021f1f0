#include "qpaec/bitmatrix.hpp"

#include <bit>
#include <stdexcept>

namespace qpaec {

namespace {

std::uint64_t column_mask(std::size_t cols, std::size_t j) {
  return std::uint64_t{1} << (cols - 1 - j);
}

}  // namespace

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_bits_(rows, 0) {
  if (cols < 1 || cols > 64) {
    throw std::invalid_argument("BitMatrix: cols must be in [1, 64]");
  }
}

BitMatrix BitMatrix::identity(std::size_t n) {
  BitMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::string>& rows) {
  if (rows.empty()) throw std::invalid_argument("from_rows: no rows given");
  BitMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) {
      throw std::invalid_argument("from_rows: ragged rows");
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (rows[i][j] != '0' && rows[i][j] != '1') {
        throw std::invalid_argument("from_rows: rows must be 0/1 strings");
      }
      m.set(i, j, rows[i][j] == '1');
    }
  }
  return m;
}

bool BitMatrix::get(std::size_t i, std::size_t j) const {
  return (row_bits_.at(i) & column_mask(cols_, j)) != 0;
}

void BitMatrix::set(std::size_t i, std::size_t j, bool v) {
  if (j >= cols_) throw std::out_of_range("BitMatrix::set: column out of range");
  if (v) {
    row_bits_.at(i) |= column_mask(cols_, j);
  } else {
    row_bits_.at(i) &= ~column_mask(cols_, j);
  }
}

std::uint64_t BitMatrix::row_value(std::size_t i) const { return row_bits_.at(i); }

void BitMatrix::set_row_value(std::size_t i, std::uint64_t v) {
  if (cols_ < 64 && (v >> cols_) != 0) {
    throw std::invalid_argument("set_row_value: value wider than cols");
  }
  row_bits_.at(i) = v;
}

BitMatrix BitMatrix::operator*(const BitMatrix& rhs) const {
  if (cols_ != rhs.rows()) throw std::invalid_argument("BitMatrix: shape mismatch in product");
  BitMatrix out(rows_, rhs.cols());
  for (std::size_t i = 0; i < rows_; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < cols_; ++k) {
      if (get(i, k)) acc ^= rhs.row_bits_[k];
    }
    out.row_bits_[i] = acc;
  }
  return out;
}

BitMatrix BitMatrix::transposed() const {
  // A 0 x c matrix would transpose to c x 0, which we cannot represent.
  if (rows_ == 0) throw std::invalid_argument("transposed: zero-row matrix");
  BitMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.set(j, i, get(i, j));
  return out;
}

bool BitMatrix::is_zero() const {
  for (auto r : row_bits_)
    if (r != 0) return false;
  return true;
}

std::uint64_t BitMatrix::apply(std::uint64_t x) const {
  if (cols_ < 64 && (x >> cols_) != 0) {
    throw std::invalid_argument("apply: value wider than cols");
  }
  std::uint64_t y = 0;
  for (std::size_t i = 0; i < rows_; ++i) {
    std::uint64_t parity = std::popcount(row_bits_[i] & x) & 1u;
    y |= parity << (rows_ - 1 - i);
  }
  return y;
}

std::string BitMatrix::row_string(std::size_t i) const {
  std::string s(cols_, '0');
  for (std::size_t j = 0; j < cols_; ++j)
    if (get(i, j)) s[j] = '1';
  return s;
}

std::string BitMatrix::row_hex(std::size_t i) const {
  static const char* digits = "0123456789abcdef";
  std::size_t ndigits = (cols_ + 3) / 4;
  std::uint64_t v = row_bits_.at(i);
  std::string s(ndigits, '0');
  for (std::size_t d = 0; d < ndigits; ++d) {
    s[ndigits - 1 - d] = digits[(v >> (4 * d)) & 0xf];
  }
  return s;
}

std::uint64_t BitMatrix::row_value_from_hex(const std::string& hex, std::size_t cols) {
  std::uint64_t v = 0;
  for (char c : hex) {
    std::uint64_t d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = 10 + (c - 'a');
    else if (c >= 'A' && c <= 'F') d = 10 + (c - 'A');
    else throw std::invalid_argument("row_value_from_hex: bad digit");
    v = (v << 4) | d;
  }
  if (cols < 64 && (v >> cols) != 0) {
    throw std::invalid_argument("row_value_from_hex: value wider than cols");
  }
  return v;
}

namespace {

// Plain elimination on packed rows. Returns the echelon rows (pivot column
// strictly increasing) without zero rows; fully reduced when rref is set.
std::vector<std::uint64_t> eliminate(const BitMatrix& m, bool rref) {
  std::vector<std::uint64_t> rows;
  rows.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row_value(i));

  std::size_t pivot_row = 0;
  for (std::size_t j = 0; j < m.cols() && pivot_row < rows.size(); ++j) {
    std::uint64_t mask = std::uint64_t{1} << (m.cols() - 1 - j);
    std::size_t found = pivot_row;
    while (found < rows.size() && (rows[found] & mask) == 0) ++found;
    if (found == rows.size()) continue;
    std::swap(rows[pivot_row], rows[found]);
    for (std::size_t r = rref ? 0 : pivot_row + 1; r < rows.size(); ++r) {
      if (r != pivot_row && (rows[r] & mask)) rows[r] ^= rows[pivot_row];
    }
    ++pivot_row;
  }
  rows.resize(pivot_row);
  return rows;
}

}  // namespace

std::size_t gf2_rank(const BitMatrix& m) { return eliminate(m, false).size(); }

BitMatrix gf2_rref(const BitMatrix& m) {
  auto rows = eliminate(m, true);
  BitMatrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.set_row_value(i, rows[i]);
  return out;
}

BitMatrix gf2_kernel_basis(const BitMatrix& m) {
  const std::size_t n = m.cols();
  BitMatrix r = gf2_rref(m);
  std::vector<std::size_t> pivot_col(r.rows());
  std::vector<bool> is_pivot(n, false);
  for (std::size_t i = 0; i < r.rows(); ++i) {
    std::size_t j = 0;
    while (!r.get(i, j)) ++j;
    pivot_col[i] = j;
    is_pivot[j] = true;
  }

  BitMatrix basis(n - r.rows(), n);
  std::size_t out_row = 0;
  for (std::size_t fc = 0; fc < n; ++fc) {
    if (is_pivot[fc]) continue;
    basis.set(out_row, fc, true);
    for (std::size_t i = 0; i < r.rows(); ++i) {
      if (r.get(i, fc)) basis.set(out_row, pivot_col[i], true);
    }
    ++out_row;
  }
  return basis;
}

bool gf2_in_rowspace(const BitMatrix& m, std::uint64_t x) {
  BitMatrix r = gf2_rref(m);
  std::uint64_t y = x;
  for (std::size_t i = 0; i < r.rows(); ++i) {
    std::uint64_t row = r.row_value(i);
    std::uint64_t lead = std::uint64_t{1} << (63 - std::countl_zero(row));
    if (y & lead) y ^= row;
  }
  return y == 0;
}

}  // namespace qpaec
