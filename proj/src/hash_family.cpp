#include "qpaec/hash_family.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace qpaec {

LinearHash::LinearHash(BitMatrix mat) : matrix(std::move(mat)) {
  surjective = gf2_rank(matrix) == matrix.rows();
}

LinearHash make_surjective(const LinearHash& f) {
  if (f.surjective) return f;
  const BitMatrix& m = f.matrix;
  std::vector<std::uint64_t> basis;  // echelonized copies of kept rows
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::uint64_t v = m.row_value(i);
    for (std::uint64_t b : basis) {
      std::uint64_t lead = std::uint64_t{1} << (63 - std::countl_zero(b));
      if (v & lead) v ^= b;
    }
    if (v != 0) {
      basis.push_back(v);
      kept.push_back(i);
    }
  }
  BitMatrix out(kept.size(), m.cols());
  for (std::size_t i = 0; i < kept.size(); ++i) out.set_row_value(i, m.row_value(kept[i]));
  return LinearHash(std::move(out));
}

LinearHash dual_of(const LinearHash& f) {
  if (!f.surjective) {
    throw std::invalid_argument(
        "dual_of: hash is not surjective; apply make_surjective first");
  }
  if (f.output_bits() >= f.input_bits()) {
    throw std::invalid_argument("dual_of: m = n leaves no nontrivial dual");
  }
  LinearHash g(gf2_kernel_basis(f.matrix));
  // f g^T = 0 and full rank hold by construction; check anyway.
  if (!g.surjective || g.output_bits() != f.input_bits() - f.output_bits()) {
    throw std::logic_error("dual_of: kernel basis is not a dual");
  }
  for (std::size_t i = 0; i < f.output_bits(); ++i) {
    for (std::size_t j = 0; j < g.output_bits(); ++j) {
      std::uint64_t dot = std::popcount(f.matrix.row_value(i) & g.matrix.row_value(j)) & 1u;
      if (dot != 0) throw std::logic_error("dual_of: f g^T != 0");
    }
  }
  return g;
}

void HashFamily::validate() const {
  if (members.empty()) throw std::invalid_argument("HashFamily: no members");
  if (members.size() != probs.size()) {
    throw std::invalid_argument("HashFamily: members/probs length mismatch");
  }
  for (const auto& f : members) {
    if (f.input_bits() != n || f.output_bits() != m) {
      throw std::invalid_argument("HashFamily: mixed (n, m) among members");
    }
  }
  Rational sum = 0;
  for (const auto& p : probs) {
    if (p < 0) throw std::invalid_argument("HashFamily: negative probability");
    sum += p;
  }
  if (sum != 1) throw std::invalid_argument("HashFamily: probs do not sum to 1");
}

namespace {

void check_cap(std::uint64_t work, std::uint64_t cap, const char* what) {
  if (work > cap) {
    throw std::invalid_argument(std::string(what) + ": enumeration would need " +
                                std::to_string(work) + " evaluations, over the cap of " +
                                std::to_string(cap));
  }
}

}  // namespace

HashFamily family_all_linear(std::size_t n, std::size_t m, std::uint64_t cap) {
  if (n < 1 || m < 1) throw std::invalid_argument("family_all_linear: n, m >= 1");
  if (m * n >= 63) throw std::invalid_argument("family_all_linear: m*n too large");
  std::uint64_t count = std::uint64_t{1} << (m * n);
  check_cap(count, cap, "family_all_linear");

  HashFamily fam;
  fam.n = n;
  fam.m = m;
  fam.members.reserve(count);
  Rational p(1, BigInt(count));
  for (std::uint64_t seed = 0; seed < count; ++seed) {
    BitMatrix mat(m, n);
    // Seed bits MSB-first fill the matrix row-major.
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        mat.set(i, j, (seed >> (m * n - 1 - (i * n + j))) & 1u);
    fam.members.emplace_back(std::move(mat));
    fam.probs.push_back(p);
  }
  fam.validate();
  return fam;
}

HashFamily family_toeplitz(std::size_t n, std::size_t m, std::uint64_t cap) {
  if (n < 1 || m < 1) throw std::invalid_argument("family_toeplitz: n, m >= 1");
  if (m > n) throw std::invalid_argument("family_toeplitz: m <= n required");
  std::size_t seed_bits = n + m - 1;
  if (seed_bits >= 63) throw std::invalid_argument("family_toeplitz: n+m-1 too large");
  std::uint64_t count = std::uint64_t{1} << seed_bits;
  check_cap(count, cap, "family_toeplitz");

  HashFamily fam;
  fam.n = n;
  fam.m = m;
  fam.members.reserve(count);
  Rational p(1, BigInt(count));
  for (std::uint64_t seed = 0; seed < count; ++seed) {
    auto seed_bit = [&](std::size_t k) { return (seed >> (seed_bits - 1 - k)) & 1u; };
    BitMatrix mat(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        // T[i][j] depends on j - i only: first row for j >= i, first column
        // (stored after the row in the seed) for j < i.
        bool v = j >= i ? seed_bit(j - i) : seed_bit(n + (i - j) - 1);
        mat.set(i, j, v);
      }
    }
    fam.members.emplace_back(std::move(mat));
    fam.probs.push_back(p);
  }
  fam.validate();
  return fam;
}

HashFamily dual_family(const HashFamily& fam) {
  fam.validate();
  HashFamily out;
  out.n = fam.n;
  out.m = fam.n - fam.m;
  out.probs = fam.probs;
  out.members.reserve(fam.members.size());
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    try {
      out.members.push_back(dual_of(fam.members[i]));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("dual_family: member " + std::to_string(i) + ": " + e.what());
    }
  }
  out.validate();
  return out;
}

FamilyCertificate certify_family(const HashFamily& fam, std::uint64_t cap) {
  fam.validate();
  const std::size_t n = fam.n;
  const std::size_t m = fam.m;
  if (n >= 63) throw std::invalid_argument("certify_family: n too large");
  std::uint64_t inputs = (std::uint64_t{1} << n) - 1;
  check_cap(fam.members.size() * (inputs + 1), cap, "certify_family");

  FamilyCertificate cert;
  cert.family_size = fam.members.size();
  cert.all_surjective = true;
  for (const auto& f : fam.members) cert.all_surjective = cert.all_surjective && f.surjective;

  Rational max_zero = 0;       // max_x Pr[F(x) = 0]
  Rational max_rowspace = 0;   // max_x Pr[x in rowspace(F)]
  for (std::uint64_t x = 1; x <= inputs; ++x) {
    Rational p_zero = 0;
    Rational p_rowspace = 0;
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
      if (fam.members[i](x) == 0) p_zero += fam.probs[i];
      if (gf2_in_rowspace(fam.members[i].matrix, x)) p_rowspace += fam.probs[i];
    }
    if (p_zero > max_zero) max_zero = p_zero;
    if (p_rowspace > max_rowspace) max_rowspace = p_rowspace;
  }
  cert.delta_universal = pow2_rational(static_cast<long>(m)) * max_zero;
  cert.delta_dual_universal = pow2_rational(static_cast<long>(n - m)) * max_rowspace;

  // Counting bound: sum_x Pr[F(x)=0] = E|ker F \ 0| >= 2^{n-m} - 1.
  Rational lower_u = (pow2_rational(n) - pow2_rational(m)) / (pow2_rational(n) - 1);
  if (cert.delta_universal < lower_u) {
    throw std::logic_error("certify_family: delta_universal below the counting bound");
  }
  if (cert.all_surjective) {
    Rational lower_d = (pow2_rational(n) - pow2_rational(static_cast<long>(n - m))) /
                       (pow2_rational(n) - 1);
    if (cert.delta_dual_universal < lower_d) {
      throw std::logic_error("certify_family: delta_dual_universal below the counting bound");
    }
  }
  // A delta-almost universal family is conv(delta)-almost dual universal.
  Rational conv = 2 * (1 - pow2_rational(-static_cast<long>(m)) * cert.delta_universal) +
                  (cert.delta_universal - 1) * pow2_rational(static_cast<long>(n - m));
  if (cert.delta_dual_universal > conv) {
    throw std::logic_error("certify_family: dual delta exceeds the conversion bound");
  }
  return cert;
}

}  // namespace qpaec
