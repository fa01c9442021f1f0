#include "qpaec/qoperator.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qpaec {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using std::complex;

QOperator::QOperator(RegisterLayout layout, Eigen::MatrixXcd matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(layout_.total_dim());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw std::invalid_argument("QOperator: matrix does not match layout dimension");
  }
  double herm = max_abs_diff(matrix_, matrix_.adjoint());
  if (herm > tol::kHermitian) {
    throw std::invalid_argument("QOperator: matrix is not Hermitian (deviation " +
                                std::to_string(herm) + ")");
  }
  // Exact Hermitization keeps eigensolver behaviour clean downstream.
  matrix_ = 0.5 * (matrix_ + matrix_.adjoint().eval());
}

void validate_state(const QOperator& s) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(s.matrix(), Eigen::EigenvaluesOnly);
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < tol::kPsdFloor) {
    throw std::invalid_argument("state is not PSD (min eigenvalue " + std::to_string(min_eig) +
                                ")");
  }
  double tr = s.trace();
  if (!(tr > 0.0) || tr > 1.0 + 1e-10) {
    throw std::invalid_argument("state trace " + std::to_string(tr) +
                                " outside (0, 1 + 1e-10]");
  }
}

QOperator tensor(const QOperator& a, const QOperator& b) {
  for (const auto& r : b.layout().registers()) {
    if (a.layout().has(r.name)) {
      throw std::invalid_argument("tensor: register name clash on '" + r.name + "'");
    }
  }
  std::vector<Register> regs = a.layout().registers();
  regs.insert(regs.end(), b.layout().registers().begin(), b.layout().registers().end());
  const auto da = a.dim();
  const auto db = b.dim();
  MatrixXcd out(da * db, da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  return QOperator(RegisterLayout(std::move(regs)), std::move(out));
}

namespace {

// Keeps digit bookkeeping for tracing out a subset of registers.
struct TraceIndexer {
  std::vector<std::size_t> kept;     // register indices kept, in order
  std::vector<std::size_t> dropped;  // register indices dropped, in order
  const RegisterLayout* layout;

  std::size_t kept_dim() const {
    std::size_t d = 1;
    for (auto i : kept) d *= layout->at(i).dim;
    return d;
  }
  std::size_t dropped_dim() const {
    std::size_t d = 1;
    for (auto i : dropped) d *= layout->at(i).dim;
    return d;
  }
  // Flat index in the original space from a kept-part index and dropped-part index.
  std::size_t flat(std::size_t kept_part, std::size_t dropped_part) const {
    std::vector<std::size_t> digits(layout->count());
    for (std::size_t i = kept.size(); i-- > 0;) {
      digits[kept[i]] = kept_part % layout->at(kept[i]).dim;
      kept_part /= layout->at(kept[i]).dim;
    }
    for (std::size_t i = dropped.size(); i-- > 0;) {
      digits[dropped[i]] = dropped_part % layout->at(dropped[i]).dim;
      dropped_part /= layout->at(dropped[i]).dim;
    }
    return layout->join(digits);
  }
};

TraceIndexer make_indexer(const RegisterLayout& layout, const std::vector<std::string>& drop) {
  TraceIndexer ix;
  ix.layout = &layout;
  for (const auto& n : drop) layout.index_of(n);  // validate names
  for (std::size_t i = 0; i < layout.count(); ++i) {
    bool dropped = false;
    for (const auto& n : drop) dropped = dropped || (layout.at(i).name == n);
    (dropped ? ix.dropped : ix.kept).push_back(i);
  }
  if (ix.kept.empty()) throw std::invalid_argument("partial_trace: nothing left");
  return ix;
}

}  // namespace

QOperator partial_trace(const QOperator& s, const std::vector<std::string>& drop) {
  if (drop.empty()) return s;
  TraceIndexer ix = make_indexer(s.layout(), drop);
  const std::size_t dk = ix.kept_dim();
  const std::size_t dd = ix.dropped_dim();
  MatrixXcd out = MatrixXcd::Zero(dk, dk);
  for (std::size_t r = 0; r < dk; ++r)
    for (std::size_t c = 0; c < dk; ++c)
      for (std::size_t t = 0; t < dd; ++t)
        out(r, c) += s.matrix()(ix.flat(r, t), ix.flat(c, t));
  return QOperator(s.layout().removed(drop), std::move(out));
}

QOperator partial_trace(const PureState& s, const std::vector<std::string>& drop) {
  if (drop.empty()) return s.density();
  TraceIndexer ix = make_indexer(s.layout, drop);
  const std::size_t dk = ix.kept_dim();
  const std::size_t dd = ix.dropped_dim();
  MatrixXcd out = MatrixXcd::Zero(dk, dk);
  for (std::size_t r = 0; r < dk; ++r)
    for (std::size_t c = 0; c < dk; ++c) {
      complex<double> acc = 0;
      for (std::size_t t = 0; t < dd; ++t)
        acc += s.amplitudes(ix.flat(r, t)) * std::conj(s.amplitudes(ix.flat(c, t)));
      out(r, c) = acc;
    }
  return QOperator(s.layout.removed(drop), std::move(out));
}

QOperator reordered(const QOperator& s, const std::vector<std::string>& order) {
  if (order.size() != s.layout().count()) {
    throw std::invalid_argument("reordered: order must list every register");
  }
  std::vector<Register> regs;
  std::vector<std::size_t> src;  // register index in the old layout
  regs.reserve(order.size());
  for (const auto& name : order) {
    std::size_t i = s.layout().index_of(name);
    regs.push_back(s.layout().at(i));
    src.push_back(i);
  }
  RegisterLayout layout(regs);
  const std::size_t d = s.dim();
  std::vector<std::size_t> to_new(d);
  std::vector<std::size_t> digits(order.size());
  for (std::size_t flat = 0; flat < d; ++flat) {
    for (std::size_t i = 0; i < order.size(); ++i) digits[i] = s.layout().digit(flat, src[i]);
    to_new[flat] = layout.join(digits);
  }
  MatrixXcd out(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out(to_new[r], to_new[c]) = s.matrix()(r, c);
  return QOperator(std::move(layout), std::move(out));
}

PureState purify(const QOperator& s, const std::string& ancilla_name) {
  validate_state(s);
  if (s.layout().has(ancilla_name)) {
    throw std::invalid_argument("purify: ancilla name '" + ancilla_name + "' already in use");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(s.matrix());
  const auto d = s.dim();
  // Ascending from Eigen; walk from the top.
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > tol::kEigCutoff) ++rank;
  }
  if (rank == 0) throw std::invalid_argument("purify: state has no support");
  std::size_t anc_dim = 1;
  while (anc_dim < rank) anc_dim *= 2;

  RegisterLayout layout = s.layout().appended({ancilla_name, anc_dim});
  VectorXcd psi = VectorXcd::Zero(d * anc_dim);
  for (std::size_t k = 0; k < rank; ++k) {
    Eigen::Index src = static_cast<Eigen::Index>(d - 1 - k);  // descending eigenvalues
    double lambda = std::max(es.eigenvalues()(src), 0.0);
    VectorXcd v = es.eigenvectors().col(src);
    // Deterministic phase: largest-magnitude component real positive.
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > best) {
        best = std::abs(v(i));
        arg = i;
      }
    }
    complex<double> phase = v(arg) / std::abs(v(arg));
    v /= phase;
    for (std::size_t i = 0; i < d; ++i) psi(i * anc_dim + k) = std::sqrt(lambda) * v(i);
  }
  return PureState{std::move(layout), std::move(psi)};
}

QOperator dephase(const QOperator& s, const std::string& reg, Basis basis) {
  const std::size_t ri = s.layout().index_of(reg);
  if (basis == Basis::kX) {
    std::size_t q = s.layout().qubits_of(reg);
    MatrixXcd h = embed_register_op(s.layout(), reg, hadamard_full(q));
    QOperator rotated(s.layout(), h * s.matrix() * h);
    QOperator pinched = dephase(rotated, reg, Basis::kZ);
    return QOperator(s.layout(), h * pinched.matrix() * h);
  }
  MatrixXcd out = s.matrix();
  const std::size_t d = s.dim();
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      if (s.layout().digit(r, ri) != s.layout().digit(c, ri)) out(r, c) = 0;
  return QOperator(s.layout(), std::move(out));
}

bool is_classical(const QOperator& s, const std::string& reg, Basis basis, double tolerance) {
  QOperator pinched = dephase(s, reg, basis);
  return max_abs_diff(pinched.matrix(), s.matrix()) <= tolerance;
}

QOperator apply_classical_function(const QOperator& s, const std::string& reg, Basis basis,
                                   const LinearHash& h, const std::string& out_name,
                                   FunctionMode mode) {
  const std::size_t nbits = s.layout().qubits_of(reg);
  if (h.input_bits() != nbits) {
    throw std::invalid_argument("apply_classical_function: hash takes " +
                                std::to_string(h.input_bits()) + " bits, register holds " +
                                std::to_string(nbits));
  }
  if (!is_classical(s, reg, basis)) {
    throw std::invalid_argument("apply_classical_function: state is not classical on '" + reg +
                                "' in the stated basis");
  }
  if (basis == Basis::kX) {
    MatrixXcd hd = embed_register_op(s.layout(), reg, hadamard_full(nbits));
    QOperator rotated(s.layout(), hd * s.matrix() * hd);
    QOperator applied = apply_classical_function(rotated, reg, Basis::kZ, h, out_name, mode);
    if (mode == FunctionMode::kTraceOutInput) return applied;
    MatrixXcd hd2 = embed_register_op(applied.layout(), reg, hadamard_full(nbits));
    return QOperator(applied.layout(), hd2 * applied.matrix() * hd2);
  }

  const std::size_t ri = s.layout().index_of(reg);
  const std::size_t in_dim = std::size_t{1} << nbits;
  const std::size_t out_dim = std::size_t{1} << h.output_bits();
  const std::size_t d = s.dim();

  if (mode == FunctionMode::kKeepInput) {
    RegisterLayout layout = s.layout().appended({out_name, out_dim});
    MatrixXcd out = MatrixXcd::Zero(d * out_dim, d * out_dim);
    for (std::size_t r = 0; r < d; ++r) {
      std::size_t v = s.layout().digit(r, ri);
      std::size_t k = h(v);
      for (std::size_t c = 0; c < d; ++c) {
        if (s.layout().digit(c, ri) != v) continue;  // classical: cross blocks vanish
        out(r * out_dim + k, c * out_dim + k) = s.matrix()(r, c);
      }
    }
    return QOperator(std::move(layout), std::move(out));
  }

  // kTraceOutInput: the output register takes the input register's position.
  RegisterLayout layout = s.layout().replaced(reg, {out_name, out_dim});
  const std::size_t rest = d / in_dim;
  MatrixXcd out = MatrixXcd::Zero(rest * out_dim, rest * out_dim);
  // Index helper on the original layout with reg digit v and the rest packed.
  auto original_flat = [&](std::size_t v, std::size_t rest_part) {
    std::size_t flat = 0;
    std::vector<std::size_t> digits(s.layout().count());
    for (std::size_t i = s.layout().count(); i-- > 0;) {
      if (i == ri) {
        digits[i] = v;
      } else {
        digits[i] = rest_part % s.layout().at(i).dim;
        rest_part /= s.layout().at(i).dim;
      }
    }
    flat = s.layout().join(digits);
    return flat;
  };
  auto new_flat = [&](std::size_t k, std::size_t rest_part) {
    std::size_t flat = 0;
    std::vector<std::size_t> digits(layout.count());
    for (std::size_t i = layout.count(); i-- > 0;) {
      if (i == ri) {
        digits[i] = k;
      } else {
        digits[i] = rest_part % layout.at(i).dim;
        rest_part /= layout.at(i).dim;
      }
    }
    flat = layout.join(digits);
    return flat;
  };
  for (std::size_t v = 0; v < in_dim; ++v) {
    std::size_t k = h(v);
    for (std::size_t rr = 0; rr < rest; ++rr)
      for (std::size_t rc = 0; rc < rest; ++rc)
        out(new_flat(k, rr), new_flat(k, rc)) += s.matrix()(original_flat(v, rr), original_flat(v, rc));
  }
  return QOperator(std::move(layout), std::move(out));
}

PauliMeasurement pauli_string_measure(const PureState& s, const std::string& reg,
                                      std::uint64_t bits, Basis basis) {
  const std::size_t q = s.layout.qubits_of(reg);
  if (q < 64 && (bits >> q) != 0) {
    throw std::invalid_argument("pauli_string_measure: bit string wider than register");
  }
  if (basis == Basis::kX) {
    MatrixXcd hd = embed_register_op(s.layout, reg, hadamard_full(q));
    PureState rotated{s.layout, hd * s.amplitudes};
    PauliMeasurement m = pauli_string_measure(rotated, reg, bits, Basis::kZ);
    for (auto& st : m.post) st.amplitudes = hd * st.amplitudes;
    return m;
  }
  const std::size_t ri = s.layout.index_of(reg);
  PauliMeasurement m;
  for (int o = 0; o < 2; ++o) {
    m.post[o] = PureState{s.layout, VectorXcd::Zero(s.amplitudes.size())};
  }
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) {
    std::size_t v = s.layout.digit(static_cast<std::size_t>(i), ri);
    int outcome = std::popcount(bits & static_cast<std::uint64_t>(v)) & 1;
    m.post[outcome].amplitudes(i) = s.amplitudes(i);
  }
  for (int o = 0; o < 2; ++o) {
    double p = m.post[o].amplitudes.squaredNorm();
    m.probability[o] = p;
    if (p > 0) m.post[o].amplitudes /= std::sqrt(p);
  }
  // Branch weights are relative to the (possibly sub-normalized) input.
  return m;
}

std::vector<BranchState> measure_string_sequence(const PureState& s, const std::string& reg,
                                                 const BitMatrix& strings, Basis basis) {
  std::vector<BranchState> branches{{0, s.norm_squared(), s}};
  // Normalize the seed branch so per-branch probabilities compose.
  if (branches[0].probability > 0) {
    branches[0].state.amplitudes /= std::sqrt(branches[0].probability);
  }
  for (std::size_t row = 0; row < strings.rows(); ++row) {
    std::vector<BranchState> next;
    next.reserve(branches.size() * 2);
    for (const auto& b : branches) {
      if (b.probability <= 0) {
        for (int o = 0; o < 2; ++o) {
          next.push_back({(b.outcome << 1) | static_cast<std::uint64_t>(o), 0.0, b.state});
        }
        continue;
      }
      PauliMeasurement m = pauli_string_measure(b.state, reg, strings.row_value(row), basis);
      for (int o = 0; o < 2; ++o) {
        next.push_back({(b.outcome << 1) | static_cast<std::uint64_t>(o),
                        b.probability * m.probability[o], m.post[o]});
      }
    }
    branches = std::move(next);
  }
  return branches;
}

double l1_distance(const QOperator& a, const QOperator& b) {
  if (a.layout() != b.layout()) throw std::invalid_argument("l1_distance: layout mismatch");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double generalized_fidelity(const QOperator& a, const QOperator& b) {
  if (a.layout() != b.layout()) {
    throw std::invalid_argument("generalized_fidelity: layout mismatch");
  }
  MatrixXcd sb = psd_sqrt(b.matrix());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sb * a.matrix() * sb, Eigen::EigenvaluesOnly);
  double root = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    root += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  }
  double ta = std::min(a.trace(), 1.0);
  double tb = std::min(b.trace(), 1.0);
  double f = root + std::sqrt((1.0 - ta) * (1.0 - tb));
  return std::min(f, 1.0 + 1e-9);
}

double purified_distance(const QOperator& a, const QOperator& b) {
  double f = std::min(generalized_fidelity(a, b), 1.0);
  return std::sqrt(std::max(0.0, 1.0 - f * f));
}

StandardForm standard_form_from(const QOperator& s, const std::string& a_reg, Basis given,
                                const std::string& ancilla_name) {
  if (!is_classical(s, a_reg, given)) {
    throw std::invalid_argument("standard_form_from: input is not classical on '" + a_reg +
                                "' in the claimed basis");
  }
  std::vector<std::string> side_names;
  for (const auto& r : s.layout().registers()) {
    if (r.name != a_reg) side_names.push_back(r.name);
  }
  PureState psi = purify(s, ancilla_name);
  QOperator other_marginal = partial_trace(psi, side_names);
  if (given == Basis::kZ) {
    // s = rho_ZAE, ancilla is B, the X^A-measured side is (A, B).
    QOperator rho_xab = dephase(other_marginal, a_reg, Basis::kX);
    return StandardForm{std::move(psi), s, std::move(rho_xab)};
  }
  QOperator rho_zae = dephase(other_marginal, a_reg, Basis::kZ);
  return StandardForm{std::move(psi), std::move(rho_zae), s};
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
  if (es.eigenvalues().minCoeff() < tol::kPsdFloor) {
    throw std::invalid_argument("psd_sqrt: matrix is not PSD (min eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
  VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd psd_inv_sqrt(const Eigen::MatrixXcd& m, double cutoff) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
  if (es.eigenvalues().minCoeff() < tol::kPsdFloor) {
    throw std::invalid_argument("psd_inv_sqrt: matrix is not PSD");
  }
  VectorXd inv = es.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv(i) = inv(i) > cutoff ? 1.0 / std::sqrt(inv(i)) : 0.0;
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd hadamard_full(std::size_t qubits) {
  const std::size_t d = std::size_t{1} << qubits;
  double scale = 1.0 / std::sqrt(static_cast<double>(d));
  MatrixXcd h(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      h(i, j) = ((std::popcount(i & j) & 1) ? -scale : scale);
  return h;
}

Eigen::MatrixXcd embed_register_op(const RegisterLayout& layout, const std::string& reg,
                                   const Eigen::MatrixXcd& u) {
  const std::size_t ri = layout.index_of(reg);
  const std::size_t rd = layout.at(ri).dim;
  if (u.rows() != static_cast<Eigen::Index>(rd) || u.cols() != static_cast<Eigen::Index>(rd)) {
    throw std::invalid_argument("embed_register_op: operator does not match register dim");
  }
  const std::size_t d = layout.total_dim();
  MatrixXcd out = MatrixXcd::Zero(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    std::size_t vr = layout.digit(r, ri);
    for (std::size_t vc = 0; vc < rd; ++vc) {
      complex<double> amp = u(vr, vc);
      if (amp == complex<double>(0, 0)) continue;
      out(r, layout.with_digit(r, ri, vc)) = amp;
    }
  }
  return out;
}

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace qpaec
