#include "qpaec/algorithms.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "qpaec/rng.hpp"

namespace qpaec {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using std::complex;

namespace {

std::vector<std::string> side_names(const RegisterLayout& layout, const std::string& excluded) {
  std::vector<std::string> out;
  for (const auto& r : layout.registers()) {
    if (r.name != excluded) out.push_back(r.name);
  }
  return out;
}

LinearHash trivial_syndrome(std::size_t n) { return LinearHash(BitMatrix(0, n)); }

}  // namespace

AlgorithmInstance make_instance(const QOperator& rho_zae, const LinearHash& f) {
  if (!f.surjective) {
    throw std::invalid_argument("make_instance: f must be surjective");
  }
  const std::size_t n = f.input_bits();
  if (rho_zae.layout().qubits_of("A") != n) {
    throw std::invalid_argument("make_instance: register A does not hold n qubits");
  }
  const std::size_t m = f.output_bits();
  StandardForm sf = standard_form_from(rho_zae, "A", Basis::kZ, "B");
  AlgorithmInstance inst{std::move(sf.rho_abe),
                         std::move(sf.rho_zae),
                         std::move(sf.rho_xab),
                         f,
                         m < n ? dual_of(f) : trivial_syndrome(n),
                         n,
                         m,
                         {}};
  validate_instance(inst);
  return inst;
}

void validate_instance(const AlgorithmInstance& inst) {
  if (inst.f.input_bits() != inst.n || inst.f.output_bits() != inst.m) {
    throw std::invalid_argument("instance: f has the wrong shape");
  }
  if (gf2_rank(inst.f.matrix) != inst.m ||
      gf2_rank(inst.g.matrix) != inst.n - inst.m) {
    throw std::invalid_argument("instance: f or g is rank deficient");
  }
  for (std::size_t i = 0; i < inst.m; ++i) {
    for (std::size_t j = 0; j < inst.n - inst.m; ++j) {
      if (std::popcount(inst.f.matrix.row_value(i) & inst.g.matrix.row_value(j)) & 1u) {
        throw std::invalid_argument("instance: f and g are not dual");
      }
    }
  }
  // Standard form: the AE marginal is classical in Z^A and matches rho_zae;
  // the X^A-measured AB marginal matches rho_xab.
  QOperator ae = partial_trace(inst.rho_abe, {"B"});
  if (max_abs_diff(ae.matrix(), inst.rho_zae.matrix()) > tol::kRoundTrip) {
    throw std::invalid_argument("instance: AE marginal does not reproduce rho_ZAE");
  }
  if (!is_classical(inst.rho_zae, "A", Basis::kZ)) {
    throw std::invalid_argument("instance: rho_ZAE is not classical in Z^A");
  }
  QOperator ab = partial_trace(inst.rho_abe, side_names(inst.rho_zae.layout(), "A"));
  QOperator xab = dephase(ab, "A", Basis::kX);
  if (max_abs_diff(xab.matrix(), inst.rho_xab.matrix()) > tol::kRoundTrip) {
    throw std::invalid_argument("instance: X^A-measured AB marginal does not match rho_XAB");
  }
}

QOperator random_cq_zae(std::uint64_t seed, const InstanceParams& p) {
  if (p.n < 1 || p.e_dim < 2 || p.e_rank < 1 || p.trace <= 0.0 || p.trace > 1.0) {
    throw std::invalid_argument("random_cq_zae: bad parameters");
  }
  std::mt19937_64 rng(mix_seed(seed, 0x51a7e));
  const std::size_t da = std::size_t{1} << p.n;
  const std::size_t de = p.e_dim;

  std::vector<double> weights(da);
  double total = 0.0;
  for (auto& w : weights) {
    double gx = gaussian(rng);
    double gy = gaussian(rng);
    w = gx * gx + gy * gy;
    total += w;
  }

  MatrixXcd m = MatrixXcd::Zero(da * de, da * de);
  for (std::size_t z = 0; z < da; ++z) {
    MatrixXcd wishart(de, p.e_rank);
    for (Eigen::Index i = 0; i < wishart.rows(); ++i)
      for (Eigen::Index j = 0; j < wishart.cols(); ++j)
        wishart(i, j) = complex<double>(gaussian(rng), gaussian(rng));
    MatrixXcd blk = wishart * wishart.adjoint();
    blk *= (weights[z] / total) * p.trace / blk.trace().real();
    m.block(z * de, z * de, de, de) = blk;
  }
  return QOperator(RegisterLayout({{"A", da}, {"E", de}}), std::move(m));
}

AlgorithmInstance random_instance(std::uint64_t seed, const InstanceParams& p) {
  if (p.m < 1 || p.m > p.n) {
    throw std::invalid_argument("random_instance: need 1 <= m <= n");
  }
  QOperator state = random_cq_zae(seed, p);
  std::mt19937_64 rng(mix_seed(seed, 0xf00d));
  LinearHash f;
  for (int attempt = 0; attempt < 256; ++attempt) {
    BitMatrix mat(p.m, p.n);
    for (std::size_t i = 0; i < p.m; ++i) {
      mat.set_row_value(i, rng() & ((std::uint64_t{1} << p.n) - 1));
    }
    f = LinearHash(std::move(mat));
    if (f.surjective) break;
  }
  if (!f.surjective) {
    throw std::runtime_error("random_instance: could not draw a surjective hash");
  }
  return make_instance(state, f);
}

PureState random_pure_abe(std::uint64_t seed, std::size_t n, std::size_t b_dim,
                          std::size_t e_dim) {
  std::mt19937_64 rng(mix_seed(seed, 0xabe));
  RegisterLayout layout({{"A", std::size_t{1} << n}, {"B", b_dim}, {"E", e_dim}});
  VectorXcd amps(layout.total_dim());
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    amps(i) = complex<double>(gaussian(rng), gaussian(rng));
  }
  amps /= amps.norm();
  return PureState{std::move(layout), std::move(amps)};
}

QOperator hashed_state(const QOperator& rho_zae, const LinearHash& f) {
  return apply_classical_function(rho_zae, "A", Basis::kZ, f, "K",
                                  FunctionMode::kTraceOutInput);
}

double q_pa_state(const QOperator& rho_zae, const LinearHash& f, const EntropyOptions& opts) {
  // A non-surjective f is replaced by its surjective hull: dependent output
  // bits are discarded without affecting the index (they carry a constant).
  const LinearHash fs = f.surjective ? f : make_surjective(f);
  const double tr = rho_zae.trace();
  if (fs.output_bits() == 0) return 0.0;  // the empty key is ideal
  QOperator rho_ke = hashed_state(rho_zae, fs);
  EntropyResult hm = hmax(rho_ke, {"K"}, side_names(rho_ke.layout(), "K"), opts);
  return tr - std::exp2(hm.value - static_cast<double>(fs.output_bits()));
}

double q_pa(const AlgorithmInstance& inst) {
  const double tr = inst.rho_zae.trace();
  if (inst.m == 0) return 0.0;
  // Pi^PA: measure Z^{f_i} on A of the pure state, collect K branches.
  auto branches = measure_string_sequence(inst.rho_abe, "A", inst.f.matrix, Basis::kZ);
  std::vector<std::string> drop{"A", "B"};
  const std::size_t dk = std::size_t{1} << inst.m;
  QOperator e_probe = partial_trace(inst.rho_abe, drop);
  const std::size_t de = e_probe.dim();
  MatrixXcd ke = MatrixXcd::Zero(dk * de, dk * de);
  for (const auto& b : branches) {
    if (b.probability <= 0) continue;
    QOperator e_state = partial_trace(b.state, drop);
    ke.block(b.outcome * de, b.outcome * de, de, de) += b.probability * e_state.matrix();
  }
  std::vector<Register> regs{{"K", dk}};
  for (const auto& r : e_probe.layout().registers()) regs.push_back(r);
  QOperator rho_ke(RegisterLayout(std::move(regs)), std::move(ke));
  EntropyResult hm = hmax(rho_ke, {"K"}, side_names(rho_ke.layout(), "K"), inst.entropy_opts);
  return tr - std::exp2(hm.value - static_cast<double>(inst.m));
}

namespace {

// rho_KE^f reordered (K first) together with the ideal 2^{-m} I_K x rho_E.
struct KeParts {
  QOperator rho;    // (K, E...) order
  MatrixXcd ideal;  // same layout
  std::size_t dk = 0;
};

KeParts ke_parts(const QOperator& rho_zae, const LinearHash& f) {
  QOperator ke = hashed_state(rho_zae, f);
  std::vector<std::string> order{"K"};
  auto sides = side_names(ke.layout(), "K");
  order.insert(order.end(), sides.begin(), sides.end());
  QOperator rho = reordered(ke, order);
  QOperator rho_e = partial_trace(rho, {"K"});
  const std::size_t dk = rho.layout().dim_of("K");
  MatrixXcd ideal = MatrixXcd::Zero(rho.dim(), rho.dim());
  for (std::size_t k = 0; k < dk; ++k) {
    ideal.block(k * rho_e.dim(), k * rho_e.dim(), rho_e.dim(), rho_e.dim()) =
        rho_e.matrix() / static_cast<double>(dk);
  }
  return {std::move(rho), std::move(ideal), dk};
}

}  // namespace

double d1_state(const QOperator& rho_zae, const LinearHash& f) {
  KeParts parts = ke_parts(rho_zae, f);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(parts.rho.matrix() - parts.ideal,
                                              Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double d1(const AlgorithmInstance& inst) { return d1_state(inst.rho_zae, inst.f); }

double d1_prime_state(const QOperator& rho_zae, const LinearHash& f,
                      const EntropyOptions& opts) {
  KeParts parts = ke_parts(rho_zae, f);
  const std::size_t dk = parts.dk;
  const std::size_t de = parts.rho.dim() / dk;
  const double scale = 1.0 / static_cast<double>(dk);

  // d1' = min 2 sum_k Tr P_k - Tr(rho) + 1 over P_k >= 0,
  // P_k >= rho_k - 2^{-m} sigma, sigma >= 0 with Tr sigma = 1. The unit
  // trace is baked into the parameterization: de - 1 free diagonal entries,
  // the last diagonal dependent, then (re, im) off-diagonal pairs.
  SdpBuilder b;
  const std::size_t sigma_base = b.add_raw_params(de - 1 + de * (de - 1));
  auto sigma_offdiag = [&](std::size_t i, std::size_t j) {
    // Pair (i, j), i < j, after the de - 1 free diagonals.
    std::size_t pair_index = i * de - i * (i + 1) / 2 + (j - i - 1);
    return sigma_base + (de - 1) + 2 * pair_index;
  };
  auto embed_sigma = [&](std::size_t block, double s, std::size_t offset) {
    for (std::size_t i = 0; i + 1 < de; ++i) {
      b.add_term(block, sigma_base + i, offset + i, offset + i, s);
      // The dependent last diagonal is 1 - sum of the free ones.
      b.add_term(block, sigma_base + i, offset + de - 1, offset + de - 1, -s);
    }
    b.add_to_constant(block, offset + de - 1, offset + de - 1, s);
    for (std::size_t i = 0; i < de; ++i) {
      for (std::size_t j = i + 1; j < de; ++j) {
        std::size_t re = sigma_offdiag(i, j);
        b.add_term(block, re, offset + i, offset + j, s);
        b.add_term(block, re, offset + j, offset + i, s);
        b.add_term(block, re + 1, offset + i, offset + j, complex<double>(0, s));
        b.add_term(block, re + 1, offset + j, offset + i, complex<double>(0, -s));
      }
    }
  };
  for (std::size_t i = 0; i + 1 < de; ++i) {
    b.set_start_raw(sigma_base + i, 1.0 / static_cast<double>(de));
  }

  std::vector<SdpBuilder::HermitianVar> pvars(dk);
  std::vector<std::vector<std::size_t>> groups(dk);
  std::size_t sigma_psd = b.add_block(MatrixXcd::Zero(de, de));
  embed_sigma(sigma_psd, 1.0, 0);

  for (std::size_t k = 0; k < dk; ++k) {
    MatrixXcd rho_k = parts.rho.matrix().block(k * de, k * de, de, de);
    pvars[k] = b.add_hermitian(de);
    b.add_trace_objective(pvars[k], 2.0);

    std::size_t psd = b.add_block(MatrixXcd::Zero(de, de));
    b.embed_hermitian(psd, pvars[k], 1.0, 0);
    std::size_t cover = b.add_block(-rho_k);
    b.embed_hermitian(cover, pvars[k], 1.0, 0);
    embed_sigma(cover, scale, 0);
    groups[k] = {psd, cover};

    // Start: positive part of rho_k - sigma0/dk plus a margin.
    MatrixXcd m0 = rho_k - scale / static_cast<double>(de) *
                               MatrixXcd::Identity(de, de);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m0);
    Eigen::VectorXd pos = es.eigenvalues().cwiseMax(0.0);
    MatrixXcd p0 = es.eigenvectors() * pos.asDiagonal() * es.eigenvectors().adjoint() +
                   0.1 * MatrixXcd::Identity(de, de);
    b.set_start(pvars[k], p0);
  }
  for (std::size_t k = 0; k < dk; ++k) b.add_group({pvars[k]}, {}, groups[k]);
  b.set_offset(1.0 - parts.rho.trace());

  SdpProblem problem = std::move(b).build();
  SdpSolution sol = sdp_solve(problem, opts.sdp);

  // Independent check: evaluate the trace norm at the optimizer sigma*.
  MatrixXcd sigma_star = MatrixXcd::Zero(de, de);
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < de; ++i) {
    sigma_star(i, i) = sol.x(sigma_base + i);
    rest -= sol.x(sigma_base + i);
  }
  sigma_star(de - 1, de - 1) = rest;
  for (std::size_t i = 0; i < de; ++i) {
    for (std::size_t j = i + 1; j < de; ++j) {
      std::size_t re = sigma_offdiag(i, j);
      sigma_star(i, j) = complex<double>(sol.x(re), sol.x(re + 1));
      sigma_star(j, i) = std::conj(sigma_star(i, j));
    }
  }
  MatrixXcd full = parts.rho.matrix();
  for (std::size_t k = 0; k < dk; ++k) {
    full.block(k * de, k * de, de, de) -= scale * sigma_star;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(full, Eigen::EigenvaluesOnly);
  double eval = es.eigenvalues().cwiseAbs().sum();
  if (std::abs(eval - sol.value) > 1e-6) {
    throw std::runtime_error("d1_prime: SDP value and direct evaluation disagree by " +
                             std::to_string(std::abs(eval - sol.value)));
  }
  return sol.value;
}

double d1_prime(const AlgorithmInstance& inst) {
  return d1_prime_state(inst.rho_zae, inst.f, inst.entropy_opts);
}

QOperator syndrome_state(const QOperator& rho_xab, const LinearHash& g) {
  if (g.output_bits() == 0) return rho_xab;
  return apply_classical_function(rho_xab, "A", Basis::kX, g, "D", FunctionMode::kKeepInput);
}

double q_ec_dc(const AlgorithmInstance& inst) {
  QOperator tau = syndrome_state(inst.rho_xab, inst.g);
  GuessResult pg = pguess(tau, "A", inst.entropy_opts);
  return inst.rho_zae.trace() - pg.value;
}

double q_ec_pipeline(const AlgorithmInstance& inst) {
  const double tr = inst.rho_zae.trace();
  auto e_names = side_names(inst.rho_zae.layout(), "A");

  // Syndrome measurement X^{g_i} on A of the pure state.
  auto branches = measure_string_sequence(inst.rho_abe, "A", inst.g.matrix, Basis::kX);
  const std::size_t dd = std::size_t{1} << inst.g.output_bits();

  QOperator ab_probe = partial_trace(inst.rho_abe, e_names);
  const std::size_t dab = ab_probe.dim();
  MatrixXcd kappa = MatrixXcd::Zero(dab * dd, dab * dd);
  for (const auto& br : branches) {
    if (br.probability <= 0) continue;
    QOperator ab = partial_trace(br.state, e_names);
    QOperator measured = dephase(ab, "A", Basis::kX);
    for (std::size_t r = 0; r < dab; ++r)
      for (std::size_t c = 0; c < dab; ++c)
        kappa(r * dd + br.outcome, c * dd + br.outcome) +=
            br.probability * measured.matrix()(r, c);
  }
  std::vector<Register> regs = ab_probe.layout().registers();
  if (dd > 1) regs.push_back({"D", dd});  // trivial g carries no syndrome register
  QOperator kappa_op(RegisterLayout(std::move(regs)), std::move(kappa));
  GuessResult pg = pguess(kappa_op, "A", inst.entropy_opts);
  return tr - pg.value;
}

double decode_pgm(const AlgorithmInstance& inst) {
  QOperator tau = syndrome_state(inst.rho_xab, inst.g);
  // Rotate A into the Z basis and slice the side blocks per x.
  const std::size_t q = tau.layout().qubits_of("A");
  MatrixXcd h = embed_register_op(tau.layout(), "A", hadamard_full(q));
  QOperator rotated(tau.layout(), h * tau.matrix() * h);
  std::vector<std::string> order{"A"};
  auto sides = side_names(tau.layout(), "A");
  order.insert(order.end(), sides.begin(), sides.end());
  QOperator rz = reordered(rotated, order);

  const std::size_t da = std::size_t{1} << q;
  const std::size_t ds = rz.dim() / da;
  std::vector<MatrixXcd> side_states(da);
  MatrixXcd total = MatrixXcd::Zero(ds, ds);
  for (std::size_t x = 0; x < da; ++x) {
    side_states[x] = rz.matrix().block(x * ds, x * ds, ds, ds);
    total += side_states[x];
  }
  MatrixXcd t_inv_half = psd_inv_sqrt(total);
  double success = 0.0;
  for (std::size_t x = 0; x < da; ++x) {
    MatrixXcd m = t_inv_half * side_states[x] * t_inv_half;
    success += (m * side_states[x]).trace().real();
  }
  return success;
}

EqualityReport verify_theorem1(const AlgorithmInstance& inst) {
  EqualityReport rep;
  rep.q_pa = q_pa(inst);
  rep.q_ec = q_ec_pipeline(inst);
  rep.q_dc = q_ec_dc(inst);
  rep.via_hmax = q_pa_state(inst.rho_zae, inst.f, inst.entropy_opts);

  QOperator tau = syndrome_state(inst.rho_xab, inst.g);
  EntropyResult hm = hmin(tau, {"A"}, side_names(tau.layout(), "A"), inst.entropy_opts);
  rep.via_hmin = inst.rho_zae.trace() - std::exp2(-hm.value);

  double lo = std::min({rep.q_pa, rep.q_ec, rep.q_dc, rep.via_hmax, rep.via_hmin});
  double hi = std::max({rep.q_pa, rep.q_ec, rep.q_dc, rep.via_hmax, rep.via_hmin});
  rep.max_spread = hi - lo;
  rep.pass = rep.max_spread <= EqualityReport::kTolerance;
  return rep;
}

namespace {

double pairwise_sum(const std::vector<double>& xs, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return xs[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

}  // namespace

double expect_over_family(const HashFamily& fam, FamilyMetric metric, const QOperator& rho_zae,
                          const EntropyOptions& opts) {
  fam.validate();
  std::optional<StandardForm> sf;
  if (metric == FamilyMetric::kQEcDc) {
    sf = standard_form_from(rho_zae, "A", Basis::kZ, "B");
  }

  std::vector<double> terms(fam.members.size());
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    const LinearHash& f = fam.members[i];
    double value = 0.0;
    switch (metric) {
      case FamilyMetric::kQPa:
        value = q_pa_state(rho_zae, f, opts);
        break;
      case FamilyMetric::kQEcDc: {
        LinearHash fs = make_surjective(f);
        LinearHash g = fs.output_bits() < fam.n ? dual_of(fs) : trivial_syndrome(fam.n);
        QOperator tau = syndrome_state(sf->rho_xab, g);
        GuessResult pg = pguess(tau, "A", opts);
        value = rho_zae.trace() - pg.value;
        break;
      }
      case FamilyMetric::kD1:
        value = d1_state(rho_zae, f);
        break;
      case FamilyMetric::kD2: {
        QOperator ke = hashed_state(rho_zae, f);
        QOperator rho_e = partial_trace(ke, {"K"});
        value = d2(ke, "K", rho_e);
        break;
      }
    }
    terms[i] = rational_to_double(fam.probs[i]) * value;
  }
  return pairwise_sum(terms, 0, terms.size());
}

}  // namespace qpaec
