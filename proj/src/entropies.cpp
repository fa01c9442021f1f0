#include "qpaec/entropies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpaec {

using Eigen::MatrixXcd;
using Eigen::VectorXd;
using std::complex;

namespace {

constexpr double kLog2 = 0.69314718055994530942;

// A copy of s with every register rotated into the Z basis where possible
// (local Hadamards preserve conditional entropies), split into classical and
// quantum registers, reordered as [target-classical, target-quantum,
// side-classical, side-quantum].
struct SplitState {
  QOperator state;
  std::size_t dtc = 1, dtq = 1, dsc = 1, dsq = 1;
  std::vector<std::string> target_quantum;  // names, post-reorder
  std::vector<std::string> side_quantum;

  std::size_t flat(std::size_t tc, std::size_t tq, std::size_t sc, std::size_t sq) const {
    return ((tc * dtq + tq) * dsc + sc) * dsq + sq;
  }
  // Block on (target-quantum) x (side-quantum) at classical values (tc, sc).
  MatrixXcd block(std::size_t tc, std::size_t sc) const {
    MatrixXcd b(dtq * dsq, dtq * dsq);
    for (std::size_t tq = 0; tq < dtq; ++tq)
      for (std::size_t sq = 0; sq < dsq; ++sq)
        for (std::size_t tq2 = 0; tq2 < dtq; ++tq2)
          for (std::size_t sq2 = 0; sq2 < dsq; ++sq2)
            b(tq * dsq + sq, tq2 * dsq + sq2) =
                state.matrix()(flat(tc, tq, sc, sq), flat(tc, tq2, sc, sq2));
    return b;
  }
};

SplitState split_classical(const QOperator& s, const std::vector<std::string>& target,
                           const std::vector<std::string>& side) {
  for (const auto& r : s.layout().registers()) {
    bool in_t = std::find(target.begin(), target.end(), r.name) != target.end();
    bool in_s = std::find(side.begin(), side.end(), r.name) != side.end();
    if (in_t == in_s) {
      throw std::invalid_argument("entropy: register '" + r.name +
                                  "' must be in exactly one of target/side "
                                  "(trace out anything else first)");
    }
  }

  // Rotate x-classical registers into the Z basis.
  QOperator work = s;
  for (const auto& r : s.layout().registers()) {
    if (r.dim == 1 || is_classical(work, r.name, Basis::kZ)) continue;
    std::size_t q = 0;
    while ((std::size_t{1} << q) < r.dim) ++q;
    if ((std::size_t{1} << q) != r.dim) continue;  // not qubit-shaped, leave as is
    if (is_classical(work, r.name, Basis::kX)) {
      MatrixXcd h = embed_register_op(work.layout(), r.name, hadamard_full(q));
      work = QOperator(work.layout(), h * work.matrix() * h);
    }
  }

  std::vector<std::string> tc, tq, sc, sq;
  for (const auto& name : target) {
    (is_classical(work, name, Basis::kZ) ? tc : tq).push_back(name);
  }
  for (const auto& name : side) {
    (is_classical(work, name, Basis::kZ) ? sc : sq).push_back(name);
  }

  std::vector<std::string> order;
  for (const auto& lst : {tc, tq, sc, sq}) order.insert(order.end(), lst.begin(), lst.end());

  SplitState out{reordered(work, order), 1, 1, 1, 1, tq, sq};
  for (const auto& n : tc) out.dtc *= out.state.layout().dim_of(n);
  for (const auto& n : tq) out.dtq *= out.state.layout().dim_of(n);
  for (const auto& n : sc) out.dsc *= out.state.layout().dim_of(n);
  for (const auto& n : sq) out.dsq *= out.state.layout().dim_of(n);
  return out;
}

double spectral_max(const MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

double classical_pguess(const QOperator& s, const std::vector<std::string>& target,
                        const std::vector<std::string>& side) {
  SplitState sp = split_classical(s, target, side);
  if (sp.dtq != 1 || sp.dsq != 1) {
    throw std::invalid_argument("classical_pguess: state is not fully classical");
  }
  double total = 0.0;
  for (std::size_t sc = 0; sc < sp.dsc; ++sc) {
    double best = 0.0;
    for (std::size_t tc = 0; tc < sp.dtc; ++tc) {
      best = std::max(best, sp.block(tc, sc)(0, 0).real());
    }
    total += best;
  }
  return total;
}

EntropyResult hmin(const QOperator& s, const std::vector<std::string>& target,
                   const std::vector<std::string>& side, const EntropyOptions& opts) {
  validate_state(s);
  SplitState sp = split_classical(s, target, side);
  const std::size_t dq = sp.dtq * sp.dsq;

  SdpBuilder b;
  std::vector<SdpBuilder::HermitianVar> sigma(sp.dsc);
  std::vector<std::vector<std::size_t>> group_blocks(sp.dsc);
  for (std::size_t sc = 0; sc < sp.dsc; ++sc) {
    sigma[sc] = b.add_hermitian(sp.dsq);
    b.add_trace_objective(sigma[sc], 1.0);
  }
  for (std::size_t sc = 0; sc < sp.dsc; ++sc) {
    double lmax = 0.0;
    for (std::size_t tc = 0; tc < sp.dtc; ++tc) {
      MatrixXcd blk = sp.block(tc, sc);
      lmax = std::max(lmax, spectral_max(blk));
      std::size_t cover = b.add_block(-blk);
      // I_{target-quantum} tensor sigma_sc over the block.
      for (std::size_t tq = 0; tq < sp.dtq; ++tq) {
        b.embed_hermitian(cover, sigma[sc], 1.0, tq * sp.dsq);
      }
      group_blocks[sc].push_back(cover);
    }
    std::size_t psd = b.add_block(MatrixXcd::Zero(sp.dsq, sp.dsq));
    b.embed_hermitian(psd, sigma[sc], 1.0, 0);
    group_blocks[sc].push_back(psd);
    b.set_start(sigma[sc],
                (1.2 * lmax + 0.1) * MatrixXcd::Identity(sp.dsq, sp.dsq));
  }
  for (std::size_t sc = 0; sc < sp.dsc; ++sc) {
    b.add_group({sigma[sc]}, {}, group_blocks[sc]);
  }

  SdpSolution sol = sdp_solve(std::move(b).build(), opts.sdp);
  double value = -std::log2(sol.value);

  EntropyResult out{value, "sdp-primal", sol.gap / (std::abs(sol.value) * kLog2)};
  if (dq == 1) {
    double closed = -std::log2(classical_pguess(s, target, side));
    double diff = std::abs(closed - value);
    if (diff > opts.cross_check_tol) {
      throw std::runtime_error("hmin: SDP and classical closed form disagree by " +
                               std::to_string(diff) + " bits");
    }
    out = EntropyResult{closed, "closed-form-classical", diff};
  }
  return out;
}

namespace {

// Fidelity-maximization SDP for hmax, after classical splitting: maximize
// sum_tc Re Tr(X_tc) over blocks [[P_tc, X_tc], [X_tc^dagger, I tensor
// sigma]] >= 0 with Tr sigma <= 1 (monotonicity makes the cap tight). X is
// restricted to the support of P_tc so the start is strictly feasible.
double hmax_fidelity_sdp(const SplitState& sp, const SdpOptions& sdp_opts) {
  const std::size_t dside = sp.dsc * sp.dsq;

  SdpBuilder b;
  auto sigma = b.add_hermitian(dside);
  // Tr sigma <= 1; monotonicity of the fidelity in sigma makes it tight, so
  // no equality constraint is needed.
  Eigen::MatrixXcd one(1, 1);
  one(0, 0) = 1.0;
  std::size_t cap = b.add_block(one);
  b.embed_trace(cap, sigma, -1.0, 0);
  // sigma >= 0 (the fidelity blocks alone leave it unconstrained when some
  // rho block has deficient support).
  std::size_t sigma_psd = b.add_block(MatrixXcd::Zero(dside, dside));
  b.embed_hermitian(sigma_psd, sigma, 1.0, 0);
  b.set_start(sigma, MatrixXcd::Identity(dside, dside) / (2.0 * dside));

  std::vector<SdpBuilder::ComplexVar> xs;
  std::vector<std::vector<std::size_t>> group_blocks;
  for (std::size_t tc = 0; tc < sp.dtc; ++tc) {
    // Assemble P_tc on (target-quantum) x (side-classical, side-quantum):
    // entries across side-classical values vanish only within one tc... they
    // do not vanish in general, so build the full block.
    MatrixXcd p(sp.dtq * dside, sp.dtq * dside);
    for (std::size_t tq = 0; tq < sp.dtq; ++tq)
      for (std::size_t sc = 0; sc < sp.dsc; ++sc)
        for (std::size_t sq = 0; sq < sp.dsq; ++sq)
          for (std::size_t tq2 = 0; tq2 < sp.dtq; ++tq2)
            for (std::size_t sc2 = 0; sc2 < sp.dsc; ++sc2)
              for (std::size_t sq2 = 0; sq2 < sp.dsq; ++sq2)
                p(tq * dside + sc * sp.dsq + sq, tq2 * dside + sc2 * sp.dsq + sq2) =
                    sp.state.matrix()(sp.flat(tc, tq, sc, sq), sp.flat(tc, tq2, sc2, sq2));

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(p);
    if (es.eigenvalues().minCoeff() < tol::kPsdFloor) {
      throw std::invalid_argument("hmax: state block is not PSD");
    }
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()(i) > tol::kEigCutoff) keep.push_back(i);
    }
    if (keep.empty()) continue;  // zero block contributes nothing
    const std::size_t r = keep.size();
    MatrixXcd v(p.rows(), r);
    MatrixXcd ptilde = MatrixXcd::Zero(r, r);
    for (std::size_t i = 0; i < r; ++i) {
      v.col(i) = es.eigenvectors().col(keep[i]);
      ptilde(i, i) = es.eigenvalues()(keep[i]);
    }

    auto xvar = b.add_complex(r, sp.dtq * dside);
    MatrixXcd constant = MatrixXcd::Zero(r + sp.dtq * dside, r + sp.dtq * dside);
    constant.topLeftCorner(r, r) = ptilde;
    std::size_t blk = b.add_block(constant);
    b.embed_complex(blk, xvar, 1.0, 0, r);
    for (std::size_t tq = 0; tq < sp.dtq; ++tq) {
      b.embed_hermitian(blk, sigma, 1.0, r + tq * dside);  // I_{tq} tensor sigma
    }
    // Maximize Re Tr(V C) = Re Tr(X), X restricted to the support of P.
    b.add_re_trace_objective(xvar, v, -1.0);
    b.set_start(xvar, MatrixXcd::Zero(r, sp.dtq * dside));
    xs.push_back(xvar);
    group_blocks.push_back({blk});
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    b.add_group({}, {xs[i]}, group_blocks[i]);
  }

  SdpProblem problem = std::move(b).build();
  SdpSolution sol = sdp_solve(problem, sdp_opts);
  double f_root = -sol.value;
  return 2.0 * std::log2(std::max(f_root, 1e-300));
}

}  // namespace

EntropyResult hmax(const QOperator& s, const std::vector<std::string>& target,
                   const std::vector<std::string>& side, const EntropyOptions& opts) {
  validate_state(s);
  SplitState sp = split_classical(s, target, side);
  double via_fidelity = hmax_fidelity_sdp(sp, opts.sdp);

  // Purification duality H_max(U|V) = -H_min(U|W), gated on the purifier dim.
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(s.matrix(), Eigen::EigenvaluesOnly);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > tol::kEigCutoff) ++rank;
  }
  std::size_t wdim = 1;
  while (wdim < rank) wdim *= 2;
  if (wdim <= opts.duality_dim_cap) {
    PureState psi = purify(s, "_hmax_purifier");
    QOperator rho_uw = partial_trace(psi, side);
    EntropyResult dual = hmin(rho_uw, target, {"_hmax_purifier"}, opts);
    double via_duality = -dual.value;
    double diff = std::abs(via_duality - via_fidelity);
    if (diff > opts.cross_check_tol) {
      throw std::runtime_error("hmax: fidelity SDP and purification duality disagree by " +
                               std::to_string(diff) + " bits");
    }
    return EntropyResult{via_fidelity, "sdp-primal", diff};
  }
  return EntropyResult{via_fidelity, "sdp-primal", 0.0};
}

GuessResult pguess(const QOperator& s, const std::string& target_reg,
                   const EntropyOptions& opts) {
  validate_state(s);
  std::vector<std::string> side;
  for (const auto& r : s.layout().registers()) {
    if (r.name != target_reg) side.push_back(r.name);
  }
  SplitState sp = split_classical(s, {target_reg}, side);
  if (sp.dtq != 1) {
    throw std::invalid_argument("pguess: target register is not classical");
  }

  SdpBuilder b;
  std::vector<SdpBuilder::HermitianVar> y(sp.dsc);
  std::vector<std::vector<std::size_t>> group_blocks(sp.dsc);
  std::vector<std::vector<std::size_t>> cover_blocks(sp.dsc);
  for (std::size_t sc = 0; sc < sp.dsc; ++sc) {
    y[sc] = b.add_hermitian(sp.dsq);
    b.add_trace_objective(y[sc], 1.0);
  }
  for (std::size_t sc = 0; sc < sp.dsc; ++sc) {
    double lmax = 0.0;
    for (std::size_t tc = 0; tc < sp.dtc; ++tc) {
      MatrixXcd blk = sp.block(tc, sc);
      lmax = std::max(lmax, spectral_max(blk));
      std::size_t cover = b.add_block(-blk);
      b.embed_hermitian(cover, y[sc], 1.0, 0);
      group_blocks[sc].push_back(cover);
      cover_blocks[sc].push_back(cover);
    }
    std::size_t psd = b.add_block(MatrixXcd::Zero(sp.dsq, sp.dsq));
    b.embed_hermitian(psd, y[sc], 1.0, 0);
    group_blocks[sc].push_back(psd);
    b.set_start(y[sc], (1.2 * lmax + 0.1) * MatrixXcd::Identity(sp.dsq, sp.dsq));
    b.add_group({y[sc]}, {}, group_blocks[sc]);
  }

  SdpSolution sol = sdp_solve(std::move(b).build(), opts.sdp);

  // Round the dual certificates into an exact POVM and evaluate it: a
  // certified achievable success probability to sandwich the optimum.
  double povm_value = 0.0;
  for (std::size_t sc = 0; sc < sp.dsc; ++sc) {
    MatrixXcd t_sum = MatrixXcd::Zero(sp.dsq, sp.dsq);
    for (std::size_t tc = 0; tc < sp.dtc; ++tc) {
      t_sum += sol.duals[cover_blocks[sc][tc]];
    }
    MatrixXcd t_inv_half = psd_inv_sqrt(t_sum, 1e-14);
    // Renormalize within the support; mass outside the support of T cannot
    // appear in any rho block at the optimum.
    for (std::size_t tc = 0; tc < sp.dtc; ++tc) {
      MatrixXcd m = t_inv_half * sol.duals[cover_blocks[sc][tc]] * t_inv_half;
      povm_value += (m * sp.block(tc, sc)).trace().real();
    }
  }

  GuessResult out;
  out.value = sol.value;
  out.povm_value = povm_value;
  out.gap = std::abs(sol.value - povm_value);
  if (out.gap > 1e-6) {
    throw std::runtime_error("pguess: POVM rounding and covering value disagree by " +
                             std::to_string(out.gap));
  }
  return out;
}

namespace {

// I_front tensor sigma^{-1/2} for a state already ordered (front, side...).
// Checks the support condition of the d2/h2 sandwich.
MatrixXcd embedded_inv_sqrt(const QOperator& rho, const std::string& front_reg,
                            const QOperator& sigma_e) {
  if (rho.layout().index_of(front_reg) != 0) {
    throw std::logic_error("embedded_inv_sqrt: front register must come first");
  }
  QOperator rho_e = partial_trace(rho, {front_reg});
  if (rho_e.layout() != sigma_e.layout()) {
    throw std::invalid_argument("sigma does not live on the side registers");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma_e.matrix());
  MatrixXcd kernel_proj = MatrixXcd::Zero(sigma_e.dim(), sigma_e.dim());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) <= tol::kEigCutoff) {
      kernel_proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    }
  }
  double leak = (kernel_proj * rho_e.matrix() * kernel_proj).cwiseAbs().maxCoeff();
  if (leak > 1e-10) {
    throw std::invalid_argument("sigma has a zero eigenvalue on the support of rho_E");
  }
  MatrixXcd inv_half = psd_inv_sqrt(sigma_e.matrix());
  const std::size_t dk = rho.layout().dim_of(front_reg);
  MatrixXcd full = MatrixXcd::Zero(rho.dim(), rho.dim());
  for (std::size_t k = 0; k < dk; ++k) {
    full.block(k * sigma_e.dim(), k * sigma_e.dim(), sigma_e.dim(), sigma_e.dim()) = inv_half;
  }
  return full;
}

}  // namespace

double d2(const QOperator& rho_ke, const std::string& k_reg, const QOperator& sigma_e) {
  std::vector<std::string> side;
  for (const auto& r : rho_ke.layout().registers()) {
    if (r.name != k_reg) side.push_back(r.name);
  }
  std::vector<std::string> order{k_reg};
  order.insert(order.end(), side.begin(), side.end());
  QOperator rho = reordered(rho_ke, order);
  const std::size_t dk = rho.layout().dim_of(k_reg);

  QOperator rho_e = partial_trace(rho, {k_reg});
  MatrixXcd ideal = MatrixXcd::Zero(rho.dim(), rho.dim());
  for (std::size_t k = 0; k < dk; ++k) {
    ideal.block(k * rho_e.dim(), k * rho_e.dim(), rho_e.dim(), rho_e.dim()) =
        rho_e.matrix() / static_cast<double>(dk);
  }
  MatrixXcd m = rho.matrix() - ideal;
  MatrixXcd t = embedded_inv_sqrt(rho, k_reg, sigma_e);
  MatrixXcd mt = m * t;
  return (mt * mt).trace().real();
}

double h2(const QOperator& rho, const std::string& a_reg, const QOperator& sigma_e) {
  std::vector<std::string> side;
  for (const auto& r : rho.layout().registers()) {
    if (r.name != a_reg) side.push_back(r.name);
  }
  std::vector<std::string> order{a_reg};
  order.insert(order.end(), side.begin(), side.end());
  QOperator ro = reordered(rho, order);
  MatrixXcd t = embedded_inv_sqrt(ro, a_reg, sigma_e);
  MatrixXcd rt = ro.matrix() * t;
  return -std::log2((rt * rt).trace().real());
}

double renyi_half_down(const QOperator& rho_ke, const std::string& k_reg) {
  if (std::abs(rho_ke.trace() - 1.0) > 1e-9) {
    throw std::invalid_argument("renyi_half_down: state must be normalized");
  }
  std::vector<std::string> side;
  for (const auto& r : rho_ke.layout().registers()) {
    if (r.name != k_reg) side.push_back(r.name);
  }
  std::vector<std::string> order{k_reg};
  order.insert(order.end(), side.begin(), side.end());
  QOperator rho = reordered(rho_ke, order);
  QOperator rho_e = partial_trace(rho, {k_reg});
  const std::size_t dk = rho.layout().dim_of(k_reg);
  MatrixXcd big = MatrixXcd::Zero(rho.dim(), rho.dim());
  for (std::size_t k = 0; k < dk; ++k) {
    big.block(k * rho_e.dim(), k * rho_e.dim(), rho_e.dim(), rho_e.dim()) = rho_e.matrix();
  }
  // Root fidelity between I tensor rho_E and rho_KE (no generalized cross
  // term in this quantity).
  MatrixXcd sr = psd_sqrt(rho.matrix());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sr * big * sr, Eigen::EigenvaluesOnly);
  double f = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    f += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  }
  return 2.0 * std::log2(f);
}

double renyi_two_down(const QOperator& rho_ke, const std::string& k_reg) {
  if (std::abs(rho_ke.trace() - 1.0) > 1e-9) {
    throw std::invalid_argument("renyi_two_down: state must be normalized");
  }
  QOperator rho_e = partial_trace(rho_ke, {k_reg});
  return h2(rho_ke, k_reg, rho_e);
}

EntropyResult hmin_smooth_lower(const QOperator& s, const std::vector<std::string>& target,
                                const std::vector<std::string>& side, double eps,
                                const std::vector<QOperator>& candidates,
                                const EntropyOptions& opts) {
  if (eps < 0.0 || eps >= 1.0) {
    throw std::invalid_argument("hmin_smooth_lower: eps must lie in [0, 1)");
  }
  EntropyResult best = hmin(s, target, side, opts);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    validate_state(candidates[i]);
    double dist = purified_distance(candidates[i], s);
    if (dist > eps + 1e-9) {
      throw std::invalid_argument("hmin_smooth_lower: candidate " + std::to_string(i) +
                                  " lies outside the eps-ball (distance " +
                                  std::to_string(dist) + ")");
    }
    EntropyResult r = hmin(candidates[i], target, side, opts);
    if (r.value > best.value) best = r;
  }
  return best;
}

std::vector<QOperator> truncation_candidates(const QOperator& s, double eps) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(s.matrix());
  std::vector<QOperator> out;
  const Eigen::Index d = es.eigenvalues().size();

  auto rebuild = [&](const VectorXd& eigs) {
    MatrixXcd m = es.eigenvectors() * eigs.asDiagonal() * es.eigenvectors().adjoint();
    return QOperator(s.layout(), std::move(m));
  };
  auto admit = [&](const VectorXd& eigs) {
    if (eigs.minCoeff() < 0.0 || eigs.sum() <= 0.0) return;
    QOperator cand = rebuild(eigs);
    if (purified_distance(cand, s) <= eps) out.push_back(std::move(cand));
  };

  VectorXd base = es.eigenvalues().cwiseMax(0.0);
  // Cap the largest eigenvalue down to the runner-up.
  if (d >= 2) {
    VectorXd capped = base;
    Eigen::Index top;
    capped.maxCoeff(&top);
    double second = -1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (i != top) second = std::max(second, capped(i));
    }
    if (second >= 0.0 && capped(top) > second) {
      capped(top) = second;
      admit(capped);
    }
  }
  // Drop the smallest positive eigenvalues one by one.
  VectorXd dropped = base;
  for (int round = 0; round < 3; ++round) {
    Eigen::Index arg = -1;
    double small = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < d; ++i) {
      if (dropped(i) > 0.0 && dropped(i) < small) {
        small = dropped(i);
        arg = i;
      }
    }
    if (arg < 0) break;
    dropped(arg) = 0.0;
    if (dropped.sum() <= 0.0) break;
    admit(dropped);
  }
  return out;
}

}  // namespace qpaec
