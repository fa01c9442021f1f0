#include "qpaec/sdp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qpaec {

using Eigen::MatrixXcd;
using std::complex;

// The barrier loop runs in extended precision: near the end of the path the
// slack matrices have eigenvalues ~1/t, and forming them in doubles caps the
// attainable dual residual at ~eps*t. long double pushes that floor three
// orders of magnitude down, which is what the 1e-9 gap target needs.
namespace {

using Real = long double;
using CplxL = complex<Real>;
using MatCL = Eigen::Matrix<CplxL, Eigen::Dynamic, Eigen::Dynamic>;
using MatRL = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecRL = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

constexpr std::size_t kGlobal = static_cast<std::size_t>(-1);

struct TermL {
  std::size_t param;
  std::size_t row;
  std::size_t col;
  CplxL coeff;
};

struct BlockL {
  MatCL constant;
  std::vector<TermL> terms;
};

struct BlockWork {
  MatCL s;
  MatCL sinv;
  Real logdet = 0.0;
};

bool factor(const MatCL& s, Eigen::LLT<MatCL>& llt, Real& logdet) {
  llt.compute(s);
  if (llt.info() != Eigen::Success) return false;
  logdet = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    Real d = l(i, i).real();
    if (!(d > 0.0) || !std::isfinite(static_cast<double>(d))) return false;
    logdet += 2.0L * std::log(d);
  }
  return true;
}

struct GroupIndex {
  std::vector<std::size_t> group_of_param;
  std::vector<std::size_t> pos;
  std::vector<std::size_t> global_params;
  std::vector<std::size_t> group_of_block;

  explicit GroupIndex(const SdpProblem& p) {
    group_of_param.assign(p.num_params, kGlobal);
    pos.assign(p.num_params, 0);
    group_of_block.assign(p.blocks.size(), kGlobal);
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
      for (std::size_t i = 0; i < p.groups[g].params.size(); ++i) {
        group_of_param[p.groups[g].params[i]] = g;
        pos[p.groups[g].params[i]] = i;
      }
      for (auto b : p.groups[g].blocks) group_of_block[b] = g;
    }
    for (std::size_t q = 0; q < p.num_params; ++q) {
      if (group_of_param[q] == kGlobal) {
        pos[q] = global_params.size();
        global_params.push_back(q);
      }
    }
  }
};

}  // namespace

void SdpProblem::validate() const {
  if (num_params == 0) throw std::invalid_argument("SdpProblem: no parameters");
  if (objective.size() != static_cast<Eigen::Index>(num_params) ||
      start.size() != static_cast<Eigen::Index>(num_params)) {
    throw std::invalid_argument("SdpProblem: objective/start size mismatch");
  }
  if (blocks.empty()) throw std::invalid_argument("SdpProblem: no constraint blocks");
  for (const auto& b : blocks) {
    if (b.constant.rows() != b.constant.cols()) {
      throw std::invalid_argument("SdpProblem: non-square block");
    }
    if ((b.constant - b.constant.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
      throw std::invalid_argument("SdpProblem: block constant is not Hermitian");
    }
    for (const auto& t : b.terms) {
      if (t.param >= num_params) throw std::invalid_argument("SdpProblem: bad param index");
      if (t.row >= static_cast<std::size_t>(b.constant.rows()) ||
          t.col >= static_cast<std::size_t>(b.constant.cols())) {
        throw std::invalid_argument("SdpProblem: term index outside block");
      }
    }
  }

  // Group structure: a block belongs to at most one group; a group's params
  // appear only in its own blocks; foreign blocks hold only global params.
  std::vector<std::size_t> param_group(num_params, kGlobal);
  std::vector<std::size_t> block_group(blocks.size(), kGlobal);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (auto p : groups[g].params) {
      if (p >= num_params || param_group[p] != kGlobal) {
        throw std::invalid_argument("SdpProblem: bad or duplicated group param");
      }
      param_group[p] = g;
    }
    for (auto b : groups[g].blocks) {
      if (b >= blocks.size() || block_group[b] != kGlobal) {
        throw std::invalid_argument("SdpProblem: bad or duplicated group block");
      }
      block_group[b] = g;
    }
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (const auto& t : blocks[b].terms) {
      std::size_t pg = param_group[t.param];
      if (pg != kGlobal && pg != block_group[b]) {
        throw std::invalid_argument("SdpProblem: group param used outside its blocks");
      }
    }
  }
}

SdpSolution sdp_solve(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  const std::size_t nblocks = problem.blocks.size();
  const std::size_t nparams = problem.num_params;
  GroupIndex gi(problem);
  const std::size_t nglobal = gi.global_params.size();
  const std::size_t ngroups = problem.groups.size();

  std::vector<BlockL> blocks(nblocks);
  for (std::size_t j = 0; j < nblocks; ++j) {
    blocks[j].constant = problem.blocks[j].constant.cast<CplxL>();
    blocks[j].terms.reserve(problem.blocks[j].terms.size());
    for (const auto& t : problem.blocks[j].terms) {
      blocks[j].terms.push_back({t.param, t.row, t.col, CplxL(t.coeff)});
    }
  }
  VecRL objective = problem.objective.cast<Real>();

  Real dim_total = 0;
  for (const auto& b : blocks) dim_total += static_cast<Real>(b.constant.rows());

  VecRL x = problem.start.cast<Real>();
  std::vector<BlockWork> work(nblocks);
  std::vector<BlockWork> trial(nblocks);
  Eigen::LLT<MatCL> llt;

  auto block_matrix = [&](std::size_t j, const VecRL& xs) {
    MatCL s = blocks[j].constant;
    for (const auto& t : blocks[j].terms) s(t.row, t.col) += xs(t.param) * t.coeff;
    return s;
  };
  auto refresh = [&](const VecRL& xs, std::vector<BlockWork>& w, bool need_inverse) -> bool {
    for (std::size_t j = 0; j < nblocks; ++j) {
      w[j].s = block_matrix(j, xs);
      if (!factor(w[j].s, llt, w[j].logdet)) return false;
      if (need_inverse) {
        w[j].sinv = llt.solve(MatCL::Identity(w[j].s.rows(), w[j].s.cols()));
      }
    }
    return true;
  };

  if (!refresh(x, work, false)) {
    for (std::size_t j = 0; j < nblocks; ++j) {
      MatrixXcd s = problem.blocks[j].constant;
      for (const auto& t : problem.blocks[j].terms) {
        s(t.row, t.col) += problem.start(t.param) * t.coeff;
      }
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(s, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() <= 0.0) {
        throw std::invalid_argument(
            "sdp_solve: start is not strictly feasible (block " + std::to_string(j) +
            ", min eigenvalue " + std::to_string(es.eigenvalues().minCoeff()) + ")");
      }
    }
    throw std::invalid_argument("sdp_solve: start is not strictly feasible");
  }

  const Real initial_scale = 1.0L + std::abs(static_cast<double>(objective.dot(x)));
  Real t = options.t0;
  int outer = 0;
  bool reached_tol = false;

  auto barrier_value = [&](const std::vector<BlockWork>& w, const VecRL& xs) {
    Real v = t * objective.dot(xs);
    for (const auto& b : w) v -= b.logdet;
    return v;
  };

  for (; outer < options.max_outer; ++outer) {
    Real prev_gnorm = std::numeric_limits<Real>::infinity();
    for (int it = 0; it < options.max_newton; ++it) {
      if (!refresh(x, work, true)) {
        throw std::runtime_error("sdp_solve: lost feasibility at a previously valid point");
      }

      VecRL grad = t * objective;
      for (std::size_t j = 0; j < nblocks; ++j) {
        for (const auto& term : blocks[j].terms) {
          grad(term.param) -= (term.coeff * work[j].sinv(term.col, term.row)).real();
        }
      }

      // Hessian in group-diagonal plus global-border form.
      std::vector<MatRL> hd(ngroups);
      std::vector<MatRL> hc(ngroups);
      std::vector<std::size_t> local_offset(ngroups);
      std::size_t local_total = 0;
      for (std::size_t g = 0; g < ngroups; ++g) {
        std::size_t l = problem.groups[g].params.size();
        hd[g] = MatRL::Zero(l, l);
        hc[g] = MatRL::Zero(l, nglobal);
        local_offset[g] = local_total;
        local_total += l;
      }
      MatRL hg = MatRL::Zero(nglobal, nglobal);

      for (std::size_t j = 0; j < nblocks; ++j) {
        const auto& terms = blocks[j].terms;
        const MatCL& sinv = work[j].sinv;
        const std::size_t bg = gi.group_of_block[j];
        for (const auto& a : terms) {
          const bool a_local = gi.group_of_param[a.param] != kGlobal;
          for (const auto& b : terms) {
            const bool b_local = gi.group_of_param[b.param] != kGlobal;
            // The border block C is stored once (local row, global column);
            // the mirrored ordering of the same pair must not add again.
            if (!a_local && b_local) continue;
            Real h = (a.coeff * b.coeff * sinv(a.col, b.row) * sinv(b.col, a.row)).real();
            if (a_local && b_local) {
              hd[bg](gi.pos[a.param], gi.pos[b.param]) += h;
            } else if (a_local) {
              hc[bg](gi.pos[a.param], gi.pos[b.param]) += h;
            } else {
              hg(gi.pos[a.param], gi.pos[b.param]) += h;
            }
          }
        }
      }

      VecRL rhs_local = VecRL::Zero(local_total);
      VecRL rhs_global = VecRL::Zero(nglobal);
      for (std::size_t p = 0; p < nparams; ++p) {
        if (gi.group_of_param[p] != kGlobal) {
          rhs_local(local_offset[gi.group_of_param[p]] + gi.pos[p]) = -grad(p);
        } else {
          rhs_global(gi.pos[p]) = -grad(p);
        }
      }

      VecRL dx = VecRL::Zero(nparams);
      MatRL schur = hg;
      VecRL schur_rhs = rhs_global;
      std::vector<MatRL> dinv_c(ngroups);
      std::vector<VecRL> dinv_rhs(ngroups);
      for (std::size_t g = 0; g < ngroups; ++g) {
        std::size_t l = problem.groups[g].params.size();
        if (l == 0) continue;
        Eigen::LDLT<MatRL> dfac(hd[g]);
        if (dfac.info() != Eigen::Success) {
          hd[g].diagonal().array() += 1e-14L * (1.0L + hd[g].diagonal().maxCoeff());
          dfac.compute(hd[g]);
          if (dfac.info() != Eigen::Success) {
            throw std::runtime_error("sdp_solve: singular Newton system (group block)");
          }
        }
        dinv_c[g] = dfac.solve(hc[g]);
        dinv_rhs[g] = dfac.solve(rhs_local.segment(local_offset[g], l));
        if (nglobal > 0) {
          schur -= hc[g].transpose() * dinv_c[g];
          schur_rhs -= hc[g].transpose() * dinv_rhs[g];
        }
      }
      VecRL dx_global = VecRL::Zero(nglobal);
      if (nglobal > 0) {
        Eigen::LDLT<MatRL> gfac(schur);
        if (gfac.info() != Eigen::Success) {
          schur.diagonal().array() += 1e-14L * (1.0L + schur.diagonal().maxCoeff());
          gfac.compute(schur);
          if (gfac.info() != Eigen::Success) {
            throw std::runtime_error("sdp_solve: singular Newton system (global border)");
          }
        }
        dx_global = gfac.solve(schur_rhs);
      }
      for (std::size_t g = 0; g < ngroups; ++g) {
        std::size_t l = problem.groups[g].params.size();
        if (l == 0) continue;
        VecRL dloc = dinv_rhs[g];
        if (nglobal > 0) dloc -= dinv_c[g] * dx_global;
        for (std::size_t i = 0; i < l; ++i) dx(problem.groups[g].params[i]) = dloc(i);
      }
      for (std::size_t i = 0; i < nglobal; ++i) dx(gi.global_params[i]) = dx_global(i);

      Real lambda2 = -grad.dot(dx);
      if (!std::isfinite(static_cast<double>(lambda2))) {
        throw std::runtime_error("sdp_solve: Newton step is not finite");
      }
      // The decrement alone does not pin the dual residual: the Hessian
      // metric is ~t^2 along active directions. Also require the gradient
      // itself to be small relative to t, or to have hit its numerical floor.
      Real gnorm = grad.template lpNorm<Eigen::Infinity>();
      if (lambda2 <= 2.0L * static_cast<Real>(options.newton_tol)) {
        if (gnorm <= static_cast<Real>(options.grad_tol) * t || gnorm >= 0.5L * prev_gnorm) {
          break;
        }
      }
      prev_gnorm = gnorm;

      Real psi0 = barrier_value(work, x);
      Real alpha = 1.0L;
      bool accepted = false;
      for (int ls = 0; ls < 80 && !accepted; ++ls) {
        VecRL xt = x + alpha * dx;
        if (refresh(xt, trial, false)) {
          if (lambda2 <= 0.25L ||
              barrier_value(trial, xt) <= psi0 - 0.25L * alpha * lambda2) {
            x = xt;
            accepted = true;
          }
        }
        if (!accepted) alpha *= 0.5L;
      }
      if (!accepted) break;  // numerical floor; the current point is our center

      if (objective.dot(x) < -1e13L * initial_scale) {
        throw std::runtime_error(
            "sdp_solve: objective diverging; problem is unbounded or infeasible");
      }
    }

    if (dim_total / t <= static_cast<Real>(options.gap_tol)) {
      reached_tol = true;
      break;
    }
    // Land exactly on the target t: overshooting by a factor mu inflates the
    // dual-residual floor (which grows with t) for no benefit.
    t = std::min(t * static_cast<Real>(options.mu),
                 dim_total / static_cast<Real>(options.gap_tol));
  }

  if (!refresh(x, work, true)) {
    throw std::runtime_error("sdp_solve: final point lost feasibility");
  }
  SdpSolution sol;
  sol.outer_iterations = outer;
  sol.x = x.cast<double>();
  sol.value = static_cast<double>(objective.dot(x)) + problem.offset;
  sol.slacks.reserve(nblocks);
  sol.duals.reserve(nblocks);
  Real dual = 0;
  for (std::size_t j = 0; j < nblocks; ++j) {
    MatCL z = work[j].sinv / t;
    sol.slacks.push_back(work[j].s.cast<complex<double>>());
    sol.duals.push_back(z.cast<complex<double>>());
    dual -= (blocks[j].constant * z).trace().real();
  }
  sol.dual_value = static_cast<double>(dual) + problem.offset;
  sol.gap = std::abs(sol.value - sol.dual_value);
  VecRL resid = objective;
  for (std::size_t j = 0; j < nblocks; ++j) {
    for (const auto& term : blocks[j].terms) {
      resid(term.param) -= (term.coeff * work[j].sinv(term.col, term.row)).real() / t;
    }
  }
  sol.dual_residual = static_cast<double>(resid.template lpNorm<Eigen::Infinity>());

  if (!reached_tol) {
    throw std::runtime_error("sdp_solve: did not reach the gap tolerance within " +
                             std::to_string(options.max_outer) + " stages; best gap " +
                             std::to_string(sol.gap));
  }
  return sol;
}

SdpBuilder::HermitianVar SdpBuilder::add_hermitian(std::size_t dim) {
  HermitianVar v{num_params_, dim};
  num_params_ += dim * dim;
  return v;
}

SdpBuilder::ComplexVar SdpBuilder::add_complex(std::size_t rows, std::size_t cols) {
  ComplexVar v{num_params_, rows, cols};
  num_params_ += 2 * rows * cols;
  return v;
}

std::size_t SdpBuilder::add_raw_params(std::size_t count) {
  std::size_t base = num_params_;
  num_params_ += count;
  return base;
}

std::size_t SdpBuilder::add_block(Eigen::MatrixXcd constant) {
  blocks_.push_back(SdpBlock{std::move(constant), {}});
  return blocks_.size() - 1;
}

void SdpBuilder::add_term(std::size_t block, std::size_t param, std::size_t row,
                          std::size_t col, std::complex<double> coeff) {
  blocks_.at(block).terms.push_back({param, row, col, coeff});
}

void SdpBuilder::add_to_constant(std::size_t block, std::size_t row, std::size_t col,
                                 std::complex<double> value) {
  blocks_.at(block).constant(row, col) += value;
}

void SdpBuilder::set_start_raw(std::size_t param, double value) {
  start_entries_.push_back({param, value});
}

void SdpBuilder::add_objective_raw(std::size_t param, double scale) {
  objective_entries_.push_back({param, scale});
}

namespace {

// Parameter indices inside a Hermitian variable: dim diagonal entries first,
// then (re, im) pairs for i < j in row-major order.
std::size_t herm_offdiag_base(const SdpBuilder::HermitianVar& v, std::size_t i, std::size_t j) {
  std::size_t pair_index = i * v.dim - i * (i + 1) / 2 + (j - i - 1);
  return v.base + v.dim + 2 * pair_index;
}

}  // namespace

void SdpBuilder::embed_hermitian(std::size_t block, const HermitianVar& v, double scale,
                                 std::size_t offset) {
  auto& terms = blocks_.at(block).terms;
  for (std::size_t i = 0; i < v.dim; ++i) {
    terms.push_back({v.base + i, offset + i, offset + i, scale});
  }
  for (std::size_t i = 0; i < v.dim; ++i) {
    for (std::size_t j = i + 1; j < v.dim; ++j) {
      std::size_t re = herm_offdiag_base(v, i, j);
      terms.push_back({re, offset + i, offset + j, scale});
      terms.push_back({re, offset + j, offset + i, scale});
      terms.push_back({re + 1, offset + i, offset + j, complex<double>(0, scale)});
      terms.push_back({re + 1, offset + j, offset + i, complex<double>(0, -scale)});
    }
  }
}

void SdpBuilder::embed_complex(std::size_t block, const ComplexVar& v, double scale,
                               std::size_t row_offset, std::size_t col_offset) {
  auto& terms = blocks_.at(block).terms;
  for (std::size_t a = 0; a < v.rows; ++a) {
    for (std::size_t b = 0; b < v.cols; ++b) {
      std::size_t re = v.base + 2 * (a * v.cols + b);
      terms.push_back({re, row_offset + a, col_offset + b, scale});
      terms.push_back({re, col_offset + b, row_offset + a, scale});
      terms.push_back({re + 1, row_offset + a, col_offset + b, complex<double>(0, scale)});
      terms.push_back({re + 1, col_offset + b, row_offset + a, complex<double>(0, -scale)});
    }
  }
}

void SdpBuilder::embed_trace(std::size_t block, const HermitianVar& v, double scale,
                             std::size_t position) {
  auto& terms = blocks_.at(block).terms;
  for (std::size_t i = 0; i < v.dim; ++i) {
    terms.push_back({v.base + i, position, position, scale});
  }
}

void SdpBuilder::add_trace_objective(const HermitianVar& v, double scale) {
  for (std::size_t i = 0; i < v.dim; ++i) objective_entries_.push_back({v.base + i, scale});
}

void SdpBuilder::add_re_trace_objective(const ComplexVar& v, const Eigen::MatrixXcd& m,
                                        double scale) {
  if (m.rows() != static_cast<Eigen::Index>(v.cols) ||
      m.cols() != static_cast<Eigen::Index>(v.rows)) {
    throw std::invalid_argument("add_re_trace_objective: shape mismatch");
  }
  for (std::size_t a = 0; a < v.rows; ++a) {
    for (std::size_t b = 0; b < v.cols; ++b) {
      std::size_t re = v.base + 2 * (a * v.cols + b);
      objective_entries_.push_back({re, scale * m(b, a).real()});
      objective_entries_.push_back({re + 1, -scale * m(b, a).imag()});
    }
  }
}

void SdpBuilder::set_start(const HermitianVar& v, const Eigen::MatrixXcd& value) {
  for (std::size_t i = 0; i < v.dim; ++i) {
    start_entries_.push_back({v.base + i, value(i, i).real()});
  }
  for (std::size_t i = 0; i < v.dim; ++i) {
    for (std::size_t j = i + 1; j < v.dim; ++j) {
      std::size_t re = herm_offdiag_base(v, i, j);
      start_entries_.push_back({re, value(i, j).real()});
      start_entries_.push_back({re + 1, value(i, j).imag()});
    }
  }
}

void SdpBuilder::set_start(const ComplexVar& v, const Eigen::MatrixXcd& value) {
  for (std::size_t a = 0; a < v.rows; ++a) {
    for (std::size_t b = 0; b < v.cols; ++b) {
      std::size_t re = v.base + 2 * (a * v.cols + b);
      start_entries_.push_back({re, value(a, b).real()});
      start_entries_.push_back({re + 1, value(a, b).imag()});
    }
  }
}

void SdpBuilder::add_group(const std::vector<HermitianVar>& hvars,
                           const std::vector<ComplexVar>& cvars,
                           const std::vector<std::size_t>& blocks) {
  SdpProblem::Group g;
  for (const auto& v : hvars) {
    for (std::size_t i = 0; i < v.dim * v.dim; ++i) g.params.push_back(v.base + i);
  }
  for (const auto& v : cvars) {
    for (std::size_t i = 0; i < 2 * v.rows * v.cols; ++i) g.params.push_back(v.base + i);
  }
  g.blocks = blocks;
  groups_.push_back(std::move(g));
}

SdpProblem SdpBuilder::build() && {
  SdpProblem p;
  p.num_params = num_params_;
  p.objective = Eigen::VectorXd::Zero(num_params_);
  for (const auto& [idx, val] : objective_entries_) p.objective(idx) += val;
  p.start = Eigen::VectorXd::Zero(num_params_);
  for (const auto& [idx, val] : start_entries_) p.start(idx) = val;
  p.blocks = std::move(blocks_);
  p.groups = std::move(groups_);
  p.offset = offset_;
  p.validate();
  return p;
}

Eigen::MatrixXcd SdpBuilder::hermitian_value(const Eigen::VectorXd& x, const HermitianVar& v) {
  MatrixXcd m(v.dim, v.dim);
  for (std::size_t i = 0; i < v.dim; ++i) m(i, i) = x(v.base + i);
  for (std::size_t i = 0; i < v.dim; ++i) {
    for (std::size_t j = i + 1; j < v.dim; ++j) {
      std::size_t re = herm_offdiag_base(v, i, j);
      m(i, j) = complex<double>(x(re), x(re + 1));
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

Eigen::MatrixXcd SdpBuilder::complex_value(const Eigen::VectorXd& x, const ComplexVar& v) {
  MatrixXcd m(v.rows, v.cols);
  for (std::size_t a = 0; a < v.rows; ++a) {
    for (std::size_t b = 0; b < v.cols; ++b) {
      std::size_t re = v.base + 2 * (a * v.cols + b);
      m(a, b) = complex<double>(x(re), x(re + 1));
    }
  }
  return m;
}

}  // namespace qpaec
