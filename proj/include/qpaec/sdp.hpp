#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace qpaec {

/// One affine coefficient of a constraint block: S += x[param] * coeff at
/// (row, col). Hermitian mirrors are NOT implied; builders add both entries
/// (or a real diagonal entry) so every block stays exactly Hermitian.
struct SdpTerm {
  std::size_t param;
  std::size_t row;
  std::size_t col;
  std::complex<double> coeff;
};

/// Linear matrix inequality block: constant + affine part must be PSD.
struct SdpBlock {
  Eigen::MatrixXcd constant;
  std::vector<SdpTerm> terms;
};

/// Small dense semidefinite program in LMI form:
///
///   minimize    objective . x  (+ offset)
///   subject to  S_j(x) = constant_j + sum_i x_i A_{j,i}  PSD   for all j
///
/// over real parameters x. Hermitian or complex matrix variables are encoded
/// into x by the SdpBuilder below. The caller must supply a strictly feasible
/// start. Groups declare parameters local to disjoint block sets so the
/// Newton system can be solved by Schur elimination.
struct SdpProblem {
  std::size_t num_params = 0;
  Eigen::VectorXd objective;
  double offset = 0.0;
  std::vector<SdpBlock> blocks;
  Eigen::VectorXd start;

  struct Group {
    std::vector<std::size_t> params;
    std::vector<std::size_t> blocks;
  };
  std::vector<Group> groups;

  void validate() const;
};

struct SdpSolution {
  double value = 0.0;       // primal objective at the final center
  double dual_value = 0.0;  // -sum_j <constant_j, Z_j> from Z_j = S_j^{-1}/t
  double gap = 0.0;         // |value - dual_value|
  double dual_residual = 0.0;
  int outer_iterations = 0;
  Eigen::VectorXd x;
  std::vector<Eigen::MatrixXcd> slacks;  // S_j(x), the primal certificates
  std::vector<Eigen::MatrixXcd> duals;   // Z_j, PSD by construction
};

struct SdpOptions {
  double gap_tol = 1e-9;
  double newton_tol = 1e-12;  // on the squared Newton decrement / 2
  double grad_tol = 1e-10;    // on |grad|_inf / t; pins the dual residual
  int max_outer = 200;
  int max_newton = 60;
  double mu = 5.0;
  double t0 = 1.0;
};

/// Log-barrier path following with damped Newton steps. Deterministic.
/// Throws std::invalid_argument if the start is not strictly feasible and
/// std::runtime_error on divergence or failure to reach gap_tol within
/// max_outer stages (the message carries the best gap).
SdpSolution sdp_solve(const SdpProblem& problem, const SdpOptions& options = {});

/// Assembles problems from matrix-shaped variables.
class SdpBuilder {
public:
  struct HermitianVar {
    std::size_t base = 0;
    std::size_t dim = 0;
  };
  struct ComplexVar {
    std::size_t base = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
  };

  /// Parameter order: dim diagonal entries, then (re, im) for each upper
  /// off-diagonal pair in row-major order.
  HermitianVar add_hermitian(std::size_t dim);
  /// Parameter order: (re, im) per entry in row-major order.
  ComplexVar add_complex(std::size_t rows, std::size_t cols);
  /// Raw parameters for hand-built structures (e.g. unit-trace variables).
  std::size_t add_raw_params(std::size_t count);

  std::size_t add_block(Eigen::MatrixXcd constant);

  /// S_block += scale * V embedded with its (0,0) at (offset, offset).
  void embed_hermitian(std::size_t block, const HermitianVar& v, double scale,
                       std::size_t offset);
  /// S_block += scale * (C placed at (row_offset, col_offset) + its adjoint
  /// mirrored); use for off-diagonal blocks of larger Hermitian matrices.
  void embed_complex(std::size_t block, const ComplexVar& v, double scale,
                     std::size_t row_offset, std::size_t col_offset);
  /// S_block(position, position) += scale * Tr(V); for scalar cap blocks.
  void embed_trace(std::size_t block, const HermitianVar& v, double scale,
                   std::size_t position);
  /// Raw affine pieces; the caller owns Hermiticity of the result.
  void add_term(std::size_t block, std::size_t param, std::size_t row, std::size_t col,
                std::complex<double> coeff);
  void add_to_constant(std::size_t block, std::size_t row, std::size_t col,
                       std::complex<double> value);
  void set_start_raw(std::size_t param, double value);
  /// objective(param) += scale.
  void add_objective_raw(std::size_t param, double scale);

  /// objective += scale * Tr(V).
  void add_trace_objective(const HermitianVar& v, double scale);
  /// objective += scale * Re Tr(M C) for a fixed (v.cols x v.rows) matrix M.
  void add_re_trace_objective(const ComplexVar& v, const Eigen::MatrixXcd& m, double scale);

  void set_start(const HermitianVar& v, const Eigen::MatrixXcd& value);
  void set_start(const ComplexVar& v, const Eigen::MatrixXcd& value);

  /// Declares the parameters of the given variables local to the given blocks.
  void add_group(const std::vector<HermitianVar>& hvars, const std::vector<ComplexVar>& cvars,
                 const std::vector<std::size_t>& blocks);

  void set_offset(double offset) { offset_ = offset; }

  SdpProblem build() &&;

  static Eigen::MatrixXcd hermitian_value(const Eigen::VectorXd& x, const HermitianVar& v);
  static Eigen::MatrixXcd complex_value(const Eigen::VectorXd& x, const ComplexVar& v);

private:
  std::size_t num_params_ = 0;
  std::vector<SdpBlock> blocks_;
  std::vector<std::pair<std::size_t, double>> objective_entries_;
  std::vector<std::pair<std::size_t, double>> start_entries_;
  std::vector<SdpProblem::Group> groups_;
  double offset_ = 0.0;
};

}  // namespace qpaec
