#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qpaec/hash_family.hpp"
#include "qpaec/registers.hpp"

namespace qpaec {

namespace tol {
inline constexpr double kHermitian = 1e-10;   // max |M - M^dagger| entry
inline constexpr double kClassical = 1e-10;   // max off-diagonal leakage
inline constexpr double kPsdFloor = -1e-10;   // eigenvalues may dip this far
inline constexpr double kRoundTrip = 1e-9;    // purify / partial_trace cycles
inline constexpr double kEigCutoff = 1e-12;   // rank and pseudo-inverse cutoff
}  // namespace tol

enum class Basis { kZ, kX };

/// Sub-normalized Hermitian operator on a tensor product of named registers.
/// The constructor enforces Hermiticity; positivity and trace are checked
/// separately by validate_state, since differences of states are operators
/// too.
class QOperator {
public:
  QOperator(RegisterLayout layout, Eigen::MatrixXcd matrix);

  const RegisterLayout& layout() const { return layout_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  double trace() const { return matrix_.trace().real(); }

private:
  RegisterLayout layout_;
  Eigen::MatrixXcd matrix_;
};

struct PureState {
  RegisterLayout layout;
  Eigen::VectorXcd amplitudes;

  double norm_squared() const { return amplitudes.squaredNorm(); }
  QOperator density() const { return QOperator(layout, amplitudes * amplitudes.adjoint()); }
};

/// Throws if s is not a valid sub-normalized state (PSD within tolerance,
/// 0 < trace <= 1 + tol).
void validate_state(const QOperator& s);

QOperator tensor(const QOperator& a, const QOperator& b);

QOperator partial_trace(const QOperator& s, const std::vector<std::string>& drop);
QOperator partial_trace(const PureState& s, const std::vector<std::string>& drop);

/// Same operator with the tensor factors permuted into the given order
/// (a permutation of the existing register names).
QOperator reordered(const QOperator& s, const std::vector<std::string>& order);

/// Purification from the eigendecomposition, eigenvalues descending and each
/// eigenvector's largest-magnitude component rotated to the positive real
/// axis. The ancilla dimension is the rank padded to the next power of two.
PureState purify(const QOperator& s, const std::string& ancilla_name);

/// Pinches s in the computational (Z) or Hadamard-transformed (X) product
/// basis of one register. Idempotent and trace preserving.
QOperator dephase(const QOperator& s, const std::string& reg, Basis basis);

bool is_classical(const QOperator& s, const std::string& reg, Basis basis,
                  double tolerance = tol::kClassical);

enum class FunctionMode {
  kKeepInput,     // |v><v| tensor block tensor |h(v)><h(v)|
  kTraceOutInput  // sum of blocks over each fiber h^{-1}(k)
};

/// Applies a classical linear function to a register that is classical in
/// the given basis, writing the result into a fresh 2^m-dimensional register
/// named out_name. With kTraceOutInput the input register is replaced in
/// place by the output register; with kKeepInput the output register is
/// appended after the existing ones and the input is kept.
QOperator apply_classical_function(const QOperator& s, const std::string& reg, Basis basis,
                                   const LinearHash& h, const std::string& out_name,
                                   FunctionMode mode);

struct PauliMeasurement {
  std::array<double, 2> probability;  // outcome 0 -> eigenvalue +1, 1 -> -1
  std::array<PureState, 2> post;      // renormalized; zero amplitudes if p = 0
};

/// Projective measurement of the Pauli string Z^{bits} (or X^{bits}) on the
/// qubits of one register; bits are packed MSB-first over the register's
/// qubits.
PauliMeasurement pauli_string_measure(const PureState& s, const std::string& reg,
                                      std::uint64_t bits, Basis basis);

struct BranchState {
  std::uint64_t outcome = 0;  // packed outcome bits, row 0 first (MSB)
  double probability = 0.0;
  PureState state;  // renormalized
};

/// Measures the rows of `strings` in sequence (they must commute, which holds
/// for same-basis Pauli strings) and returns all 2^rows branches in outcome
/// order.
std::vector<BranchState> measure_string_sequence(const PureState& s, const std::string& reg,
                                                 const BitMatrix& strings, Basis basis);

double l1_distance(const QOperator& a, const QOperator& b);

/// ||sqrt(a) sqrt(b)||_1 + sqrt((1 - Tr a)(1 - Tr b)), traces clamped to 1.
double generalized_fidelity(const QOperator& a, const QOperator& b);

double purified_distance(const QOperator& a, const QOperator& b);

struct StandardForm {
  PureState rho_abe;   // pure; ancilla register appended by purification
  QOperator rho_zae;   // Z^A-measured marginal on (A, E)
  QOperator rho_xab;   // X^A-measured marginal on (A, B)
};

/// The three-step conversion between the two classical pictures: purify,
/// trace out the unneeded side, measure A in the complementary basis. For
/// kCqOnZ the input is rho_ZAE (classical in Z on a_reg) and the ancilla
/// becomes B; for kCqOnX the input is rho_XAB and the ancilla becomes E.
StandardForm standard_form_from(const QOperator& s, const std::string& a_reg, Basis given,
                                const std::string& ancilla_name);

// Small matrix helpers shared by the entropy code and tests.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd psd_inv_sqrt(const Eigen::MatrixXcd& m, double cutoff = tol::kEigCutoff);
Eigen::MatrixXcd hadamard_full(std::size_t qubits);
/// U acting on one register, embedded into the layout's full space.
Eigen::MatrixXcd embed_register_op(const RegisterLayout& layout, const std::string& reg,
                                   const Eigen::MatrixXcd& u);
double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace qpaec
