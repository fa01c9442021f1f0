#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpaec/entropies.hpp"
#include "qpaec/hash_family.hpp"
#include "qpaec/qoperator.hpp"

namespace qpaec {

/// One joint setting of the three algorithms: a standard-form pure state on
/// (A, side..., B) with its two measured marginals, and a dual hash pair.
/// Register names are fixed: A carries the n qubits, B is the purifying
/// register, everything else is E; derived states use K and D.
struct AlgorithmInstance {
  PureState rho_abe;
  QOperator rho_zae;  // Z^A-measured marginal on (A, E...)
  QOperator rho_xab;  // X^A-measured marginal on (A, B)
  LinearHash f;       // m x n, surjective
  LinearHash g;       // (n-m) x n dual; zero rows when m = n
  std::size_t n = 0;
  std::size_t m = 0;

  EntropyOptions entropy_opts;
};

/// Builds the standard form from a state classical in Z^A on register "A"
/// (all other registers are the E side) and pairs it with f and its dual.
AlgorithmInstance make_instance(const QOperator& rho_zae, const LinearHash& f);

/// Checks the Definition-1 predicates and the dual pairing; throws on error.
void validate_instance(const AlgorithmInstance& inst);

struct InstanceParams {
  std::size_t n = 2;       // qubits in A
  std::size_t m = 1;       // output bits of f
  std::size_t e_dim = 2;   // dimension of the E register
  std::size_t e_rank = 1;  // rank of each conditional block rho_E^z
  double trace = 1.0;      // sub-normalization of the state
};

/// Seeded random cq state rho_ZAE on (A, E); deterministic per seed.
QOperator random_cq_zae(std::uint64_t seed, const InstanceParams& p);
/// Seeded random standard-form instance with a random surjective f.
AlgorithmInstance random_instance(std::uint64_t seed, const InstanceParams& p);
/// Seeded Haar-random normalized pure state on (A: 2^n, B, E); generally not
/// in standard form.
PureState random_pure_abe(std::uint64_t seed, std::size_t n, std::size_t b_dim,
                          std::size_t e_dim);

/// rho_KE^f as a state: coarse-grains A through f into a fresh K register.
QOperator hashed_state(const QOperator& rho_zae, const LinearHash& f);

/// Q^PA via its defining expression Tr(rho) - 2^{H_max(f(Z^A)|E) - m} on the
/// coarse-grained state.
double q_pa_state(const QOperator& rho_zae, const LinearHash& f,
                  const EntropyOptions& opts = {});

/// Q^PA via the equivalent measurement algorithm: Z^{f_i} Pauli measurements
/// on the pure state collapse A into K, then the fidelity maximization runs
/// on the pipeline-built K,E state.
double q_pa(const AlgorithmInstance& inst);

/// Conventional security index ||rho_KE^f - 2^{-m} I tensor rho_E||_1.
double d1_state(const QOperator& rho_zae, const LinearHash& f);
double d1(const AlgorithmInstance& inst);

/// min over normalized sigma of ||rho_KE^f - 2^{-m} I tensor sigma||_1,
/// solved as an SDP over (positive-part, sigma); the optimizer sigma* is
/// plugged back into an eigenvalue evaluation of the trace norm as an
/// independent check of the SDP value.
double d1_prime_state(const QOperator& rho_zae, const LinearHash& f,
                      const EntropyOptions& opts = {});
double d1_prime(const AlgorithmInstance& inst);

/// The syndrome-augmented state tau = sum_x |x~><x~| tensor rho^x_B tensor
/// |g(x)><g(x)|_D (no D register when g has no rows).
QOperator syndrome_state(const QOperator& rho_xab, const LinearHash& g);

/// Q^EC = Q^DC = Tr(rho) - p_guess(X^A | B, g(X^A)), decoder optimized by the
/// discrimination SDP on the syndrome-augmented state.
double q_ec_dc(const AlgorithmInstance& inst);

/// Same value computed through the explicit decoding pipeline: X^{g_i} Pauli
/// syndrome measurements on the pure state, then the discrimination SDP on
/// the measured branches.
double q_ec_pipeline(const AlgorithmInstance& inst);

/// Pretty-good-measurement decoder success probability on the syndrome-
/// conditioned side states; a lower bound on the optimal p_guess.
double decode_pgm(const AlgorithmInstance& inst);

struct EqualityReport {
  double q_pa = 0.0;       // measurement-pipeline PA route
  double q_ec = 0.0;       // measurement-pipeline EC route
  double q_dc = 0.0;       // coarse-grained DC route
  double via_hmax = 0.0;   // Tr - 2^{H_max(f(Z^A)|E) - m}
  double via_hmin = 0.0;   // Tr - 2^{-H_min(X^A|B, g(X^A))}
  double max_spread = 0.0;
  bool pass = false;

  static constexpr double kTolerance = 1e-6;
};

/// Evaluates the five expressions of the equivalence theorem by independent
/// routes and reports their spread.
EqualityReport verify_theorem1(const AlgorithmInstance& inst);

enum class FamilyMetric {
  kQPa,    // Q^{PA,f}; non-surjective members contribute via their hull
  kQEcDc,  // Q^{EC/DC, dual(surj(f))} on the matched standard form
  kD1,     // at the family's nominal m
  kD2,     // d2(rho_KE^f | rho_E), nominal m
};

/// Exact weighted average of a per-member metric over the family, evaluated
/// on the standard form built from rho_zae. Summation uses a pairwise tree
/// for a deterministic order.
double expect_over_family(const HashFamily& fam, FamilyMetric metric, const QOperator& rho_zae,
                          const EntropyOptions& opts = {});

}  // namespace qpaec
