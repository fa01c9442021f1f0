#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qpaec/qoperator.hpp"
#include "qpaec/sdp.hpp"

namespace qpaec {

struct EntropyResult {
  double value = 0.0;  // bits
  std::string method;  // sdp-primal | sdp-dual | closed-form-classical | purification-duality
  double gap = 0.0;    // |difference| when two methods ran, else the SDP gap in bits
};

struct EntropyOptions {
  /// Purifying registers up to this dimension trigger the hmax duality
  /// cross-check; larger states run the fidelity SDP only.
  std::size_t duality_dim_cap = 8;
  double cross_check_tol = 1e-6;
  SdpOptions sdp;
};

/// H_min(U|V) = -log2 min { Tr(sigma) : rho_UV <= I_U tensor sigma_V }.
/// target and side must partition the layout. Registers that are classical
/// (in Z, or in X after a local Hadamard) split the SDP into small blocks.
/// For fully classical states the closed form p_guess = sum_v max_u p(u, v)
/// is computed as a cross-check.
EntropyResult hmin(const QOperator& s, const std::vector<std::string>& target,
                   const std::vector<std::string>& side, const EntropyOptions& opts = {});

/// H_max(U|V) = 2 log2 max { F_root(rho_UV, I_U tensor sigma_V) : sigma >= 0,
/// Tr sigma = 1 }, via the fidelity SDP; cross-checked against
/// -H_min(U|W) on a purification when the purifier is small enough.
EntropyResult hmax(const QOperator& s, const std::vector<std::string>& target,
                   const std::vector<std::string>& side, const EntropyOptions& opts = {});

struct GuessResult {
  double value = 0.0;        // optimal success probability (unnormalized input scale)
  double povm_value = 0.0;   // achieved by the explicit POVM rounded from the duals
  double gap = 0.0;
};

/// Optimal probability of guessing the classical value of target_reg from the
/// remaining registers: the discrimination SDP max sum_x Tr(rho^x M^x) with
/// sum M^x = I, solved in covering form with the POVM recovered from the dual
/// certificates (the two values sandwich the optimum).
GuessResult pguess(const QOperator& s, const std::string& target_reg,
                   const EntropyOptions& opts = {});

/// Tr{((rho_KE - 2^{-m} I_K tensor rho_E)(I_K tensor sigma_E^{-1/2}))^2}.
/// sigma must be normalized and positive definite on the support of rho_E.
double d2(const QOperator& rho_ke, const std::string& k_reg, const QOperator& sigma_e);

/// -log2 Tr{((rho(I tensor sigma^{-1/2}))^2}. Same support condition as d2.
double h2(const QOperator& rho, const std::string& a_reg, const QOperator& sigma_e);

/// 2 log2 F_root(I_K tensor rho_E, rho_KE); requires a normalized state.
double renyi_half_down(const QOperator& rho_ke, const std::string& k_reg);
/// -log2 Tr{((rho_KE(I tensor rho_E^{-1/2}))^2}; requires a normalized state.
double renyi_two_down(const QOperator& rho_ke, const std::string& k_reg);

/// Certified lower bound on the smoothed min-entropy: the best hmin over the
/// given sub-normalized candidates, each verified to lie within purified
/// distance eps of s. The unsmoothed state itself is always included.
EntropyResult hmin_smooth_lower(const QOperator& s, const std::vector<std::string>& target,
                                const std::vector<std::string>& side, double eps,
                                const std::vector<QOperator>& candidates,
                                const EntropyOptions& opts = {});

/// Deterministic smoothing candidates from eigenvalue surgery: capping the
/// top of the spectrum and dropping the bottom, filtered to the eps-ball.
std::vector<QOperator> truncation_candidates(const QOperator& s, double eps);

/// p_guess closed form for states classical on every register.
double classical_pguess(const QOperator& s, const std::vector<std::string>& target,
                        const std::vector<std::string>& side);

}  // namespace qpaec
