#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "qpaec/qoperator.hpp"
#include "qpaec/sdp.hpp"

using namespace qpaec;
using Eigen::MatrixXcd;
using Eigen::VectorXd;
using std::complex;

namespace {

MatrixXcd random_hermitian(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXcd m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = complex<double>(u(rng), u(rng));
  return 0.5 * (m + m.adjoint().eval());
}

MatrixXcd random_pd(std::mt19937_64& rng, std::size_t d, double ridge = 0.1) {
  MatrixXcd h = random_hermitian(rng, d);
  return h * h.adjoint() + ridge * MatrixXcd::Identity(d, d);
}

}  // namespace

TEST_CASE("min Tr(sigma) subject to sigma >= rho attains Tr(rho)") {
  MatrixXcd rho = MatrixXcd::Zero(2, 2);
  rho(0, 0) = 0.3;
  rho(1, 1) = 0.7;

  SdpBuilder b;
  auto sigma = b.add_hermitian(2);
  auto dom = b.add_block(MatrixXcd::Zero(2, 2));
  b.embed_hermitian(dom, sigma, 1.0, 0);
  auto cover = b.add_block(-rho);
  b.embed_hermitian(cover, sigma, 1.0, 0);
  b.add_trace_objective(sigma, 1.0);
  b.set_start(sigma, rho + MatrixXcd::Identity(2, 2));

  SdpSolution sol = sdp_solve(std::move(b).build());
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.gap <= 1e-8);
}

TEST_CASE("min lambda with lambda I >= rho finds the largest eigenvalue") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 8; ++trial) {
    std::size_t d = 2 + trial % 4;
    MatrixXcd rho = random_hermitian(rng, d);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    double lmax = es.eigenvalues().maxCoeff();

    SdpBuilder b;
    auto lambda = b.add_hermitian(1);
    auto block = b.add_block(-rho);
    for (std::size_t i = 0; i < d; ++i) b.embed_hermitian(block, lambda, 1.0, i);
    b.add_trace_objective(lambda, 1.0);
    MatrixXcd start(1, 1);
    start(0, 0) = lmax + 1.0;
    b.set_start(lambda, start);

    SdpSolution sol = sdp_solve(std::move(b).build());
    CHECK(sol.value == doctest::Approx(lmax).epsilon(1e-7));
  }
}

TEST_CASE("random SDPs: primal and dual agree, certificates are PSD") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    std::size_t d = 2 + trial % 3;
    MatrixXcd h0 = random_hermitian(rng, d);

    // O(1)-scale problems, like the entropy SDPs this engine exists for.
    SdpBuilder b;
    auto v = b.add_hermitian(d);
    for (int blk = 0; blk < 2; ++blk) {
      auto block = b.add_block(0.3 * random_pd(rng, d) - h0);
      b.embed_hermitian(block, v, 1.0, 0);
    }
    // Compactify from above so the problem is bounded either way.
    auto cap = b.add_block(2.0 * MatrixXcd::Identity(d, d) + h0);
    b.embed_hermitian(cap, v, -1.0, 0);

    b.add_trace_objective(v, u(rng) < 0 ? -1.0 / d : 1.0 / d);
    b.set_start(v, h0);

    SdpSolution sol = sdp_solve(std::move(b).build());
    CHECK(sol.gap <= 1e-8);
    CHECK(sol.dual_value <= sol.value + 1e-8);  // weak duality
    CHECK(sol.dual_residual <= 1e-6);
    for (const auto& z : sol.duals) {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(z, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    }
    for (const auto& s : sol.slacks) {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(s, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    }
  }
}

TEST_CASE("fidelity SDP block form reproduces the eigenvalue formula") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    std::size_t d = 2 + trial % 3;
    MatrixXcd p = random_pd(rng, d, 0.05);
    MatrixXcd q = random_pd(rng, d, 0.05);
    p /= p.trace().real();
    q /= q.trace().real();

    // Closed form: F = sum of sqrt eigenvalues of sqrt(q) p sqrt(q).
    MatrixXcd sq = psd_sqrt(q);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sq * p * sq, Eigen::EigenvaluesOnly);
    double f_closed = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      f_closed += std::sqrt(std::max(0.0, es.eigenvalues()(i)));

    SdpBuilder b;
    auto xvar = b.add_complex(d, d);
    MatrixXcd constant = MatrixXcd::Zero(2 * d, 2 * d);
    constant.topLeftCorner(d, d) = p;
    constant.bottomRightCorner(d, d) = q;
    auto block = b.add_block(constant);
    b.embed_complex(block, xvar, 1.0, 0, d);
    b.add_re_trace_objective(xvar, MatrixXcd::Identity(d, d), -1.0);  // maximize Re Tr X
    b.set_start(xvar, MatrixXcd::Zero(d, d));

    SdpSolution sol = sdp_solve(std::move(b).build());
    CHECK(-sol.value == doctest::Approx(f_closed).epsilon(1e-7));
  }
}

TEST_CASE("grouped Schur elimination matches the dense path") {
  std::mt19937_64 rng(23);
  // Two independent covering problems sharing a global scalar cap:
  // minimize t with t I >= rho_k and sigma_k >= rho_k, k = 0, 1... use a
  // simpler shape: minimize sum Tr sigma_k + t, blocks sigma_k - rho_k >= 0,
  // t I - sigma_k >= 0.
  MatrixXcd r0 = random_pd(rng, 3, 0.02);
  MatrixXcd r1 = random_pd(rng, 3, 0.02);

  auto build = [&](bool grouped) {
    SdpBuilder b;
    auto s0 = b.add_hermitian(3);
    auto s1 = b.add_hermitian(3);
    auto t = b.add_hermitian(1);
    auto blk0 = b.add_block(-r0);
    b.embed_hermitian(blk0, s0, 1.0, 0);
    auto blk1 = b.add_block(-r1);
    b.embed_hermitian(blk1, s1, 1.0, 0);
    auto cap0 = b.add_block(MatrixXcd::Zero(3, 3));
    b.embed_hermitian(cap0, s0, -1.0, 0);
    for (int i = 0; i < 3; ++i) b.embed_hermitian(cap0, t, 1.0, i);
    auto cap1 = b.add_block(MatrixXcd::Zero(3, 3));
    b.embed_hermitian(cap1, s1, -1.0, 0);
    for (int i = 0; i < 3; ++i) b.embed_hermitian(cap1, t, 1.0, i);
    b.add_trace_objective(s0, 1.0);
    b.add_trace_objective(s1, 1.0);
    b.add_trace_objective(t, 1.0);
    b.set_start(s0, r0 + 0.5 * MatrixXcd::Identity(3, 3));
    b.set_start(s1, r1 + 0.5 * MatrixXcd::Identity(3, 3));
    MatrixXcd t0(1, 1);
    t0(0, 0) = (r0 + r1).cwiseAbs().maxCoeff() * 6.0 + 3.0;
    b.set_start(t, t0);
    if (grouped) {
      b.add_group({s0}, {}, {blk0, cap0});
      b.add_group({s1}, {}, {blk1, cap1});
    }
    return std::move(b).build();
  };

  SdpSolution dense = sdp_solve(build(false));
  SdpSolution grouped = sdp_solve(build(true));
  CHECK(dense.value == doctest::Approx(grouped.value).epsilon(1e-8));
  CHECK(grouped.gap <= 1e-8);
}

TEST_CASE("error paths: infeasible start, unbounded objective, bad groups") {
  // Infeasible start.
  {
    SdpBuilder b;
    auto v = b.add_hermitian(2);
    auto blk = b.add_block(-MatrixXcd::Identity(2, 2));
    b.embed_hermitian(blk, v, 1.0, 0);
    b.add_trace_objective(v, 1.0);
    b.set_start(v, MatrixXcd::Zero(2, 2));  // v - I is negative at start
    CHECK_THROWS_AS(sdp_solve(std::move(b).build()), std::invalid_argument);
  }
  // Unbounded below: minimize -x with only x >= 0.
  {
    SdpBuilder b;
    auto v = b.add_hermitian(1);
    auto blk = b.add_block(MatrixXcd::Zero(1, 1));
    b.embed_hermitian(blk, v, 1.0, 0);
    b.add_trace_objective(v, -1.0);
    MatrixXcd s0(1, 1);
    s0(0, 0) = 1.0;
    b.set_start(v, s0);
    CHECK_THROWS_AS(sdp_solve(std::move(b).build()), std::runtime_error);
  }
  // A group parameter leaking into a foreign block is rejected.
  {
    SdpBuilder b;
    auto v = b.add_hermitian(1);
    auto blk0 = b.add_block(MatrixXcd::Identity(1, 1));
    b.embed_hermitian(blk0, v, 1.0, 0);
    auto blk1 = b.add_block(MatrixXcd::Identity(1, 1));
    b.embed_hermitian(blk1, v, 1.0, 0);
    b.add_trace_objective(v, 1.0);
    MatrixXcd s0(1, 1);
    s0(0, 0) = 0.5;
    b.set_start(v, s0);
    b.add_group({v}, {}, {blk0});  // v also appears in blk1
    CHECK_THROWS_AS(std::move(b).build(), std::invalid_argument);
  }
}

TEST_CASE("determinism: two solves give bit-identical iterates") {
  std::mt19937_64 rng(31);
  MatrixXcd rho = random_pd(rng, 4, 0.05);
  auto build = [&]() {
    SdpBuilder b;
    auto lambda = b.add_hermitian(1);
    auto block = b.add_block(-rho);
    for (std::size_t i = 0; i < 4; ++i) b.embed_hermitian(block, lambda, 1.0, i);
    b.add_trace_objective(lambda, 1.0);
    MatrixXcd start(1, 1);
    start(0, 0) = rho.cwiseAbs().maxCoeff() * 4.0 + 1.0;
    b.set_start(lambda, start);
    return std::move(b).build();
  };
  SdpSolution a = sdp_solve(build());
  SdpSolution c = sdp_solve(build());
  CHECK(a.value == c.value);
  CHECK((a.x - c.x).cwiseAbs().maxCoeff() == 0.0);
}
