#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lqfleet/model.hpp"

namespace lqfleet {

enum class ModePolicy { Mixed, HardOnly, NoneOnly, SoftOnly };

// Random small instance for the DP-vs-QP campaign: 1..5 agents with state and
// input dims in {1, 2}, horizon in [1, 10], random PSD weights, PD diagonal R,
// A scaled to spectral-norm bound 1.2, random targets and references.
Scenario random_instance(std::uint64_t seed, ModePolicy policy);

struct VerificationReport {
  int instances = 0;
  double max_open_loop_deviation = 0.0;  // DP trajectory vs stacked-QP optimum
  double max_hard_row_sum = 0.0;         // max over hard steps of ||1'Γ||_inf
  double max_gamma_target_error = 0.0;   // |1'γ - c| / max(1, |c|)
  double max_idempotence_error = 0.0;    // ||ΓΩΓ - Γ||_inf / ||Γ||_inf
  double min_P_eigenvalue = 0.0;         // over every P_t of every instance
  double max_multiplier_error = 0.0;     // stacked-QP vs per-step multiplier
  std::uint64_t worst_deviation_seed = 0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

struct VerifyTolerances {
  double open_loop = 1e-8;
  double hard_row_sum = 1e-10;
  double gamma_target = 1e-10;
  double idempotence = 1e-9;
  double min_eigenvalue = -1e-8;
  double multiplier = 1e-7;
};

// Synthesizes `count` random instances, checks DP-vs-QP open-loop agreement,
// the hard-step projection algebra, PSD of every P_t, and the sum-row
// multiplier reconciliation. Instances run OpenMP-parallel; the report is
// reduced in instance order.
VerificationReport run_verification(int count, std::uint64_t base_seed, ModePolicy policy,
                                    const VerifyTolerances& tol = {});

}  // namespace lqfleet
