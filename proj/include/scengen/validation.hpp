#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scengen/types.hpp"

namespace scengen::validation {

/// One property check: passes when observed stays within bound (direction
/// depends on the check; detail says which way).
struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

/// Sample covariance of one-step diffusive increments vs the calibrated
/// outer-product matrix, at 5 mixed IR/FX factors. scale_fault != 1 breaks
/// the driver scale on purpose (fault-injection hook).
CheckResult covariance_identity(std::uint64_t seed, Index n_scenarios, double scale_fault = 1.0, Index threads = 1);

/// Empirical mean of the default two-atom time change vs 1.00 day.
CheckResult time_change_mean(std::uint64_t seed, Index draws);

/// Two-atom time change fattens single-factor increment tails.
CheckResult kurtosis_fattening(std::uint64_t seed, Index n_scenarios);

/// Total jump count over n_scenarios at 2% falls in the binomial 99% band
/// [75, 127]; repeated over `runs` seeds, at least min_in_band must land inside.
CheckResult jump_frequency(std::uint64_t seed, Index n_scenarios, Index runs, Index min_in_band);

/// 99% VaR backtest on a correctly specified synthetic panel: violations
/// within {0..7} of the exact binomial band and ES >= VaR on every day.
CheckResult backtest_coverage(std::uint64_t seed, Index scenarios_per_day, Index window_days, Index threads = 1);

/// Frobenius error of the recovered direction operator decreases across
/// K = 250 / 1000 / 4000 in at least min_monotone of `reps` repetitions.
CheckResult convergence_monotonicity(std::uint64_t seed, Index reps, Index min_monotone);

/// Per-factor KS between calibrated-model and true one-step increments at
/// K = 4000 stays below the 99% critical value.
CheckResult convergence_ks(std::uint64_t seed, Index samples);

/// Single-driver constant-direction drift against the c^2 x closed form.
CheckResult hjm_closed_form();

/// Discounted zero-coupon bond mean over a 10-day horizon vs its initial price.
CheckResult bond_martingale(std::uint64_t seed, Index paths, Index days);

/// sigma_inverse_apply after sigma_apply is the identity, including sub-floor rates.
CheckResult sigma_roundtrip(std::uint64_t seed, Index n_states);

/// |E_{eta,M}| nonincreasing in eta and M over random panels; zero counterexamples.
CheckResult extreme_monotonicity(std::uint64_t seed, Index n_panels);

/// Byte-identical scenario CSV across repeated runs and thread counts.
CheckResult determinism(std::uint64_t seed, Index n_scenarios, Index threads);

struct Params {
  std::uint64_t seed = 0;
  Index n_scenarios = 5000;
  Index threads = 1;
  double scale_fault = 1.0;
};

/// The suite behind `scengen validate`.
std::vector<CheckResult> run_all(const Params& params);

} // namespace scengen::validation
