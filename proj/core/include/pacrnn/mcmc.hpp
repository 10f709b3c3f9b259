#pragma once

// Gaussian random-walk Metropolis-Hastings.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "pacrnn/numerics.hpp"

namespace pacrnn {

/// Log of an unnormalised density; -infinity outside the support.
using LogDensity = std::function<double(std::span<const double>)>;

struct ChainConfig {
  std::size_t steps = 1000;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  double proposal_std = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
  /// floor((steps - burn_in) / thin)
  std::size_t retained() const noexcept { return (steps - burn_in) / thin; }
};

struct Chain {
  std::vector<Vector> samples;       // retained states
  std::vector<double> log_density;   // target log-density at each retained state
  std::vector<std::size_t> step;     // chain step index of each retained state
  std::size_t accepted = 0;          // accepted proposals over all steps
  std::size_t proposals = 0;
};

/// Runs `cfg.steps` proposals from `init`. After step k (1-based) the
/// current state is retained when k > burn_in and (k - burn_in) % thin == 0.
/// Proposals with -infinity log-density are rejected without drawing the
/// acceptance uniform. Throws InvalidStart when log_density(init) is not
/// finite.
Chain mh_sample(const LogDensity& log_density, std::span<const double> init,
                const ChainConfig& cfg);

/// Independent chains with seeds mix_seed(cfg.seed, i), run concurrently on
/// up to `threads` threads and concatenated in chain-index order.
Chain mh_sample_chains(const LogDensity& log_density, std::span<const double> init,
                       const ChainConfig& cfg, std::size_t n_chains, std::size_t threads = 1);

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  Vector mean;
  Vector std;  // population standard deviation
};

/// Throws InvalidInput on an empty sample set or when accepted > proposals.
ChainDiagnostics chain_diagnostics(std::span<const Vector> samples, std::size_t accepted,
                                   std::size_t proposals);

/// CSV with columns step, theta_0..theta_{d-1}, log_density.
void write_chain_csv(std::ostream& out, const Chain& chain);

}  // namespace pacrnn
