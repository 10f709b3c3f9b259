#include "pacrnn/mcmc.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "pacrnn/errors.hpp"
#include "pacrnn/format.hpp"
#include "pacrnn/parallel.hpp"

namespace pacrnn {

void ChainConfig::validate() const {
  if (steps == 0) throw InvalidInput("ChainConfig: steps must be positive");
  if (burn_in >= steps) throw InvalidInput("ChainConfig: burn_in must be < steps");
  if (thin == 0) throw InvalidInput("ChainConfig: thin must be >= 1");
  if (!(proposal_std > 0.0) || !std::isfinite(proposal_std)) {
    throw InvalidInput("ChainConfig: proposal_std must be positive");
  }
}

Chain mh_sample(const LogDensity& log_density, std::span<const double> init,
                const ChainConfig& cfg) {
  cfg.validate();
  Vector current(init.begin(), init.end());
  double current_ld = log_density(current);
  if (!std::isfinite(current_ld)) {
    throw InvalidStart("mh_sample: log-density at the initial state is not finite");
  }

  SeededRng rng(cfg.seed);
  Chain chain;
  chain.samples.reserve(cfg.retained());
  chain.log_density.reserve(cfg.retained());
  chain.step.reserve(cfg.retained());

  Vector proposal(current.size());
  for (std::size_t k = 1; k <= cfg.steps; ++k) {
    for (std::size_t i = 0; i < current.size(); ++i) {
      proposal[i] = current[i] + cfg.proposal_std * rng.normal();
    }
    ++chain.proposals;
    const double ld = log_density(proposal);
    if (ld != -std::numeric_limits<double>::infinity()) {
      if (std::isnan(ld)) throw InvalidInput("mh_sample: log-density returned NaN");
      const double log_ratio = ld - current_ld;
      if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
        current.swap(proposal);
        current_ld = ld;
        ++chain.accepted;
      }
    }
    if (k > cfg.burn_in && (k - cfg.burn_in) % cfg.thin == 0) {
      chain.samples.push_back(current);
      chain.log_density.push_back(current_ld);
      chain.step.push_back(k);
    }
  }
  return chain;
}

Chain mh_sample_chains(const LogDensity& log_density, std::span<const double> init,
                       const ChainConfig& cfg, std::size_t n_chains, std::size_t threads) {
  if (n_chains == 0) throw InvalidInput("mh_sample_chains: need at least one chain");
  std::vector<Chain> chains(n_chains);
  parallel_for(n_chains, threads, [&](std::size_t i) {
    ChainConfig c = cfg;
    c.seed = mix_seed(cfg.seed, i);
    chains[i] = mh_sample(log_density, init, c);
  });
  Chain merged;
  for (auto& c : chains) {
    merged.samples.insert(merged.samples.end(), std::make_move_iterator(c.samples.begin()),
                          std::make_move_iterator(c.samples.end()));
    merged.log_density.insert(merged.log_density.end(), c.log_density.begin(),
                              c.log_density.end());
    merged.step.insert(merged.step.end(), c.step.begin(), c.step.end());
    merged.accepted += c.accepted;
    merged.proposals += c.proposals;
  }
  return merged;
}

ChainDiagnostics chain_diagnostics(std::span<const Vector> samples, std::size_t accepted,
                                   std::size_t proposals) {
  if (samples.empty()) throw InvalidInput("chain_diagnostics: empty chain");
  if (accepted > proposals) throw InvalidInput("chain_diagnostics: accepted > proposals");
  const std::size_t d = samples.front().size();
  const double n = static_cast<double>(samples.size());
  ChainDiagnostics out;
  out.acceptance_rate =
      proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  // Shifted by the first sample: a constant chain gives exactly zero spread.
  const Vector& ref = samples.front();
  Vector shift(d, 0.0);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < d; ++i) shift[i] += s[i] - ref[i];
  for (double& m : shift) m /= n;
  out.mean.resize(d);
  out.std.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) out.mean[i] = ref[i] + shift[i];
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < d; ++i) {
      const double e = (s[i] - ref[i]) - shift[i];
      out.std[i] += e * e;
    }
  }
  for (double& v : out.std) v = std::sqrt(v / n);
  return out;
}

void write_chain_csv(std::ostream& out, const Chain& chain) {
  const std::size_t d = chain.samples.empty() ? 0 : chain.samples.front().size();
  out << "step";
  for (std::size_t i = 0; i < d; ++i) out << ",theta_" << i;
  out << ",log_density\n";
  for (std::size_t r = 0; r < chain.samples.size(); ++r) {
    out << chain.step[r];
    for (double x : chain.samples[r]) out << ',' << format_double(x);
    out << ',' << format_double(chain.log_density[r]) << '\n';
  }
}

}  // namespace pacrnn
