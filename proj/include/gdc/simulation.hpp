#pragma once

// Agent-based evolutionary simulation: complete matching, imitative
// pairwise-comparison revision, optional budget-balanced payoff device.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gdc/controller.hpp"
#include "gdc/error.hpp"
#include "gdc/game.hpp"
#include "gdc/rng.hpp"

namespace gdc {

struct SimConfig {
  explicit SimConfig(PayoffMatrix g) : game(std::move(g)) {}

  long long agents = 3000;
  long long rounds = 20000;
  double revision_prob = 0.01;
  std::uint64_t seed = 1;
  PayoffMatrix game;
  std::optional<FeedbackRule> controller;
  std::vector<long long> init;  // empty: rounded equilibrium counts
};

struct RoundRecord {
  long long round = 0;
  std::vector<long long> counts;  // state in which the round is played
  double mean_payoff = 0.0;       // realized, adjustments included
  double reward = 0.0;            // paid to channel agents
  double tax = 0.0;               // collected from all agents
};

struct TimeSeries {
  int n = 0;
  long long agents = 0;
  std::vector<RoundRecord> rounds;

  /// Frequencies, one row per round.
  Eigen::MatrixXd states() const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rounds.size()), n);
    for (std::size_t t = 0; t < rounds.size(); ++t) {
      for (int i = 0; i < n; ++i) {
        out(static_cast<Eigen::Index>(t), i) =
            static_cast<double>(rounds[t].counts[i]) / static_cast<double>(agents);
      }
    }
    return out;
  }
};

/// Largest-remainder rounding of agents * x.
inline std::vector<long long> rounded_counts(const SimplexPoint& x, long long agents) {
  const int n = x.n();
  std::vector<long long> counts(n);
  std::vector<std::pair<double, int>> remainders;
  long long assigned = 0;
  for (int i = 0; i < n; ++i) {
    const double exact = x[i] * static_cast<double>(agents);
    counts[i] = static_cast<long long>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (long long k = 0; assigned < agents; ++k, ++assigned) {
    ++counts[remainders[static_cast<std::size_t>(k % n)].second];
  }
  return counts;
}

inline std::vector<long long> initial_counts(const SimConfig& cfg) {
  if (!cfg.init.empty()) return cfg.init;
  return rounded_counts(solve_interior_equilibrium(cfg.game).point, cfg.agents);
}

inline void validate(const SimConfig& cfg) {
  const int n = cfg.game.n();
  if (cfg.agents < 2) throw ValidationError("agents must be at least 2");
  if (cfg.rounds < 1) throw ValidationError("rounds must be at least 1");
  if (!(cfg.revision_prob >= 0.0 && cfg.revision_prob <= 1.0)) {
    throw ValidationError("revision_prob must lie in [0, 1]");
  }
  if (!cfg.init.empty()) {
    if (static_cast<int>(cfg.init.size()) != n) {
      throw ValidationError("init must have one count per strategy");
    }
    long long total = 0;
    for (long long c : cfg.init) {
      if (c < 0) throw ValidationError("init counts must be non-negative");
      total += c;
    }
    if (total != cfg.agents) throw ValidationError("init counts must sum to agents");
  }
  if (cfg.controller) {
    if (cfg.controller->channel.n() != n || cfg.controller->gain.size() != n) {
      throw ValidationError("controller dimension does not match the game");
    }
    if (!cfg.controller->gain.allFinite()) {
      throw ValidationError("controller gain must be finite");
    }
  }
}

/// One session. Each round:
///  1. x = counts / N;
///  2. payoff of strategy i is the expected payoff against the other N-1
///     agents, plus the payoff device's adjustment;
///  3. every agent revises with probability revision_prob: it samples
///     another agent uniformly and copies its strategy with probability
///     max(0, pi_other - pi_own) / spread, spread being the payoff range
///     over strategies in use this round;
///  4. all switches apply at once.
inline TimeSeries run_simulation(const SimConfig& cfg) {
  validate(cfg);
  const int n = cfg.game.n();
  const long long agents = cfg.agents;
  const Eigen::MatrixXd& a = cfg.game.matrix();

  std::vector<long long> counts = initial_counts(cfg);
  std::vector<int> strategy;
  strategy.reserve(static_cast<std::size_t>(agents));
  for (int i = 0; i < n; ++i) strategy.insert(strategy.end(), counts[i], i);

  TimeSeries ts;
  ts.n = n;
  ts.agents = agents;
  ts.rounds.reserve(static_cast<std::size_t>(cfg.rounds));

  const double others = static_cast<double>(agents - 1);
  Eigen::VectorXd mix(n);
  Eigen::VectorXd payoff(n);
  std::vector<std::pair<long long, int>> switches;

  for (long long round = 0; round < cfg.rounds; ++round) {
    for (int i = 0; i < n; ++i) mix(i) = static_cast<double>(counts[i]);
    payoff = a * mix;
    for (int i = 0; i < n; ++i) payoff(i) = (payoff(i) - a(i, i)) / others;

    RoundRecord rec;
    rec.round = round;
    rec.counts = counts;
    if (cfg.controller) {
      const PayoffAdjustment adj = payoff_adjustments(*cfg.controller, counts, agents);
      payoff += adj.delta;
      rec.reward = adj.reward_total;
      rec.tax = adj.tax_total;
    }
    double total = 0.0;
    double high = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (counts[i] == 0) continue;
      total += static_cast<double>(counts[i]) * payoff(i);
      high = std::max(high, payoff(i));
      low = std::min(low, payoff(i));
    }
    rec.mean_payoff = total / static_cast<double>(agents);
    ts.rounds.push_back(std::move(rec));

    const double spread = high - low;
    if (!(spread > 0.0) || cfg.revision_prob == 0.0) continue;

    switches.clear();
    for (long long agent = 0; agent < agents; ++agent) {
      StreamRng rng(cfg.seed, static_cast<std::uint64_t>(round),
                    static_cast<std::uint64_t>(agent));
      if (rng.uniform() >= cfg.revision_prob) continue;
      auto pick = static_cast<long long>(rng.uniform() * others);
      if (pick >= agent) ++pick;
      const int own = strategy[agent];
      const int seen = strategy[pick];
      const double gain = payoff(seen) - payoff(own);
      if (gain > 0.0 && rng.uniform() < gain / spread) switches.emplace_back(agent, seen);
    }
    for (const auto& [agent, next] : switches) {
      --counts[strategy[agent]];
      ++counts[next];
      strategy[agent] = next;
    }
  }
  return ts;
}

/// `sessions` independent runs; session k uses seed cfg.seed + k * seed_stride.
/// Sessions run on separate threads and results are ordered by k.
inline std::vector<TimeSeries> run_batch(const SimConfig& cfg, int sessions,
                                         std::uint64_t seed_stride) {
  if (sessions < 1) throw ValidationError("sessions must be at least 1");
  validate(cfg);
  std::vector<TimeSeries> out(static_cast<std::size_t>(sessions));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(sessions));
  const unsigned width =
      std::max(1u, std::min(std::thread::hardware_concurrency(),
                            static_cast<unsigned>(sessions)));
  for (int begin = 0; begin < sessions; begin += static_cast<int>(width)) {
    std::vector<std::jthread> workers;
    const int end = std::min(sessions, begin + static_cast<int>(width));
    for (int k = begin; k < end; ++k) {
      workers.emplace_back([&, k] {
        try {
          SimConfig session = cfg;
          session.seed = cfg.seed + static_cast<std::uint64_t>(k) * seed_stride;
          out[static_cast<std::size_t>(k)] = run_simulation(session);
        } catch (...) {
          errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace gdc
