#include "platoon/mopso.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "platoon/aoi.hpp"
#include "platoon/dcf.hpp"
#include "platoon/errors.hpp"
#include "platoon/fairness.hpp"
#include "platoon/geometry.hpp"

namespace platoon::mopso {

void SwarmConfig::validate() const {
  if (population < 2) throw std::invalid_argument("population: must be at least 2");
  if (iterations < 1) throw std::invalid_argument("iterations: must be at least 1");
  if (mesh_div < 1) throw std::invalid_argument("mesh_div: must be at least 1");
  if (!(k_bound > 0.0)) throw std::invalid_argument("k_bound: must be positive");
  if (!(velocity_min < velocity_max))
    throw std::invalid_argument("velocity_min: must be below velocity_max");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha: must be non-negative");
  if (archive_cap_factor < 1)
    throw std::invalid_argument("archive_cap_factor: must be at least 1");
  if (!(inertia > 0.0)) throw std::invalid_argument("inertia: must be positive");
  if (!(inertia_cap >= inertia))
    throw std::invalid_argument("inertia_cap: must be at least the base inertia");
}

namespace {

std::vector<double> rounded(std::span<const double> position) {
  std::vector<double> out;
  out.reserve(position.size());
  for (double x : position) out.push_back(static_cast<double>(std::llround(x)));
  return out;
}

// Non-domination insert with position dedupe (positions are pre-rounded, so
// a coordinate-equal member would carry the identical objective).
void archive_insert(ParetoArchive& archive, std::vector<double> position,
                    const std::vector<double>& objective) {
  for (const auto& member : archive.members) {
    if (member.position == position) return;
    if (dominates(member.objective, objective)) return;
  }
  std::erase_if(archive.members, [&](const ArchiveMember& member) {
    return dominates(objective, member.objective);
  });
  archive.members.push_back({std::move(position), objective});
}

double inertia_at(const SwarmConfig& config, int iteration) {
  if (config.inertia_schedule == SwarmConfig::InertiaSchedule::constant)
    return config.inertia;
  const double steps = std::max(1, config.iterations - 1);
  const double omega =
      config.inertia *
      std::pow(config.inertia_cap / config.inertia, iteration / steps);
  return std::min(omega, config.inertia_cap);
}

// Drops members from the most congested cells until the cap holds; the
// newest member of the fullest cell goes first, so sparse (extreme) regions
// survive pruning.
void prune_archive(ParetoArchive& archive, const SwarmConfig& config,
                   const NetworkParams& params) {
  const std::size_t cap =
      static_cast<std::size_t>(config.archive_cap_factor) *
      static_cast<std::size_t>(config.population);
  while (archive.members.size() > cap) {
    const auto indices = archive_grid_indices(archive, config, params);
    std::map<std::vector<int>, int> congestion;
    for (const auto& cell : indices) ++congestion[cell];
    std::size_t victim = 0;
    int worst = 0;
    for (std::size_t i = 0; i < archive.members.size(); ++i) {
      const int load = congestion[indices[i]];
      if (load >= worst) {  // >=: latest member of the fullest cell
        worst = load;
        victim = i;
      }
    }
    archive.members.erase(archive.members.begin() +
                          static_cast<std::ptrdiff_t>(victim));
  }
}

// Recomputes grid indices and re-draws every particle's leader from the
// congestion-weighted roulette.
void refresh_leaders(Swarm& swarm, const SwarmConfig& config,
                     const NetworkParams& params) {
  swarm.archive.grid_indices =
      archive_grid_indices(swarm.archive, config, params);
  const auto probs = selection_probabilities(swarm.archive, config.alpha);
  for (auto& particle : swarm.particles) {
    const std::size_t pick = roulette_select(probs, particle.rng);
    particle.leader_position = swarm.archive.members[pick].position;
  }
}

}  // namespace

std::vector<double> evaluate(std::span<const double> position,
                             std::span<const LaneScenario> lanes,
                             const NetworkParams& params) {
  if (position.size() != lanes.size())
    throw std::invalid_argument("evaluate: position/lanes mismatch");
  WindowAssignment assignment;
  assignment.windows.reserve(position.size());
  for (double x : position)
    assignment.windows.push_back(static_cast<int>(std::llround(x)));
  assignment.validate(params);
  const auto counts = geom::lane_counts(lanes, params);
  auto objective = fairness::fairness_objectives(lanes, assignment, params);
  const auto rates = dcf::make_shs_rates(assignment, counts, params);
  objective.push_back(aoi::network_average_age(rates).network_age);
  return objective;
}

bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("dominates: objective length mismatch");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

std::vector<int> grid_index(std::span<const double> position,
                            std::size_t resolution,
                            const NetworkParams& params) {
  const double span = params.window_ub - params.window_lb;
  std::vector<int> index;
  index.reserve(position.size());
  for (double x : position) {
    if (span <= 0.0) {
      index.push_back(0);
      continue;
    }
    index.push_back(static_cast<int>(std::floor(
        (x - params.window_lb) * static_cast<double>(resolution) / span)));
  }
  return index;
}

std::vector<std::vector<int>> archive_grid_indices(const ParetoArchive& archive,
                                                   const SwarmConfig& config,
                                                   const NetworkParams& params) {
  const std::size_t resolution =
      config.grid_mode == SwarmConfig::GridMode::archive_size
          ? archive.members.size()
          : static_cast<std::size_t>(config.mesh_div);
  std::vector<std::vector<int>> indices;
  indices.reserve(archive.members.size());
  for (const auto& member : archive.members)
    indices.push_back(grid_index(member.position, resolution, params));
  return indices;
}

std::vector<double> selection_probabilities(const ParetoArchive& archive,
                                            double alpha) {
  if (archive.members.empty())
    throw std::invalid_argument("selection_probabilities: empty archive");
  if (archive.grid_indices.size() != archive.members.size())
    throw std::invalid_argument("selection_probabilities: stale grid indices");
  std::map<std::vector<int>, int> congestion;
  for (const auto& cell : archive.grid_indices) ++congestion[cell];
  std::vector<double> probs;
  probs.reserve(archive.members.size());
  double total = 0.0;
  for (const auto& cell : archive.grid_indices) {
    const double p = std::pow(1.0 / congestion[cell], alpha);
    probs.push_back(p);
    total += p;
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::size_t roulette_pick(std::span<const double> probs, double draw) {
  if (probs.empty()) throw std::invalid_argument("roulette_pick: empty vector");
  double total = 0.0;
  for (double p : probs) total += p;
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("roulette_pick: probabilities must sum to 1");
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (draw < cumulative) return i;
  }
  return probs.size() - 1;  // draw landed on accumulated rounding
}

std::size_t roulette_select(std::span<const double> probs, rng::Rng& rng) {
  return roulette_pick(probs, rng.uniform());
}

Swarm init_swarm(std::span<const LaneScenario> lanes,
                 const NetworkParams& params, const SwarmConfig& config) {
  params.validate();
  config.validate();
  if (lanes.empty()) throw std::invalid_argument("init_swarm: no lanes");
  Swarm swarm;
  swarm.particles.reserve(static_cast<std::size_t>(config.population));
  for (int m = 0; m < config.population; ++m) {
    Particle particle{.position = {},
                      .velocity = {},
                      .objective = {},
                      .best_position = {},
                      .best_objective = {},
                      .leader_position = {},
                      .rng = rng::Rng::stream(config.seed,
                                              static_cast<std::uint64_t>(m))};
    particle.position.reserve(lanes.size());
    particle.velocity.reserve(lanes.size());
    for (std::size_t d = 0; d < lanes.size(); ++d)
      particle.position.push_back(static_cast<double>(
          particle.rng.uniform_int(params.window_lb, params.window_ub)));
    for (std::size_t d = 0; d < lanes.size(); ++d)
      particle.velocity.push_back(
          particle.rng.uniform(config.velocity_min, config.velocity_max));
    particle.objective = evaluate(particle.position, lanes, params);
    particle.best_position = particle.position;
    particle.best_objective = particle.objective;
    swarm.particles.push_back(std::move(particle));
  }
  for (const auto& particle : swarm.particles)
    archive_insert(swarm.archive, rounded(particle.best_position),
                   particle.best_objective);
  prune_archive(swarm.archive, config, params);
  refresh_leaders(swarm, config, params);
  return swarm;
}

void step(Swarm& swarm, std::span<const LaneScenario> lanes,
          const NetworkParams& params, const SwarmConfig& config) {
  const double omega = inertia_at(config, swarm.iteration);
  for (auto& particle : swarm.particles) {
    std::vector<double> trial(particle.position.size());
    for (std::size_t d = 0; d < particle.position.size(); ++d) {
      double pull_best = config.cognitive;
      double pull_leader = config.social;
      if (config.stochastic_coefficients) {
        pull_best *= particle.rng.uniform();
        pull_leader *= particle.rng.uniform();
      }
      double v = omega * particle.velocity[d] +
                 pull_best * (particle.best_position[d] - particle.position[d]) +
                 pull_leader *
                     (particle.leader_position[d] - particle.position[d]);
      v = std::clamp(v, config.velocity_min, config.velocity_max);
      particle.velocity[d] = v;
      trial[d] = std::clamp(particle.position[d] + v,
                            static_cast<double>(params.window_lb),
                            static_cast<double>(params.window_ub));
    }
    const auto trial_objective = evaluate(trial, lanes, params);
    // Every evaluated candidate competes for the archive, whether or not
    // the particle keeps it.
    archive_insert(swarm.archive, rounded(trial), trial_objective);
    const bool accept =
        config.position_update == SwarmConfig::PositionUpdate::dominance_gated
            ? dominates(trial_objective, particle.objective)
            : !dominates(particle.objective, trial_objective);
    if (accept) {
      particle.position = std::move(trial);
      particle.objective = trial_objective;
    }
    if (dominates(particle.objective, particle.best_objective)) {
      particle.best_position = particle.position;
      particle.best_objective = particle.objective;
    }
  }
  for (const auto& particle : swarm.particles)
    archive_insert(swarm.archive, rounded(particle.best_position),
                   particle.best_objective);
  prune_archive(swarm.archive, config, params);
  refresh_leaders(swarm, config, params);
  ++swarm.iteration;
}

RunResult run(std::span<const LaneScenario> lanes, const NetworkParams& params,
              const SwarmConfig& config) {
  Swarm swarm = init_swarm(lanes, params, config);
  for (int t = 0; t < config.iterations; ++t) step(swarm, lanes, params, config);

  const std::size_t objectives = lanes.size() + 1;
  const ArchiveMember* best = nullptr;
  const ArchiveMember* least_violating = nullptr;
  double least_violation = 0.0;
  for (const auto& member : swarm.archive.members) {
    double violation = 0.0;
    for (std::size_t i = 0; i + 1 < objectives; ++i)
      violation = std::max(violation, member.objective[i] - config.k_bound);
    if (violation <= 0.0) {
      if (best == nullptr ||
          member.objective.back() < best->objective.back())
        best = &member;
    } else if (least_violating == nullptr || violation < least_violation) {
      least_violating = &member;
      least_violation = violation;
    }
  }
  if (best == nullptr) {
    std::vector<int> windows;
    if (least_violating != nullptr)
      for (double x : least_violating->position)
        windows.push_back(static_cast<int>(std::llround(x)));
    throw infeasible_error(
        "run: no archive member satisfies every fairness bound",
        least_violation, std::move(windows));
  }

  RunResult result;
  for (double x : best->position)
    result.optimal.windows.push_back(static_cast<int>(std::llround(x)));
  result.optimal_objective = best->objective;
  result.archive = std::move(swarm.archive);
  return result;
}

}  // namespace platoon::mopso
