#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "platoon/params.hpp"
#include "platoon/rng.hpp"

namespace platoon::mopso {

/// Swarm parameters. Defaults match the reference setup: 200 particles,
/// 100 iterations, inertia 0.8, cognitive 0.9, social 1.8.
struct SwarmConfig {
  int population = 200;      // P
  int iterations = 100;      // c
  double inertia = 0.8;      // omega
  double cognitive = 0.9;    // c1
  double social = 1.8;       // c2
  int mesh_div = 10;         // alternative grid resolution
  double alpha = 3.0;        // congestion exponent
  double k_bound = 0.005;    // fairness deviation cap for the final pick
  double velocity_min = -1.5;
  double velocity_max = 1.5;
  std::uint64_t seed = 1;

  enum class InertiaSchedule { constant, exponential_increase };
  InertiaSchedule inertia_schedule = InertiaSchedule::constant;
  double inertia_cap = 1.2;  // ceiling for the exponential schedule

  /// The printed update rule is deterministic; this re-enables the usual
  /// per-draw random factors on the cognitive/social pulls.
  bool stochastic_coefficients = false;

  /// Grid resolution source: the literal rule uses the archive size, the
  /// alternative reading uses mesh_div.
  enum class GridMode { archive_size, mesh_div };
  GridMode grid_mode = GridMode::archive_size;

  /// When a trial position neither dominates nor is dominated by the
  /// current one: `dominance_gated` keeps the current position (the printed
  /// rule, which freezes particles once they reach the front),
  /// `non_dominated` accepts the move. Dominated trials are always
  /// rejected.
  enum class PositionUpdate { dominance_gated, non_dominated };
  PositionUpdate position_update = PositionUpdate::non_dominated;

  int archive_cap_factor = 2;  // archive capped at factor * population

  void validate() const;
};

/// One archive entry: integer-rounded window coordinates plus the objective
/// vector (F_K_1..F_K_N, F_age) evaluated there.
struct ArchiveMember {
  std::vector<double> position;
  std::vector<double> objective;
};

/// Mutually non-dominated set with the current grid classification.
struct ParetoArchive {
  std::vector<ArchiveMember> members;
  std::vector<std::vector<int>> grid_indices;
};

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> objective;        // of the retained position
  std::vector<double> best_position;    // p_best
  std::vector<double> best_objective;
  std::vector<double> leader_position;  // g_best drawn from the archive
  rng::Rng rng;                         // per-particle stream
};

struct Swarm {
  std::vector<Particle> particles;
  ParetoArchive archive;
  int iteration = 0;
};

/// Rounds the position to integer windows and evaluates the full objective
/// vector: N fairness deviations followed by the network average age.
std::vector<double> evaluate(std::span<const double> position,
                             std::span<const LaneScenario> lanes,
                             const NetworkParams& params);

/// Strict Pareto dominance for minimization: a <= b componentwise with at
/// least one strict improvement.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Sub-region index of one position: floor((p - W_lb) * resolution /
/// (W_ub - W_lb)) per component.
std::vector<int> grid_index(std::span<const double> position,
                            std::size_t resolution,
                            const NetworkParams& params);

/// Grid indices for every archive member at the configured resolution.
std::vector<std::vector<int>> archive_grid_indices(const ParetoArchive& archive,
                                                   const SwarmConfig& config,
                                                   const NetworkParams& params);

/// Leader-selection probabilities: 1 / congestion^alpha per member, where
/// congestion counts the members sharing its grid cell; normalized.
std::vector<double> selection_probabilities(const ParetoArchive& archive,
                                            double alpha);

/// Cumulative-threshold pick given one uniform draw in [0, 1).
std::size_t roulette_pick(std::span<const double> probs, double draw);

/// Roulette selection using the supplied generator.
std::size_t roulette_select(std::span<const double> probs, rng::Rng& rng);

/// Population with random integer positions, random velocities, personal
/// bests, the initial archive, and leaders already drawn.
Swarm init_swarm(std::span<const LaneScenario> lanes,
                 const NetworkParams& params, const SwarmConfig& config);

/// One full iteration: velocity/position updates (clamped), dominance-gated
/// position and personal-best replacement, archive merge/refilter/prune,
/// and fresh leader selection.
void step(Swarm& swarm, std::span<const LaneScenario> lanes,
          const NetworkParams& params, const SwarmConfig& config);

struct RunResult {
  ParetoArchive archive;
  WindowAssignment optimal;
  std::vector<double> optimal_objective;
};

/// Full optimization: init, `iterations` steps, then the archive member
/// with the smallest age among those meeting every fairness bound. Throws
/// infeasible_error (carrying the least-violating member) when no member
/// qualifies.
RunResult run(std::span<const LaneScenario> lanes, const NetworkParams& params,
              const SwarmConfig& config);

}  // namespace platoon::mopso
