/*
 * Copyright 2026 The BNET Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Episodic benchmark environments: cart-pole balancing and mountain car with
// the classic-control dynamics, plus a tilting marble maze on a grid.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnet/cgp.hpp"
#include "bnet/random.hpp"
#include "bnet/trajectory.hpp"

namespace bnet {

struct EnvSpec {
    std::string name;
    std::size_t observation_dim = 0;
    std::size_t n_actions = 0;
    std::size_t max_episode_steps = 0;
    /// Solved when the mean fitness of the last `solve_window` evaluation
    /// episodes reaches `solve_threshold`.
    double solve_threshold = 0.0;
    std::size_t solve_window = 1;
};

struct StepResult {
    std::vector<double> next_state;
    double reward = 0.0;
    bool terminal = false;
    bool truncated = false;
};

class Environment {
public:
    virtual ~Environment() = default;

    virtual const EnvSpec& spec() const = 0;
    virtual std::vector<double> reset(Rng& rng) = 0;
    virtual StepResult step(std::size_t action) = 0;
    virtual std::unique_ptr<Environment> clone() const = 0;

    /// Fitness of the episode so far; the cumulative reward unless overridden.
    virtual double episode_fitness() const { return cumulative_reward_; }

    double cumulative_reward() const noexcept { return cumulative_reward_; }
    std::size_t episode_steps() const noexcept { return episode_steps_; }
    bool done() const noexcept { return done_; }

    /// Steps taken by every environment instance in this process.
    static std::uint64_t global_step_count() noexcept;

protected:
    void begin_episode();
    /// Validates the action and that the episode is still running.
    void check_step(std::size_t action) const;
    /// Books a step; sets truncation at max_episode_steps.
    void finish_step(StepResult& result);

private:
    double cumulative_reward_ = 0.0;
    std::size_t episode_steps_ = 0;
    bool done_ = true;
};

class CartPole final : public Environment {
public:
    static constexpr double kGravity = 9.8;
    static constexpr double kMassCart = 1.0;
    static constexpr double kMassPole = 0.1;
    static constexpr double kTotalMass = kMassCart + kMassPole;
    static constexpr double kLength = 0.5;  // half the pole length
    static constexpr double kPoleMassLength = kMassPole * kLength;
    static constexpr double kForceMag = 10.0;
    static constexpr double kTau = 0.02;
    static constexpr double kThetaThreshold = 12.0 * 2.0 * 3.141592653589793 / 360.0;
    static constexpr double kXThreshold = 2.4;

    explicit CartPole(std::size_t max_episode_steps = 200);

    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(Rng& rng) override;
    StepResult step(std::size_t action) override;
    std::unique_ptr<Environment> clone() const override;

    /// Starts an episode from an explicit state (x, x_dot, theta, theta_dot).
    std::vector<double> reset_to(std::span<const double> state);
    std::span<const double> state() const noexcept { return state_; }

private:
    EnvSpec spec_;
    std::vector<double> state_;
};

class MountainCar final : public Environment {
public:
    static constexpr double kMinPosition = -1.2;
    static constexpr double kMaxPosition = 0.6;
    static constexpr double kMaxSpeed = 0.07;
    static constexpr double kGoalPosition = 0.5;
    static constexpr double kGoalVelocity = 0.0;
    static constexpr double kForce = 0.001;
    static constexpr double kGravity = 0.0025;

    explicit MountainCar(std::size_t max_episode_steps = 200);

    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(Rng& rng) override;
    StepResult step(std::size_t action) override;
    std::unique_ptr<Environment> clone() const override;

    std::vector<double> reset_to(std::span<const double> state);
    std::span<const double> state() const noexcept { return state_; }

private:
    EnvSpec spec_;
    std::vector<double> state_;
};

enum class MazeCell : char { Wall = '#', Floor = '.', Start = 'S', Goal = 'G' };

/// Rectangular maze grid. Actions: 0 up, 1 right, 2 down, 3 left. A move
/// rolls the marble in a straight line until the next cell is a wall or the
/// border.
class MazeLayout {
public:
    static constexpr std::size_t kUnreachable = static_cast<std::size_t>(-1);

    /// Parses rows of `#` `.` `S` `G`; validates one start, one goal, goal reachable.
    static MazeLayout parse(std::string_view text);
    static MazeLayout load(const std::string& path);
    /// The bundled 15x15 layout (23 moves to the goal).
    static MazeLayout default_layout();

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t cell_count() const noexcept { return rows_ * cols_; }
    MazeCell at(std::size_t cell) const { return cells_[cell]; }
    std::size_t start() const noexcept { return start_; }
    std::size_t goal() const noexcept { return goal_; }
    bool is_wall(std::size_t cell) const { return cells_[cell] == MazeCell::Wall; }

    /// Cell reached by rolling from `cell` in direction `action`.
    std::size_t slide(std::size_t cell, std::size_t action) const;
    /// Minimum number of moves from each cell to the goal (kUnreachable if none).
    const std::vector<std::size_t>& distances_to_goal() const noexcept { return distance_; }
    /// BFS-optimal number of moves from start to goal.
    std::size_t optimal_moves() const { return distance_[start_]; }

    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<MazeCell> cells_;
    std::size_t start_ = 0;
    std::size_t goal_ = 0;
    std::vector<std::size_t> distance_;
};

struct GridMazeOptions {
    std::size_t max_episode_steps = 75;
    double stop_reward = -12.5;         // episode ends once cumulative reward <= this
    double detection_noise = 0.0;       // probability the observed cell is displaced
    double reward_new_cell = 0.1;
    double reward_revisit = -0.25;
    double reward_blocked = -0.75;
    double reward_goal = 10.0;
};

class GridMaze final : public Environment {
public:
    explicit GridMaze(MazeLayout layout = MazeLayout::default_layout(),
                      GridMazeOptions options = {});

    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(Rng& rng) override;
    StepResult step(std::size_t action) override;
    std::unique_ptr<Environment> clone() const override;

    /// Number of rewarded moves: moves onto a cell not visited before in this
    /// episode, the goal included.
    double episode_fitness() const override { return static_cast<double>(correct_moves_); }

    const MazeLayout& layout() const noexcept { return layout_; }
    const GridMazeOptions& options() const noexcept { return options_; }
    std::size_t position() const noexcept { return position_; }
    const std::vector<char>& visited() const noexcept { return visited_; }

private:
    std::vector<double> observe();

    MazeLayout layout_;
    GridMazeOptions options_;
    EnvSpec spec_;
    std::size_t position_ = 0;
    std::vector<char> visited_;
    std::size_t correct_moves_ = 0;
    Rng noise_rng_;
};

struct EnvironmentSettings {
    std::string name = "cartpole";    // cartpole, mountaincar or gridmaze
    std::size_t max_episode_steps = 0;  // 0 keeps the environment's default
    std::string maze_file;              // empty: the bundled layout
    double maze_noise = 0.0;
};

std::unique_ptr<Environment> make_environment(const EnvironmentSettings& settings);
const std::vector<std::string>& environment_names();

using Policy = std::function<ActionDistribution(std::span<const double>)>;

/// Runs one episode. Deterministic takes the argmax (ties to the lowest
/// action); Stochastic samples the distribution; StochasticEpsilon takes a
/// uniformly random action with probability `epsilon`, otherwise samples.
Trajectory run_episode(Environment& env, const Policy& policy, EvalMode mode, double epsilon,
                       Rng& rng);
Trajectory run_episode(Environment& env, const Phenotype& policy, EvalMode mode, double epsilon,
                       Rng& rng);

/// True when the mean of the last spec.solve_window entries reaches the
/// threshold. Histories shorter than the window are not solved.
bool is_solved(const EnvSpec& spec, std::span<const double> history);

} // namespace bnet
