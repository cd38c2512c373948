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

#include "bnet/env.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include "bnet/error.hpp"

namespace bnet {

namespace {

std::atomic<std::uint64_t> g_steps{0};

constexpr std::string_view kDefaultMaze =
    "###############\n"
    "#G...##..#..###\n"
    "#...##...#.##.#\n"
    "#.#....#....###\n"
    "#..#.......#.##\n"
    "#.##...#.###..#\n"
    "#####.##.#...##\n"
    "##.###.#.#....#\n"
    "###.........###\n"
    "###.#.##...#..#\n"
    "#...#.#..######\n"
    "##.....#..#.#.#\n"
    "####....#.###.#\n"
    "#.#..##......S#\n"
    "###############\n";

} // namespace

// ---------------------------------------------------------------------------
// Environment

std::uint64_t Environment::global_step_count() noexcept { return g_steps.load(); }

void Environment::begin_episode() {
    cumulative_reward_ = 0.0;
    episode_steps_ = 0;
    done_ = false;
}

void Environment::check_step(std::size_t action) const {
    if (done_) throw InvalidArgument(spec().name + ": step after episode end (call reset)");
    if (action >= spec().n_actions)
        throw InvalidArgument(spec().name + ": action " + std::to_string(action) +
                              " out of range");
}

void Environment::finish_step(StepResult& result) {
    ++g_steps;
    ++episode_steps_;
    cumulative_reward_ += result.reward;
    if (!result.terminal && episode_steps_ >= spec().max_episode_steps) result.truncated = true;
    done_ = result.terminal || result.truncated;
}

// ---------------------------------------------------------------------------
// CartPole

CartPole::CartPole(std::size_t max_episode_steps)
    : spec_{"cartpole", 4, 2, max_episode_steps, 195.0, 100}, state_(4, 0.0) {}

std::vector<double> CartPole::reset(Rng& rng) {
    for (double& v : state_) v = uniform(rng, -0.05, 0.05);
    begin_episode();
    return state_;
}

std::vector<double> CartPole::reset_to(std::span<const double> state) {
    if (state.size() != 4) throw InvalidArgument("cartpole: state must have 4 entries");
    state_.assign(state.begin(), state.end());
    begin_episode();
    return state_;
}

StepResult CartPole::step(std::size_t action) {
    check_step(action);
    double x = state_[0], x_dot = state_[1], theta = state_[2], theta_dot = state_[3];
    const double force = action == 1 ? kForceMag : -kForceMag;
    const double costheta = std::cos(theta);
    const double sintheta = std::sin(theta);
    const double temp = (force + kPoleMassLength * (theta_dot * theta_dot) * sintheta) / kTotalMass;
    const double thetaacc = (kGravity * sintheta - costheta * temp) /
                            (kLength * (4.0 / 3.0 - kMassPole * (costheta * costheta) / kTotalMass));
    const double xacc = temp - kPoleMassLength * thetaacc * costheta / kTotalMass;
    x = x + kTau * x_dot;
    x_dot = x_dot + kTau * xacc;
    theta = theta + kTau * theta_dot;
    theta_dot = theta_dot + kTau * thetaacc;
    state_ = {x, x_dot, theta, theta_dot};

    StepResult r;
    r.next_state = state_;
    r.terminal = x < -kXThreshold || x > kXThreshold || theta < -kThetaThreshold ||
                 theta > kThetaThreshold;
    r.reward = 1.0;
    finish_step(r);
    return r;
}

std::unique_ptr<Environment> CartPole::clone() const { return std::make_unique<CartPole>(*this); }

// ---------------------------------------------------------------------------
// MountainCar

MountainCar::MountainCar(std::size_t max_episode_steps)
    : spec_{"mountaincar", 2, 3, max_episode_steps, -110.0, 100}, state_(2, 0.0) {}

std::vector<double> MountainCar::reset(Rng& rng) {
    state_ = {uniform(rng, -0.6, -0.4), 0.0};
    begin_episode();
    return state_;
}

std::vector<double> MountainCar::reset_to(std::span<const double> state) {
    if (state.size() != 2) throw InvalidArgument("mountaincar: state must have 2 entries");
    state_.assign(state.begin(), state.end());
    begin_episode();
    return state_;
}

StepResult MountainCar::step(std::size_t action) {
    check_step(action);
    double position = state_[0], velocity = state_[1];
    velocity += (static_cast<double>(action) - 1.0) * kForce + std::cos(3 * position) * (-kGravity);
    velocity = std::clamp(velocity, -kMaxSpeed, kMaxSpeed);
    position += velocity;
    position = std::clamp(position, kMinPosition, kMaxPosition);
    if (position == kMinPosition && velocity < 0) velocity = 0;
    state_ = {position, velocity};

    StepResult r;
    r.next_state = state_;
    r.terminal = position >= kGoalPosition && velocity >= kGoalVelocity;
    r.reward = -1.0;
    finish_step(r);
    return r;
}

std::unique_ptr<Environment> MountainCar::clone() const {
    return std::make_unique<MountainCar>(*this);
}

// ---------------------------------------------------------------------------
// MazeLayout

MazeLayout MazeLayout::parse(std::string_view text) {
    MazeLayout m;
    std::vector<std::string> lines;
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw InvalidArgument("maze: empty layout");
    m.rows_ = lines.size();
    m.cols_ = lines.front().size();
    std::size_t starts = 0, goals = 0;
    for (std::size_t r = 0; r < m.rows_; ++r) {
        if (lines[r].size() != m.cols_)
            throw InvalidArgument("maze: row " + std::to_string(r + 1) + " has length " +
                                  std::to_string(lines[r].size()) + ", expected " +
                                  std::to_string(m.cols_));
        for (std::size_t c = 0; c < m.cols_; ++c) {
            const char ch = lines[r][c];
            const std::size_t cell = r * m.cols_ + c;
            switch (ch) {
            case '#': m.cells_.push_back(MazeCell::Wall); break;
            case '.': m.cells_.push_back(MazeCell::Floor); break;
            case 'S': m.cells_.push_back(MazeCell::Start); m.start_ = cell; ++starts; break;
            case 'G': m.cells_.push_back(MazeCell::Goal); m.goal_ = cell; ++goals; break;
            default:
                throw InvalidArgument("maze: unexpected character '" + std::string(1, ch) +
                                      "' at row " + std::to_string(r + 1));
            }
        }
    }
    if (starts != 1) throw InvalidArgument("maze: expected exactly one start cell");
    if (goals != 1) throw InvalidArgument("maze: expected exactly one goal cell");

    // Reverse BFS over the slide graph.
    const std::size_t n = m.cell_count();
    std::vector<std::vector<std::size_t>> predecessors(n);
    for (std::size_t cell = 0; cell < n; ++cell) {
        if (m.is_wall(cell)) continue;
        for (std::size_t a = 0; a < 4; ++a) {
            const std::size_t to = m.slide(cell, a);
            if (to != cell) predecessors[to].push_back(cell);
        }
    }
    m.distance_.assign(n, kUnreachable);
    std::deque<std::size_t> queue{m.goal_};
    m.distance_[m.goal_] = 0;
    while (!queue.empty()) {
        const std::size_t cell = queue.front();
        queue.pop_front();
        for (std::size_t p : predecessors[cell]) {
            if (m.distance_[p] != kUnreachable) continue;
            m.distance_[p] = m.distance_[cell] + 1;
            queue.push_back(p);
        }
    }
    if (m.distance_[m.start_] == kUnreachable)
        throw InvalidArgument("maze: goal is not reachable from start");
    return m;
}

MazeLayout MazeLayout::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read maze from '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

MazeLayout MazeLayout::default_layout() { return parse(kDefaultMaze); }

std::size_t MazeLayout::slide(std::size_t cell, std::size_t action) const {
    static constexpr int kDr[4] = {-1, 0, 1, 0};
    static constexpr int kDc[4] = {0, 1, 0, -1};
    if (action >= 4) throw InvalidArgument("maze: action out of range");
    auto r = static_cast<long>(cell / cols_);
    auto c = static_cast<long>(cell % cols_);
    for (;;) {
        const long nr = r + kDr[action];
        const long nc = c + kDc[action];
        if (nr < 0 || nc < 0 || nr >= static_cast<long>(rows_) || nc >= static_cast<long>(cols_))
            break;
        if (is_wall(static_cast<std::size_t>(nr) * cols_ + static_cast<std::size_t>(nc))) break;
        r = nr;
        c = nc;
    }
    return static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c);
}

std::string MazeLayout::to_string() const {
    std::string out;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) out.push_back(static_cast<char>(cells_[r * cols_ + c]));
        out.push_back('\n');
    }
    return out;
}

// ---------------------------------------------------------------------------
// GridMaze

GridMaze::GridMaze(MazeLayout layout, GridMazeOptions options)
    : layout_(std::move(layout)), options_(options) {
    if (!(options_.detection_noise >= 0.0 && options_.detection_noise <= 1.0))
        throw InvalidArgument("gridmaze: detection noise must lie in [0, 1]");
    spec_ = {"gridmaze", layout_.cell_count(), 4, options_.max_episode_steps,
             static_cast<double>(layout_.optimal_moves()), 1};
}

std::vector<double> GridMaze::reset(Rng& rng) {
    noise_rng_.seed(rng());
    position_ = layout_.start();
    visited_.assign(layout_.cell_count(), 0);
    visited_[position_] = 1;
    correct_moves_ = 0;
    begin_episode();
    return observe();
}

std::vector<double> GridMaze::observe() {
    std::size_t cell = position_;
    if (options_.detection_noise > 0.0 && bernoulli(noise_rng_, options_.detection_noise)) {
        std::vector<std::size_t> neighbours;
        const std::size_t r = cell / layout_.cols(), c = cell % layout_.cols();
        if (r > 0) neighbours.push_back(cell - layout_.cols());
        if (c + 1 < layout_.cols()) neighbours.push_back(cell + 1);
        if (r + 1 < layout_.rows()) neighbours.push_back(cell + layout_.cols());
        if (c > 0) neighbours.push_back(cell - 1);
        std::erase_if(neighbours, [&](std::size_t n) { return layout_.is_wall(n); });
        if (!neighbours.empty()) cell = neighbours[uniform_index(noise_rng_, neighbours.size())];
    }
    std::vector<double> obs(layout_.cell_count(), 0.0);
    obs[cell] = 1.0;
    return obs;
}

StepResult GridMaze::step(std::size_t action) {
    check_step(action);
    const std::size_t to = layout_.slide(position_, action);
    StepResult r;
    if (to == position_) {
        r.reward = options_.reward_blocked;
    } else if (to == layout_.goal()) {
        r.reward = options_.reward_goal;
        r.terminal = true;
        ++correct_moves_;
    } else if (visited_[to]) {
        r.reward = options_.reward_revisit;
    } else {
        r.reward = options_.reward_new_cell;
        ++correct_moves_;
    }
    position_ = to;
    visited_[to] = 1;
    if (!r.terminal && cumulative_reward() + r.reward <= options_.stop_reward) r.terminal = true;
    r.next_state = observe();
    finish_step(r);
    return r;
}

std::unique_ptr<Environment> GridMaze::clone() const { return std::make_unique<GridMaze>(*this); }

// ---------------------------------------------------------------------------
// Episodes

Trajectory run_episode(Environment& env, const Policy& policy, EvalMode mode, double epsilon,
                       Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw InvalidArgument("run_episode: epsilon must lie in [0, 1]");
    const std::size_t n_actions = env.spec().n_actions;
    Trajectory traj;
    traj.mode = mode;
    std::vector<double> state = env.reset(rng);
    while (true) {
        ActionDistribution dist = policy(state);
        if (dist.size() != n_actions)
            throw InvalidArgument("run_episode: policy emits " + std::to_string(dist.size()) +
                                  " probabilities for " + std::to_string(n_actions) + " actions");
        for (double p : dist.probabilities)
            if (!std::isfinite(p)) throw NumericError("run_episode: non-finite policy output");

        std::size_t action = 0;
        auto sample = [&] {
            const double u = uniform01(rng);
            double cum = 0.0;
            for (std::size_t a = 0; a < n_actions; ++a) {
                cum += dist[a];
                if (u < cum) return a;
            }
            return n_actions - 1;
        };
        switch (mode) {
        case EvalMode::Deterministic: action = dist.argmax(); break;
        case EvalMode::Stochastic: action = sample(); break;
        case EvalMode::StochasticEpsilon:
            action = bernoulli(rng, epsilon) ? uniform_index(rng, n_actions) : sample();
            break;
        }
        StepResult r = env.step(action);
        traj.total_reward += r.reward;
        traj.transitions.push_back({std::move(state), action, r.reward, std::move(dist)});
        state = std::move(r.next_state);
        if (r.terminal || r.truncated) {
            traj.terminal = r.terminal;
            traj.truncated = r.truncated;
            break;
        }
    }
    traj.fitness = env.episode_fitness();
    return traj;
}

Trajectory run_episode(Environment& env, const Phenotype& policy, EvalMode mode, double epsilon,
                       Rng& rng) {
    return run_episode(
        env, [&](std::span<const double> s) { return policy.forward(s); }, mode, epsilon, rng);
}

std::unique_ptr<Environment> make_environment(const EnvironmentSettings& settings) {
    if (settings.name == "cartpole")
        return std::make_unique<CartPole>(settings.max_episode_steps ? settings.max_episode_steps : 200);
    if (settings.name == "mountaincar")
        return std::make_unique<MountainCar>(settings.max_episode_steps ? settings.max_episode_steps : 200);
    if (settings.name == "gridmaze") {
        GridMazeOptions options;
        if (settings.max_episode_steps) options.max_episode_steps = settings.max_episode_steps;
        options.detection_noise = settings.maze_noise;
        MazeLayout layout = settings.maze_file.empty() ? MazeLayout::default_layout()
                                                       : MazeLayout::load(settings.maze_file);
        return std::make_unique<GridMaze>(std::move(layout), options);
    }
    throw InvalidArgument("unknown environment '" + settings.name + "'");
}

const std::vector<std::string>& environment_names() {
    static const std::vector<std::string> names{"cartpole", "mountaincar", "gridmaze"};
    return names;
}

bool is_solved(const EnvSpec& spec, std::span<const double> history) {
    if (history.empty()) throw InvalidArgument("is_solved: empty evaluation history");
    if (history.size() < spec.solve_window) return false;
    const auto tail = history.last(spec.solve_window);
    const double mean =
        std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
    return mean >= spec.solve_threshold;
}

} // namespace bnet
