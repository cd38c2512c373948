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

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bnet/cgp.hpp"
#include "bnet/state_batch.hpp"

namespace bnet {

enum class EvalMode { Deterministic, Stochastic, StochasticEpsilon };

std::string_view to_string(EvalMode mode);

struct Transition {
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;  // r_{t+1}
    ActionDistribution probabilities;  // as emitted by the acting policy
};

struct Trajectory {
    std::vector<Transition> transitions;
    /// Episode fitness as defined by the environment (the cumulative reward,
    /// except for the grid maze which counts correct moves).
    double fitness = 0.0;
    double total_reward = 0.0;
    /// Per-step discounted returns R_t; empty until computed.
    std::vector<double> returns;
    std::uint64_t candidate_id = 0;
    EvalMode mode = EvalMode::Deterministic;
    bool terminal = false;
    bool truncated = false;

    std::size_t size() const noexcept { return transitions.size(); }
    bool empty() const noexcept { return transitions.empty(); }
    StateBatch states() const;
};

/// R_t = r_{t+1} + gamma r_{t+2} + ..., computed backwards in one pass.
std::vector<double> discounted_returns(const Trajectory& trajectory, double gamma);

/// Fixed-size set of the highest-fitness episodes. Once full, an offered
/// episode replaces the current minimum only if strictly fitter and only while
/// the per-iteration replacement budget lasts.
class EliteArchive {
public:
    explicit EliteArchive(std::size_t capacity = 10, std::size_t replacement_budget = 2);

    /// Resets the replacement budget; call once per training iteration.
    void begin_iteration();

    bool offer(const Trajectory& trajectory);

    /// Offers a batch in descending fitness order, so a limited budget goes to
    /// the best episodes. Returns the number accepted.
    std::size_t offer_batch(std::vector<Trajectory> batch);

    /// Entries sorted by descending fitness.
    std::span<const Trajectory> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    bool full() const noexcept { return entries_.size() >= capacity_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t replacement_budget() const noexcept { return budget_; }
    std::size_t replacements_this_iteration() const noexcept { return replaced_; }
    double min_fitness() const;

    void clear() { entries_.clear(); replaced_ = 0; }

private:
    void insert_sorted(const Trajectory& trajectory);

    std::size_t capacity_;
    std::size_t budget_;
    std::size_t replaced_ = 0;
    std::vector<Trajectory> entries_;
};

/// A stored episode prepared as an imitation target: its states, the actions
/// taken, and the action distributions adapted so the taken action has
/// probability one.
struct ReferenceBehavior {
    StateBatch states;
    std::vector<std::size_t> actions;
    std::vector<double> adapted_probabilities;  // row-major T x n_actions
    std::size_t n_actions = 0;
};

ReferenceBehavior adapt_reference(const Trajectory& trajectory);
std::vector<ReferenceBehavior> reference_set(const EliteArchive& archive);

struct PoolEntry {
    std::vector<double> state;
    std::size_t action = 0;
    double ret = 0.0;
};

/// Every observed transition with its return, FIFO-bounded (critic training set).
class ExperiencePool {
public:
    explicit ExperiencePool(std::size_t capacity = 50000);

    /// Requires trajectory.returns to be computed and finite.
    void append(const Trajectory& trajectory);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t capacity() const noexcept { return capacity_; }
    const PoolEntry& operator[](std::size_t i) const { return entries_[i]; }
    const std::deque<PoolEntry>& entries() const noexcept { return entries_; }

private:
    std::size_t capacity_;
    std::deque<PoolEntry> entries_;
};

/// A stored set of episodes, e.g. for offline initialisation.
struct ExperienceSet {
    std::string env_name;
    std::size_t observation_dim = 0;
    std::size_t n_actions = 0;
    std::vector<Trajectory> episodes;
};

void write_experience(std::ostream& out, const ExperienceSet& set);
ExperienceSet read_experience(std::istream& in);
void save_experience(const std::string& path, const ExperienceSet& set);
ExperienceSet load_experience(const std::string& path);

/// Per-step CSV: iteration,candidate_type,step,action,reward,fitness
class TrajectoryLog {
public:
    static constexpr const char* kHeader = "iteration,candidate_type,step,action,reward,fitness";

    explicit TrajectoryLog(std::ostream& out);
    void write(std::size_t iteration, std::string_view candidate_type, const Trajectory& trajectory);

private:
    std::ostream& out_;
};

} // namespace bnet
