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

// The training loop: evaluate the population, update the experience stores
// and the critic, keep a robust champion, and generate the next candidates
// by mutation, behavior search and surrogate search.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bnet/cgp.hpp"
#include "bnet/critic.hpp"
#include "bnet/ea.hpp"
#include "bnet/env.hpp"
#include "bnet/selection.hpp"
#include "bnet/surrogate.hpp"
#include "bnet/trajectory.hpp"

namespace bnet {

enum class Generator { Mutant, BDist, Cross, Surrogate };
std::string_view to_string(Generator g);

/// Where the per-step weights of the behavior losses come from.
enum class WeightSource { Critic, Reward };
std::string_view to_string(WeightSource w);

/// Per-step loss weights of a stored episode: the critic's advantages, or the
/// immediate rewards.
std::vector<double> step_weights(const Trajectory& trajectory, WeightSource source,
                                 const ValueNet* critic = nullptr);

/// Named generator sets: base, bdist, cross, surr, mut, bdist+cross.
std::vector<Generator> variant_generators(std::string_view variant);
const std::vector<std::string>& variant_names();

struct TrainerConfig {
    EnvironmentSettings env;
    std::string variant = "base";
    std::vector<Generator> generators = variant_generators("base");
    std::uint64_t seed = 1;

    std::uint64_t max_env_steps = 50000;
    std::size_t max_iterations = 0;  // 0: no limit besides the step budget
    std::size_t initial_population = 5;

    EvalMode init_mode = EvalMode::Deterministic;
    double init_epsilon = 0.0;
    EvalMode mutant_mode = EvalMode::Deterministic;
    double mutant_epsilon = 0.0;
    /// Generate the mutant every iteration even if the variant does not.
    bool always_mutant = false;

    WeightSource weighting = WeightSource::Critic;
    double gamma = 0.99;
    std::size_t repeats = 3;        // r of the robust selection
    std::size_t solve_episodes = 0;  // 0: the environment's solve window
    std::optional<double> solve_threshold;

    CgpConfig cgp;
    double mutant_rate = 0.01;
    EaConfig behavior_search{20, 2, 1000, 0.05, {}};
    EaConfig surrogate_search{8, 2, 500, 0.05, {}};
    std::size_t surrogate_capacity = 100;
    std::size_t surrogate_states = 0;  // states kept per record, 0 = all
    KrigingBounds kriging;

    CriticTrainConfig critic;
    std::vector<std::size_t> critic_hidden{128, 64};
    std::size_t pool_capacity = 50000;
    std::size_t archive_size = 10;
    std::size_t archive_budget = 2;

    void validate() const;
};

/// Defaults for an environment: repeats, exploration, weighting and budgets.
TrainerConfig default_config(std::string_view env_name);

struct CandidateResult {
    std::string type;
    std::uint64_t id = 0;
    double fitness = 0.0;
};

struct IterationReport {
    std::size_t iteration = 0;
    /// The champion's re-evaluation (if any) and every fresh candidate.
    std::vector<CandidateResult> candidates;
    std::uint64_t champion_id = 0;
    double champion_mean = 0.0;  // after this iteration's selection
    std::size_t champion_samples = 0;
    std::uint64_t env_steps = 0;
    /// Generator of the best fresh candidate, "champion" if none beat the
    /// champion's mean, "initial" in the first iteration.
    std::string best_type;
    bool solved = false;
};

struct SelectionEvent {
    std::size_t iteration;
    std::uint64_t challenger_id;
    double challenger_mean;
    double champion_mean;
    bool promoted;
};

struct RunResult {
    bool solved = false;
    std::uint64_t steps_to_solve = 0;
    std::uint64_t env_steps = 0;
    std::uint64_t solve_check_steps = 0;
    std::size_t iterations = 0;
    std::vector<IterationReport> reports;
    std::vector<SelectionEvent> selections;
    std::optional<Genome> champion;
    double champion_mean = 0.0;
    std::map<std::string, std::size_t> best_type_counts;
};

class Trainer {
public:
    explicit Trainer(TrainerConfig config);
    ~Trainer();
    Trainer(const Trainer&) = delete;
    Trainer& operator=(const Trainer&) = delete;

    const TrainerConfig& config() const noexcept { return config_; }
    const EnvSpec& env_spec() const;

    /// Creates random initial candidates (also done lazily by step()).
    void initialize();
    /// Creates the initial candidates by behavior search towards stored
    /// episodes, without touching the environment. Also seeds the archives.
    void initialize_offline(const ExperienceSet& experience);

    /// Runs one iteration. Returns false once solved, out of budget or at the
    /// iteration limit (no work is done then).
    bool step();
    /// Runs to completion and returns the result.
    RunResult run();

    bool finished() const noexcept;
    const RunResult& result() const noexcept;

    /// Every trajectory evaluated during training (not solve checks), as
    /// episodes, e.g. for offline initialisation of another run.
    ExperienceSet experience() const;
    const EliteArchive& archive() const noexcept;
    const ExperiencePool& pool() const noexcept;
    std::vector<Genome> pending_genomes() const;

    /// Optional per-step trajectory CSV.
    void set_trajectory_log(std::ostream* out);

private:
    struct State;
    TrainerConfig config_;
    std::unique_ptr<State> s_;
};

void write_trace_csv(std::ostream& out, const RunResult& result);
void write_selection_csv(std::ostream& out, const RunResult& result);

inline constexpr const char* kTraceHeader =
    "iteration,env_steps,champion_mean,candidate_type,candidate_fitness,best_type";
inline constexpr const char* kSelectionHeader =
    "iteration,challenger_id,challenger_mean,champion_mean,promoted";

struct BenchRun {
    std::uint64_t seed = 0;
    bool solved = false;
    /// Steps to solve, or the budget for unsolved (censored) runs.
    std::uint64_t steps = 0;
    std::size_t iterations = 0;
    std::string error;  // non-empty if the run failed
};

struct BenchSummary {
    std::vector<BenchRun> runs;
    std::size_t successes = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

/// Independent runs of `config` with each seed, spread over `workers` threads.
BenchSummary run_bench(const TrainerConfig& config, const std::vector<std::uint64_t>& seeds,
                       std::size_t workers);

inline constexpr const char* kBenchHeader = "seed,solved,steps,iterations,error";
void write_bench_csv(std::ostream& out, const BenchSummary& summary);
void write_bench_summary_csv(std::ostream& out, const TrainerConfig& config,
                             const BenchSummary& summary);

} // namespace bnet
