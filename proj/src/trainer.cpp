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

#include "bnet/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "bnet/behavior.hpp"
#include "bnet/error.hpp"

namespace bnet {

namespace {

// Independent random streams per run.
enum Stream : std::uint64_t { kEnvStream = 1, kSearchStream = 2, kSolveStream = 3, kCriticStream = 4 };

struct Stop {};

struct Candidate {
    std::uint64_t id = 0;
    std::string type;
    Genome genome;
    Phenotype phenotype;
    EvalMode mode = EvalMode::Deterministic;
    double epsilon = 0.0;
    FitnessRecord record;
    bool solve_checked = false;

    Candidate(std::uint64_t id_, std::string type_, Genome g, EvalMode m, double eps)
        : id(id_), type(std::move(type_)), genome(std::move(g)), phenotype(decode(genome)),
          mode(m), epsilon(eps) {
        record.id = id;
    }
};

bool has(const std::vector<Generator>& gens, Generator g) {
    return std::find(gens.begin(), gens.end(), g) != gens.end();
}

} // namespace

std::string_view to_string(Generator g) {
    switch (g) {
    case Generator::Mutant: return "mutant";
    case Generator::BDist: return "bdist";
    case Generator::Cross: return "cross";
    case Generator::Surrogate: return "surrogate";
    }
    return "unknown";
}

std::string_view to_string(WeightSource w) {
    return w == WeightSource::Critic ? "critic" : "reward";
}

const std::vector<std::string>& variant_names() {
    static const std::vector<std::string> names{"base", "bdist", "cross", "surr", "mut", "bdist+cross"};
    return names;
}

std::vector<double> step_weights(const Trajectory& trajectory, WeightSource source,
                                 const ValueNet* critic) {
    if (source == WeightSource::Reward) {
        std::vector<double> w;
        w.reserve(trajectory.size());
        for (const auto& t : trajectory.transitions) w.push_back(t.reward);
        return w;
    }
    if (!critic) throw InvalidArgument("step_weights: critic weighting needs a critic");
    return advantage(*critic, trajectory);
}

std::vector<Generator> variant_generators(std::string_view variant) {
    using enum Generator;
    if (variant == "base") return {Mutant, BDist, Cross, Surrogate};
    if (variant == "bdist") return {BDist};
    if (variant == "cross") return {Cross};
    if (variant == "surr") return {Surrogate};
    if (variant == "mut") return {Mutant};
    if (variant == "bdist+cross") return {BDist, Cross};
    std::string valid;
    for (const auto& n : variant_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown variant '" + std::string(variant) + "' (valid: " + valid + ")");
}

void TrainerConfig::validate() const {
    if (generators.empty()) throw InvalidArgument("trainer: no candidate generator enabled");
    if (initial_population == 0) throw InvalidArgument("trainer: initial population must be positive");
    if (repeats == 0) throw InvalidArgument("trainer: repeats must be at least 1");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("trainer: gamma must lie in [0, 1]");
    if (!(init_epsilon >= 0.0 && init_epsilon <= 1.0) || !(mutant_epsilon >= 0.0 && mutant_epsilon <= 1.0))
        throw InvalidArgument("trainer: epsilon must lie in [0, 1]");
    if (!(mutant_rate > 0.0 && mutant_rate <= 1.0))
        throw InvalidArgument("trainer: mutant rate must lie in (0, 1]");
    behavior_search.validate();
    surrogate_search.validate();
    if (archive_size == 0) throw InvalidArgument("trainer: archive size must be positive");
    if (surrogate_capacity < 3) throw InvalidArgument("trainer: surrogate archive needs room for 3 records");
}

TrainerConfig default_config(std::string_view env_name) {
    TrainerConfig c;
    c.env.name = std::string(env_name);
    if (env_name == "cartpole") {
        c.repeats = 3;
        c.max_env_steps = 50000;
    } else if (env_name == "mountaincar") {
        c.repeats = 3;
        c.max_env_steps = 100000;
        c.init_mode = EvalMode::StochasticEpsilon;
        c.init_epsilon = 0.3;
        c.mutant_mode = EvalMode::StochasticEpsilon;
        c.mutant_epsilon = 0.3;
        c.always_mutant = true;
    } else if (env_name == "gridmaze") {
        c.repeats = 5;
        c.max_env_steps = 5000;
        c.weighting = WeightSource::Reward;
        c.init_mode = EvalMode::StochasticEpsilon;
        c.init_epsilon = 0.3;
        c.variant = "bdist+cross";
        c.generators = variant_generators(c.variant);
    } else {
        throw InvalidArgument("unknown environment '" + std::string(env_name) + "'");
    }
    return c;
}

struct Trainer::State {
    std::unique_ptr<Environment> env;
    std::unique_ptr<Environment> solve_env;
    std::shared_ptr<const CgpConfig> cgp;
    Rng env_rng, search_rng, solve_rng, critic_rng;
    EliteArchive archive;
    ExperiencePool pool;
    SurrogateArchive surrogate;
    std::optional<ValueNet> critic;
    std::optional<Candidate> champion;
    std::vector<Candidate> pending;
    std::vector<Trajectory> offered;
    double solve_threshold = 0.0;
    std::size_t solve_episodes = 1;
    std::uint64_t next_id = 1;
    std::uint64_t env_steps = 0;
    std::size_t iteration = 0;
    bool initialized = false;
    bool stopped = false;
    RunResult result;
    std::optional<TrajectoryLog> trajectory_log;
    std::string current_type;

    State(const TrainerConfig& c)
        : env(make_environment(c.env)), solve_env(env->clone()),
          env_rng(derive_seed(c.seed, kEnvStream)), search_rng(derive_seed(c.seed, kSearchStream)),
          solve_rng(derive_seed(c.seed, kSolveStream)), critic_rng(derive_seed(c.seed, kCriticStream)),
          archive(c.archive_size, c.archive_budget), pool(c.pool_capacity),
          surrogate(c.surrogate_capacity, c.surrogate_states) {
        CgpConfig g = c.cgp;
        g.n_inputs = env->spec().observation_dim;
        g.n_outputs = env->spec().n_actions;
        g.validate();
        cgp = std::make_shared<const CgpConfig>(std::move(g));
        solve_threshold = c.solve_threshold.value_or(env->spec().solve_threshold);
        solve_episodes = c.solve_episodes ? c.solve_episodes : env->spec().solve_window;
    }
};

Trainer::Trainer(TrainerConfig config) : config_(std::move(config)) {
    config_.validate();
    s_ = std::make_unique<State>(config_);
}

Trainer::~Trainer() = default;

const EnvSpec& Trainer::env_spec() const { return s_->env->spec(); }
const RunResult& Trainer::result() const noexcept { return s_->result; }
const EliteArchive& Trainer::archive() const noexcept { return s_->archive; }
const ExperiencePool& Trainer::pool() const noexcept { return s_->pool; }
void Trainer::set_trajectory_log(std::ostream* out) {
    s_->trajectory_log.reset();
    if (out) s_->trajectory_log.emplace(*out);
}

std::vector<Genome> Trainer::pending_genomes() const {
    std::vector<Genome> out;
    for (const auto& c : s_->pending) out.push_back(c.genome);
    return out;
}

ExperienceSet Trainer::experience() const {
    ExperienceSet set;
    set.env_name = s_->env->spec().name;
    set.observation_dim = s_->env->spec().observation_dim;
    set.n_actions = s_->env->spec().n_actions;
    set.episodes.assign(s_->archive.entries().begin(), s_->archive.entries().end());
    return set;
}

bool Trainer::finished() const noexcept {
    return s_->stopped || s_->env_steps >= config_.max_env_steps ||
           (config_.max_iterations > 0 && s_->iteration >= config_.max_iterations);
}

void Trainer::initialize() {
    if (s_->initialized) return;
    for (std::size_t i = 0; i < config_.initial_population; ++i)
        s_->pending.emplace_back(s_->next_id++, "initial", random_genome(s_->cgp, s_->search_rng),
                                 config_.init_mode, config_.init_epsilon);
    s_->initialized = true;
}

void Trainer::initialize_offline(const ExperienceSet& experience) {
    if (s_->initialized) throw InvalidArgument("trainer: already initialised");
    const EnvSpec& spec = s_->env->spec();
    if (experience.episodes.empty()) throw InvalidArgument("offline init: experience set is empty");
    if (experience.env_name != spec.name || experience.observation_dim != spec.observation_dim ||
        experience.n_actions != spec.n_actions)
        throw InvalidArgument("offline init: experience was recorded on '" + experience.env_name +
                              "', not on '" + spec.name + "'");

    std::vector<BehaviorSample> refs;
    std::vector<Trajectory> episodes;
    for (const auto& ep : experience.episodes) {
        if (ep.empty()) continue;
        refs.push_back(make_sample(adapt_reference(ep), std::vector<double>(ep.size(), 1.0)));
        Trajectory t = ep;
        t.returns = discounted_returns(t, config_.gamma);
        s_->pool.append(t);
        episodes.push_back(std::move(t));
    }
    if (refs.empty()) throw InvalidArgument("offline init: every stored episode is empty");
    s_->archive.begin_iteration();
    s_->archive.offer_batch(std::move(episodes));

    const BehaviorLoss loss(BehaviorMetric::BehaviorDistance, std::move(refs));
    EaConfig ea = config_.behavior_search;
    ea.mu = std::max(ea.mu, config_.initial_population);
    EaResult r = run_ea(ea, s_->cgp, [&](const Genome& g) { return loss(g); }, s_->search_rng);
    for (std::size_t i = 0; i < config_.initial_population; ++i)
        s_->pending.emplace_back(s_->next_id++, "initial", std::move(r.population[i].genome),
                                 config_.init_mode, config_.init_epsilon);
    s_->initialized = true;
}

bool Trainer::step() {
    if (finished()) return false;
    initialize();
    State& s = *s_;
    const TrainerConfig& c = config_;
    IterationReport report;
    report.iteration = s.iteration;

    const auto lookup = [&](std::uint64_t id) -> Candidate& {
        if (s.champion && s.champion->id == id) return *s.champion;
        for (auto& p : s.pending)
            if (p.id == id) return p;
        throw Error("trainer: unknown candidate id");
    };

    // One training episode of `cand`; the fitness is returned, and stored in
    // the candidate's record when `record` is set.
    const auto evaluate = [&](Candidate& cand, EvalMode mode, double eps, bool record) {
        if (s.env_steps >= c.max_env_steps) throw Stop{};
        Trajectory t = run_episode(*s.env, cand.phenotype, mode, eps, s.env_rng);
        t.candidate_id = cand.id;
        s.env_steps += t.size();
        t.returns = discounted_returns(t, c.gamma);
        s.pool.append(t);
        if (record) {
            cand.record.add(t.fitness);
            s.surrogate.update(cand.id, cand.genome, t.states(), cand.record.mean());
        }
        if (s.trajectory_log) s.trajectory_log->write(s.iteration, cand.type, t);
        const double fitness = t.fitness;
        s.offered.push_back(std::move(t));

        if (!cand.solve_checked && fitness >= s.solve_threshold) {
            cand.solve_checked = true;
            std::vector<double> history;
            for (std::size_t e = 0; e < s.solve_episodes; ++e) {
                Trajectory check = run_episode(*s.solve_env, cand.phenotype, EvalMode::Deterministic,
                                               0.0, s.solve_rng);
                s.result.solve_check_steps += check.size();
                history.push_back(check.fitness);
            }
            if (is_solved(EnvSpec{s.env->spec().name, 0, 0, 0, s.solve_threshold, s.solve_episodes},
                          history)) {
                s.result.solved = s.env_steps <= c.max_env_steps;
                s.result.steps_to_solve = s.env_steps;
                s.result.champion = cand.genome;
                report.solved = s.result.solved;
                throw Stop{};
            }
        }
        return fitness;
    };

    try {
        s.archive.begin_iteration();
        double champion_before = std::numeric_limits<double>::quiet_NaN();
        if (s.champion) {
            const double f = evaluate(*s.champion, EvalMode::Deterministic, 0.0, true);
            report.candidates.push_back({"champion", s.champion->id, f});
            champion_before = s.champion->record.mean();
        }
        for (auto& p : s.pending) {
            const double f = evaluate(p, p.mode, p.epsilon, true);
            report.candidates.push_back({p.type, p.id, f});
        }
        s.archive.offer_batch(std::move(s.offered));
        s.offered.clear();

        if (!s.champion) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < s.pending.size(); ++i)
                if (s.pending[i].record.first() > s.pending[best].record.first()) best = i;
            s.champion = std::move(s.pending[best]);
            report.best_type = "initial";
        } else {
            // Best fresh candidate against the champion's current mean; ties go to the champion.
            report.best_type = "champion";
            double best = champion_before;
            for (const auto& p : s.pending)
                if (p.record.first() > best) {
                    best = p.record.first();
                    report.best_type = p.type;
                }

            std::vector<FitnessRecord> records;
            for (const auto& p : s.pending) records.push_back(p.record);
            const auto duel_eval = [&](std::uint64_t id) {
                return evaluate(lookup(id), EvalMode::Deterministic, 0.0, false);
            };
            // Keeps candidate records and the surrogate archive in sync after each duel.
            const auto sync = [&] {
                for (std::size_t i = 0; i < records.size(); ++i) {
                    if (records[i].n() != s.pending[i].record.n()) {
                        s.pending[i].record = records[i];
                        s.surrogate.update(records[i].id, s.pending[i].genome, {}, records[i].mean());
                    }
                }
            };
            FitnessRecord champion_record = s.champion->record;
            long winner = -1;
            try {
                winner = challenge(champion_record, records, c.repeats, duel_eval,
                                   [&](const DuelEvent& e) {
                                       s.result.selections.push_back(
                                           {s.iteration, records[e.candidate_index].id,
                                            e.challenger_mean, e.champion_mean, e.promoted});
                                   });
            } catch (const Stop&) {
                s.champion->record = champion_record;
                sync();
                throw;
            }
            if (champion_record.n() != s.champion->record.n()) {
                s.champion->record = champion_record;
                s.surrogate.update(champion_record.id, s.champion->genome, {}, champion_record.mean());
            }
            sync();
            if (winner >= 0) s.champion = std::move(s.pending[static_cast<std::size_t>(winner)]);
            s.archive.offer_batch(std::move(s.offered));
            s.offered.clear();
        }
        s.pending.clear();
        report.champion_id = s.champion->id;
        report.champion_mean = s.champion->record.mean();
        report.champion_samples = s.champion->record.n();
        report.env_steps = s.env_steps;

        // Candidate generation; no environment interaction from here on.
        if (s.env_steps < c.max_env_steps &&
            !(c.max_iterations > 0 && s.iteration + 1 >= c.max_iterations)) {
            std::vector<Generator> gens = c.generators;
            if (c.always_mutant && !has(gens, Generator::Mutant)) gens.insert(gens.begin(), Generator::Mutant);
            const Genome& champ = s.champion->genome;

            std::vector<BehaviorSample> samples;
            if (has(gens, Generator::BDist) || has(gens, Generator::Cross)) {
                if (c.weighting == WeightSource::Critic) {
                    if (!s.critic) s.critic = ValueNet::random(s.cgp->n_inputs, c.critic_hidden, s.critic_rng);
                    fit(*s.critic, s.pool, c.critic, s.critic_rng);
                }
                for (const auto& t : s.archive.entries())
                    samples.push_back(make_sample(adapt_reference(t),
                                                  step_weights(t, c.weighting, s.critic ? &*s.critic : nullptr)));
            }

            const auto add = [&](Generator g, Genome genome, EvalMode mode, double eps) {
                s.pending.emplace_back(s.next_id++, std::string(to_string(g)), std::move(genome), mode, eps);
            };
            for (Generator g : {Generator::Mutant, Generator::BDist, Generator::Cross, Generator::Surrogate}) {
                if (!has(gens, g)) continue;
                switch (g) {
                case Generator::Mutant:
                    add(g, mutate(champ, c.mutant_rate, s.search_rng), c.mutant_mode, c.mutant_epsilon);
                    break;
                case Generator::BDist:
                case Generator::Cross: {
                    const BehaviorLoss loss(g == Generator::BDist ? BehaviorMetric::WeightedBehaviorDistance
                                                                  : BehaviorMetric::WeightedCrossEntropy,
                                            samples);
                    EaConfig ea = c.behavior_search;
                    ea.seeds = {champ};
                    EaResult r = run_ea(ea, s.cgp, [&](const Genome& x) { return loss(x); }, s.search_rng);
                    add(g, std::move(r.population.front().genome), EvalMode::Deterministic, 0.0);
                    break;
                }
                case Generator::Surrogate: {
                    EaConfig ea = c.surrogate_search;
                    ea.seeds = {champ};
                    std::optional<Genome> found;
                    if (s.surrogate.size() >= 3) {
                        try {
                            const SurrogateModel model = s.surrogate.fit(c.kriging);
                            found = surrogate_search(model, ea, s.cgp, s.search_rng);
                        } catch (const NumericError&) {
                            found.reset();
                        }
                    }
                    // Too little data, or no usable model: fall back to a plain mutation.
                    if (!found) found = mutate(champ, ea.mutation_rate, s.search_rng);
                    add(g, std::move(*found), EvalMode::Deterministic, 0.0);
                    break;
                }
                }
            }
        }
    } catch (const Stop&) {
        s.stopped = true;
        report.champion_id = s.champion ? s.champion->id : 0;
        report.champion_mean = s.champion ? s.champion->record.mean() : 0.0;
        report.champion_samples = s.champion ? s.champion->record.n() : 0;
        report.env_steps = s.env_steps;
        if (report.best_type.empty()) report.best_type = s.iteration == 0 ? "initial" : "champion";
    }

    s.result.reports.push_back(report);
    s.result.env_steps = s.env_steps;
    s.result.iterations = s.result.reports.size();
    ++s.iteration;
    if (s.champion) {
        if (!s.result.solved) s.result.champion = s.champion->genome;
        s.result.champion_mean = s.champion->record.mean();
    }
    ++s.result.best_type_counts[report.best_type];
    return !finished();
}

RunResult Trainer::run() {
    while (step()) {
    }
    return s_->result;
}

void write_trace_csv(std::ostream& out, const RunResult& result) {
    out << kTraceHeader << '\n';
    for (const auto& r : result.reports)
        for (const auto& cand : r.candidates)
            out << r.iteration << ',' << r.env_steps << ',' << r.champion_mean << ',' << cand.type
                << ',' << cand.fitness << ',' << r.best_type << '\n';
}

void write_selection_csv(std::ostream& out, const RunResult& result) {
    out << kSelectionHeader << '\n';
    for (const auto& e : result.selections)
        out << e.iteration << ',' << e.challenger_id << ',' << e.challenger_mean << ','
            << e.champion_mean << ',' << (e.promoted ? 1 : 0) << '\n';
}

namespace {

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

} // namespace

BenchSummary run_bench(const TrainerConfig& config, const std::vector<std::uint64_t>& seeds,
                       std::size_t workers) {
    if (seeds.empty()) throw InvalidArgument("bench: no seeds");
    BenchSummary summary;
    summary.runs.resize(seeds.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            BenchRun& run = summary.runs[i];
            run.seed = seeds[i];
            try {
                TrainerConfig c = config;
                c.seed = seeds[i];
                Trainer trainer(c);
                const RunResult r = trainer.run();
                run.solved = r.solved;
                run.steps = r.solved ? r.steps_to_solve : config.max_env_steps;
                run.iterations = r.iterations;
            } catch (const std::exception& e) {
                run.error = e.what();
                run.steps = config.max_env_steps;
            }
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, seeds.size());
    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();

    std::vector<double> steps;
    for (const auto& r : summary.runs) {
        steps.push_back(static_cast<double>(r.steps));
        if (r.solved) ++summary.successes;
    }
    summary.median = quantile(steps, 0.5);
    summary.q1 = quantile(steps, 0.25);
    summary.q3 = quantile(steps, 0.75);
    return summary;
}

void write_bench_csv(std::ostream& out, const BenchSummary& summary) {
    out << kBenchHeader << '\n';
    for (const auto& r : summary.runs) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << r.seed << ',' << (r.solved ? 1 : 0) << ',' << r.steps << ',' << r.iterations << ','
            << err << '\n';
    }
}

void write_bench_summary_csv(std::ostream& out, const TrainerConfig& config,
                             const BenchSummary& summary) {
    out << "env,variant,runs,successes,median_steps,q1_steps,q3_steps,budget\n";
    out << config.env.name << ',' << config.variant << ',' << summary.runs.size() << ','
        << summary.successes << ',' << summary.median << ',' << summary.q1 << ',' << summary.q3
        << ',' << config.max_env_steps << '\n';
}

} // namespace bnet
