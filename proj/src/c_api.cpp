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

#include "bnet/bnet.h"

#include <algorithm>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "bnet/config.hpp"
#include "bnet/error.hpp"
#include "bnet/trainer.hpp"

struct bnet_config {
    bnet::Config config;
};

struct bnet_trainer {
    bnet::Config config;
    std::unique_ptr<bnet::Trainer> trainer;
    std::unique_ptr<std::ofstream> trajectory_log;
};

struct bnet_genome {
    bnet::Genome genome;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_key;

bnet_status fail(bnet_status status, std::string message, std::string key = {}) {
    g_error = std::move(message);
    g_error_key = std::move(key);
    return status;
}

// Runs `fn`, mapping exceptions to status codes.
template <typename F>
bnet_status guarded(F&& fn) {
    try {
        g_error.clear();
        g_error_key.clear();
        fn();
        return BNET_OK;
    } catch (const bnet::ConfigError& e) {
        return fail(BNET_ERR_CONFIG, e.what(), e.key());
    } catch (const bnet::IoError& e) {
        return fail(BNET_ERR_IO, e.what());
    } catch (const bnet::NumericError& e) {
        return fail(BNET_ERR_NUMERIC, e.what());
    } catch (const bnet::InvalidArgument& e) {
        return fail(BNET_ERR_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(BNET_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(BNET_ERR_INTERNAL, e.what());
    }
}

void require(const void* p, const char* what) {
    if (!p) throw bnet::InvalidArgument(std::string(what) + " is NULL");
}

bnet_status copy_out(const std::string& s, char* buf, size_t cap, size_t* len) {
    if (len) *len = s.size();
    if (!buf && cap == 0) return BNET_OK;
    if (!buf || cap <= s.size())
        return fail(BNET_ERR_BUFFER, "buffer of " + std::to_string(cap) + " bytes cannot hold " +
                                         std::to_string(s.size() + 1));
    std::copy(s.begin(), s.end(), buf);
    buf[s.size()] = '\0';
    return BNET_OK;
}

template <typename Write>
void write_file(const char* path, Write&& write) {
    require(path, "path");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw bnet::IoError(std::string("cannot write '") + path + "'");
    write(out);
    out.flush();
    if (!out) throw bnet::IoError(std::string("failed writing '") + path + "'");
}

void fill(const bnet::RunResult& r, bnet_run_summary* out) {
    out->solved = r.solved ? 1 : 0;
    out->steps_to_solve = r.steps_to_solve;
    out->env_steps = r.env_steps;
    out->solve_check_steps = r.solve_check_steps;
    out->iterations = r.iterations;
    out->champion_mean = r.champion_mean;
}

// Environment of `config` after checking that `genome` fits it.
std::unique_ptr<bnet::Environment> environment_for(const bnet::Genome& genome,
                                                   const bnet::Config& config) {
    const bnet::TrainerConfig t = config.resolve();
    auto env = bnet::make_environment(t.env);
    if (genome.config().n_inputs != env->spec().observation_dim ||
        genome.config().n_outputs != env->spec().n_actions)
        throw bnet::InvalidArgument("genome has " + std::to_string(genome.config().n_inputs) +
                                    " inputs and " + std::to_string(genome.config().n_outputs) +
                                    " outputs, but '" + t.env.name + "' needs " +
                                    std::to_string(env->spec().observation_dim) + " and " +
                                    std::to_string(env->spec().n_actions));
    return env;
}

} // namespace

extern "C" {

const char* bnet_version(void) { return "1.0.0"; }

const char* bnet_status_string(bnet_status status) {
    switch (status) {
    case BNET_OK: return "ok";
    case BNET_ERR_ARGUMENT: return "invalid argument";
    case BNET_ERR_CONFIG: return "configuration error";
    case BNET_ERR_IO: return "i/o error";
    case BNET_ERR_NUMERIC: return "numerical error";
    case BNET_ERR_BUFFER: return "buffer too small";
    case BNET_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* bnet_last_error(void) { return g_error.c_str(); }
const char* bnet_last_error_key(void) { return g_error_key.c_str(); }

bnet_status bnet_output_root(char* buf, size_t cap, size_t* len) {
    std::string root;
    const bnet_status s = guarded([&] { root = bnet::output_root(); });
    return s == BNET_OK ? copy_out(root, buf, cap, len) : s;
}

bnet_status bnet_config_create(bnet_config** out) {
    return guarded([&] {
        require(out, "out");
        *out = new bnet_config{};
    });
}

bnet_status bnet_config_load(const char* path, bnet_config** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new bnet_config{bnet::Config::load(path)};
    });
}

bnet_status bnet_config_parse(const char* ini_text, bnet_config** out) {
    return guarded([&] {
        require(ini_text, "ini_text");
        require(out, "out");
        *out = new bnet_config{bnet::Config::parse(ini_text)};
    });
}

void bnet_config_destroy(bnet_config* config) { delete config; }

bnet_status bnet_config_set(bnet_config* config, const char* key, const char* value) {
    return guarded([&] {
        require(config, "config");
        require(key, "key");
        require(value, "value");
        config->config.set(key, value);
    });
}

bnet_status bnet_config_override(bnet_config* config, const char* assignment) {
    return guarded([&] {
        require(config, "config");
        require(assignment, "assignment");
        config->config.apply_override(assignment);
    });
}

bnet_status bnet_config_get(const bnet_config* config, const char* key, char* buf, size_t cap,
                            size_t* len) {
    std::string value;
    const bnet_status s = guarded([&] {
        require(config, "config");
        require(key, "key");
        value = config->config.get(key);
    });
    return s == BNET_OK ? copy_out(value, buf, cap, len) : s;
}

bnet_status bnet_config_serialize(const bnet_config* config, char* buf, size_t cap, size_t* len) {
    std::string text;
    const bnet_status s = guarded([&] {
        require(config, "config");
        text = config->config.serialize();
    });
    return s == BNET_OK ? copy_out(text, buf, cap, len) : s;
}

bnet_status bnet_config_variant(const bnet_config* config, char* buf, size_t cap, size_t* len) {
    std::string variant;
    const bnet_status s = guarded([&] {
        require(config, "config");
        variant = config->config.resolve().variant;
    });
    return s == BNET_OK ? copy_out(variant, buf, cap, len) : s;
}

bnet_status bnet_config_hash(const bnet_config* config, char* buf, size_t cap, size_t* len) {
    std::string hash;
    const bnet_status s = guarded([&] {
        require(config, "config");
        hash = config->config.hash();
    });
    return s == BNET_OK ? copy_out(hash, buf, cap, len) : s;
}

bnet_status bnet_config_validate(const bnet_config* config) {
    return guarded([&] {
        require(config, "config");
        (void)config->config.resolve();
    });
}

bnet_status bnet_config_write_manifest(const bnet_config* config, const char* path,
                                       const char* trace_path, const char* selection_path,
                                       const char* checkpoint_path, const char* trajectory_path) {
    return guarded([&] {
        require(config, "config");
        const auto str = [](const char* p) { return p ? std::string(p) : std::string(); };
        const std::string json = bnet::manifest_json(
            config->config,
            {str(trace_path), str(selection_path), str(checkpoint_path), str(trajectory_path)});
        write_file(path, [&](std::ostream& out) { out << json; });
    });
}

bnet_status bnet_trainer_create(const bnet_config* config, bnet_trainer** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        auto t = std::make_unique<bnet_trainer>();
        t->config = config->config;
        t->trainer = std::make_unique<bnet::Trainer>(config->config.resolve());
        const std::string offline = config->config.get("run.offline_experience");
        if (!offline.empty()) t->trainer->initialize_offline(bnet::load_experience(offline));
        *out = t.release();
    });
}

void bnet_trainer_destroy(bnet_trainer* trainer) { delete trainer; }

bnet_status bnet_trainer_import_experience(bnet_trainer* trainer, const char* path) {
    return guarded([&] {
        require(trainer, "trainer");
        require(path, "path");
        trainer->trainer->initialize_offline(bnet::load_experience(path));
    });
}

bnet_status bnet_trainer_log_trajectories(bnet_trainer* trainer, const char* path) {
    return guarded([&] {
        require(trainer, "trainer");
        require(path, "path");
        auto out = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*out) throw bnet::IoError(std::string("cannot write '") + path + "'");
        trainer->trainer->set_trajectory_log(out.get());
        trainer->trajectory_log = std::move(out);
    });
}

bnet_status bnet_trainer_step(bnet_trainer* trainer, int* more) {
    return guarded([&] {
        require(trainer, "trainer");
        const bool m = trainer->trainer->step();
        if (more) *more = m ? 1 : 0;
    });
}

bnet_status bnet_trainer_run(bnet_trainer* trainer, bnet_run_summary* out) {
    return guarded([&] {
        require(trainer, "trainer");
        const bnet::RunResult r = trainer->trainer->run();
        if (trainer->trajectory_log) trainer->trajectory_log->flush();
        if (out) fill(r, out);
    });
}

bnet_status bnet_trainer_summary(const bnet_trainer* trainer, bnet_run_summary* out) {
    return guarded([&] {
        require(trainer, "trainer");
        require(out, "out");
        fill(trainer->trainer->result(), out);
    });
}

bnet_status bnet_trainer_write_trace(const bnet_trainer* trainer, const char* path) {
    return guarded([&] {
        require(trainer, "trainer");
        write_file(path, [&](std::ostream& out) { bnet::write_trace_csv(out, trainer->trainer->result()); });
    });
}

bnet_status bnet_trainer_write_selection(const bnet_trainer* trainer, const char* path) {
    return guarded([&] {
        require(trainer, "trainer");
        write_file(path, [&](std::ostream& out) {
            bnet::write_selection_csv(out, trainer->trainer->result());
        });
    });
}

bnet_status bnet_trainer_export_experience(const bnet_trainer* trainer, const char* path) {
    return guarded([&] {
        require(trainer, "trainer");
        require(path, "path");
        bnet::save_experience(path, trainer->trainer->experience());
    });
}

bnet_status bnet_trainer_champion(const bnet_trainer* trainer, bnet_genome** out) {
    return guarded([&] {
        require(trainer, "trainer");
        require(out, "out");
        const auto& champion = trainer->trainer->result().champion;
        if (!champion) throw bnet::InvalidArgument("no champion yet: run at least one iteration");
        *out = new bnet_genome{*champion};
    });
}

bnet_status bnet_genome_load(const char* path, bnet_genome** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new bnet_genome{bnet::load_genome(path)};
    });
}

bnet_status bnet_genome_save(const bnet_genome* genome, const char* path) {
    return guarded([&] {
        require(genome, "genome");
        require(path, "path");
        bnet::save_genome(genome->genome, path);
    });
}

bnet_status bnet_genome_info(const bnet_genome* genome, size_t* n_inputs, size_t* n_outputs,
                             size_t* active_nodes) {
    return guarded([&] {
        require(genome, "genome");
        if (n_inputs) *n_inputs = genome->genome.config().n_inputs;
        if (n_outputs) *n_outputs = genome->genome.config().n_outputs;
        if (active_nodes) *active_nodes = genome->genome.active_count();
    });
}

void bnet_genome_destroy(bnet_genome* genome) { delete genome; }

bnet_status bnet_evaluate(const bnet_genome* genome, const bnet_config* config, uint64_t episodes,
                          uint64_t seed, bnet_eval_summary* out) {
    return guarded([&] {
        require(genome, "genome");
        require(config, "config");
        require(out, "out");
        if (episodes == 0) throw bnet::InvalidArgument("episodes must be at least 1");
        auto env = environment_for(genome->genome, config->config);
        const bnet::Phenotype policy = bnet::decode(genome->genome);
        bnet::Rng rng(seed);
        double sum = 0.0, lo = 0.0, hi = 0.0;
        for (uint64_t e = 0; e < episodes; ++e) {
            const double f =
                bnet::run_episode(*env, policy, bnet::EvalMode::Deterministic, 0.0, rng).fitness;
            sum += f;
            lo = e == 0 ? f : std::min(lo, f);
            hi = e == 0 ? f : std::max(hi, f);
        }
        *out = {episodes, sum / static_cast<double>(episodes), lo, hi};
    });
}

bnet_status bnet_record_experience(const bnet_genome* genome, const bnet_config* config,
                                   uint64_t episodes, uint64_t seed, const char* path) {
    return guarded([&] {
        require(genome, "genome");
        require(config, "config");
        require(path, "path");
        if (episodes == 0) throw bnet::InvalidArgument("episodes must be at least 1");
        auto env = environment_for(genome->genome, config->config);
        const bnet::Phenotype policy = bnet::decode(genome->genome);
        bnet::Rng rng(seed);
        bnet::ExperienceSet set{env->spec().name, env->spec().observation_dim, env->spec().n_actions, {}};
        for (uint64_t e = 0; e < episodes; ++e)
            set.episodes.push_back(
                bnet::run_episode(*env, policy, bnet::EvalMode::Deterministic, 0.0, rng));
        bnet::save_experience(path, set);
    });
}

bnet_status bnet_bench(const bnet_config* config, const uint64_t* seeds, size_t n_seeds,
                       size_t workers, const char* runs_csv, const char* summary_csv,
                       bnet_bench_summary* out) {
    return guarded([&] {
        require(config, "config");
        require(seeds, "seeds");
        if (n_seeds == 0) throw bnet::InvalidArgument("at least one seed is required");
        const bnet::TrainerConfig t = config->config.resolve();
        const bnet::BenchSummary s =
            bnet::run_bench(t, std::vector<std::uint64_t>(seeds, seeds + n_seeds), workers);
        if (runs_csv) write_file(runs_csv, [&](std::ostream& o) { bnet::write_bench_csv(o, s); });
        if (summary_csv)
            write_file(summary_csv, [&](std::ostream& o) { bnet::write_bench_summary_csv(o, t, s); });
        if (out) {
            const auto failures = static_cast<uint64_t>(std::count_if(
                s.runs.begin(), s.runs.end(), [](const bnet::BenchRun& r) { return !r.error.empty(); }));
            *out = {s.runs.size(), s.successes, failures, s.median, s.q1, s.q3};
        }
    });
}

} // extern "C"
