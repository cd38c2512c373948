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

// Command-line runner. Uses only the C interface of libbnet.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnet/bnet.h"

namespace fs = std::filesystem;

namespace {

struct Failure {
    int code;
};

void check(bnet_status status, const std::string& context) {
    if (status == BNET_OK) return;
    std::cerr << "bnet: " << context << ": " << bnet_last_error() << '\n';
    throw Failure{status == BNET_ERR_CONFIG ? 2 : 1};
}

std::string get(const bnet_config* cfg, const char* key) {
    size_t len = 0;
    check(bnet_config_get(cfg, key, nullptr, 0, &len), key);
    std::string s(len + 1, '\0');
    check(bnet_config_get(cfg, key, s.data(), s.size(), &len), key);
    s.resize(len);
    return s;
}

std::string resolved_variant(const bnet_config* cfg) {
    size_t len = 0;
    check(bnet_config_variant(cfg, nullptr, 0, &len), "run.variant");
    std::string s(len + 1, '\0');
    check(bnet_config_variant(cfg, s.data(), s.size(), &len), "run.variant");
    s.resize(len);
    return s;
}

std::string output_root() {
    size_t len = 0;
    check(bnet_output_root(nullptr, 0, &len), "output root");
    std::string s(len + 1, '\0');
    check(bnet_output_root(s.data(), s.size(), &len), "output root");
    s.resize(len);
    return s;
}

class ConfigHandle {
public:
    ConfigHandle(const std::string& path, const std::optional<std::string>& env,
                 const std::optional<std::string>& variant, const std::optional<std::uint64_t>& seed,
                 const std::vector<std::string>& overrides) {
        if (path.empty()) check(bnet_config_create(&cfg_), "config");
        else check(bnet_config_load(path.c_str(), &cfg_), path);
        if (env) check(bnet_config_set(cfg_, "run.env", env->c_str()), "--env");
        if (variant) check(bnet_config_set(cfg_, "run.variant", variant->c_str()), "--variant");
        if (seed) check(bnet_config_set(cfg_, "run.seed", std::to_string(*seed).c_str()), "--seed");
        for (const auto& o : overrides) check(bnet_config_override(cfg_, o.c_str()), "--set " + o);
        check(bnet_config_validate(cfg_), "config");
    }
    ~ConfigHandle() { bnet_config_destroy(cfg_); }
    ConfigHandle(const ConfigHandle&) = delete;
    ConfigHandle& operator=(const ConfigHandle&) = delete;

    bnet_config* get() const { return cfg_; }

private:
    bnet_config* cfg_ = nullptr;
};

struct GenomeHandle {
    bnet_genome* g = nullptr;
    explicit GenomeHandle(const std::string& path) { check(bnet_genome_load(path.c_str(), &g), path); }
    ~GenomeHandle() { bnet_genome_destroy(g); }
    GenomeHandle(const GenomeHandle&) = delete;
    GenomeHandle& operator=(const GenomeHandle&) = delete;
};

struct CommonOptions {
    std::string config;
    std::optional<std::string> env;
    std::optional<std::string> variant;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;

    void attach(CLI::App* cmd, bool with_variant = true) {
        cmd->add_option("-c,--config", config, "INI configuration file");
        cmd->add_option("--env", env, "Environment: cartpole, mountaincar or gridmaze");
        if (with_variant) cmd->add_option("--variant", variant, "base, bdist, cross, surr, mut or bdist+cross");
        cmd->add_option("--seed", seed, "Run seed");
        cmd->add_option("--set", overrides, "Override a key: section.key=value")->take_all();
    }

    ConfigHandle load() const { return ConfigHandle(config, env, variant, seed, overrides); }
};

// Shared by train and import-experience.
int train(const CommonOptions& opts, const std::string& out_dir, bool log_trajectories,
          const std::string& experience) {
    ConfigHandle cfg = opts.load();
    const std::string env = get(cfg.get(), "run.env");
    const std::string variant = resolved_variant(cfg.get());
    const std::string seed = get(cfg.get(), "run.seed");

    bnet_trainer* trainer = nullptr;
    check(bnet_trainer_create(cfg.get(), &trainer), "trainer");
    struct Guard {
        bnet_trainer* t;
        ~Guard() { bnet_trainer_destroy(t); }
    } guard{trainer};
    if (!experience.empty()) check(bnet_trainer_import_experience(trainer, experience.c_str()), experience);

    const fs::path dir = out_dir.empty()
                             ? fs::path(output_root()) / (env + "-" + variant + "-seed" + seed)
                             : fs::path(out_dir);
    fs::create_directories(dir);
    const std::string trace = (dir / "trace.csv").string();
    const std::string selection = (dir / "selection.csv").string();
    const std::string checkpoint = (dir / "champion.genome").string();
    const std::string trajectories = log_trajectories ? (dir / "trajectories.csv").string() : "";
    check(bnet_config_write_manifest(cfg.get(), (dir / "manifest.json").string().c_str(), trace.c_str(),
                                     selection.c_str(), checkpoint.c_str(),
                                     log_trajectories ? trajectories.c_str() : nullptr),
          "manifest");
    if (log_trajectories) check(bnet_trainer_log_trajectories(trainer, trajectories.c_str()), trajectories);

    bnet_run_summary summary{};
    check(bnet_trainer_run(trainer, &summary), "training");
    check(bnet_trainer_write_trace(trainer, trace.c_str()), trace);
    check(bnet_trainer_write_selection(trainer, selection.c_str()), selection);
    check(bnet_trainer_export_experience(trainer, (dir / "experience.txt").string().c_str()), "experience");
    bnet_genome* champion = nullptr;
    if (bnet_trainer_champion(trainer, &champion) == BNET_OK) {
        const bnet_status s = bnet_genome_save(champion, checkpoint.c_str());
        bnet_genome_destroy(champion);
        check(s, checkpoint);
    }

    std::cout << "env=" << env << " variant=" << variant << " seed=" << seed
              << " solved=" << (summary.solved ? "yes" : "no") << " steps_to_solve="
              << (summary.solved ? std::to_string(summary.steps_to_solve) : std::string("-"))
              << " env_steps=" << summary.env_steps << " iterations=" << summary.iterations
              << " champion_mean=" << summary.champion_mean << "\noutput: " << dir.string() << '\n';
    return 0;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    std::stringstream in(spec);
    std::string part;
    while (std::getline(in, part, ',')) {
        if (part.empty()) continue;
        const auto dash = part.find('-');
        try {
            if (dash == std::string::npos) {
                seeds.push_back(std::stoull(part));
            } else {
                const auto lo = std::stoull(part.substr(0, dash));
                const auto hi = std::stoull(part.substr(dash + 1));
                if (hi < lo) throw std::invalid_argument("range");
                for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
            }
        } catch (const std::exception&) {
            std::cerr << "bnet: --seeds: cannot parse '" << part << "'\n";
            throw Failure{2};
        }
    }
    if (seeds.empty()) {
        std::cerr << "bnet: --seeds: no seeds given\n";
        throw Failure{2};
    }
    return seeds;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bnet: behavior-based neuroevolutionary training"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(bnet_version()));

    CommonOptions train_opts;
    std::string train_out;
    bool train_log = false;
    auto* train_cmd = app.add_subcommand("train", "Train one run and write its artifacts");
    train_opts.attach(train_cmd);
    train_cmd->add_option("-o,--out", train_out, "Output directory (default: $BNET_OUTPUT_ROOT/<env>-<variant>-seed<n>)");
    train_cmd->add_flag("--log-trajectories", train_log, "Write every training step to trajectories.csv");

    CommonOptions bench_opts;
    std::string bench_seeds = "1-20";
    std::size_t bench_workers = 1;
    std::string bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "Run independent seeds and summarise steps to solve");
    bench_opts.attach(bench_cmd);
    bench_cmd->add_option("--seeds", bench_seeds, "Seeds, e.g. 1-20 or 1,4,7")->capture_default_str();
    bench_cmd->add_option("-j,--workers", bench_workers, "Parallel runs")->capture_default_str()->check(CLI::PositiveNumber);
    bench_cmd->add_option("-o,--out", bench_out, "Output directory (default: $BNET_OUTPUT_ROOT/bench-<env>-<variant>)");

    CommonOptions eval_opts;
    std::string eval_checkpoint;
    std::uint64_t eval_episodes = 100;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a stored genome deterministically");
    eval_opts.attach(eval_cmd, false);
    eval_cmd->add_option("checkpoint", eval_checkpoint, "Genome file")->required();
    eval_cmd->add_option("-n,--episodes", eval_episodes, "Episodes")->capture_default_str();

    CommonOptions export_opts;
    std::string export_checkpoint, export_out;
    std::uint64_t export_episodes = 10;
    auto* export_cmd = app.add_subcommand("export-experience", "Record episodes of a stored genome as an experience file");
    export_opts.attach(export_cmd, false);
    export_cmd->add_option("checkpoint", export_checkpoint, "Genome file")->required();
    export_cmd->add_option("-n,--episodes", export_episodes, "Episodes")->capture_default_str();
    export_cmd->add_option("-o,--out", export_out, "Experience file to write")->required();

    CommonOptions import_opts;
    std::string import_file, import_out;
    bool import_log = false;
    auto* import_cmd = app.add_subcommand("import-experience", "Train with a population initialised offline from an experience file");
    import_opts.attach(import_cmd);
    import_cmd->add_option("experience", import_file, "Experience file")->required();
    import_cmd->add_option("-o,--out", import_out, "Output directory");
    import_cmd->add_flag("--log-trajectories", import_log, "Write every training step to trajectories.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) return train(train_opts, train_out, train_log, "");
        if (*import_cmd) return train(import_opts, import_out, import_log, import_file);

        if (*bench_cmd) {
            ConfigHandle cfg = bench_opts.load();
            const auto seeds = parse_seeds(bench_seeds);
            const fs::path dir = bench_out.empty()
                                     ? fs::path(output_root()) /
                                           ("bench-" + get(cfg.get(), "run.env") + "-" + resolved_variant(cfg.get()))
                                     : fs::path(bench_out);
            fs::create_directories(dir);
            check(bnet_config_write_manifest(cfg.get(), (dir / "manifest.json").string().c_str(), nullptr,
                                             nullptr, nullptr, nullptr),
                  "manifest");
            bnet_bench_summary s{};
            check(bnet_bench(cfg.get(), seeds.data(), seeds.size(), bench_workers,
                             (dir / "runs.csv").string().c_str(), (dir / "summary.csv").string().c_str(), &s),
                  "bench");
            std::cout << "runs=" << s.runs << " solved=" << s.successes << " failed=" << s.failures
                      << " median_steps=" << s.median_steps << " q1=" << s.q1_steps << " q3=" << s.q3_steps
                      << "\noutput: " << dir.string() << '\n';
            return s.failures > 0 ? 1 : 0;
        }

        if (*eval_cmd) {
            ConfigHandle cfg = eval_opts.load();
            GenomeHandle g(eval_checkpoint);
            bnet_eval_summary s{};
            check(bnet_evaluate(g.g, cfg.get(), eval_episodes, eval_opts.seed.value_or(0), &s), "eval");
            std::cout << "episodes=" << s.episodes << " mean=" << s.mean << " min=" << s.min << " max=" << s.max
                      << '\n';
            return 0;
        }

        if (*export_cmd) {
            ConfigHandle cfg = export_opts.load();
            GenomeHandle g(export_checkpoint);
            check(bnet_record_experience(g.g, cfg.get(), export_episodes, export_opts.seed.value_or(0),
                                         export_out.c_str()),
                  "export");
            std::cout << "wrote " << export_episodes << " episodes to " << export_out << '\n';
            return 0;
        }
    } catch (const Failure& f) {
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "bnet: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
