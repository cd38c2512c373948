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


#include <cstdlib>
#include <functional>

#include <doctest.h>
#include <json.hpp>

#include "bnet/config.hpp"
#include "bnet/error.hpp"

using namespace bnet;

namespace {

std::string error_key(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("git blob hash") {
    // Reference values from `git hash-object --stdin`.
    CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("defaults resolve to the environment defaults") {
    for (const char* env : {"cartpole", "mountaincar", "gridmaze"}) {
        Config c;
        c.set("run.env", env);
        const TrainerConfig t = c.resolve();
        const TrainerConfig d = default_config(env);
        CHECK(t.env.name == env);
        CHECK(t.variant == d.variant);
        CHECK(t.max_env_steps == d.max_env_steps);
        CHECK(t.repeats == d.repeats);
        CHECK(t.weighting == d.weighting);
        CHECK(t.init_mode == d.init_mode);
        CHECK(t.init_epsilon == d.init_epsilon);
        CHECK(t.always_mutant == d.always_mutant);
        CHECK(t.behavior_search.iterations == 1000);
        CHECK(t.critic_hidden == std::vector<std::size_t>{128, 64});
    }
}

TEST_CASE("unknown keys and bad values name the key") {
    Config c;
    CHECK(error_key([&] { c.set("run.colour", "blue"); }) == "run.colour");
    CHECK(error_key([] { Config::parse("[run]\nseed = 3\n[cgp]\nnodez = 10\n"); }) == "cgp.nodez");
    CHECK(error_key([] { Config::parse("[run]\nseed = three\n").resolve(); }) == "run.seed");
    CHECK(error_key([] { Config::parse("[run]\nweighting = vibes\n").resolve(); }) == "run.weighting");
    CHECK(error_key([] { Config::parse("[cgp]\nfunctions = tanh,sine\n").resolve(); }) == "cgp.functions");
    CHECK(error_key([] { Config::parse("[behavior_search]\nmutation_rate = 1.5\n").resolve(); }) ==
          "behavior_search.mutation_rate");
    CHECK_THROWS_AS(c.get("run.colour"), ConfigError);
    CHECK_THROWS_AS(Config::load("/nonexistent/bnet.ini"), IoError);
}

TEST_CASE("serialisation round trip and hash") {
    Config c = Config::parse("[run]\nenv = mountaincar\nseed = 17\n[critic]\nhidden = 32,16\n");
    const std::string text = c.serialize();
    const Config back = Config::parse(text);
    CHECK(back.serialize() == text);
    CHECK(back.hash() == c.hash());
    CHECK(c.hash() == git_blob_sha1(text));
    CHECK(back.resolve().critic_hidden == std::vector<std::size_t>{32, 16});
    c.set("run.seed", "18");
    CHECK(c.hash() != back.hash());
    CHECK(Config().hash() == Config().hash());
}

TEST_CASE("overrides") {
    Config c;
    c.apply_override("behavior_search.mu=7");
    c.apply_override(" run.variant = mut ");
    const TrainerConfig t = c.resolve();
    CHECK(t.behavior_search.mu == 7);
    CHECK(t.variant == "mut");
    CHECK(t.generators == std::vector<Generator>{Generator::Mutant});
    CHECK_THROWS_AS(c.apply_override("no_equals_sign"), ConfigError);
    CHECK(error_key([&] { c.apply_override("run.bogus=1"); }) == "run.bogus");
}

TEST_CASE("bundled config files") {
    for (const char* env : {"cartpole", "mountaincar", "gridmaze"}) {
        const Config c = Config::load(std::string(BNET_SOURCE_DIR) + "/configs/" + env + ".ini");
        const TrainerConfig t = c.resolve();
        const TrainerConfig d = default_config(env);
        CHECK(t.env.name == env);
        CHECK(t.max_env_steps == d.max_env_steps);
        CHECK(t.repeats == d.repeats);
        CHECK(t.weighting == d.weighting);
        CHECK(t.init_mode == d.init_mode);
        CHECK(t.init_epsilon == d.init_epsilon);
    }
}

TEST_CASE("manifest") {
    Config c;
    c.set("run.seed", "5");
    const auto j = nlohmann::json::parse(manifest_json(c, {"t.csv", "s.csv", "champion.genome", ""}));
    CHECK(j["format"] == "bnet-manifest 1");
    CHECK(j["config_hash"] == c.hash());
    CHECK(j["seed"] == 5);
    CHECK(j["env"] == "cartpole");
    CHECK(j["variant"] == "base");
    CHECK(j["config"]["run.seed"] == "5");
    CHECK(j["config"].size() == Config::keys().size());
    CHECK(j["outputs"]["trace"] == "t.csv");
    CHECK(j["outputs"]["trajectories"] == "");
}

TEST_CASE("output root") {
    ::setenv(kOutputRootVariable, "/tmp/bnet-out", 1);
    CHECK(output_root() == "/tmp/bnet-out");
    ::unsetenv(kOutputRootVariable);
    CHECK(output_root() == "runs");
}
