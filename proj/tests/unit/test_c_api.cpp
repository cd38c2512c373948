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


// Exercises the shared library through its C interface only.

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "bnet/bnet.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("bnet-capi-" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const char* name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Cart-pole with tiny inner searches.
bnet_config* quick_config(const char* variant, const char* budget) {
    bnet_config* c = nullptr;
    REQUIRE(bnet_config_create(&c) == BNET_OK);
    REQUIRE(bnet_config_set(c, "run.variant", variant) == BNET_OK);
    REQUIRE(bnet_config_set(c, "run.max_env_steps", budget) == BNET_OK);
    REQUIRE(bnet_config_override(c, "behavior_search.iterations=20") == BNET_OK);
    REQUIRE(bnet_config_override(c, "surrogate_search.iterations=20") == BNET_OK);
    REQUIRE(bnet_config_override(c, "critic.steps=20") == BNET_OK);
    REQUIRE(bnet_config_override(c, "critic.hidden=16,8") == BNET_OK);
    return c;
}

} // namespace

TEST_CASE("library metadata") {
    CHECK(std::string(bnet_version()).size() > 0);
    CHECK(std::string(bnet_status_string(BNET_ERR_CONFIG)) != bnet_status_string(BNET_OK));
}

TEST_CASE("null handles and arguments") {
    CHECK(bnet_config_create(nullptr) == BNET_ERR_ARGUMENT);
    CHECK(bnet_config_set(nullptr, "run.seed", "1") == BNET_ERR_ARGUMENT);
    CHECK(std::string(bnet_last_error()).find("NULL") != std::string::npos);
    CHECK(bnet_trainer_run(nullptr, nullptr) == BNET_ERR_ARGUMENT);
    bnet_config_destroy(nullptr);
    bnet_trainer_destroy(nullptr);
    bnet_genome_destroy(nullptr);
}

TEST_CASE("config errors carry the key") {
    bnet_config* c = nullptr;
    REQUIRE(bnet_config_create(&c) == BNET_OK);
    CHECK(bnet_config_set(c, "run.colour", "blue") == BNET_ERR_CONFIG);
    CHECK(std::string(bnet_last_error_key()) == "run.colour");
    CHECK(bnet_config_set(c, "run.repeats", "many") == BNET_OK);
    CHECK(bnet_config_validate(c) == BNET_ERR_CONFIG);
    CHECK(std::string(bnet_last_error_key()) == "run.repeats");
    bnet_config_destroy(c);

    bnet_config* bad = nullptr;
    CHECK(bnet_config_parse("[run]\nwat = 1\n", &bad) == BNET_ERR_CONFIG);
    CHECK(bad == nullptr);
    CHECK(bnet_config_load("/nonexistent/x.ini", &bad) == BNET_ERR_IO);
}

TEST_CASE("string outputs use the two-call pattern") {
    bnet_config* c = nullptr;
    REQUIRE(bnet_config_create(&c) == BNET_OK);
    size_t len = 0;
    REQUIRE(bnet_config_get(c, "run.env", nullptr, 0, &len) == BNET_OK);
    CHECK(len == 8);
    char small[4];
    CHECK(bnet_config_get(c, "run.env", small, sizeof small, &len) == BNET_ERR_BUFFER);
    std::string value(len + 1, '\0');
    REQUIRE(bnet_config_get(c, "run.env", value.data(), value.size(), &len) == BNET_OK);
    CHECK(value.c_str() == std::string("cartpole"));

    char hash[41];
    REQUIRE(bnet_config_hash(c, hash, sizeof hash, &len) == BNET_OK);
    CHECK(len == 40);
    bnet_config_destroy(c);
}

TEST_CASE("train, checkpoint, evaluate and reuse experience") {
    TempDir dir;
    bnet_config* c = quick_config("base", "2000");
    bnet_trainer* t = nullptr;
    REQUIRE(bnet_trainer_create(c, &t) == BNET_OK);
    bnet_genome* none = nullptr;
    CHECK(bnet_trainer_champion(t, &none) == BNET_ERR_ARGUMENT);
    REQUIRE(bnet_trainer_log_trajectories(t, (dir / "traj.csv").c_str()) == BNET_OK);

    int more = 0;
    REQUIRE(bnet_trainer_step(t, &more) == BNET_OK);
    CHECK(more == 1);
    bnet_run_summary sum{};
    REQUIRE(bnet_trainer_run(t, &sum) == BNET_OK);
    CHECK(sum.env_steps >= 2000);
    CHECK(sum.iterations > 1);
    bnet_run_summary again{};
    REQUIRE(bnet_trainer_summary(t, &again) == BNET_OK);
    CHECK(again.env_steps == sum.env_steps);

    REQUIRE(bnet_trainer_write_trace(t, (dir / "trace.csv").c_str()) == BNET_OK);
    REQUIRE(bnet_trainer_write_selection(t, (dir / "sel.csv").c_str()) == BNET_OK);
    REQUIRE(bnet_trainer_export_experience(t, (dir / "exp.txt").c_str()) == BNET_OK);
    CHECK(slurp(dir / "trace.csv").rfind("iteration,env_steps", 0) == 0);
    CHECK(slurp(dir / "sel.csv").rfind("iteration,challenger_id", 0) == 0);
    REQUIRE(bnet_config_write_manifest(c, (dir / "manifest.json").c_str(), "trace.csv", "sel.csv",
                                       "champion.genome", nullptr) == BNET_OK);
    CHECK(slurp(dir / "manifest.json").find("\"config_hash\"") != std::string::npos);

    bnet_genome* g = nullptr;
    REQUIRE(bnet_trainer_champion(t, &g) == BNET_OK);
    REQUIRE(bnet_genome_save(g, (dir / "champion.genome").c_str()) == BNET_OK);
    bnet_genome* loaded = nullptr;
    REQUIRE(bnet_genome_load((dir / "champion.genome").c_str(), &loaded) == BNET_OK);
    size_t in = 0, out = 0, active = 0;
    REQUIRE(bnet_genome_info(loaded, &in, &out, &active) == BNET_OK);
    CHECK(in == 4);
    CHECK(out == 2);
    CHECK(active <= 200);

    bnet_eval_summary e1{}, e2{};
    REQUIRE(bnet_evaluate(g, c, 5, 3, &e1) == BNET_OK);
    REQUIRE(bnet_evaluate(loaded, c, 5, 3, &e2) == BNET_OK);
    CHECK(e1.episodes == 5);
    CHECK(e1.mean == e2.mean);
    CHECK(e1.min <= e1.mean);
    CHECK(e1.mean <= e1.max);

    REQUIRE(bnet_record_experience(g, c, 3, 1, (dir / "rec.txt").c_str()) == BNET_OK);
    bnet_trainer* t2 = nullptr;
    REQUIRE(bnet_trainer_create(c, &t2) == BNET_OK);
    REQUIRE(bnet_trainer_import_experience(t2, (dir / "rec.txt").c_str()) == BNET_OK);
    CHECK(bnet_trainer_import_experience(t2, (dir / "rec.txt").c_str()) == BNET_ERR_ARGUMENT);
    REQUIRE(bnet_trainer_step(t2, &more) == BNET_OK);

    bnet_config* maze = nullptr;
    REQUIRE(bnet_config_create(&maze) == BNET_OK);
    REQUIRE(bnet_config_set(maze, "run.env", "gridmaze") == BNET_OK);
    CHECK(bnet_evaluate(g, maze, 1, 1, &e1) == BNET_ERR_ARGUMENT);
    bnet_trainer* t3 = nullptr;
    REQUIRE(bnet_trainer_create(maze, &t3) == BNET_OK);
    CHECK(bnet_trainer_import_experience(t3, (dir / "rec.txt").c_str()) == BNET_ERR_ARGUMENT);
    CHECK(bnet_trainer_import_experience(t3, (dir / "missing.txt").c_str()) == BNET_ERR_IO);
    CHECK(bnet_genome_load((dir / "missing.genome").c_str(), &loaded) == BNET_ERR_IO);

    bnet_trainer_destroy(t3);
    bnet_config_destroy(maze);
    bnet_trainer_destroy(t2);
    bnet_genome_destroy(loaded);
    bnet_genome_destroy(g);
    bnet_trainer_destroy(t);
    bnet_config_destroy(c);
}

TEST_CASE("bench") {
    TempDir dir;
    bnet_config* c = quick_config("mut", "1000");
    const uint64_t seeds[] = {1, 2, 3};
    bnet_bench_summary s{};
    REQUIRE(bnet_bench(c, seeds, 3, 2, (dir / "runs.csv").c_str(), (dir / "summary.csv").c_str(), &s) ==
            BNET_OK);
    CHECK(s.runs == 3);
    CHECK(s.failures == 0);
    const std::string runs = slurp(dir / "runs.csv");
    CHECK(runs.rfind("seed,solved,steps,iterations,error\n", 0) == 0);
    CHECK(std::count(runs.begin(), runs.end(), '\n') == 4);
    CHECK(bnet_bench(c, seeds, 0, 1, nullptr, nullptr, &s) == BNET_ERR_ARGUMENT);
    bnet_config_destroy(c);
}
