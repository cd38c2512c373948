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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any failed.
//
// Long criteria stop as soon as their verdict can no longer change. A
// criterion that exceeds BNET_ACCEPTANCE_MINUTES of wall-clock time (default
// 90) is reported as FAIL with the seeds completed so far.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bnet/trainer.hpp"

using namespace bnet;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    if (!pass) ++g_failures;
}

double minutes_limit() {
    if (const char* v = std::getenv("BNET_ACCEPTANCE_MINUTES")) return std::atof(v);
    return 90.0;
}

struct SeedRun {
    std::uint64_t seed = 0;
    bool solved = false;
    std::uint64_t steps = 0;  // steps to solve, the budget if unsolved
    RunResult result;
};

struct Campaign {
    std::vector<SeedRun> runs;
    bool timed_out = false;
    double minutes = 0.0;

    std::size_t solved() const {
        return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const SeedRun& r) { return r.solved; }));
    }
    std::size_t failed() const { return runs.size() - solved(); }
    double median() const {
        std::vector<double> v;
        for (const auto& r : runs) v.push_back(static_cast<double>(r.steps));
        std::sort(v.begin(), v.end());
        if (v.empty()) return 0.0;
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }
};

// Runs seeds 1..n in order. `decided(c)` may end the campaign early once the
// verdict is fixed.
template <typename Decided>
Campaign campaign(const std::string& label, TrainerConfig config, std::size_t n, Decided decided) {
    Campaign c;
    const auto start = Clock::now();
    const double limit = minutes_limit();
    for (std::uint64_t seed = 1; seed <= n && !decided(c) && !c.timed_out; ++seed) {
        config.seed = seed;
        Trainer t(config);
        while (t.step()) {
            c.minutes = std::chrono::duration<double>(Clock::now() - start).count() / 60.0;
            if (c.minutes > limit) {
                c.timed_out = true;
                break;
            }
        }
        if (c.timed_out) break;
        const RunResult& r = t.result();
        c.runs.push_back({seed, r.solved, r.solved ? r.steps_to_solve : config.max_env_steps, r});
        std::cerr << "  [" << label << "] seed " << seed << ": " << (r.solved ? "solved" : "unsolved")
                  << " steps=" << c.runs.back().steps << " champion=" << r.champion_mean << '\n';
    }
    c.minutes = std::chrono::duration<double>(Clock::now() - start).count() / 60.0;
    return c;
}

std::string describe(const Campaign& c, std::size_t n) {
    std::ostringstream s;
    s << c.solved() << "/" << c.runs.size() << " solved";
    if (c.runs.size() < n) s << " (" << (c.timed_out ? "time limit hit" : "verdict fixed") << " after " << c.runs.size() << " of " << n << " seeds)";
    s << ", median steps " << c.median();
    s.precision(3);
    s << ", " << c.minutes << " min";
    return s.str();
}

bool property_suite(std::string& detail) {
    doctest::Context ctx;
    std::ostringstream sink;
    ctx.setCout(&sink);
    ctx.setOption("no-breaks", true);
    const int rc = ctx.run();
    const std::string text = sink.str();
    const auto pos = text.find("[doctest] test cases:");
    detail = pos == std::string::npos ? "no summary" : text.substr(pos, text.find('\n', pos) - pos);
    if (rc != 0) std::cerr << text;
    return rc == 0;
}

std::string traces(TrainerConfig c) {
    Trainer t(std::move(c));
    const RunResult r = t.run();
    std::ostringstream out;
    write_trace_csv(out, r);
    write_selection_csv(out, r);
    return out.str();
}

} // namespace

int main() {
    // CartPole, Base: >= 8/10 seeds solved within 50k steps, median <= 20k.
    const TrainerConfig cartpole = default_config("cartpole");
    const Campaign base = campaign("cartpole base", cartpole, 10, [](const Campaign&) { return false; });
    report(!base.timed_out && base.runs.size() == 10 && base.solved() >= 8 && base.median() <= 20000.0,
           "cartpole-base-solve-rate", describe(base, 10) + " (need >= 8/10, median <= 20000)");

    // Mutation only is slower than Base.
    TrainerConfig mut = cartpole;
    mut.variant = "mut";
    mut.generators = variant_generators("mut");
    const Campaign mc_mut = campaign("cartpole mut", mut, 10, [](const Campaign&) { return false; });
    report(!mc_mut.timed_out && mc_mut.runs.size() == 10 && base.runs.size() == 10 &&
               mc_mut.median() > base.median(),
           "cartpole-mut-slower-than-base",
           "mut median " + std::to_string(mc_mut.median()) + " vs base median " + std::to_string(base.median()));

    // Best candidate types over the Base runs.
    {
        std::map<std::string, std::size_t> wins;
        std::size_t iterations = 0, fresh = 0;
        for (const auto& run : base.runs)
            for (const auto& rep : run.result.reports) {
                if (rep.best_type == "initial") continue;
                ++iterations;
                if (rep.best_type != "champion") {
                    ++fresh;
                    ++wins[rep.best_type];
                }
            }
        const double frac = iterations ? static_cast<double>(fresh) / static_cast<double>(iterations) : 0.0;
        std::size_t top = 0;
        for (const auto& [type, n] : wins) top = std::max(top, n);
        const bool surrogate_top = wins["surrogate"] == top && top > 0;
        std::ostringstream d;
        d << "fresh candidate best in " << fresh << "/" << iterations << " iterations (" << frac << "); wins";
        for (const auto& [type, n] : wins) d << " " << type << "=" << n;
        report(iterations > 0 && frac >= 0.5 && !surrogate_top, "best-candidate-type", d.str());
    }

    // MountainCar, Base: >= 6/10 within 150k steps.
    TrainerConfig mountain = default_config("mountaincar");
    mountain.max_env_steps = 150000;
    const Campaign mc = campaign("mountaincar base", mountain, 10,
                                 [](const Campaign& c) { return c.solved() >= 6 || c.failed() > 4; });
    report(!mc.timed_out && mc.solved() >= 6, "mountaincar-base-solve-rate", describe(mc, 10) + " (need >= 6/10)");

    // GridMaze, BDist+Cross: fitness >= 23 within 5000 steps in >= 4/5 seeds.
    const TrainerConfig maze = default_config("gridmaze");
    const Campaign gm = campaign("gridmaze bdist+cross", maze, 5,
                                 [](const Campaign& c) { return c.solved() >= 4 || c.failed() > 1; });
    {
        std::ostringstream best;
        best << " best champion fitness per seed:";
        for (const auto& r : gm.runs) best << " " << r.result.champion_mean;
        report(!gm.timed_out && gm.solved() >= 4, "gridmaze-bdist-cross", describe(gm, 5) + " (need >= 4/5);" + best.str());
    }

    {
        std::string detail;
        report(property_suite(detail), "property-suite", detail);
    }

    // Determinism: reruns give byte-identical traces.
    {
        bool same = true;
        std::string detail;
        for (const char* env : {"cartpole", "mountaincar", "gridmaze"}) {
            TrainerConfig c = default_config(env);
            c.seed = 7;
            c.max_env_steps = 2500;
            c.behavior_search.iterations = 100;
            c.surrogate_search.iterations = 100;
            c.critic.steps = 100;
            const bool eq = traces(c) == traces(c);
            same = same && eq;
            detail += std::string(" ") + env + (eq ? "=identical" : "=DIFFERENT");
        }
        report(same, "determinism", detail.substr(1));
    }

    return g_failures == 0 ? 0 : 1;
}
