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


#include <algorithm>
#include <cmath>
#include <sstream>

#include <doctest.h>

#include "bnet/error.hpp"
#include "bnet/trajectory.hpp"

using namespace bnet;

namespace {

Trajectory make_trajectory(std::vector<double> rewards, double fitness = 0.0, std::size_t dim = 2) {
    Trajectory t;
    for (std::size_t k = 0; k < rewards.size(); ++k) {
        Transition tr;
        tr.state.assign(dim, static_cast<double>(k));
        tr.action = k % 2;
        tr.reward = rewards[k];
        tr.probabilities = ActionDistribution{{0.6, 0.4}};
        t.transitions.push_back(tr);
        t.total_reward += rewards[k];
    }
    t.fitness = fitness;
    return t;
}

Trajectory with_fitness(double f) {
    Trajectory t = make_trajectory({1.0});
    t.fitness = f;
    return t;
}

std::vector<double> fitnesses(const EliteArchive& a) {
    std::vector<double> f;
    for (const auto& e : a.entries()) f.push_back(e.fitness);
    return f;
}

} // namespace

TEST_CASE("discounted returns") {
    const auto r = discounted_returns(make_trajectory({1, 1, 1}), 0.5);
    CHECK(r == std::vector<double>{1.75, 1.5, 1.0});
    CHECK(discounted_returns(make_trajectory({3, -1, 2}), 0.0) == std::vector<double>{3, -1, 2});
    CHECK(discounted_returns(make_trajectory(std::vector<double>(200, 1.0)), 1.0)[0] == 200.0);
    CHECK_THROWS_AS(discounted_returns(make_trajectory({1}), 1.5), InvalidArgument);
    CHECK_THROWS_AS(discounted_returns(make_trajectory({1}), -0.1), InvalidArgument);
    CHECK_THROWS_AS(discounted_returns(Trajectory{}, 0.9), InvalidArgument);

    Rng rng(1);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> rewards(20);
        for (auto& x : rewards) x = uniform(rng, -2.0, 2.0);
        const double gamma = uniform01(rng);
        const auto fast = discounted_returns(make_trajectory(rewards), gamma);
        for (std::size_t t = 0; t < 20; ++t) {
            double direct = 0.0;
            for (std::size_t j = t; j < 20; ++j) direct += std::pow(gamma, static_cast<double>(j - t)) * rewards[j];
            CHECK(std::abs(fast[t] - direct) <= 1e-12);
        }
    }
}

TEST_CASE("elite archive fill and rejection") {
    EliteArchive a(3, 2);
    CHECK(a.offer(with_fitness(-5.0)));
    CHECK(a.offer(with_fitness(1.0)));
    CHECK(a.offer(with_fitness(0.0)));
    CHECK(a.full());
    CHECK(fitnesses(a) == std::vector<double>{1.0, 0.0, -5.0});
    CHECK_FALSE(a.offer(with_fitness(-6.0)));
    CHECK_FALSE(a.offer(with_fitness(-5.0)));  // ties do not replace
    CHECK(a.size() == 3);
}

TEST_CASE("replacement budget keeps only the best newcomers") {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        EliteArchive a(10, 2);
        std::vector<double> old;
        for (int k = 0; k < 10; ++k) {
            old.push_back(std::round(uniform(rng, 0.0, 50.0)));
            a.offer(with_fitness(old.back()));
        }
        a.begin_iteration();
        std::vector<Trajectory> batch;
        std::vector<double> fresh;
        for (int k = 0; k < 5; ++k) {
            fresh.push_back(std::round(uniform(rng, 0.0, 100.0)));
            batch.push_back(with_fitness(fresh.back()));
        }
        a.offer_batch(batch);

        // Brute force: the two best newcomers each replace the minimum if strictly better.
        std::sort(fresh.rbegin(), fresh.rend());
        std::vector<double> expect = old;
        std::size_t replaced = 0;
        for (double f : fresh) {
            auto lo = std::min_element(expect.begin(), expect.end());
            if (replaced < 2 && f > *lo) {
                *lo = f;
                ++replaced;
            }
        }
        std::sort(expect.rbegin(), expect.rend());
        REQUIRE(fitnesses(a) == expect);
        REQUIRE(a.replacements_this_iteration() == replaced);
    }
}

TEST_CASE("five superior episodes with budget two") {
    EliteArchive a(4, 2);
    for (double f : {1.0, 2.0, 3.0, 4.0}) a.offer(with_fitness(f));
    a.begin_iteration();
    CHECK(a.offer_batch({with_fitness(10), with_fitness(14), with_fitness(11), with_fitness(13), with_fitness(12)}) == 2);
    CHECK(fitnesses(a) == std::vector<double>{14, 13, 4, 3});
    a.begin_iteration();
    CHECK(a.offer(with_fitness(12)));
    CHECK(a.min_fitness() == 4.0);
}

TEST_CASE("archive minimum never decreases once full") {
    Rng rng(6);
    EliteArchive a(10, 2);
    double last = -1e300;
    for (int it = 0; it < 100; ++it) {
        a.begin_iteration();
        std::vector<Trajectory> batch;
        for (int k = 0; k < 5; ++k) batch.push_back(with_fitness(uniform(rng, 0.0, 100.0)));
        a.offer_batch(batch);
        if (a.full()) {
            CHECK(a.min_fitness() >= last);
            last = a.min_fitness();
        }
    }
}

TEST_CASE("reference set adapts to one-hot without touching the archive") {
    EliteArchive a(5, 2);
    Trajectory t = make_trajectory({1.0, 1.0}, 2.0);
    t.transitions[0].action = 0;
    t.transitions[1].action = 0;
    t.transitions[1].probabilities = ActionDistribution{{0.3, 0.7}};
    a.offer(t);
    a.offer(make_trajectory({1, 1, 1}, 3.0));
    a.offer(make_trajectory({1, 1, 1, 1, 1}, 1.0));

    const auto refs = reference_set(a);
    REQUIRE(refs.size() == 3);
    CHECK(refs[0].states.size() == 3);
    CHECK(refs[1].states.size() == 2);
    CHECK(refs[2].states.size() == 5);
    CHECK(refs[1].adapted_probabilities == std::vector<double>{1, 0, 1, 0});
    CHECK(a.entries()[1].transitions[0].probabilities.probabilities == std::vector<double>{0.6, 0.4});
    CHECK(a.entries()[1].transitions[1].probabilities.probabilities == std::vector<double>{0.3, 0.7});
    CHECK_THROWS_AS(reference_set(EliteArchive(3, 1)), InvalidArgument);
}

TEST_CASE("experience pool") {
    ExperiencePool pool(10);
    Trajectory t = make_trajectory(std::vector<double>(12, 1.0));
    CHECK_THROWS_AS(pool.append(t), InvalidArgument);
    t.returns = discounted_returns(t, 0.9);
    pool.append(t);
    CHECK(pool.size() == 10);
    // The oldest two transitions were evicted.
    CHECK(pool[0].state[0] == 2.0);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(pool[i].ret == t.returns[i + 2]);
        CHECK(pool[i].action == t.transitions[i + 2].action);
    }
    ExperiencePool big(1000);
    std::size_t total = 0;
    for (std::size_t n : {3u, 7u, 11u}) {
        Trajectory e = make_trajectory(std::vector<double>(n, 0.5));
        e.returns = discounted_returns(e, 0.99);
        big.append(e);
        total += n;
    }
    CHECK(big.size() == total);
}

TEST_CASE("experience files round trip") {
    ExperienceSet set;
    set.env_name = "cartpole";
    set.observation_dim = 2;
    set.n_actions = 2;
    set.episodes.push_back(make_trajectory({1.0, 0.1, -0.3}, 0.8));
    set.episodes.push_back(make_trajectory({1.0 / 3.0}, 1.0 / 3.0));
    std::stringstream ss;
    write_experience(ss, set);
    const ExperienceSet back = read_experience(ss);
    CHECK(back.env_name == "cartpole");
    REQUIRE(back.episodes.size() == 2);
    for (std::size_t e = 0; e < 2; ++e) {
        const auto& a = set.episodes[e];
        const auto& b = back.episodes[e];
        CHECK(a.fitness == b.fitness);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a.transitions[k].state == b.transitions[k].state);
            CHECK(a.transitions[k].action == b.transitions[k].action);
            CHECK(a.transitions[k].reward == b.transitions[k].reward);
            CHECK(a.transitions[k].probabilities.probabilities == b.transitions[k].probabilities.probabilities);
        }
    }
    std::stringstream bad("bnet-experience 7\n");
    CHECK_THROWS_AS(read_experience(bad), IoError);
    CHECK_THROWS_AS(load_experience("/nonexistent/experience.txt"), IoError);
}

TEST_CASE("trajectory log") {
    std::stringstream ss;
    TrajectoryLog log(ss);
    log.write(3, "mutant", make_trajectory({1.0, 2.0}, 3.0));
    std::string header, row;
    std::getline(ss, header);
    CHECK(header == "iteration,candidate_type,step,action,reward,fitness");
    std::getline(ss, row);
    CHECK(row == "3,mutant,0,0,1,3");
}
