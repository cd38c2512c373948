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


#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include <doctest.h>

#include "bnet/cgp.hpp"
#include "bnet/error.hpp"

using namespace bnet;

namespace {

std::shared_ptr<const CgpConfig> make_config(std::size_t in, std::size_t out) {
    auto c = std::make_shared<CgpConfig>();
    c->n_inputs = in;
    c->n_outputs = out;
    return c;
}

std::vector<double> random_state(std::size_t n, Rng& rng) {
    std::vector<double> s(n);
    for (auto& v : s) v = uniform(rng, -3.0, 3.0);
    return s;
}

// A small hand-built genome; nodes not listed keep weight 0 and point at input 0.
Genome tiny_genome(std::shared_ptr<const CgpConfig> cfg, std::vector<std::uint32_t> outputs,
                   NodeFunction f = NodeFunction::Tanh) {
    const std::size_t n = cfg->n_nodes, a = cfg->arity;
    return Genome(cfg, std::vector<NodeFunction>(n, f), std::vector<std::uint32_t>(n * a, 0),
                  std::vector<double>(n * a, 0.0), std::move(outputs));
}

} // namespace

TEST_CASE("random genomes are reproducible and respect the encoding") {
    auto cfg = make_config(4, 2);
    Rng a(42), b(42);
    const Genome g1 = random_genome(cfg, a);
    const Genome g2 = random_genome(cfg, b);
    CHECK(g1 == g2);
    CHECK(serialize(g1) == serialize(g2));

    for (std::size_t i = 0; i < g1.size(); ++i) {
        const NodeGene node = g1.node(i);
        REQUIRE(node.connections.size() == 10);
        REQUIRE(node.weights.size() == 10);
        for (auto c : node.connections) CHECK(c < cfg->n_inputs + i);
        for (double w : node.weights) CHECK((w >= -1.0 && w <= 1.0));
    }
    for (auto o : g1.outputs()) CHECK(o < cfg->n_inputs + cfg->n_nodes);
}

TEST_CASE("initial weights are uniform over the weight range") {
    auto cfg = make_config(4, 2);
    Rng rng(7);
    std::vector<double> w;
    while (w.size() < 1000) {
        const Genome g = random_genome(cfg, rng);
        for (double x : g.weights()) {
            if (w.size() == 1000) break;
            w.push_back(x);
        }
    }
    double mean = 0.0;
    for (double x : w) mean += x;
    mean /= 1000.0;
    // U(-1, 1) has standard deviation 1/sqrt(3); allow four standard errors.
    CHECK(std::abs(mean) < 4.0 / std::sqrt(3.0 * 1000.0));
}

TEST_CASE("invalid configurations are rejected") {
    Rng rng(1);
    CgpConfig c;
    c.n_inputs = 0;
    c.n_outputs = 2;
    CHECK_THROWS_AS(random_genome(c, rng), InvalidArgument);
    c.n_inputs = 2;
    c.function_set.clear();
    CHECK_THROWS_AS(random_genome(c, rng), InvalidArgument);
    CHECK_THROWS_AS(parse_node_function("softmax"), InvalidArgument);
}

TEST_CASE("decode keeps exactly the nodes reachable from the outputs") {
    auto cfg = make_config(3, 2);
    SUBCASE("outputs on inputs") {
        const Phenotype p = decode(tiny_genome(cfg, {0, 2}));
        CHECK(p.active_count() == 0);
    }
    SUBCASE("single chain") {
        // Node 5 reads inputs only (default connections point at input 0).
        const Phenotype p = decode(tiny_genome(cfg, {3 + 5, 1}));
        REQUIRE(p.active_count() == 1);
        CHECK(p.active_nodes()[0] == 5);
    }
    SUBCASE("idempotent") {
        Rng rng(3);
        const Genome g = random_genome(cfg, rng);
        CHECK(decode(g) == decode(g));
        CHECK(decode(g).active_count() == g.active_count());
    }
}

TEST_CASE("forward applies weighted sums and the softmax readout") {
    auto cfg = make_config(3, 2);
    SUBCASE("zero weights give a uniform distribution") {
        const auto d = forward(tiny_genome(cfg, {3 + 0, 3 + 1}), std::vector<double>{0.3, -2.0, 5.0});
        CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("relu clamps negative input") {
        auto c = std::make_shared<CgpConfig>(*cfg);
        std::vector<double> w(c->n_nodes * c->arity, 0.0);
        w[0] = 1.0;  // node 0, connection 0 -> input 0
        const Genome g(c, std::vector<NodeFunction>(c->n_nodes, NodeFunction::Relu),
                       std::vector<std::uint32_t>(c->n_nodes * c->arity, 0), w, {3 + 0, 1});
        // Readouts: relu(-3) = 0 and input 1 = 0, so the classes tie.
        const auto d = forward(g, std::vector<double>{-3.0, 0.0, 0.0});
        CHECK(d[0] == 0.5);
        // A positive input passes through: readouts (2, 0).
        const auto e = forward(g, std::vector<double>{2.0, 0.0, 0.0});
        CHECK(e[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-14));
    }
    SUBCASE("state checks") {
        const Phenotype p = decode(tiny_genome(cfg, {3, 4}));
        CHECK_THROWS_AS(p.forward(std::vector<double>{1.0, 2.0}), InvalidArgument);
        CHECK_THROWS_AS(p.forward(std::vector<double>{1.0, std::nan(""), 0.0}), InvalidArgument);
    }
}

TEST_CASE("node functions") {
    CHECK(apply_node_function(NodeFunction::Gaussian, 0.0) == 1.0);
    CHECK(apply_node_function(NodeFunction::Gaussian, 2.0) == doctest::Approx(std::exp(-4.0)));
    CHECK(apply_node_function(NodeFunction::Step, 0.0) == 1.0);
    CHECK(apply_node_function(NodeFunction::Step, -1e-300) == 0.0);
    CHECK(apply_node_function(NodeFunction::Relu, -2.0) == 0.0);
    CHECK(apply_node_function(NodeFunction::Sigmoid, 0.0) == 0.5);
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double x = uniform(rng, -40.0, 40.0);
        CHECK(apply_node_function(NodeFunction::Tanh, x) == doctest::Approx(std::tanh(x)).epsilon(1e-14));
        CHECK(apply_node_function(NodeFunction::Sigmoid, x) ==
              doctest::Approx(1.0 / (1.0 + std::exp(-x))).epsilon(1e-14));
    }
}

TEST_CASE("distributions are normalised, pure, and batching is exact") {
    auto cfg = make_config(6, 3);
    Rng rng(11);
    for (int g = 0; g < 100; ++g) {
        const Phenotype p = decode(random_genome(cfg, rng));
        StateBatch batch(6);
        std::vector<ActionDistribution> single;
        for (int k = 0; k < 100; ++k) {
            const auto s = random_state(6, rng);
            const auto d = p.forward(s);
            double sum = 0.0;
            for (double x : d.probabilities) {
                REQUIRE(x >= 0.0);
                sum += x;
            }
            REQUIRE(std::abs(sum - 1.0) <= 1e-9);
            REQUIRE(p.forward(s).probabilities == d.probabilities);
            batch.push_back(s);
            single.push_back(d);
        }
        const auto out = p.forward_batch(batch);
        for (std::size_t k = 0; k < single.size(); ++k)
            for (std::size_t a = 0; a < 3; ++a) REQUIRE(out[k * 3 + a] == single[k][a]);
    }
}

TEST_CASE("mutation") {
    auto cfg = make_config(4, 2);
    Rng rng(13);
    const Genome parent = random_genome(cfg, rng);

    SUBCASE("rate 0 is a no-op and the parent is untouched") {
        const std::string before = serialize(parent);
        CHECK(mutate(parent, 0.0, rng) == parent);
        CHECK(serialize(parent) == before);
    }
    SUBCASE("rate 1 resamples every gene") {
        MutationStats st;
        const Genome child = mutate(parent, 1.0, rng, &st);
        CHECK(st.genes_visited == parent.gene_count());
        CHECK(st.genes_resampled == parent.gene_count());
        // Weights never affect the active set, so none can fall back to the parent.
        for (std::size_t i = 0; i < child.weights().size(); ++i) CHECK(child.weights()[i] != parent.weights()[i]);
        CHECK(decode(child).active_count() <= 200);
    }
    SUBCASE("rate outside [0, 1]") {
        CHECK_THROWS_AS(mutate(parent, -0.1, rng), InvalidArgument);
        CHECK_THROWS_AS(mutate(parent, 1.5, rng), InvalidArgument);
    }
    SUBCASE("resample fraction matches the rate") {
        MutationStats st;
        while (st.genes_visited < 100000) (void)mutate(parent, 0.05, rng, &st);
        const double frac = static_cast<double>(st.genes_resampled) / static_cast<double>(st.genes_visited);
        CHECK(std::abs(frac - 0.05) <= 0.005);
    }
    SUBCASE("function gene agreement converges to 1 - rate (1 - 1/|domain|)") {
        const double rate = 0.2;
        std::size_t same = 0, total = 0;
        for (int k = 0; k < 50; ++k) {
            const Genome child = mutate(parent, rate, rng);
            for (std::size_t i = 0; i < child.size(); ++i, ++total)
                same += child.functions()[i] == parent.functions()[i];
        }
        const double expected = 1.0 - rate * (1.0 - 1.0 / 5.0);
        const double p = static_cast<double>(same) / static_cast<double>(total);
        const double se = std::sqrt(expected * (1.0 - expected) / static_cast<double>(total));
        CHECK(std::abs(p - expected) <= 4.0 * se);
    }
    SUBCASE("chains of mutations stay acyclic and under the active cap") {
        Genome g = parent;
        for (int k = 0; k < 300; ++k) {
            g = mutate(g, 0.05, rng);
            const Phenotype p = decode(g);
            REQUIRE(p.active_count() <= 200);
            for (std::size_t i = 0; i < g.size(); ++i)
                for (auto c : g.node(i).connections) REQUIRE(c < cfg->n_inputs + i);
            // Resolved sources always point backwards in the evaluation buffer.
            for (std::size_t j = 0; j < p.active_count(); ++j)
                for (std::size_t a = 0; a < p.arity(); ++a)
                    REQUIRE(p.sources()[j * p.arity() + a] < p.n_inputs() + j);
        }
    }
}

TEST_CASE("active node cap is enforced on dense genomes") {
    auto cfg = std::make_shared<CgpConfig>();
    cfg->n_inputs = 2;
    cfg->n_outputs = 4;
    cfg->max_active = 20;
    Rng rng(17);
    const Genome g = random_genome(cfg, rng);
    CHECK(g.active_count() <= 20);
    MutationStats st;
    Genome x = g;
    for (int k = 0; k < 100; ++k) {
        x = mutate(x, 0.2, rng, &st);
        REQUIRE(x.active_count() <= 20);
    }
    CHECK(st.cap_rejections > 0);
}

TEST_CASE("serialization round trip is exact") {
    auto cfg = make_config(5, 3);
    auto c2 = std::make_shared<CgpConfig>(*cfg);
    c2->levels_back = 30;
    c2->weight_min = -2.5;
    Rng rng(19);
    for (const auto& c : {cfg, std::shared_ptr<const CgpConfig>(c2)}) {
        const Genome g = mutate(random_genome(c, rng), 0.3, rng);
        const Genome back = deserialize_genome(serialize(g));
        CHECK(back == g);
        CHECK(back.config() == g.config());
        const auto path = std::filesystem::temp_directory_path() / "bnet_genome_roundtrip.txt";
        save_genome(g, path.string());
        CHECK(load_genome(path.string()) == g);
        std::filesystem::remove(path);
    }
    CHECK_THROWS_AS(deserialize_genome("bnet-genome 99\n"), InvalidArgument);
}
