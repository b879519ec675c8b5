#include <doctest.h>

#include <stdexcept>

#include "apbda/cost.hpp"
#include "apbda/errors.hpp"
#include "apbda/oracle.hpp"
#include "helpers.hpp"
#include "support/cost_probes.hpp"

using namespace apbda;
using apbda::test::make_node;
using apbda::test::make_task;

namespace {

struct Worked {
  Task task = make_task(0, 1, 4.0, 2.0);
  AgentNode from = make_node(0);
  AgentNode to = make_node(1, 2.0, 0.5, 1.0, 2.0, 0.5);
  Link link{0, 1, 4.0, 3.0};
};

}  // namespace

TEST_CASE("compute_cost: zero weights annihilate every term") {
  const Worked w;
  const CostBreakdown cb = compute_cost(w.task, w.from, w.to, w.link, WeightVector{});
  CHECK(cb.total == 0.0);
  for (const CostTerm& t : cb.terms) CHECK(t.weighted == 0.0);
}

TEST_CASE("compute_cost: single complexity term T/C") {
  WeightVector weights;
  weights[0] = 1.0;
  const CostBreakdown cb =
      compute_cost(make_task(0, 1, 10.0, 1.0), make_node(0), make_node(1, 5.0), Link{0, 1, 1, 1}, weights);
  CHECK(cb.total == 2.0);
}

TEST_CASE("compute_cost: seven-term worked example matches the scalar reference") {
  const Worked w;
  const double unit[7] = {1, 1, 1, 1, 1, 1, 1};
  // Reference: 4/2 + 2/0.5 + 2/4 + 2*3 + 1/2 + 1/2 + 1/0.5
  const double expected = apbda::test::reference_cost(4, 2, 2, 0.5, 4, 3, 1, 2, 0.5, unit);
  CHECK(expected == 15.5);
  const CostBreakdown cb = compute_cost(w.task, w.from, w.to, w.link, WeightVector::uniform());
  CHECK(cb.total == 15.5);
  const double raws[7] = {2.0, 4.0, 0.5, 6.0, 0.5, 0.5, 2.0};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(cb.terms[i].raw == raws[i]);
    CHECK(cb.terms[i].weighted == raws[i]);
    CHECK(cb.terms[i].name == kCostTermNames[i]);
  }
}

TEST_CASE("compute_cost: doubling P doubles the priority-latency term") {
  const Worked w;
  Task doubled = w.task;
  doubled.priority *= 2;
  const WeightVector weights = apbda::test::latency_only();
  const double a = compute_cost(w.task, w.from, w.to, w.link, weights).total;
  const double b = compute_cost(doubled, w.from, w.to, w.link, weights).total;
  CHECK(b == 2.0 * a);
}

TEST_CASE("compute_cost: clamps availability, reliability, bandwidth at the floor") {
  const AgentNode to = make_node(1, 1.0, 0.0, 0.0, 1.0, 0.0);
  WeightVector weights;
  weights[1] = 1.0;
  const auto cb = compute_cost(make_task(0, 1, 1.0, 1.0), make_node(0), to, Link{0, 1, 0.0, 0.0}, weights);
  CHECK(cb.terms[1].raw == doctest::Approx(1.0 / kEpsDiv));
  CHECK(cb.terms[2].raw == doctest::Approx(1.0 / kEpsDiv));
  CHECK(cb.terms[6].raw == doctest::Approx(1.0 / kEpsDiv));
}

TEST_CASE("compute_cost: error paths") {
  const Worked w;
  AgentNode bad = w.to;
  bad.capability = 0.0;
  CHECK_THROWS_AS(compute_cost(w.task, w.from, bad, w.link, WeightVector::uniform()), InvalidMetric);
  bad = w.to;
  bad.model_sophistication = -1.0;
  CHECK_THROWS_AS(compute_cost(w.task, w.from, bad, w.link, WeightVector::uniform()), InvalidMetric);
  bad = w.to;
  bad.availability = std::nan("");
  CHECK_THROWS_AS(compute_cost(w.task, w.from, bad, w.link, WeightVector::uniform()), InvalidMetric);
  CHECK_THROWS_AS(compute_cost(w.task, w.to, w.from, w.link, WeightVector::uniform()), std::invalid_argument);
}

TEST_CASE("compute_cost: total is the left-to-right sum of weighted terms and pure") {
  RandomStream rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto in = apbda::test::random_probe_inputs(rng);
    const auto a = compute_cost(in.task, in.from, in.to, in.link, in.weights);
    const auto b = compute_cost(in.task, in.from, in.to, in.link, in.weights);
    double sum = 0.0;
    for (const auto& t : a.terms) {
      CHECK(t.raw >= 0.0);
      sum += t.weighted;
    }
    CHECK(a.total == sum);
    CHECK(a.total == b.total);
    CHECK(a.total >= 0.0);
    const double w[7] = {in.weights[0], in.weights[1], in.weights[2], in.weights[3],
                         in.weights[4], in.weights[5], in.weights[6]};
    const double ref = apbda::test::reference_cost(
        in.task.complexity, in.task.priority, in.to.capability, in.to.availability, in.link.bandwidth,
        in.link.latency, in.to.load_factor, in.to.model_sophistication, in.to.reliability, w);
    CHECK(apbda::test::rel_close(a.total, ref, 1e-12));
  }
}

TEST_CASE("compute_cost: monotonicity probes") {
  const auto report = apbda::test::run_monotonicity_probes(2000, 11);
  CHECK(report.probes == 2000);
  CHECK(report.violations.empty());
}

TEST_CASE("cost_matrix: empty, single edge, and per-edge recomputation") {
  CHECK(cost_matrix(AgentGraph{}, make_task(0, 0), WeightVector::uniform()).empty());

  AgentGraph two = apbda::test::plain_graph(2);
  two.add_link(Link{0, 1, 2.0, 3.0});
  const Task t = make_task(0, 1, 2.0, 3.0);
  const auto single = cost_matrix(two, t, WeightVector::uniform());
  REQUIRE(single.size() == 1);
  CHECK(single.at({0, 1}) ==
        compute_cost(t, two.node(0), two.node(1), *two.find_link(0, 1), WeightVector::uniform()).total);

  const Instance inst = random_instance(10, 0.5, MetricRanges{}, 3);
  const auto matrix = cost_matrix(inst.graph, inst.task, inst.weights);
  CHECK(matrix.size() == inst.graph.link_count());
  for (const auto& [id, node] : inst.graph.nodes()) {
    for (const Link& l : inst.graph.out_links(id)) {
      const AgentNode from = inst.graph.node(l.from);
      const AgentNode to = inst.graph.node(l.to);
      CHECK(matrix.at({l.from, l.to}) == compute_cost(inst.task, from, to, l, inst.weights).total);
    }
  }
}
