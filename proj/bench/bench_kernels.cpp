// Serial reference kernels vs the OpenMP versions. Usage: hyprec_bench [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

#include "hyprec/dataset.hpp"
#include "hyprec/evaluator.hpp"
#include "hyprec/graph_geometry.hpp"
#include "hyprec/parallel.hpp"
#include "hyprec/reference.hpp"
#include "hyprec/semantic.hpp"
#include "hyprec/trainer.hpp"
#include "planted_graph.hpp"

using namespace hyprec;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-24s serial %9.4fs  parallel %9.4fs  speedup %5.2fx\n", name, serial, parallel, serial / parallel);
  std::fflush(stdout);
}

volatile double sink = 0.0;

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) set_num_threads(std::atoi(argv[1]));
  std::printf("threads: %d\n", num_threads());

  testing::PlantedOptions o;
  o.users_per_block = 400;
  o.items_per_block = 300;
  o.text_dim = 64;
  const auto pg = testing::make_planted_graph(o);

  report("semantic mining",
         best_of(3, [&] { sink = sink + reference::mine_semantic_edges(pg.text, 0.5, 10, TopKMode::PerItem).edges.size(); }),
         best_of(3, [&] { sink = sink + mine_semantic_edges(pg.text, 0.5, 10, TopKMode::PerItem).edges.size(); }));

  std::mt19937_64 rng(3);
  std::vector<std::pair<NodeId, NodeId>> edges;
  const std::size_t n = 60;
  for (std::size_t v = 1; v < n; ++v) edges.emplace_back(static_cast<NodeId>(rng() % v), static_cast<NodeId>(v));
  for (int extra = 0; extra < 30; ++extra) {
    const auto a = static_cast<NodeId>(rng() % n), b = static_cast<NodeId>(rng() % n);
    if (a != b) edges.emplace_back(a, b);
  }
  const SimpleGraph small = SimpleGraph::from_edges(n, edges);
  DeltaOptions exact;
  exact.mode = DeltaMode::Exact;
  report("delta (exact, 60 nodes)", best_of(3, [&] { sink = sink + reference::delta_exact(small).mean; }),
         best_of(3, [&] { sink = sink + delta_hyperbolicity(small, exact).mean; }));

  // W1 solves dominate here, so a smaller graph keeps the run short.
  const SimpleGraph g = largest_connected_component(collapse_graph(testing::make_planted_graph({}).graph));
  const CurvatureOptions copt;
  report("edge curvature", best_of(2, [&] { sink = sink + reference::edge_curvatures(g, copt).edges.size(); }),
         best_of(2, [&] { sink = sink + edge_curvatures(g, copt).edges.size(); }));

  const SplitDataset split = split_leave_last_two(pg.graph);
  const EvalCandidates cand = build_candidates(split, EvalSplit::Test, 1);
  const ParameterStore store = init_params(ModelKind::MuRP, split.train.entities.size(),
                                           split.train.relations.size(), 64, 1);
  const auto scorer = [&](EntityId u, EntityId i) { return score(store, Triple{u, split.buy, i}); };
  report("ranking (MuRP d=64)", best_of(3, [&] { sink = sink + reference::rank_queries(cand, scorer).size(); }),
         best_of(3, [&] { sink = sink + rank_queries(cand, scorer).size(); }));

  const KnowledgeGraph tg = add_inverse_relations(split.train);
  const NegativeSampler sampler(tg, split.buy, split.items);
  Rng srng(4);
  std::vector<TrainExample> batch;
  for (std::size_t i = 0; i < 1024; ++i) {
    TrainExample ex{tg.triples()[i % tg.size()], {}};
    sampler.sample(ex.positive, 50, srng, ex.negative_tails);
    batch.push_back(std::move(ex));
  }
  ParameterStore grads;
  report("batch gradient (1024)", best_of(3, [&] { sink = sink + reference::batch_gradient(store, batch, grads); }),
         best_of(3, [&] { sink = sink + batch_gradient(store, batch, grads); }));
  return 0;
}
