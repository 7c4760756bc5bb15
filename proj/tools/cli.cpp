#include "hyprec/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "hyprec/ball_kernels.hpp"
#include "hyprec/checkpoint.hpp"
#include "hyprec/config.hpp"
#include "hyprec/dataset.hpp"
#include "hyprec/errors.hpp"
#include "hyprec/evaluator.hpp"
#include "hyprec/graph_geometry.hpp"
#include "hyprec/io.hpp"
#include "hyprec/parallel.hpp"
#include "hyprec/semantic.hpp"
#include "hyprec/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hyprec::cli {

namespace {

// RunConfig fields exposed as flags; only flags given on the command line
// override the --config file.
class ConfigFlags {
 public:
  void add(CLI::App* app, std::initializer_list<std::string_view> keys) {
    app->add_option("--config", path_, "JSON run configuration (flags override its values)");
    for (std::string_view key : keys) add_key(app, std::string(key));
  }

  RunConfig resolve() const {
    RunConfig c = path_.empty() ? RunConfig{} : load_config(path_);
    for (const auto& [opt, apply] : bound_) {
      if (opt->count() > 0) apply(c);
    }
    if (space_flag_ && space_flag_->count() > 0) c.space = space_;
    return c;
  }

 private:
  template <class T>
  void bind(CLI::App* app, const std::string& key, T RunConfig::*field, const std::string& help) {
    auto* opt = app->add_option("--" + key, flags_.*field, help)->capture_default_str();
    bound_.emplace_back(opt, [this, field](RunConfig& c) { c.*field = flags_.*field; });
  }

  void add_key(CLI::App* app, const std::string& key) {
    if (key == "model") {
      std::string kinds;
      for (ModelKind k : all_model_kinds()) kinds += (kinds.empty() ? "" : ", ") + std::string(to_string(k));
      bind(app, key, &RunConfig::model, "Model kind: " + kinds);
    } else if (key == "space") {
      space_flag_ = app->add_option("--space", space_, "Expected geometry of the model (checked)");
    } else if (key == "dim") {
      bind(app, key, &RunConfig::dim, "Embedding dimension");
    } else if (key == "lr") {
      bind(app, key, &RunConfig::lr, "Adam learning rate");
    } else if (key == "batch_size") {
      bind(app, key, &RunConfig::batch_size, "Positives per minibatch");
    } else if (key == "max_epochs") {
      bind(app, key, &RunConfig::max_epochs, "Epoch limit");
    } else if (key == "neg_samples") {
      bind(app, key, &RunConfig::neg_samples, "Corrupted tails per positive");
    } else if (key == "eval_every") {
      bind(app, key, &RunConfig::eval_every, "Epochs between dev evaluations");
    } else if (key == "patience") {
      bind(app, key, &RunConfig::patience, "Dev evaluations without improvement before stopping");
    } else if (key == "l2") {
      bind(app, key, &RunConfig::l2, "L2 penalty on stored coordinates");
    } else if (key == "seed") {
      bind(app, key, &RunConfig::seed, "First training seed");
    } else if (key == "seeds") {
      bind(app, key, &RunConfig::seeds, "Number of seeds (seed, seed+1, ...)");
    } else if (key == "eval_seed") {
      bind(app, key, &RunConfig::eval_seed, "Seed of the evaluation negatives");
    } else if (key == "relations") {
      auto* opt = app->add_option("--relations", flags_.relations, "Relations to keep (default: all)")
                      ->delimiter(',');
      bound_.emplace_back(opt, [this](RunConfig& c) { c.relations = flags_.relations; });
    } else if (key == "triples") {
      bind(app, key, &RunConfig::triples, "Triple TSV file");
    } else if (key == "embeddings") {
      bind(app, key, &RunConfig::embeddings, "Item embedding file");
    } else if (key == "out_dir") {
      bind(app, key, &RunConfig::out_dir, "Output directory");
    } else if (key == "threads") {
      bind(app, key, &RunConfig::threads, "Worker threads (0: HYPREC_THREADS or all cores)");
    } else if (key == "threshold") {
      bind(app, key, &RunConfig::threshold, "Minimum cosine similarity");
    } else if (key == "budget") {
      bind(app, key, &RunConfig::budget, "Edge budget K");
    } else if (key == "mode") {
      bind(app, key, &RunConfig::mode, "Top-K mode: global or per-item");
    } else if (key == "grid") {
      auto* opt = app->add_flag("--grid", flags_.grid, "Search the lr x batch_size grid on dev HR@10");
      bound_.emplace_back(opt, [this](RunConfig& c) { c.grid = flags_.grid; });
    }
  }

  std::string path_;
  RunConfig flags_;
  std::string space_;
  CLI::Option* space_flag_ = nullptr;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> bound_;
};

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

void require_path(const std::string& value, const char* flag) {
  if (value.empty()) throw InputError(std::string("missing required --") + flag);
}

json metrics_json(const SliceMetrics& m) {
  return {{"HR@10", m.hr10}, {"DCG@10", m.dcg10}, {"n_users", m.n_users}};
}

// Hashed configuration snapshot: everything except out_dir and threads.
json config_snapshot(const RunConfig& c) {
  json j = config_to_json(c);
  j.erase("out_dir");
  j.erase("threads");
  return j;
}

struct Pipeline {
  KnowledgeGraph graph;  // relation-filtered input
  SplitDataset split;
  KnowledgeGraph train_graph;  // train split plus inverse relations
};

Pipeline prepare(const RunConfig& c) {
  require_path(c.triples, "triples");
  Pipeline p;
  p.graph = filter_relations(read_triple_file(c.triples), c.relations);
  p.split = split_leave_last_two(p.graph);
  p.train_graph = add_inverse_relations(p.split.train);
  return p;
}

// ---------------------------------------------------------------- augment

int cmd_augment(const RunConfig& c) {
  require_path(c.triples, "triples");
  require_path(c.embeddings, "embeddings");
  c.validate();
  const std::string hash = config_hash(c);
  const std::string input_bytes = read_file(c.triples);
  std::istringstream in(input_bytes);
  const KnowledgeGraph g = parse_triples(in, c.triples);
  const ItemEmbeddingTable table = read_embedding_file(c.embeddings);

  std::vector<std::string> items;
  if (const auto buy = g.relations.find(kBuyRelation)) {
    std::vector<char> seen(g.entities.size(), 0);
    for (const auto& t : g.triples()) {
      if (t.relation == *buy && !seen[static_cast<std::size_t>(t.tail)]) {
        seen[static_cast<std::size_t>(t.tail)] = 1;
        items.push_back(g.entities.name(t.tail));
      }
    }
  }
  std::sort(items.begin(), items.end());
  std::vector<std::string> missing;
  for (const auto& i : items) {
    if (!table.pooled.contains(i)) missing.push_back(i);
  }

  const SimilarityEdgeSet edges = mine_semantic_edges(table, c.threshold, c.budget, c.topk_mode());
  const KnowledgeGraph merged = merge_semantic_edges(g, edges);
  const fs::path out = ensure_dir(c.out_dir);

  std::ostringstream sem;
  sem << "# config_hash=" << hash << "\n";
  for (const auto& e : edges.edges) sem << e.item_a << '\t' << e.item_b << '\t' << format_double(e.similarity) << '\n';
  write_file(out / "semantic_edges.tsv", sem.str());

  // Input bytes verbatim, new triples appended.
  std::string merged_bytes = input_bytes;
  const auto added = std::span(merged.triples()).subspan(g.size());
  if (!added.empty() && !merged_bytes.empty() && merged_bytes.back() != '\n') merged_bytes += '\n';
  std::ostringstream extra;
  write_triples(extra, merged, added);
  merged_bytes += extra.str();
  write_file(out / "merged.tsv", merged_bytes);

  json table_rows = json::array();
  const auto counts = g.relation_counts();
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (g.relations.name(static_cast<RelationId>(r)) == kSemanticRelation) continue;
    table_rows.push_back({{"relation", g.relations.name(static_cast<RelationId>(r))}, {"triples", counts[r]}});
  }
  std::size_t semantic_total = 0;
  if (const auto sr = merged.relations.find(kSemanticRelation)) semantic_total = merged.relation_counts()[static_cast<std::size_t>(*sr)];
  table_rows.push_back({{"relation", "semantic"}, {"triples", semantic_total}});

  json report{{"config_hash", hash},
              {"threshold", c.threshold},
              {"budget", c.budget},
              {"mode", c.mode},
              {"edges", edges.edges.size()},
              {"added_triples", added.size()},
              {"table", table_rows},
              {"coverage",
               {{"items", items.size()},
                {"with_embeddings", items.size() - missing.size()},
                {"fraction", items.empty() ? 0.0 : double(items.size() - missing.size()) / double(items.size())},
                {"missing", missing}}}};
  write_json(out / "augment_report.json", report);
  std::cout << "semantic edges: " << edges.edges.size() << ", added triples: " << added.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeFlags {
  std::string triples;
  std::string out_dir = ".";
  std::string delta_mode = "sampled";
  std::uint64_t delta_samples = DeltaOptions{}.n_samples;
  std::size_t delta_pool = DeltaOptions{}.pool_size;
  double alpha = 0.0;
  std::size_t support_cap = kDefaultSupportCap;
  std::uint64_t seed = 0;
  std::vector<std::string> relations;
};

int cmd_analyze(const AnalyzeFlags& f) {
  require_path(f.triples, "triples");
  if (f.delta_mode != "exact" && f.delta_mode != "sampled") {
    throw InputError("delta_mode must be 'exact' or 'sampled'");
  }
  if (!(f.alpha >= 0.0 && f.alpha < 1.0)) throw InputError("alpha must lie in [0, 1)");
  if (f.support_cap < 2) throw InputError("support_cap must be at least 2");
  const json options{{"triples", f.triples},         {"delta_mode", f.delta_mode}, {"delta_samples", f.delta_samples},
                     {"delta_pool", f.delta_pool},   {"alpha", f.alpha},           {"support_cap", f.support_cap},
                     {"seed", f.seed},               {"relations", f.relations}};
  const std::string hash = fnv1a_hex(options.dump());

  const KnowledgeGraph kg = filter_relations(read_triple_file(f.triples), f.relations);
  const SimpleGraph g = collapse_graph(kg);
  if (g.node_count() < 4) {
    throw InputError("largest connected component has " + std::to_string(g.node_count()) +
                     " nodes; at least 4 are needed");
  }
  DeltaOptions dopt;
  dopt.mode = f.delta_mode == "exact" ? DeltaMode::Exact : DeltaMode::Sampled;
  dopt.n_samples = f.delta_samples;
  dopt.pool_size = f.delta_pool;
  dopt.seed = f.seed;
  CurvatureOptions copt;
  copt.alpha = f.alpha;
  copt.support_cap = f.support_cap;
  copt.seed = f.seed;
  const GraphReport rep = graph_stats(g, dopt, copt);

  const fs::path out = ensure_dir(f.out_dir);
  json stats{{"nodes", rep.stats.nodes},
             {"edges", rep.stats.edges},
             {"density_pct", rep.stats.density_pct()},
             {"avg_degree", rep.stats.avg_degree},
             {"delta_mean", rep.stats.delta_mean},
             {"delta_max", rep.stats.delta_max},
             {"meta",
              {{"config_hash", hash},
               {"options", options},
               {"delta_quadruples", rep.delta.quadruples},
               {"delta_pool", rep.delta.pool},
               {"delta_exhaustive", rep.delta.exhaustive},
               {"curvature_subsampled_nodes", rep.curvature.subsampled_nodes},
               {"input_entities", kg.entities.size()},
               {"input_triples", kg.size()}}}};
  write_json(out / "stats.json", stats);

  std::ostringstream nodes;
  nodes << "# config_hash=" << hash << "\nid,degree,kappa\n";
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    nodes << kg.entities.name(g.entity_of[v]) << ',' << g.adjacency[v].size() << ','
          << format_double(rep.curvature.node_kappa[v]) << '\n';
  }
  write_file(out / "nodes.csv", nodes.str());
  std::ostringstream edges;
  edges << "# config_hash=" << hash << "\nsrc,dst,kappa\n";
  for (const auto& e : rep.curvature.edges) {
    edges << kg.entities.name(g.entity_of[static_cast<std::size_t>(e.u)]) << ','
          << kg.entities.name(g.entity_of[static_cast<std::size_t>(e.v)]) << ',' << format_double(e.kappa) << '\n';
  }
  write_file(out / "edges.csv", edges.str());
  std::cout << "nodes " << rep.stats.nodes << ", edges " << rep.stats.edges << ", delta_max " << rep.stats.delta_max
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- train

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stdev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

int cmd_train(RunConfig c, const std::string& resume_path) {
  c.validate();
  if (!resume_path.empty() && c.seeds != 1) throw InputError("--resume works with a single seed");
  const std::string hash = config_hash(c);
  const Pipeline p = prepare(c);
  const ModelKind kind = c.model_kind();
  const EvalCandidates dev = build_candidates(p.split, EvalSplit::Dev, c.eval_seed);
  const EvalCandidates test = build_candidates(p.split, EvalSplit::Test, c.eval_seed);
  const fs::path out = ensure_dir(c.out_dir);

  std::optional<TrainState> resume;
  std::uint64_t first_seed = c.seed;
  if (!resume_path.empty()) {
    Checkpoint ck = load_checkpoint(resume_path);
    if (ck.entities != p.train_graph.entities.names() || ck.relations != p.train_graph.relations.names()) {
      throw InputError("checkpoint vocabulary does not match the triples");
    }
    if (ck.state.params.kind != kind || ck.state.params.dim != c.dim) {
      throw InputError("checkpoint model or dim does not match the configuration");
    }
    first_seed = ck.seed;
    resume = std::move(ck.state);
  }

  json grid = json::array();
  if (c.grid) {
    double best = -1.0;
    double best_lr = c.lr;
    std::size_t best_bs = c.batch_size;
    for (double lr : kLearningRateGrid) {
      for (std::size_t bs : kBatchSizeGrid) {
        TrainConfig tc = c.train_config(first_seed);
        tc.lr = lr;
        tc.batch_size = bs;
        const TrainResult r = train(p.train_graph, p.split, kind, tc, dev);
        grid.push_back({{"lr", lr}, {"batch_size", bs}, {"best_dev_HR@10", r.best.best_dev_hr10}});
        if (r.best.best_dev_hr10 > best) {
          best = r.best.best_dev_hr10;
          best_lr = lr;
          best_bs = bs;
        }
      }
    }
    c.lr = best_lr;
    c.batch_size = best_bs;
  }

  std::vector<double> dev_hr, test_hr, test_dcg, cold_hr, cold_dcg;
  json runs = json::array();
  for (std::size_t i = 0; i < c.seeds; ++i) {
    const std::uint64_t seed = first_seed + i;
    std::ofstream log(out / ("train_log_seed" + std::to_string(seed) + ".jsonl"), std::ios::trunc);
    if (!log) throw InputError("cannot write training log in " + c.out_dir);
    const auto on_epoch = [&](const EpochLog& e) {
      json line{{"config_hash", hash},          {"seed", seed},
                {"epoch", e.epoch},             {"loss", e.loss},
                {"skipped_batches", e.skipped_batches}, {"short_negative_sets", e.short_negative_sets},
                {"wall_seconds", e.wall_seconds}};
      if (e.dev) {
        line["dev_HR@10"] = e.dev->hr10;
        line["dev_DCG@10"] = e.dev->dcg10;
      }
      log << line.dump() << '\n';
      log.flush();
    };
    const TrainResult r = train(p.train_graph, p.split, kind, c.train_config(seed), dev, resume, on_epoch);

    Checkpoint ck;
    ck.config = config_snapshot(c);
    ck.config_hash = hash;
    ck.entities = p.train_graph.entities.names();
    ck.relations = p.train_graph.relations.names();
    ck.seed = seed;
    ck.state = r.best;
    ck.best_epoch = r.best.epoch;
    save_checkpoint(out / ("checkpoint_seed" + std::to_string(seed) + ".ckpt"), ck);

    const RankingReport rep = make_report(p.split, test, rank_with_model(r.best.params, p.split.buy, test));
    dev_hr.push_back(std::max(0.0, r.best.best_dev_hr10));
    test_hr.push_back(rep.all.hr10);
    test_dcg.push_back(rep.all.dcg10);
    cold_hr.push_back(rep.cold.hr10);
    cold_dcg.push_back(rep.cold.dcg10);
    runs.push_back({{"seed", seed},
                    {"best_epoch", r.best.epoch},
                    {"epochs_run", r.last.epoch},
                    {"early_stopped", r.early_stopped},
                    {"best_dev_HR@10", r.best.best_dev_hr10},
                    {"test", {{"all", metrics_json(rep.all)}, {"cold", metrics_json(rep.cold)}}}});
    std::cout << "seed " << seed << ": best epoch " << r.best.epoch << ", dev HR@10 " << r.best.best_dev_hr10
              << ", test HR@10 " << rep.all.hr10 << "\n";
  }

  const auto stat = [&](const std::vector<double>& v) { return json{{"mean", mean_of(v)}, {"stdev", stdev_of(v)}}; };
  json summary{{"config_hash", hash},
               {"model", c.model},
               {"space", std::string(to_string(space_of(kind)))},
               {"lr", c.lr},
               {"batch_size", c.batch_size},
               {"runs", runs},
               {"dev_HR@10", stat(dev_hr)},
               {"test_HR@10", stat(test_hr)},
               {"test_DCG@10", stat(test_dcg)},
               {"cold_HR@10", stat(cold_hr)},
               {"cold_DCG@10", stat(cold_dcg)}};
  if (c.grid) summary["grid"] = grid;
  write_json(out / "summary.json", summary);
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct LoadedRun {
  Checkpoint ckpt;
  RunConfig config;
  Pipeline pipeline;
};

LoadedRun load_run(const std::string& ckpt_path, const std::string& triples_override) {
  require_path(ckpt_path, "checkpoint");
  LoadedRun run;
  run.ckpt = load_checkpoint(ckpt_path);
  run.config = config_from_json(run.ckpt.config);
  if (!triples_override.empty()) run.config.triples = triples_override;
  run.pipeline = prepare(run.config);
  if (run.ckpt.entities != run.pipeline.train_graph.entities.names() ||
      run.ckpt.relations != run.pipeline.train_graph.relations.names()) {
    throw InputError("vocabulary mismatch between checkpoint and " + run.config.triples);
  }
  return run;
}

struct EvaluateFlags {
  std::string checkpoint;
  std::string triples;
  std::string split = "test";
  std::optional<std::uint64_t> eval_seed;
  std::string out;
  std::string ranks;
  int threads = 0;
};

int cmd_evaluate(const EvaluateFlags& f) {
  if (f.split != "dev" && f.split != "test") throw InputError("split must be 'dev' or 'test'");
  const LoadedRun run = load_run(f.checkpoint, f.triples);
  const std::uint64_t seed = f.eval_seed.value_or(run.config.eval_seed);
  const auto& split = run.pipeline.split;
  const EvalCandidates cand = build_candidates(split, f.split == "dev" ? EvalSplit::Dev : EvalSplit::Test, seed);
  const RankingReport rep = make_report(split, cand, rank_with_model(run.ckpt.state.params, split.buy, cand));
  const ModelKind kind = run.ckpt.state.params.kind;

  json metrics{{"model", std::string(to_string(kind))},
               {"space", std::string(to_string(space_of(kind)))},
               {"split", f.split},
               {"seed", seed},
               {"checkpoint_seed", run.ckpt.seed},
               {"config_hash", run.ckpt.config_hash},
               {"short_candidate_lists", cand.short_lists},
               {"slices", {{"all", metrics_json(rep.all)}, {"cold", metrics_json(rep.cold)}}}};
  const fs::path out = f.out.empty() ? fs::path("metrics_" + f.split + ".json") : fs::path(f.out);
  if (out.has_parent_path()) ensure_dir(out.parent_path().string());
  write_json(out, metrics);

  if (!f.ranks.empty()) {
    const auto& names = run.pipeline.train_graph.entities;
    std::ostringstream csv;
    csv << "# config_hash=" << run.ckpt.config_hash << "\nuser,item,rank,cold\n";
    for (std::size_t i = 0; i < cand.queries.size(); ++i) {
      const auto& q = cand.queries[i];
      const bool cold = std::binary_search(rep.cold_users.begin(), rep.cold_users.end(), q.user);
      csv << names.name(q.user) << ',' << names.name(q.item) << ',' << rep.ranks[i] << ',' << (cold ? 1 : 0) << '\n';
    }
    write_file(f.ranks, csv.str());
  }
  std::cout << f.split << " HR@10 " << rep.all.hr10 << ", DCG@10 " << rep.all.dcg10 << " (" << rep.all.n_users
            << " users)\n";
  return 0;
}

// ---------------------------------------------------------------- export

struct ExportFlags {
  std::string checkpoint;
  std::string triples;
  std::string what;
  std::string relation = "category";
  std::string start;
  std::string out;
  int threads = 0;
};

std::vector<double> materialize(const ParameterStore& s, std::size_t entity) {
  const auto row = s.entity_emb.row(entity);
  std::vector<double> v(row.begin(), row.end());
  if (space_of(s.kind) == Space::Hyperbolic) {
    std::vector<double> x(v.size());
    ball::expmap0(v, x);
    return x;
  }
  return v;
}

int cmd_export(const ExportFlags& f) {
  if (f.what != "norms" && f.what != "hierarchy" && f.what != "embeddings") {
    throw InputError("unknown export kind '" + f.what + "'; expected norms, hierarchy or embeddings");
  }
  const LoadedRun run = load_run(f.checkpoint, f.triples);
  const ParameterStore& params = run.ckpt.state.params;
  const auto& vocab = run.pipeline.train_graph.entities;
  std::ostringstream out;
  out << "# config_hash=" << run.ckpt.config_hash << "\n";

  if (f.what == "embeddings") {
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (std::size_t e = 0; e < params.n_entities(); ++e) rows.emplace_back(vocab.name(static_cast<EntityId>(e)), materialize(params, e));
    write_embeddings(out, params.dim, rows);
  } else {
    const KnowledgeGraph& g = run.pipeline.graph;
    const auto rel = g.relations.find(f.relation);
    if (!rel) throw InputError("relation '" + f.relation + "' does not occur in the triples");
    std::map<EntityId, std::size_t> counts;
    for (const auto& t : g.triples()) {
      if (t.relation == *rel) ++counts[t.tail];
    }
    std::vector<EntityId> group;
    std::vector<std::vector<double>> points;
    std::vector<double> norms, count_values;
    for (const auto& [e, n] : counts) {
      group.push_back(e);
      points.push_back(materialize(params, static_cast<std::size_t>(e)));
      norms.push_back(ball::norm(points.back()));
      count_values.push_back(static_cast<double>(n));
    }
    if (f.what == "norms") {
      out << "entity,norm,interaction_count\n";
      for (std::size_t i = 0; i < group.size(); ++i) {
        out << vocab.name(group[i]) << ',' << format_double(norms[i]) << ',' << counts[group[i]] << '\n';
      }
      if (group.size() >= 3) {
        out << "# spearman_rho=" << format_double(spearman_correlation(norms, count_values)) << '\n';
      } else {
        out << "# spearman_rho=NA\n";
      }
    } else {
      if (group.empty()) throw InputError("relation '" + f.relation + "' has no tail entities");
      std::size_t start = static_cast<std::size_t>(std::max_element(norms.begin(), norms.end()) - norms.begin());
      if (!f.start.empty()) {
        const auto id = vocab.find(f.start);
        const auto it = id ? std::find(group.begin(), group.end(), *id) : group.end();
        if (it == group.end()) throw InputError("start '" + f.start + "' is not a tail of " + f.relation);
        start = static_cast<std::size_t>(it - group.begin());
      }
      const NormMetric metric = space_of(params.kind) == Space::Hyperbolic ? NormMetric::Hyperbolic : NormMetric::Euclidean;
      out << "norm\tlabel\n";
      for (std::size_t i : reconstruct_hierarchy(points, start, metric)) {
        out << format_double(norms[i]) << '\t' << vocab.name(group[i]) << '\n';
      }
    }
  }
  const std::string path = f.out.empty() ? f.what + (f.what == "hierarchy" ? ".tsv" : f.what == "norms" ? ".csv" : ".txt") : f.out;
  write_file(path, out.str());
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Knowledge-graph recommender workbench: augmentation, graph analysis, training, evaluation"};
  app.require_subcommand(1);

  ConfigFlags augment_flags, train_flags;
  auto* augment = app.add_subcommand("augment", "Mine semantic item edges and merge them into a triple file");
  augment_flags.add(augment, {"triples", "embeddings", "threshold", "budget", "mode", "out_dir", "threads"});

  AnalyzeFlags af;
  int analyze_threads = 0;
  auto* analyze = app.add_subcommand("analyze", "Graph statistics, delta-hyperbolicity and Ollivier-Ricci curvature");
  analyze->add_option("--triples", af.triples, "Triple TSV file")->required();
  analyze->add_option("--out_dir,--out-dir", af.out_dir, "Output directory")->capture_default_str();
  analyze->add_option("--delta_mode", af.delta_mode, "exact or sampled")->capture_default_str();
  analyze->add_option("--delta_samples", af.delta_samples, "Sampled quadruples")->capture_default_str();
  analyze->add_option("--delta_pool", af.delta_pool, "Node pool for sampled quadruples")->capture_default_str();
  analyze->add_option("--alpha", af.alpha, "Idleness of the neighbour measures")->capture_default_str();
  analyze->add_option("--support_cap", af.support_cap, "Maximum measure support")->capture_default_str();
  analyze->add_option("--seed", af.seed, "Sampling seed")->capture_default_str();
  analyze->add_option("--relations", af.relations, "Relations to keep (default: all)")->delimiter(',');
  analyze->add_option("--threads", analyze_threads, "Worker threads")->capture_default_str();

  std::string resume;
  auto* trainc = app.add_subcommand("train", "Split, add inverse relations and train a model");
  train_flags.add(trainc, {"model", "space", "dim", "lr", "batch_size", "max_epochs", "neg_samples", "eval_every",
                           "patience", "l2", "seed", "seeds", "eval_seed", "relations", "triples", "out_dir",
                           "threads", "grid"});
  trainc->add_option("--resume", resume, "Continue from a checkpoint");

  EvaluateFlags ef;
  std::uint64_t eval_seed = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Rank held-out items against sampled negatives");
  evaluate->add_option("--checkpoint", ef.checkpoint, "Checkpoint file")->required();
  evaluate->add_option("--triples", ef.triples, "Triple file (default: the one used for training)");
  evaluate->add_option("--split", ef.split, "dev or test")->capture_default_str();
  auto* eval_seed_opt = evaluate->add_option("--eval_seed", eval_seed, "Negative sampling seed (default: from checkpoint)");
  evaluate->add_option("--out", ef.out, "Metrics JSON path (default: metrics_<split>.json)");
  evaluate->add_option("--ranks", ef.ranks, "Optional per-user ranks CSV");
  evaluate->add_option("--threads", ef.threads, "Worker threads")->capture_default_str();

  ExportFlags xf;
  auto* exportc = app.add_subcommand("export", "Export norms, hierarchies or embeddings from a checkpoint");
  exportc->add_option("--checkpoint", xf.checkpoint, "Checkpoint file")->required();
  exportc->add_option("--what", xf.what, "norms, hierarchy or embeddings")->required();
  exportc->add_option("--triples", xf.triples, "Triple file (default: the one used for training)");
  exportc->add_option("--relation", xf.relation, "Entities analysed are tails of this relation")->capture_default_str();
  exportc->add_option("--start", xf.start, "First entity of the hierarchy chain (default: largest norm)");
  exportc->add_option("--out", xf.out, "Output path");
  exportc->add_option("--threads", xf.threads, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (augment->parsed()) {
      const RunConfig c = augment_flags.resolve();
      set_num_threads(c.threads);
      return cmd_augment(c);
    }
    if (analyze->parsed()) {
      set_num_threads(analyze_threads);
      return cmd_analyze(af);
    }
    if (trainc->parsed()) {
      const RunConfig c = train_flags.resolve();
      set_num_threads(c.threads);
      return cmd_train(c, resume);
    }
    if (evaluate->parsed()) {
      if (eval_seed_opt->count() > 0) ef.eval_seed = eval_seed;
      set_num_threads(ef.threads);
      return cmd_evaluate(ef);
    }
    if (exportc->parsed()) {
      set_num_threads(xf.threads);
      return cmd_export(xf);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace hyprec::cli
