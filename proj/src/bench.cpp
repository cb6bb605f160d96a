#include "provlab/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <thread>

#include "provlab/errors.hpp"
#include "provlab/model_json.hpp"

namespace provlab {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Run the tasks on up to bench_threads() workers; results keep task order.
std::vector<BenchRecord>
run_tasks(std::vector<std::function<std::vector<BenchRecord>()>> tasks) {
  std::vector<std::vector<BenchRecord>> results(tasks.size());
  int workers = std::min<int>(bench_threads(), static_cast<int>(tasks.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < tasks.size(); ++i) results[i] = tasks[i]();
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next++; i < tasks.size(); i = next++)
          results[i] = tasks[i]();
      });
    for (auto &t : pool) t.join();
  }
  std::vector<BenchRecord> flat;
  for (auto &r : results) flat.insert(flat.end(), r.begin(), r.end());
  return flat;
}

struct LabelStats {
  double max_bits = 0, avg_bits = 0, label_ms = 0, items = 0;
};

LabelStats measure_run(const WorkflowGrammar &g, const Classification &cls,
                       int n, std::uint64_t seed) {
  std::vector<Step> log = gen_run(g, cls, n, seed);
  auto t0 = Clock::now();
  RunState run = RunState::replay(g, cls, log);
  auto labels = run.all_labels();
  LabelStats st;
  st.label_ms = ms_since(t0);
  st.items = static_cast<double>(labels.size());
  double total = 0;
  for (const auto &[id, d] : labels) {
    double bits = static_cast<double>(label_bits(d));
    st.max_bits = std::max(st.max_bits, bits);
    total += bits;
  }
  st.avg_bits = labels.empty() ? 0 : total / static_cast<double>(labels.size());
  return st;
}

} // namespace

int bench_threads() {
  const char *env = std::getenv("PROVLABEL_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

std::string to_csv(const std::vector<BenchRecord> &records) {
  std::ostringstream os;
  os << "n,metric,variant,seed,value\n";
  for (const auto &r : records)
    os << r.n << ',' << r.metric << ',' << r.variant << ',' << r.seed << ','
       << r.value << '\n';
  return os.str();
}

QueryTiming time_queries(const ViewLabel &vl,
                         const std::vector<std::pair<DataLabel, DataLabel>> &pairs,
                         long long samples) {
  QueryTiming out;
  if (pairs.empty() || samples <= 0) return out;
  volatile int sink = 0;
  long long total_mults = 0;
  for (const auto &[a, b] : pairs) { // warmup, also validates the pairs
    QueryVerdict v = decode(a, b, vl);
    sink = sink + (v.reachable ? 1 : 0);
    total_mults += v.matrices_multiplied;
  }
  out.mults_mean =
      static_cast<double>(total_mults) / static_cast<double>(pairs.size());

  // Time in batches so the clock overhead amortizes; p99 over batch means.
  const long long batch = std::max<long long>(1, samples / 100);
  std::vector<double> per_query;
  long long done = 0;
  size_t cursor = 0;
  while (done < samples) {
    auto t0 = Clock::now();
    for (long long q = 0; q < batch; ++q) {
      const auto &[a, b] = pairs[cursor];
      sink = sink + (decode(a, b, vl).reachable ? 1 : 0);
      cursor = (cursor + 1) % pairs.size();
    }
    per_query.push_back(ms_since(t0) * 1e6 / static_cast<double>(batch));
    done += batch;
  }
  double sum = 0;
  for (double v : per_query) sum += v;
  out.mean_ns = sum / static_cast<double>(per_query.size());
  std::sort(per_query.begin(), per_query.end());
  out.p99_ns = per_query[static_cast<size_t>(
      static_cast<double>(per_query.size() - 1) * 0.99)];
  return out;
}

void run_bench(const BenchConfig &c) {
  if (c.sizes.empty() || c.reps < 1) throw InputError("empty bench config");
  std::filesystem::create_directories(c.out_dir);

  GeneratedGrammar base = gen_grammar(c.params);
  AnalysisResult ana = analyze(base.grammar, base.lambda);
  const Classification &cls = ana.classification;
  int composites = 0;
  for (const auto &m : base.grammar.modules) composites += m.composite ? 1 : 0;

  // Label length and labeling time versus run size.
  std::vector<std::function<std::vector<BenchRecord>()>> tasks;
  for (int n : c.sizes)
    tasks.push_back([&, n] {
      double max_bits = 0, avg_bits = 0, total_ms = 0;
      for (int rep = 0; rep < c.reps; ++rep) {
        SplitMix64 rng(c.seed + 1000003ull * static_cast<std::uint64_t>(n) + rep);
        LabelStats st = measure_run(base.grammar, cls, n, rng.next());
        max_bits = std::max(max_bits, st.max_bits);
        avg_bits += st.avg_bits / c.reps;
        total_ms += st.label_ms / c.reps;
      }
      return std::vector<BenchRecord>{
          {n, "max_label_bits", "-", c.seed, max_bits},
          {n, "avg_label_bits", "-", c.seed, avg_bits},
          {n, "total_label_time", "-", c.seed, total_ms}};
    });
  std::vector<BenchRecord> length_records = run_tasks(std::move(tasks));
  std::vector<BenchRecord> len_csv, time_csv;
  for (const auto &r : length_records)
    (r.metric == "total_label_time" ? time_csv : len_csv).push_back(r);
  write_file(c.out_dir + "/label_length.csv", to_csv(len_csv));
  write_file(c.out_dir + "/label_time.csv", to_csv(time_csv));

  // View label size and build time, then query latency, per variant.
  View view = gen_safe_view(base.grammar, base.lambda, composites, false, c.seed);
  int qn = std::min(c.sizes.back(), 4000);
  std::vector<Step> qlog = gen_run(base.grammar, cls, qn, c.seed + 7);
  RunState qrun = RunState::replay(base.grammar, cls, qlog);
  auto labels = qrun.all_labels();
  SplitMix64 rng(c.seed + 13);
  std::vector<std::pair<DataLabel, DataLabel>> pairs;
  for (int i = 0; i < 512 && !labels.empty(); ++i) {
    const auto &a = labels[rng.below(static_cast<int>(labels.size()))];
    const auto &b = labels[rng.below(static_cast<int>(labels.size()))];
    pairs.push_back({a.second, b.second});
  }
  std::vector<BenchRecord> view_csv, query_csv;
  for (ViewVariant var : {ViewVariant::Default, ViewVariant::SpaceEfficient,
                          ViewVariant::QueryEfficient}) {
    auto t0 = Clock::now();
    ViewLabel vl = label_view(base.grammar, cls, view, var);
    double build_ms = ms_since(t0);
    view_csv.push_back({composites, "view_label_bytes", variant_name(var),
                        c.seed, static_cast<double>(vl.stored_bytes())});
    view_csv.push_back({composites, "view_label_time", variant_name(var),
                        c.seed, build_ms});
    QueryTiming qt = time_queries(vl, pairs, c.query_samples);
    query_csv.push_back({qn, "query_ns_mean", variant_name(var), c.seed, qt.mean_ns});
    query_csv.push_back({qn, "query_ns_p99", variant_name(var), c.seed, qt.p99_ns});
    query_csv.push_back({qn, "matrices_multiplied_mean", variant_name(var),
                         c.seed, qt.mults_mean});
  }
  write_file(c.out_dir + "/view_label.csv", to_csv(view_csv));
  write_file(c.out_dir + "/query_time.csv", to_csv(query_csv));

  if (!c.factor_sweep) return;
  // Factor sweep: one factor varies, the others stay at their defaults.
  std::vector<std::function<std::vector<BenchRecord>()>> sweep;
  auto sweep_task = [&](const std::string &factor, int value, GenParams p) {
    sweep.push_back([&, factor, value, p] {
      GeneratedGrammar gg = gen_grammar(p);
      AnalysisResult a2 = analyze(gg.grammar, gg.lambda);
      LabelStats st = measure_run(gg.grammar, a2.classification, 2000, c.seed + 1);
      return std::vector<BenchRecord>{
          {value, "avg_label_bits", factor, c.seed, st.avg_bits},
          {value, "max_label_bits", factor, c.seed, st.max_bits}};
    });
  };
  for (int depth = 1; depth <= 6; ++depth) {
    GenParams p = c.params;
    p.nesting_depth = depth;
    sweep_task("nesting_depth", depth, p);
  }
  for (int degree = 1; degree <= 6; ++degree) {
    GenParams p = c.params;
    p.module_degree = degree;
    sweep_task("module_degree", degree, p);
  }
  write_file(c.out_dir + "/factor_sweep.csv", to_csv(run_tasks(std::move(sweep))));
}

} // namespace provlab
