#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "provlab/decode.hpp"
#include "provlab/synthgen.hpp"
#include "provlab/viewlabel.hpp"

namespace provlab {

// One measured quantity. Records are written to CSV with the stable column
// order n,metric,variant,seed,value; non-time metrics reproduce exactly
// under the same seed.
struct BenchRecord {
  int n = 0;
  std::string metric;
  std::string variant; // "-" when the metric is variant independent
  std::uint64_t seed = 0;
  double value = 0;
};

std::string to_csv(const std::vector<BenchRecord> &records);

struct BenchConfig {
  std::vector<int> sizes = {1000, 2000, 4000, 8000, 16000, 32000};
  int reps = 3;
  std::uint64_t seed = 1;
  std::string out_dir = "bench-out";
  GenParams params;                 // grammar family under test
  long long query_samples = 100000; // per variant, after warmup
  bool factor_sweep = true;
};

// Parallelism cap: PROVLABEL_THREADS when set, otherwise 1. Timed sections
// themselves always run on one thread.
int bench_threads();

struct QueryTiming {
  double mean_ns = 0;
  double p99_ns = 0;
  double mults_mean = 0;
};

// Time decode() over the given label pairs, cycling through them until
// `samples` queries have run. One warmup pass precedes the clock.
QueryTiming time_queries(const ViewLabel &vl,
                         const std::vector<std::pair<DataLabel, DataLabel>> &pairs,
                         long long samples);

// Full harness: label-length and label-time versus n, view-label size and
// build time per variant, query latency per variant, and the nesting-depth /
// module-degree factor sweeps. Writes one CSV per family into out_dir.
void run_bench(const BenchConfig &c);

} // namespace provlab
