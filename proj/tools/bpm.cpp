// Copyright 2026 The bpm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: mine a log, post-process, build the relationship graph.

#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "bpm/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Behavioral pattern miner"};
  bpm::RunConfig cfg;
  std::string format = "xes";
  std::string engine = "grown";
  std::string time_col;
  int bench = 0;
  bool emit_csv = false;

  app.add_option("--log", cfg.log_path, "Event log (XES or CSV, optionally gzipped)");
  app.add_option("--format", format, "Log format")
      ->check(CLI::IsMember({"xes", "csv"}))
      ->capture_default_str();
  app.add_option("--case", cfg.csv.case_col, "CSV case column")->capture_default_str();
  app.add_option("--activity", cfg.csv.activity_col, "CSV activity column")
      ->capture_default_str();
  app.add_option("--time", time_col, "CSV timestamp column used to order events");
  app.add_option("--gen", cfg.gen_path, "Synthetic-log spec (JSON) used instead of --log");
  app.add_option("--support", cfg.mining.tau_support, "Support threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--depth", cfg.mining.max_depth, "Maximal pattern depth")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tau-f", cfg.relations.tau_f, "Follows threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--tau-s", cfg.relations.tau_s, "Spans threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--engine", engine, "Alignment engine")
      ->check(CLI::IsMember({"grown", "classical"}))
      ->capture_default_str();
  app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
  app.add_option("--bench", bench, "Benchmark both engines with N repetitions");
  app.add_option("--jobs", cfg.mining.jobs, "Worker threads (0 = all cores)")
      ->capture_default_str();
  app.add_flag("--occurrences", cfg.write_occurrences, "Write occurrences to patterns.json");
  app.add_flag("--emit-csv", emit_csv, "Print the (generated) log as CSV and exit");

  CLI11_PARSE(app, argc, argv);

  cfg.format = format == "csv" ? bpm::LogFormat::kCsv : bpm::LogFormat::kXes;
  cfg.mining.engine = engine == "classical" ? bpm::Engine::kClassical : bpm::Engine::kGrown;
  if (!time_col.empty()) cfg.csv.time_col = time_col;

  try {
    bpm::EventLog log = bpm::load_input(cfg);
    if (log.skipped_events() > 0)
      std::cerr << "warning: skipped " << log.skipped_events() << " events without a name\n";
    if (emit_csv) {
      std::cout << bpm::emit_csv(log);
      return 0;
    }
    if (bench > 0) {
      bpm::BenchReport b = bpm::bench(log, cfg.mining, bench);
      std::cout << bpm::bench_text(b);
      return 0;
    }
    bpm::PipelineResult r = bpm::run_pipeline(log, cfg);
    bpm::write_outputs(r, log, cfg);
    std::cout << bpm::report_text(r.report);
    return 0;
  } catch (const bpm::EngineMismatch& e) {
    std::cerr << "error: " << e.what();
    return 3;
  } catch (const bpm::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
