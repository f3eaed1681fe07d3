/* Copyright 2026 The edgepart Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// edgepart command-line tool. Exit codes: 0 success, 1 internal error,
// 2 usage or input error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "edgepart/edgepart.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string manifest;
  std::string scenario;
  std::string scheduler_config;
  std::string out;
  std::string csv;
  std::size_t partitions = 0;
  std::uint64_t seed = 0;
  bool wall_time = false;
  std::string report;
  std::string baseline;
};

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ManifestPtr = std::unique_ptr<ep_manifest, Deleter<ep_manifest, ep_manifest_free>>;
using PlanPtr = std::unique_ptr<ep_plan, Deleter<ep_plan, ep_plan_free>>;
using RunPtr = std::unique_ptr<ep_run, Deleter<ep_run, ep_run_free>>;
using ReportPtr = std::unique_ptr<ep_report, Deleter<ep_report, ep_report_free>>;

// Thrown to unwind with a status already reported.
struct Failure {
  ep_status status;
};

void check(ep_status status, const std::string& context) {
  if (status == EP_OK) return;
  std::fprintf(stderr, "edgepart: %s: %s: %s\n", context.c_str(),
               ep_status_string(status), ep_last_error());
  throw Failure{status};
}

void print_owned(char* text) {
  std::fputs(text, stdout);
  ep_string_free(text);
}

int cmd_partition(const Options& o, bool have_partitions) {
  ep_manifest* raw = nullptr;
  check(ep_manifest_load(o.manifest.c_str(), &raw), o.manifest);
  ManifestPtr manifest(raw);

  ep_plan* plan_raw = nullptr;
  if (!o.scenario.empty()) {
    check(ep_partition_scenario(manifest.get(), o.scenario.c_str(), &plan_raw),
          o.scenario);
  } else {
    if (!have_partitions) {
      std::fprintf(stderr, "edgepart: partition needs --partitions or --scenario\n");
      return kExitUsage;
    }
    check(ep_partition(manifest.get(), o.partitions, 1000, &plan_raw),
          "partition");
  }
  PlanPtr plan(plan_raw);

  const std::size_t n = ep_plan_count(plan.get());
  std::printf("model: %s (%zu layers)\n", ep_manifest_name(manifest.get()),
              ep_manifest_layer_count(manifest.get()));
  std::printf("sizes: [");
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t first = 0;
    std::size_t last = 0;
    check(ep_plan_range(plan.get(), i, &first, &last), "plan");
    std::printf("%s%zu", i ? ", " : "", last - first + 1);
  }
  std::printf("]\n");
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t first = 0;
    std::size_t last = 0;
    std::uint64_t cost = 0;
    check(ep_plan_range(plan.get(), i, &first, &last), "plan");
    check(ep_plan_cost(plan.get(), i, &cost), "plan");
    const char* node = ep_plan_node(plan.get(), i);
    std::printf("  part %zu: layers %zu-%zu cost %llu%s%s\n", i, first, last,
                static_cast<unsigned long long>(cost), node ? " node " : "",
                node ? node : "");
  }
  std::printf("L: %.6f\n", ep_plan_balance(plan.get()));

  if (!o.out.empty()) {
    check(ep_plan_export(plan.get(), o.out.c_str()), o.out);
    const auto file = std::filesystem::path(o.out) /
                      (std::string(ep_manifest_name(manifest.get())) + ".plan.json");
    check(ep_plan_save(plan.get(), file.string().c_str()), file.string());
    std::printf("wrote %s and %zu partition manifests\n", file.string().c_str(), n);
  }
  return kExitOk;
}

ep_sim_options sim_options(const Options& o, bool have_seed) {
  ep_sim_options opts{};
  opts.has_seed = have_seed ? 1 : 0;
  opts.seed = o.seed;
  opts.scheduler_config_path =
      o.scheduler_config.empty() ? nullptr : o.scheduler_config.c_str();
  opts.measure_wall_time = o.wall_time ? 1 : 0;
  return opts;
}

int cmd_schedule(const Options& o, bool have_seed) {
  const auto opts = sim_options(o, have_seed);
  ep_run* raw = nullptr;
  check(ep_simulate(o.scenario.c_str(), &opts, &raw), o.scenario);
  RunPtr run(raw);
  if (!o.out.empty()) {
    check(ep_run_save_task_records(run.get(), o.out.c_str()), o.out);
  }
  char* summary = nullptr;
  check(ep_run_scheduler_summary(run.get(), &summary), "summary");
  print_owned(summary);
  return kExitOk;
}

void print_metric(const ep_report* r, const char* name, const char* label) {
  double v = 0.0;
  int present = 0;
  check(ep_report_get(r, name, &v, &present), name);
  if (present) {
    std::printf("%-24s %.3f\n", label, v);
  } else {
    std::printf("%-24s -\n", label);
  }
}

int cmd_simulate(const Options& o, bool have_seed) {
  const auto opts = sim_options(o, have_seed);
  ep_run* raw = nullptr;
  check(ep_simulate(o.scenario.c_str(), &opts, &raw), o.scenario);
  RunPtr run(raw);
  ep_report* report_raw = nullptr;
  check(ep_run_report(run.get(), &report_raw), "report");
  ReportPtr report(report_raw);

  if (!o.out.empty()) check(ep_report_save(report.get(), o.out.c_str()), o.out);
  if (!o.csv.empty()) check(ep_report_save_csv(report.get(), o.csv.c_str()), o.csv);

  print_metric(report.get(), "measured_requests", "measured requests");
  print_metric(report.get(), "latency_mean_ms", "latency mean (ms)");
  print_metric(report.get(), "latency_p95_ms", "latency p95 (ms)");
  print_metric(report.get(), "throughput_rps", "throughput (req/s)");
  print_metric(report.get(), "stability_score", "stability score");
  print_metric(report.get(), "rescheduled", "rescheduled tasks");
  return kExitOk;
}

int cmd_report(const Options& o) {
  for (const auto* path : {&o.report, &o.baseline}) {
    if (!std::filesystem::exists(*path)) {
      std::fprintf(stderr, "edgepart: %s: no such file\n", path->c_str());
      return kExitUsage;
    }
  }
  ep_report* a = nullptr;
  check(ep_report_load(o.report.c_str(), &a), o.report);
  ReportPtr report(a);
  ep_report* b = nullptr;
  check(ep_report_load(o.baseline.c_str(), &b), o.baseline);
  ReportPtr baseline(b);
  char* table = nullptr;
  check(ep_report_compare(report.get(), baseline.get(), &table), "compare");
  print_owned(table);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model partitioning, task scheduling, and edge cluster simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ep_version());
  Options o;

  auto* partition = app.add_subcommand(
      "partition", "Split a layer manifest into contiguous partitions");
  partition->add_option("--manifest", o.manifest, "Layer manifest (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* partitions_opt =
      partition->add_option("--partitions", o.partitions, "Number of partitions")
          ->check(
              [](const std::string& v) -> std::string {
                return v.find_first_not_of('0') == std::string::npos
                           ? "partition count must be at least 1"
                           : "";
              },
              "K>0");
  partition
      ->add_option("--scenario", o.scenario,
                   "Size partitions by the capabilities of this scenario's nodes")
      ->check(CLI::ExistingFile)
      ->excludes(partitions_opt);
  partition->add_option("--out", o.out,
                        "Directory for the plan and per-partition manifests");

  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", o.scenario, "Scenario file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--scheduler-config", o.scheduler_config,
                    "Scheduler config (JSON); overrides the scenario's")
        ->check(CLI::ExistingFile);
    return cmd->add_option("--seed", o.seed,
                           "Random seed; defaults to the scenario's (42 if unset)");
  };

  auto* schedule = app.add_subcommand(
      "schedule", "Run a scenario and write per-task scheduling records");
  auto* schedule_seed = add_run_options(schedule);
  schedule->add_option("--out", o.out, "Task records output (JSONL)");

  auto* simulate =
      app.add_subcommand("simulate", "Run a scenario and write a metrics report");
  auto* simulate_seed = add_run_options(simulate);
  simulate->add_option("--out", o.out, "Metrics report output (JSON)");
  simulate->add_option("--csv", o.csv, "Also write the flat metrics as CSV");
  simulate->add_flag("--wall-time", o.wall_time,
                     "Report measured scheduling overhead (not reproducible)");

  auto* report = app.add_subcommand(
      "report", "Compare a metrics report against a baseline report");
  report->add_option("report", o.report, "Report under test")->required();
  report->add_option("baseline", o.baseline, "Baseline report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*partition) return cmd_partition(o, partitions_opt->count() > 0);
    if (*schedule) return cmd_schedule(o, schedule_seed->count() > 0);
    if (*simulate) return cmd_simulate(o, simulate_seed->count() > 0);
    if (*report) return cmd_report(o);
  } catch (const Failure& f) {
    return f.status == EP_ERR_INTERNAL ? kExitInternal : kExitUsage;
  }
  return kExitUsage;
}
