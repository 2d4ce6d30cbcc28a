// Copyright 2026 The vgc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================
//
// Experiment runner: training runs for every codec, analytical cost-model
// sweeps, and offline codec benchmarks over recorded gradient traces.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vgc/bench.hpp"
#include "vgc/config_json.hpp"
#include "vgc/cost_model.hpp"
#include "vgc/trace.hpp"
#include "vgc/trainer.hpp"

namespace {

void write_or_print(const std::optional<std::string>& path, const std::string& text) {
  if (path) {
    std::ofstream out(*path, std::ios::trunc);
    if (!out) throw vgc::config_error("cannot open output file '" + *path + "'");
    out << text;
  } else {
    std::cout << text;
  }
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              const std::optional<std::uint32_t>& workers,
              const std::optional<std::string>& transport,
              const std::optional<std::string>& rendezvous,
              const std::optional<std::uint64_t>& seed) {
  std::ifstream in(config_path);
  if (!in) throw vgc::config_error("cannot open config '" + config_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw vgc::config_error(std::string("config is not valid JSON: ") + e.what());
  }

  vgc::RunConfig run = vgc::run_config_from_json(j);
  if (workers) run.workers = *workers;
  if (transport) run.transport = vgc::transport_from_string(*transport);
  if (rendezvous) run.rendezvous = *rendezvous;
  if (seed) run.seed = *seed;
  run.validate();

  const vgc::TrainResult result = vgc::train(run);

  std::filesystem::create_directories(out_dir);
  vgc::write_metrics_csv(out_dir + "/metrics.csv", result.rows);

  nlohmann::json summary = vgc::summary_json(run, result);
  if (run.workers >= 2) {
    // Predicted relative speedup vs an uncompressed ring allreduce, from the
    // measured mean payload bits per round (block size ~ 0).
    const double steps =
        static_cast<double>(result.steps_per_epoch) * static_cast<double>(run.epochs);
    const double mean_bits = 8.0 * static_cast<double>(result.bytes_on_wire) / steps;
    const double p = run.workers;
    const double t_r = vgc::ring_allreduce_time(
        {p, static_cast<double>(result.total_params), 32, 1.0, 0, 1});
    const double t_v = vgc::allgatherv_time_bound_measured(mean_bits, p, 0, 1.0);
    summary["predicted_speedup"] = t_r / t_v;
  }
  std::ofstream sum(out_dir + "/summary.json", std::ios::trunc);
  sum << summary.dump(2) << "\n";

  std::cout << "accuracy " << result.final_accuracy << ", compression "
            << result.compression_ratio << ", metrics in " << out_dir << "\n";
  return 0;
}

int cmd_costmodel(const std::vector<double>& p_range, const std::vector<double>& c_range,
                  double n_params, double s, double beta, double m,
                  const std::optional<std::string>& out_path) {
  if (p_range.empty() || c_range.empty()) {
    throw vgc::config_error("costmodel: empty p/c range");
  }
  nlohmann::json rows = nlohmann::json::array();
  for (double p : p_range) {
    for (double c : c_range) {
      vgc::CostModelInputs in{p, n_params, s, beta, m, c};
      nlohmann::json row;
      row["p"] = p;
      row["c"] = c;
      row["ring_allreduce_time"] = vgc::ring_allreduce_time(in);
      row["allgatherv_time_bound"] = vgc::allgatherv_time_bound(in);
      row["speedup_lower_bound"] = vgc::speedup_lower_bound(p, c);
      rows.push_back(row);
    }
  }
  write_or_print(out_path, rows.dump(2) + "\n");
  return 0;
}

int cmd_codec_bench(const std::string& trace_path, const std::string& codec_name, double alpha,
                    double zeta, const std::optional<double>& tau, bool quantize,
                    const std::optional<std::string>& out_path) {
  const vgc::Trace trace = vgc::read_trace(trace_path);
  const vgc::Codec codec = vgc::codec_from_string(codec_name);
  vgc::GateConfig gate{alpha, zeta, tau ? std::optional<double>(*tau) : std::nullopt};

  const vgc::BenchResult r = vgc::run_codec_bench(trace, codec, gate, quantize);

  nlohmann::json j;
  j["codec"] = codec_name;
  j["params"] = r.params;
  j["steps"] = r.steps;
  j["sent_total"] = r.sent_total;
  j["sent_mean_per_step"] = r.sent_mean_per_step;
  if (std::isinf(r.compression_ratio)) {
    j["compression_ratio"] = "inf";
  } else {
    j["compression_ratio"] = r.compression_ratio;
  }
  j["reconstruction_count"] = r.reconstruction_count;
  j["reconstruction_mean_err"] = r.reconstruction_mean_err;
  j["reconstruction_max_err"] = r.reconstruction_max_err;
  write_or_print(out_path, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variance-gated gradient compression toolkit"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "run a training experiment from a JSON config");
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint32_t> workers;
  std::optional<std::string> transport;
  std::optional<std::string> rendezvous;
  std::optional<std::uint64_t> seed;
  train->add_option("--config", config_path, "run configuration (JSON)")->required();
  train->add_option("--out", out_dir, "output directory for metrics.csv / summary.json")
      ->required();
  train->add_option("--workers", workers, "override worker count");
  train->add_option("--transport", transport, "override transport: inproc or tcp")
      ->check(CLI::IsMember({"inproc", "tcp"}));
  train->add_option("--rendezvous", rendezvous, "tcp rendezvous host:port");
  train->add_option("--seed", seed, "override seed");

  // costmodel
  auto* costmodel = app.add_subcommand("costmodel", "analytical communication cost sweep");
  std::vector<double> p_range;
  std::vector<double> c_range;
  double n_params = 1e6;
  double bits_per_param = 32;
  double beta = 1e-9;
  double block_bits = 0;
  std::optional<std::string> cm_out;
  costmodel->add_option("--p", p_range, "node counts (comma separated)")
      ->required()
      ->delimiter(',');
  costmodel->add_option("--c", c_range, "compression ratios (comma separated)")
      ->required()
      ->delimiter(',');
  costmodel->add_option("--N", n_params, "parameter count");
  costmodel->add_option("--s", bits_per_param, "bits per parameter");
  costmodel->add_option("--beta", beta, "transfer time per bit (s)");
  costmodel->add_option("--m", block_bits, "pipeline block size (bits)");
  costmodel->add_option("--out", cm_out, "write the JSON table here instead of stdout");

  // codec-bench
  auto* bench = app.add_subcommand("codec-bench", "replay a codec over a recorded trace");
  std::string trace_path;
  std::string codec_name;
  double alpha = 1.0;
  double zeta = 0.999;
  std::optional<double> tau;
  bool no_quantize = false;
  std::optional<std::string> bench_out;
  bench->add_option("--trace", trace_path, "recorded gradient-sums trace")->required();
  bench->add_option("--codec", codec_name, "none, basic, strom or hybrid")->required();
  bench->add_option("--alpha", alpha, "gate alpha");
  bench->add_option("--zeta", zeta, "variance decay");
  bench->add_option("--tau", tau, "threshold for strom/hybrid");
  bench->add_flag("--no-quantize", no_quantize, "skip 4-bit quantization (basic codec)");
  bench->add_option("--out", bench_out, "write the JSON report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      return cmd_train(config_path, out_dir, workers, transport, rendezvous, seed);
    }
    if (*costmodel) {
      return cmd_costmodel(p_range, c_range, n_params, bits_per_param, beta, block_bits, cm_out);
    }
    if (*bench) {
      return cmd_codec_bench(trace_path, codec_name, alpha, zeta, tau, !no_quantize, bench_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
