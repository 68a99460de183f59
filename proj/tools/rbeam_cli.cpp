// Command-line front end: simulate, certify, compare, sweep.
//
// Exit codes: 0 success, 2 invalid scenario/inputs, 3 numerical failure,
// 4 invalid certificate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rbeam/io.hpp"
#include "rbeam/rbeam.hpp"

namespace fs = std::filesystem;
using namespace rbeam;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kNumerical = 3, kCertificate = 4 };

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write '" + path.string() + "'");
  out << text;
}

void write_run(const RunResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  std::ostringstream traj, ev;
  io::write_trajectory_csv(traj, r, r.scenario.output_stride);
  write_events_csv(ev, r.events);
  write_text(dir / "trajectory.csv", traj.str());
  write_text(dir / "events.csv", ev.str());
  write_text(dir / "summary.json", io::summary_json(r).dump(2) + "\n");
  if (!r.field.empty()) {
    std::ostringstream field;
    io::write_field_csv(field, r.field);
    write_text(dir / "field.csv", field.str());
  }
}

void print_summary(const RunResult& r) {
  const RunSummary& s = r.summary;
  std::printf("mode=%s E0=%.9g E(T)=%.9g decay_rate=%.6g triggers=%ld min_inter_event=%s envelope_ok=%s\n",
              to_string(r.scenario.mode), s.E0, s.E_final, s.decay_rate_fit, s.trigger_count,
              s.min_inter_event_time ? std::to_string(*s.min_inter_event_time).c_str() : "undefined",
              s.envelope_ok ? (*s.envelope_ok ? "true" : "false") : "n/a");
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos)
        throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidParameter("bad value '" + item + "' in --values");
    }
  }
  if (values.empty()) throw InvalidParameter("--values is empty");
  return values;
}

Scenario load_scenario(const std::string& path, int dump_field) {
  Scenario sc = io::scenario_from_json(io::read_json_file(path));
  if (dump_field > 0) sc.dump_field_stride = dump_field;
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered boundary control of the Rayleigh beam"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string scenario_path, out_dir, inputs_path, axis, values;
  double target_delta = 0.0;
  int dump_field = 0;

  auto* simulate = app.add_subcommand("simulate", "Run one closed-loop simulation");
  simulate->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--dump-field", dump_field, "Write field.csv every N steps (64-point grid)");

  auto* certify_cmd = app.add_subcommand("certify", "Evaluate or search for a stability certificate");
  certify_cmd->add_option("--inputs", inputs_path, "Certificate inputs JSON")->required()->check(CLI::ExistingFile);
  auto* target_opt = certify_cmd->add_option("--target-delta", target_delta, "Search for this decay rate");

  auto* compare_cmd = app.add_subcommand("compare", "Event-triggered versus continuous control");
  compare_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--out", out_dir, "Output directory")->required();
  compare_cmd->add_option("--dump-field", dump_field, "Write field.csv every N steps (64-point grid)");

  auto* sweep_cmd = app.add_subcommand("sweep", "One run per parameter value");
  sweep_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--axis", axis, "beta|beta0|theta|K1|K2|n_elements|dt")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*simulate) {
      const RunResult r = run(load_scenario(scenario_path, dump_field));
      write_run(r, out_dir);
      print_summary(r);
    } else if (*certify_cmd) {
      const auto j = io::read_json_file(inputs_path);
      const CertificateInputs in = io::certificate_inputs_from_json(j);
      if (*target_opt) {
        const SearchResult res =
            search_for_rate(in.K1, in.K2, target_delta, in.beta0, in.theta, in.epsilon_variant);
        std::cout << io::to_json(res, target_delta).dump(2) << "\n";
        return res.certificate ? kOk : kCertificate;
      }
      const Certificate c = certify(in);
      std::cout << io::to_json(c).dump(2) << "\n";
      return c.valid ? kOk : kCertificate;
    } else if (*compare_cmd) {
      const Comparison c = compare(load_scenario(scenario_path, dump_field));
      const fs::path dir(out_dir);
      write_run(c.first, dir / "event_triggered");
      write_run(c.second, dir / "continuous");
      write_text(dir / "comparison.json", io::comparison_json(c).dump(2) + "\n");
      print_summary(c.first);
      print_summary(c.second);
      std::printf("update_ratio event=%.6g continuous=%.6g count_ratio=%.6g\n", c.update_ratio_first,
                  c.update_ratio_second, c.count_ratio);
    } else if (*sweep_cmd) {
      const Scenario base = load_scenario(scenario_path, 0);
      const auto vals = parse_values(values);
      with_axis(base, axis, vals.front());  // rejects unknown axes before running anything
      const auto rows = sweep(base, axis, vals);
      const fs::path dir(out_dir);
      fs::create_directories(dir);
      for (std::size_t i = 0; i < rows.size(); ++i)
        write_run(rows[i].result, dir / ("run_" + std::to_string(i)));
      std::ostringstream csv;
      io::write_sweep_csv(csv, axis, rows);
      write_text(dir / "sweep.csv", csv.str());
      std::cout << csv.str();
    }
  } catch (const CertificateInvalid& e) {
    std::cerr << "error: " << e.what() << "\n" << io::to_json(e.certificate).dump(2) << "\n";
    return kCertificate;
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kOk;
}
