// eegain command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "eegain/eegain.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

int exit_code(const eegain::Error& e) {
  switch (e.kind()) {
    case eegain::ErrorKind::invalid_argument:
    case eegain::ErrorKind::data: return kExitData;
    case eegain::ErrorKind::io: return kExitRuntime;
  }
  return kExitRuntime;
}

eegain::SyntheticSpec read_synthetic_spec(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) eegain::fail(eegain::ErrorKind::io, path.string() + ": cannot open spec");
  try {
    nlohmann::json j;
    if (path.extension() == ".json") {
      j = nlohmann::json::parse(in);
    } else {
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      j = eegain::detail::toml_to_json(toml::parse(text), "");
    }
    return j.get<eegain::SyntheticSpec>();
  } catch (const nlohmann::json::exception& e) {
    eegain::fail(eegain::ErrorKind::data, path.string() + ": " + e.what());
  } catch (const toml::parse_error& e) {
    eegain::fail(eegain::ErrorKind::data,
                 path.string() + ":" + std::to_string(e.source().begin.line) + ": " +
                     std::string(e.description()));
  }
}

int cmd_run(const fs::path& config) {
  const auto art = eegain::execute_run(config);
  std::cout << "run " << art.run_id << ": " << art.fold_reports.size() << " folds\n";
  const auto& acc = art.aggregate.at("accuracy");
  std::printf("accuracy %.4f ± %.4f\n", acc.mean, acc.std);
  std::cout << "summary: " << art.summary_path.string() << "\n";
  if (art.predictions_path) std::cout << "predictions: " << art.predictions_path->string() << "\n";
  return 0;
}

int cmd_generate(const fs::path& spec, const fs::path& out) {
  const auto m = eegain::generate_synthetic(read_synthetic_spec(spec), out);
  std::cout << "wrote " << m.n_trials() << " trials from " << m.subjects.size() << " subjects to "
            << out.string() << "\n";
  return 0;
}

int cmd_validate(const fs::path& manifest) {
  const auto m = eegain::load_manifest(manifest);
  const auto report = eegain::validate_manifest(m);
  for (const auto& f : report.findings) {
    std::cout << eegain::to_string(f.kind) << " " << f.trial.str() << ": " << f.message << "\n";
  }
  std::cout << report.trials_checked << " trials checked, " << report.findings.size()
            << " findings\n";
  return report.ok() ? 0 : kExitData;
}

int cmd_inspect(const fs::path& manifest, const std::optional<double>& threshold) {
  const auto m = eegain::load_manifest(manifest);
  std::optional<eegain::GroundTruthScheme> scheme;
  try {
    scheme = eegain::default_scheme(m.dataset_name);
  } catch (const eegain::Error&) {
    if (m.label_schema != eegain::LabelSchema::categorical) scheme = eegain::GroundTruthScheme{};
  }
  if (threshold) {
    if (!scheme || scheme->kind != eegain::SchemeKind::dimensional_binary) {
      scheme = eegain::GroundTruthScheme{};
    }
    scheme->threshold = *threshold;
  }
  const auto s = eegain::dataset_summary(m, scheme);
  std::cout << "dataset        " << s.dataset_name << "\n"
            << "subjects       " << s.n_subjects << "\n"
            << "trials         " << s.n_trials << "\n"
            << "channels       " << s.n_channels << "\n"
            << "sampling rate  " << s.sampling_rate_hz << " Hz\n"
            << "total duration " << s.total_trial_seconds << " s\n";
  for (const auto& [subject, n] : s.trials_per_subject) {
    std::cout << "  " << subject << ": " << n << " trials\n";
  }
  if (s.class_distribution && scheme) {
    std::cout << "classes (" << eegain::to_string(scheme->kind);
    if (scheme->kind == eegain::SchemeKind::dimensional_binary) {
      std::cout << ", " << scheme->dimension << " > " << scheme->threshold << " is high";
    }
    std::cout << ")\n";
    for (std::size_t c = 0; c < scheme->n_classes(); ++c) {
      std::printf("  %-10s %6lld  %6.2f%%\n", scheme->class_names[c].c_str(),
                  static_cast<long long>(s.class_distribution->counts[c]),
                  100.0 * s.class_distribution->proportions[c]);
    }
  }
  return 0;
}

int cmd_report(const fs::path& summary, const std::string& format) {
  const auto fmt = format == "csv" ? eegain::ReportFormat::csv : eegain::ReportFormat::table;
  std::cout << eegain::render_report(eegain::load_summary(summary), fmt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reproducible EEG emotion-recognition evaluation"};
  app.require_subcommand(1);

  std::string config, spec, out, manifest, summary, format = "table";
  std::optional<double> threshold;

  auto* run = app.add_subcommand("run", "Execute a run configuration");
  run->add_option("config", config, "TOML or JSON run configuration")->required();

  auto* gen = app.add_subcommand("generate-synthetic", "Write a synthetic dataset");
  gen->add_option("spec", spec, "TOML or JSON synthetic dataset spec")->required();
  gen->add_option("out", out, "Output directory")->required();

  auto* validate = app.add_subcommand("validate", "Check signal files and labels");
  validate->add_option("manifest", manifest, "Manifest file or dataset directory")->required();

  auto* inspect = app.add_subcommand("inspect", "Print dataset summary statistics");
  inspect->add_option("manifest", manifest, "Manifest file or dataset directory")->required();
  inspect->add_option("--threshold", threshold, "Binary valence threshold for class counts");

  auto* report = app.add_subcommand("report", "Render a run summary");
  report->add_option("summary", summary, "summary.json written by `run`")->required();
  report->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"table", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config);
    if (*gen) return cmd_generate(spec, out);
    if (*validate) return cmd_validate(manifest);
    if (*inspect) return cmd_inspect(manifest, threshold);
    if (*report) return cmd_report(summary, format);
  } catch (const eegain::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
