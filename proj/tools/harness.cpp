#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "nmstretch/acceptance.hpp"
#include "nmstretch/cli.hpp"
#include "nmstretch/error.hpp"

// Exit status 3 means the suite ran but at least one criterion failed.
int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite for the time-stretching library"};
  app.require_subcommand(1);
  std::string filter;
  std::string report_path;
  auto* run = app.add_subcommand("run-acceptance", "Run the acceptance criteria");
  run->add_option("--filter", filter, "Only run cases whose name contains this text");
  run->add_option("--report", report_path, "Write a CSV report to this path");
  auto* list = app.add_subcommand("list", "List acceptance case names");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? nmstretch::kExitOk : nmstretch::kExitConfig;
  }

  if (list->parsed()) {
    for (const auto& name : nmstretch::eval::acceptance_cases()) std::cout << name << '\n';
    return nmstretch::kExitOk;
  }

  std::vector<nmstretch::eval::MetricReport> reports;
  try {
    reports = nmstretch::eval::run_acceptance(filter);
  } catch (const nmstretch::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nmstretch::kExitConfig;
  }
  std::size_t failed = 0;
  for (const auto& r : reports) {
    std::cout << nmstretch::eval::format_report_line(r) << '\n';
    if (!r.pass) ++failed;
  }
  std::cout << "RESULT: metrics=" << reports.size() << " failed=" << failed << '\n';
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << nmstretch::eval::report_csv(reports);
    if (!out) {
      std::cerr << "error: cannot write " << report_path << '\n';
      return nmstretch::kExitIo;
    }
  }
  return failed == 0 ? nmstretch::kExitOk : 3;
}
