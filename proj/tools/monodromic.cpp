#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "monodromic/runner.hpp"

using namespace monodromic;

int main(int argc, char** argv) {
  CLI::App app{"center-focus analysis of monodromic singularities via Laurent inverse "
               "integrating factors"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "analyze a vector-field input file");
  std::string file;
  std::string mode = "auto";
  std::string weights_arg;
  int max_order = 12;
  std::string m_window = "-8,8";
  double tol_zero = 1e-9;
  std::string report_format = "text";
  std::string out_path;
  int jobs = 0;
  analyze->add_option("file", file, "input file")->required();
  analyze->add_option("--mode", mode, "auto|ascending|descending|oracle")
      ->check(CLI::IsMember({"auto", "ascending", "descending", "oracle"}));
  analyze->add_option("--weights", weights_arg, "override weights, e.g. 1,1");
  analyze->add_option("--max-order", max_order, "ascending chain length");
  analyze->add_option("--m-window", m_window, "leading-exponent scan window a,b");
  analyze->add_option("--tol-zero", tol_zero, "obstruction zero tolerance");
  analyze->add_option("--report", report_format, "json|text")
      ->check(CLI::IsMember({"json", "text"}));
  analyze->add_option("--out", out_path, "write the report to a file");
  analyze->add_option("--jobs", jobs, "sweep worker count (also MONODROMIC_JOBS)");

  CLI11_PARSE(app, argc, argv);

  std::string text;
  {
    std::ifstream in(file);
    if (!in) {
      std::cerr << "cannot open input file: " << file << "\n";
      return 2;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }

  ProblemSpec spec;
  try {
    spec = parse_input(text);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }

  RunConfig cfg;
  if (mode == "ascending")
    cfg.mode = RunMode::AscendingOnly;
  else if (mode == "descending")
    cfg.mode = RunMode::DescendingOnly;
  else if (mode == "oracle")
    cfg.mode = RunMode::OracleOnly;
  cfg.expansion.max_order = max_order;
  cfg.expansion.ode.tol_zero = tol_zero;
  cfg.jobs = jobs;
  {
    size_t comma = m_window.find(',');
    if (comma != std::string::npos) {
      cfg.expansion.m_min = std::atoi(m_window.substr(0, comma).c_str());
      cfg.expansion.m_max = std::atoi(m_window.substr(comma + 1).c_str());
    }
  }
  if (!weights_arg.empty()) {
    size_t comma = weights_arg.find(',');
    if (comma == std::string::npos) {
      std::cerr << "bad --weights, expected p,q\n";
      return 2;
    }
    spec.weight_override = Weight{std::atoi(weights_arg.substr(0, comma).c_str()),
                                  std::atoi(weights_arg.substr(comma + 1).c_str())};
  }

  const char* log_env = std::getenv("MONODROMIC_LOG");
  bool verbose = log_env && std::atoi(log_env) > 0;

  Report rep;
  try {
    rep = run(spec, cfg);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }

  if (verbose) std::cerr << "analysis complete\n";

  std::string body =
      report_format == "json" ? emit_report_json(rep) : emit_report_text(rep);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << body;
  } else {
    std::cout << body;
  }
  return 0;
}
