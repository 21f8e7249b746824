#include "gradedcalc/cli.hpp"
#include "gradedcalc/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
  CLI::App app{"gradedcalc: operator calculus for Shubin actions of graded groups"};
  std::string input;
  gradedcalc::RunOptions opt;
  std::vector<int> truncation;
  double tolerance = 0;
  bool print_only = false;
  std::string out = ".";
  app.add_option("--input", input, "problem document")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "directory for report.json and CSV artifacts");
  app.add_option("--seed", opt.seed, "seed for sampled directions and start vectors");
  app.add_option("--truncation", truncation, "truncation list, overrides the document")->delimiter(',');
  auto* tol = app.add_option("--tolerance", tolerance, "numeric tolerance, overrides the document")
                  ->check(CLI::PositiveNumber);
  app.add_flag("--print", print_only, "print the canonical document and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::ifstream in(input);
  std::stringstream buf;
  buf << in.rdbuf();
  gradedcalc::ProblemSpec spec;
  try {
    spec = gradedcalc::parse(buf.str());
  } catch (const gradedcalc::ParseError& e) {
    std::cerr << input << ":" << e.what() << "\n";
    return 1;
  }
  if (print_only) {
    std::cout << gradedcalc::print(spec);
    return 0;
  }

  opt.out = out;
  opt.input = input;
  opt.threads = gradedcalc::thread_cap();
  if (!truncation.empty()) opt.truncation = truncation;
  if (*tol) opt.tolerance = tolerance;
  gradedcalc::RunResult r = gradedcalc::run(spec, opt);
  std::cout << spec.get("command", "name").value_or("?") << ": " << r.verdict << "\n";
  return r.exit_code;
}
