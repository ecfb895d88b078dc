// measure-pca: command-line front end.
//
//   measure-pca sweep|stability|pca|oracle-check --config <file> [--data <dir>] [--out <dir>]
//
// Exit codes: 0 success, 1 internal failure, 2 configuration error, 3 data error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "measure_pca/commands.hpp"
#include "measure_pca/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"PCA of probability measures through Hilbert-space embeddings"};
  app.require_subcommand(1);

  measure_pca::CommandOptions opts;
  std::string data;
  std::string out = ".";
  for (const char* name : {"sweep", "stability", "pca", "oracle-check"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config, "configuration file (key = value) or manifest.json")->required();
    sub->add_option("--data", data, "directory of point-cloud CSV files");
    sub->add_option("--out", out, "output directory")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (!data.empty()) opts.data = data;
  opts.out = out;
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    measure_pca::run_command(command, opts);
  } catch (const measure_pca::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const measure_pca::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout << command << ": results written to " << opts.out.string() << '\n';
  return 0;
}
