#include <CLI11.hpp>
#include <iostream>

#include "fracpol/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Polarization and fractional p-Laplacian eigenvalue experiments"};
  app.require_subcommand(1, 1);
  fracpol::CliOptions opts;
  for (const char* name : {"solve", "sweep-t", "sweep-rot", "fk-check", "props"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.configPath, "JSON experiment config")->required();
    sub->add_option("--out", opts.outDir, "output directory")->required();
    sub->add_option("--set", opts.overrides, "dotted key=value override")->take_all();
    sub->add_flag("--dump-mask", opts.dumpMask, "write rasterized masks");
    sub->callback([&opts, name] { opts.subcommand = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return fracpol::run(opts, std::cout, std::cerr);
}
