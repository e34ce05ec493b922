// Command-line front end for the simplesmt pipeline.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "simplesmt/pipeline.hpp"

using namespace simplesmt;

namespace {

struct Overrides {
  std::string config_file;
  std::string manifest_file;
  std::map<std::string, std::string> values;
};

// Every configuration key becomes a long flag of the same name.
void add_config_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "key = value configuration file");
  cmd->add_option("--manifest", o.manifest_file, "take the configuration recorded in a run manifest");
  for (const auto& key : PipelineConfig::keys()) {
    auto* opt = cmd->add_option_function<std::string>(
        "--" + key, [&o, key](const std::string& v) { o.values[key] = v; }, "override `" + key + "`");
    if (key == "direction") opt->check(CLI::IsMember({"forward", "reverse"}));
    if (key == "scrub") opt->check(CLI::IsMember({"none", "bible"}));
  }
}

// Defaults, then the config file, then a manifest's recorded settings
// (which never carry a workdir), then flags.
PipelineConfig resolve(const Overrides& o) {
  PipelineConfig cfg = o.config_file.empty() ? PipelineConfig{} : PipelineConfig::load(o.config_file);
  if (!o.manifest_file.empty()) {
    fs::path workdir = cfg.workdir;
    cfg = PipelineConfig::from_manifest(o.manifest_file);
    cfg.workdir = workdir;
  }
  for (const auto& [k, v] : o.values) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simplesmt: phrase-based monolingual translation for text simplification and style transfer"};
  app.require_subcommand(1, 1);

  Overrides o;
  std::string part = "test";
  std::string output;

  struct Stage {
    const char* name;
    const char* help;
  };
  const Stage stages[] = {
      {"prepare", "tokenize, scrub, clean, split and truecase the parallel corpus"},
      {"align", "train word alignments on the train split"},
      {"phrases", "extract phrase pairs and estimate the phrase table"},
      {"lm", "train the target-side language model"},
      {"decode", "translate the source side of a split"},
      {"eval", "score decoded output against references and the Original baseline"},
      {"sweep", "decode the dev split once per weight grid point"},
      {"report", "decode and evaluate the test split with the selected weights"},
      {"reverse", "write the configuration with source and target sides exchanged"},
  };
  std::map<std::string, CLI::App*> cmds;
  for (const auto& s : stages) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_config_options(cmd, o);
    cmds[s.name] = cmd;
  }
  for (const char* name : {"decode", "eval"})
    cmds[name]->add_option("--split", part, "dev or test")->check(CLI::IsMember({"dev", "test", "train"}));
  cmds["reverse"]->add_option("-o,--output", output, "write the reversed configuration here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    PipelineConfig cfg = resolve(o);
    std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "reverse") {
      std::string text = reverse_direction(cfg).serialize();
      if (output.empty())
        std::cout << text;
      else
        write_file(output, text);
      return 0;
    }
    WorkdirLock lock(cfg.workdir);
    if (cmd == "prepare") run_prepare(cfg, std::cerr);
    else if (cmd == "align") run_align(cfg, std::cerr);
    else if (cmd == "phrases") run_phrases(cfg, std::cerr);
    else if (cmd == "lm") run_lm(cfg, std::cerr);
    else if (cmd == "decode") run_decode(cfg, part, std::cerr);
    else if (cmd == "eval") run_eval(cfg, part, std::cerr);
    else if (cmd == "sweep") run_sweep_stage(cfg, std::cerr);
    else if (cmd == "report") run_report(cfg, std::cerr);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
