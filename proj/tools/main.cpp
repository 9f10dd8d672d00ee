#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "endspace/verify.hpp"

using namespace endspace;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EndspaceError("cannot write: " + path);
  out << content;
}

std::vector<int> parse_indices(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

std::vector<std::string> parse_ids(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<FiniteCut> cuts_by_index(const GraphPresentation& pres,
                                     const RunConfig& cfg,
                                     const std::vector<int>& indices) {
  CutEnumeration e = enumerate_cuts(pres, cfg.level_budget, cfg.cut_size_budget);
  std::vector<FiniteCut> out;
  for (int i : indices) {
    if (i < 0 || i >= static_cast<int>(e.cuts.size()))
      throw EndspaceError("cut index out of range: " + std::to_string(i));
    out.push_back(e.cuts[i]);
  }
  return out;
}

// "tower.dot" -> "tower_3.dot"
std::string indexed_path(const std::string& path, size_t j) {
  auto dot = path.rfind('.');
  if (dot == std::string::npos) return path + "_" + std::to_string(j);
  return path.substr(0, dot) + "_" + std::to_string(j) + path.substr(dot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-resolution analysis of presented infinite graphs"};
  app.require_subcommand(1);

  RunConfig env_cfg = config_from_env();
  std::string source, cut_csv, edge_csv, dot_path, json_path, out_path;
  std::string kind = "quotient", format = "json";
  int depth = 0;
  RunConfig cfg = env_cfg;

  auto add_common = [&](CLI::App* cmd, bool needs_source = true) {
    if (needs_source)
      cmd->add_option("source", source, "preset name, file:<path>, or .igp path")
          ->required();
    cmd->add_option("--level", cfg.level_budget, "level budget")
        ->default_val(env_cfg.level_budget);
    cmd->add_option("--size", cfg.cut_size_budget, "cut size budget")
        ->default_val(env_cfg.cut_size_budget);
    cmd->add_option("--threshold", cfg.witness_threshold, "witness threshold")
        ->default_val(env_cfg.witness_threshold);
    cmd->add_option("--cache-dir", cfg.cache_dir, "result cache directory")
        ->default_val(env_cfg.cache_dir);
  };

  CLI::App* parse_cmd = app.add_subcommand("parse", "validate a presentation");
  add_common(parse_cmd);

  CLI::App* cuts_cmd = app.add_subcommand("cuts", "enumerate stabilized cuts");
  add_common(cuts_cmd);

  CLI::App* quot_cmd = app.add_subcommand("quotient", "build a quotient graph");
  add_common(quot_cmd);
  quot_cmd->add_option("--cuts", cut_csv, "cut indices, comma separated")
      ->required();
  quot_cmd->add_option("--dot", dot_path, "write DOT here");

  CLI::App* contract_cmd =
      app.add_subcommand("contract", "build a contraction graph");
  add_common(contract_cmd);
  contract_cmd->add_option("--edges", edge_csv, "edge ids, comma separated")
      ->required();
  contract_cmd->add_option("--dot", dot_path, "write DOT here");

  CLI::App* ends_cmd = app.add_subcommand("ends", "detect edge-ends");
  add_common(ends_cmd);

  CLI::App* classes_cmd =
      app.add_subcommand("classes", "identification classes");
  add_common(classes_cmd);

  CLI::App* tree_cmd = app.add_subcommand("tree", "build a spanning tree tower");
  add_common(tree_cmd);
  tree_cmd->add_option("--cuts", cut_csv, "ordered cut indices")->required();
  tree_cmd->add_option("--depth", depth, "tower depth (default: all)");
  tree_cmd->add_option("--dot", dot_path, "per-level DOT path pattern");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run every law check end to end");
  add_common(verify_cmd);

  CLI::App* export_cmd = app.add_subcommand("export", "export a built object");
  add_common(export_cmd);
  export_cmd->add_option("--kind", kind, "quotient | contract | tree")
      ->check(CLI::IsMember({"quotient", "contract", "tree"}));
  export_cmd->add_option("--cuts", cut_csv, "cut indices (quotient/tree)");
  export_cmd->add_option("--edges", edge_csv, "edge ids (contract)");
  export_cmd->add_option("--format", format, "dot | json")
      ->check(CLI::IsMember({"dot", "json"}));
  export_cmd->add_option("--out", out_path, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse_cmd->parsed()) {
      GraphPresentation pres = load_presentation(source);
      std::cout << presentation_to_json(pres) << "\n";
      return 0;
    }
    if (cuts_cmd->parsed()) {
      GraphPresentation pres = load_presentation(source);
      CutEnumeration e =
          enumerate_cuts(pres, cfg.level_budget, cfg.cut_size_budget);
      std::cout << cuts_to_json(e) << "\n";
      return 0;
    }
    if (quot_cmd->parsed()) {
      GraphPresentation pres = load_presentation(source);
      std::vector<FiniteCut> cuts =
          cuts_by_index(pres, cfg, parse_indices(cut_csv));
      int level = std::max(cfg.level_budget, default_quotient_level(pres, cuts));
      QuotientGraph q = build_quotient(pres, cuts, level);
      if (!dot_path.empty()) write_file(dot_path, quotient_to_dot(q));
      std::cout << quotient_to_json(q) << "\n";
      return 0;
    }
    if (contract_cmd->parsed()) {
      GraphPresentation pres = load_presentation(source);
      ContractionGraph g =
          build_contraction(pres, parse_ids(edge_csv), cfg.level_budget);
      if (!dot_path.empty()) write_file(dot_path, contraction_to_dot(g));
      std::cout << contraction_to_json(g) << "\n";
      return 0;
    }
    if (ends_cmd->parsed()) {
      GraphPresentation pres = load_presentation(source);
      CutEnumeration e =
          enumerate_cuts(pres, cfg.level_budget, cfg.cut_size_budget);
      EndDetection det = detect_ends(pres, e.cuts, cfg.level_budget,
                                     cfg.witness_threshold);
      std::cout << detection_to_json(det) << "\n";
      return 0;
    }
    if (classes_cmd->parsed()) {
      GraphPresentation pres = load_presentation(source);
      CutEnumeration e =
          enumerate_cuts(pres, cfg.level_budget, cfg.cut_size_budget);
      ClassesResult c = itop_classes(pres, e.cuts, cfg.level_budget,
                                     cfg.witness_threshold);
      std::cout << classes_to_json(c) << "\n";
      return 0;
    }
    if (tree_cmd->parsed()) {
      GraphPresentation pres = load_presentation(source);
      std::vector<FiniteCut> seq =
          cuts_by_index(pres, cfg, parse_indices(cut_csv));
      int d = depth > 0 ? depth : static_cast<int>(seq.size());
      TreeTower tower = build_tree_tower(pres, seq, d, cfg.level_budget);
      if (!dot_path.empty()) {
        auto dots = tower_to_dot(pres, tower);
        for (size_t j = 0; j < dots.size(); ++j)
          write_file(indexed_path(dot_path, j), dots[j]);
      }
      std::cout << tower_report_to_json(pres, tower) << "\n";
      return 0;
    }
    if (verify_cmd->parsed()) {
      VerifyResult result = run_verify(source, cfg);
      std::cout << result.report_json << "\n";
      return result.exit_code;
    }
    if (export_cmd->parsed()) {
      GraphPresentation pres = load_presentation(source);
      if (kind == "quotient") {
        std::vector<FiniteCut> cuts =
            cuts_by_index(pres, cfg, parse_indices(cut_csv));
        int level =
            std::max(cfg.level_budget, default_quotient_level(pres, cuts));
        QuotientGraph q = build_quotient(pres, cuts, level);
        write_file(out_path,
                   format == "dot" ? quotient_to_dot(q) : quotient_to_json(q));
      } else if (kind == "contract") {
        ContractionGraph g =
            build_contraction(pres, parse_ids(edge_csv), cfg.level_budget);
        write_file(out_path, format == "dot" ? contraction_to_dot(g)
                                             : contraction_to_json(g));
      } else {
        std::vector<FiniteCut> seq =
            cuts_by_index(pres, cfg, parse_indices(cut_csv));
        TreeTower tower = build_tree_tower(
            pres, seq, static_cast<int>(seq.size()), cfg.level_budget);
        if (format == "dot") {
          auto dots = tower_to_dot(pres, tower);
          for (size_t j = 0; j < dots.size(); ++j)
            write_file(indexed_path(out_path, j), dots[j]);
        } else {
          write_file(out_path, tower_report_to_json(pres, tower));
        }
      }
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const EndspaceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
