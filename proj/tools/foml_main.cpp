// foml command-line tool. Exit codes: 0 positive answer, 1 negative answer,
// 2 resources exhausted, 3 usage, parse, fragment or model errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "foml/extraction.hpp"
#include "foml/fragment.hpp"
#include "foml/oracle.hpp"
#include "foml/parser.hpp"
#include "foml/syntax.hpp"
#include "foml/tableau.hpp"
#include "foml/testgen.hpp"

using namespace foml;
using json = nlohmann::ordered_json;

namespace {

constexpr int kYes = 0, kNo = 1, kResource = 2, kError = 3;

struct InputOpts {
  std::string file;
  std::string expr;
};

void add_input(CLI::App* app, InputOpts& in) {
  app->add_option("formula", in.file, "Formula file");
  app->add_option("-e,--expr", in.expr, "Formula text instead of a file");
}

Formula load(const InputOpts& in) {
  if (!in.expr.empty()) return parse_formula(in.expr);
  if (in.file.empty()) throw CLI::ValidationError("formula", "a formula file or --expr is required");
  return read_formula_file(in.file);
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

SearchLimits parse_limits(const std::vector<std::string>& items, const Formula& theta) {
  SearchLimits l = default_limits(theta);
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--limits", "expected key=value, got " + kv);
      const std::string k = kv.substr(0, eq);
      const std::size_t v = std::stoull(kv.substr(eq + 1));
      if (k == "max_tableau_nodes") l.max_tableau_nodes = v;
      else if (k == "max_depth") l.max_depth = v;
      else if (k == "max_forest_nodes") l.max_forest_nodes = v;
      else if (k == "max_branch_choices") l.max_branch_choices = v;
      else if (k == "max_trees") l.max_trees = v;
      else throw CLI::ValidationError("--limits", "unknown limit " + k);
    }
  }
  return l;
}

json stats_json(const SearchStats& s) {
  json j;
  j["nodes"] = s.nodes;
  j["forests_tried"] = s.forests_tried;
  j["memo_hits"] = s.memo_hits;
  j["largest_forest"] = s.largest_forest;
  j["largest_bound"] = s.largest_bound;
  j["bound_violations"] = s.bound_violations;
  if (!s.exhausted.empty()) j["exhausted"] = s.exhausted;
  return j;
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::Sat: return kYes;
    case Verdict::Unsat: return kNo;
    case Verdict::ResourceExhausted: return kResource;
  }
  return kError;
}

void setup_logging() {
  auto log = spdlog::stderr_color_mt("foml");
  spdlog::set_default_logger(log);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lv = std::getenv("FOML_LOG")) spdlog::set_level(spdlog::level::from_str(lv));
}

} // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Satisfiability, models and fragment classification for first-order modal formulas"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

  InputOpts in;
  std::vector<std::string> limits;
  std::string out_path, trace_path;
  std::size_t extensions = 0;
  OracleBounds bounds;
  std::uint64_t seed = 1;
  std::size_t count = 10;
  int depth = GenConfig{}.max_depth;

  auto* sat = app.add_subcommand("sat", "Decide satisfiability with the tableau");
  add_input(sat, in);
  sat->add_option("--limits", limits, "Search limits, key=value[,key=value]");
  sat->add_option("-o,--certificate", out_path, "Certificate output (default: <formula>.cert.json, - for stdout)");
  sat->add_option("--trace", trace_path, "Write the tableau as indented text");

  auto* model = app.add_subcommand("model", "Extract a model and run leaf-violation extensions");
  add_input(model, in);
  model->add_option("--limits", limits, "Search limits, key=value[,key=value]");
  model->add_option("--extensions", extensions, "Number of extension steps")->check(CLI::NonNegativeNumber);
  model->add_option("-o,--out", out_path, "Model output (default: stdout)");
  model->add_option("--trace", trace_path, "Extension trace output, one JSON record per line");

  std::string model_file, world = "r";
  std::vector<std::string> assigns;
  auto* cm = app.add_subcommand("check-model", "Evaluate a formula in a model");
  cm->add_option("model", model_file, "Model file")->required();
  add_input(cm, in);
  cm->add_option("--world", world, "World");
  cm->add_option("--assign", assigns, "Variable bindings x=a[,y=b]");

  auto* cls = app.add_subcommand("classify", "Classify the bundled fragment of a formula");
  add_input(cls, in);

  auto* orc = app.add_subcommand("oracle", "Bounded finite-model search");
  add_input(orc, in);
  orc->add_option("--max-worlds", bounds.max_worlds, "World bound");
  orc->add_option("--max-domain", bounds.max_domain, "Domain bound");
  orc->add_option("--depth", bounds.tree_depth, "Frame depth bound");
  orc->add_option("-o,--out", out_path, "Model output");

  GenConfig gc;
  auto* gen = app.add_subcommand("gen", "Print random EBBE formulas");
  gen->add_option("--seed", seed, "Corpus seed");
  gen->add_option("-n,--count", count, "Number of formulas");
  gen->add_option("--depth", depth, "Maximum formula depth");

  unsigned threads = 0;
  auto* diff = app.add_subcommand("difftest", "Compare the tableau with the bounded oracle on random formulas");
  diff->add_option("--seed", seed, "Corpus seed");
  diff->add_option("-n,--count", count, "Number of formulas");
  diff->add_option("--depth", depth, "Maximum formula depth");
  diff->add_option("--max-worlds", bounds.max_worlds, "Oracle world bound");
  diff->add_option("--max-domain", bounds.max_domain, "Oracle domain bound");
  diff->add_option("--oracle-depth", bounds.tree_depth, "Oracle frame depth bound");
  diff->add_option("--threads", threads, "Worker threads (0: all cores)");
  diff->add_option("-o,--out", out_path, "Report output, one JSON record per line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kError;
  }
  const bool as_json = format == "json";

  try {
    if (*sat) {
      const Formula theta = load(in);
      const SearchLimits lim = parse_limits(limits, theta);
      spdlog::info("search: {}", print_formula(theta));
      SearchResult r = search(theta, lim);
      spdlog::info("search done: {} nodes", r.stats.nodes);
      if (r.tableau) {
        const std::string path = !out_path.empty() ? out_path : (!in.file.empty() ? in.file + ".cert.json" : "");
        if (!path.empty()) write_file(path, tableau_to_json(*r.tableau));
        if (!trace_path.empty()) write_file(trace_path, dump_tableau(*r.tableau));
      }
      if (as_json) {
        json j;
        j["verdict"] = to_string(r.verdict);
        j["stats"] = stats_json(r.stats);
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << to_string(r.verdict) << "\n";
        if (!r.stats.exhausted.empty()) std::cout << "exhausted: " << r.stats.exhausted << "\n";
      }
      return exit_for(r.verdict);
    }

    if (*model) {
      const Formula theta = load(in);
      SearchResult r = search(theta, parse_limits(limits, theta));
      if (r.verdict != Verdict::Sat) {
        std::cerr << "no model: tableau verdict " << to_string(r.verdict) << "\n";
        return exit_for(r.verdict);
      }
      ExtensionOutcome o = iterate_extensions(theta, *r.tableau, extensions, parse_limits(limits, theta));
      if (!trace_path.empty()) write_file(trace_path, trace_to_jsonl(o.trace));
      if (!out_path.empty()) write_file(out_path, model_to_json(o.model));
      if (as_json) {
        json j;
        j["status"] = to_string(o.status);
        j["extensions"] = o.trace.steps.size();
        j["model"] = json::parse(model_to_json(o.model));
        json vs = json::array();
        for (const auto& v : o.violations) vs.push_back({{"world", to_string(v.world)}, {"leaf", v.leaf}, {"formula", print_formula(v.formula)}});
        j["violations"] = vs;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << to_string(o.status) << "\n";
        for (const auto& w : o.model.worlds) std::cout << "  |delta(" << w << ")| = " << o.model.delta(w).size() << "\n";
        for (const auto& v : o.violations) std::cout << "  violation at " << to_string(v.world) << ", leaf " << v.leaf << ": " << print_formula(v.formula) << "\n";
        if (out_path.empty()) std::cout << model_to_json(o.model);
      }
      return kYes;
    }

    if (*cm) {
      KripkeModel m = read_model_file(model_file);
      auto errs = validate_model(m);
      if (!errs.empty()) {
        for (const auto& e : errs) std::cerr << "invalid model: " << e << "\n";
        return kError;
      }
      const Formula f = load(in);
      Assignment sigma;
      for (const auto& a : assigns) {
        std::stringstream ss(a);
        std::string kv;
        while (std::getline(ss, kv, ',')) {
          auto eq = kv.find('=');
          if (eq == std::string::npos) throw CLI::ValidationError("--assign", "expected x=a, got " + kv);
          sigma[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
      }
      const bool v = check(m, world, sigma, f);
      if (as_json) std::cout << json{{"holds", v}}.dump() << "\n";
      else std::cout << (v ? "true" : "false") << "\n";
      return v ? kYes : kNo;
    }

    if (*cls) {
      const FragmentClass c = classify_fragment(load(in));
      if (as_json) {
        json b = json::array();
        for (auto x : c.bundles_present) b.push_back(to_string(x));
        std::cout << json{{"category", to_string(c.category)}, {"bundles", b}}.dump() << "\n";
      } else {
        std::cout << to_string(c.category);
        for (auto x : c.bundles_present) std::cout << " " << to_string(x);
        std::cout << "\n";
      }
      return kYes;
    }

    if (*orc) {
      const Formula theta = load(in);
      std::optional<OracleModel> m;
      try {
        m = bounded_model_search(to_nnf(theta), bounds);
      } catch (const OracleResourceError& e) {
        std::cout << "RESOURCE\n";
        std::cerr << e.what() << "\n";
        return kResource;
      }
      if (!m) {
        std::cout << (as_json ? "null" : "none") << "\n";
        return kNo;
      }
      if (!out_path.empty()) write_file(out_path, model_to_json(m->model));
      if (as_json) {
        json j;
        j["world"] = m->world;
        j["assignment"] = m->sigma;
        j["model"] = json::parse(model_to_json(m->model));
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "model at world " << m->world << "\n" << model_to_json(m->model);
      }
      return kYes;
    }

    gc.seed = seed;
    gc.max_depth = depth;
    if (*gen) {
      std::cout << "# seed=" << seed << " depth=" << depth << " count=" << count << "\n";
      for (const auto& f : gen_corpus(gc, count)) std::cout << print_formula(f) << "\n";
      return kYes;
    }

    if (*diff) {
      spdlog::info("difftest seed={} count={}", seed, count);
      DiffReport rep = differential_run(gc, count, bounds, std::nullopt, threads);
      if (!out_path.empty()) write_file(out_path, to_jsonl(rep));
      std::size_t sat_n = 0, osat = 0;
      for (const auto& r : rep.records) {
        sat_n += r.tableau == Verdict::Sat;
        osat += r.oracle == "sat";
        for (const auto& i : r.issues) std::cerr << "#" << r.index << " " << r.formula << ": " << i << "\n";
        for (const auto& i : r.notes) std::cerr << "#" << r.index << " note: " << i << "\n";
      }
      std::cout << "# seed=" << seed << " depth=" << depth << "\n"
                << "formulas " << rep.records.size() << ", tableau SAT " << sat_n << ", oracle SAT " << osat
                << ", discrepancies " << rep.discrepancies() << "\n";
      return rep.discrepancies() == 0 ? kYes : kNo;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.span().start << "-" << e.span().end << ": " << e.what() << "\n";
    return kError;
  } catch (const FragmentError& e) {
    std::cerr << "fragment error: " << e.what() << "\n";
    return kError;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
