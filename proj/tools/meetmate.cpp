// meetmate: command-line entry point for generation, solving, evaluation and
// the interactive service.

#include "meetmate/eval.hpp"
#include "meetmate/io.hpp"
#include "meetmate/llm.hpp"
#include "meetmate/service.hpp"
#include "meetmate/session.hpp"
#include "meetmate/solver.hpp"
#include "meetmate/universe_gen.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <sstream>

namespace mm = meetmate;

namespace {

mm::service::HttpService* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    mm::write_file_atomic(path, text);
  }
}

mm::session::CapabilityConfig capabilities_from(const std::string& path) {
  return path.empty() ? mm::session::CapabilityConfig::defaults()
                      : mm::session::CapabilityConfig::load(path);
}

std::shared_ptr<const mm::llm::ChatClient> llm_client() {
  auto cfg = mm::llm::LlmConfig::from_env();
  if (!cfg) {
    throw mm::Error(mm::ErrorCode::kInvalidArgument,
                    "llm mode needs MEETMATE_LLM_ENDPOINT and MEETMATE_LLM_MODEL");
  }
  return std::make_shared<mm::llm::ChatClient>(*cfg, std::make_shared<mm::llm::HttpTransport>());
}

mm::service::Components components_for(const std::string& mode, const std::string& caps) {
  if (mode == "llm") {
    auto client = llm_client();
    return {std::make_shared<mm::llm::LlmTranslator>(client),
            std::make_shared<mm::llm::LlmChecker>(client),
            std::make_shared<mm::llm::LlmCoder>(client)};
  }
  return mm::service::Components::offline(capabilities_from(caps));
}

mm::Json read_json(const std::string& path) {
  try {
    return mm::Json::parse(mm::read_text_file(path));
  } catch (const mm::Json::exception& e) {
    throw mm::Error(mm::ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive meeting scheduling engine"};
  app.require_subcommand(1);

  // gen-universe
  mm::gen::GenParams gen_params;
  std::string universe_out;
  auto* gen_universe = app.add_subcommand("gen-universe", "Generate a synthetic organization");
  gen_universe->add_option("--seed", gen_params.seed, "Random seed")->required();
  gen_universe->add_option("--out", universe_out, "Output file (default stdout)");
  gen_universe->add_option("--people", gen_params.n_people, "Number of people")->capture_default_str();
  gen_universe->add_option("--teams", gen_params.n_teams, "Number of teams")->capture_default_str();
  gen_universe->add_option("--horizon-days", gen_params.horizon_days, "Business days of calendars")
      ->capture_default_str();
  gen_universe->add_option("--start-date", gen_params.start_date, "First day (a Monday)")
      ->capture_default_str();

  // gen-instances
  std::string inst_universe, inst_out;
  std::uint64_t inst_seed = 0;
  int inst_n = 75;
  auto* gen_instances = app.add_subcommand("gen-instances", "Generate meeting requests");
  gen_instances->add_option("--universe", inst_universe, "Universe JSON")->required();
  gen_instances->add_option("--seed", inst_seed, "Random seed")->required();
  gen_instances->add_option("--n", inst_n, "Number of instances")->capture_default_str();
  gen_instances->add_option("--out", inst_out, "Output file (default stdout)");

  // solve
  std::string solve_universe, solve_request, solve_constraints;
  std::size_t solve_k = 0;
  auto* solve = app.add_subcommand("solve", "Suggest times for one request and a constraint file");
  solve->add_option("--universe", solve_universe, "Universe JSON")->required();
  solve->add_option("--request", solve_request, "Meeting request JSON")->required();
  solve->add_option("--constraints", solve_constraints,
                    "One constraint-language expression per line, most important first ('#' starts a comment)");
  solve->add_option("--k", solve_k, "Number of suggestions (overrides the request)");

  // eval
  std::string eval_corpus, eval_universe, eval_instances, eval_out, eval_caps;
  std::string eval_coder = "reference", eval_checker = "rules";
  std::uint64_t eval_seed = 7;
  auto* eval = app.add_subcommand("eval", "Score a checker and coder on the preference corpus");
  eval->add_option("--corpus", eval_corpus, "Template corpus (JSONL)")->required();
  eval->add_option("--universe", eval_universe, "Universe JSON")->required();
  eval->add_option("--instances", eval_instances, "Instances JSON")->required();
  eval->add_option("--coder", eval_coder, "reference | rules | llm")
      ->check(CLI::IsMember({"reference", "rules", "llm"}))
      ->capture_default_str();
  eval->add_option("--checker", eval_checker, "rules | llm | labels")
      ->check(CLI::IsMember({"rules", "llm", "labels"}))
      ->capture_default_str();
  eval->add_option("--seed", eval_seed, "In-fill seed")->capture_default_str();
  eval->add_option("--capabilities", eval_caps, "Capability config for the rule checker");
  eval->add_option("--out", eval_out, "Report file (default stdout)");

  // serve / repl share most options
  std::string svc_universe, svc_store = "sessions", svc_mode = "mock", svc_caps,
                            svc_host = "127.0.0.1";
  int svc_port = 8080;
  std::size_t svc_k = 1;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  auto* repl = app.add_subcommand("repl", "Chat with the scheduler in the terminal");
  std::string repl_request;
  for (auto* cmd : {serve, repl}) {
    cmd->add_option("--universe", svc_universe, "Universe JSON")->required();
    cmd->add_option("--store", svc_store, "Session directory")->capture_default_str();
    cmd->add_option("--translator", svc_mode, "mock | llm")
        ->check(CLI::IsMember({"mock", "llm"}))
        ->capture_default_str();
    cmd->add_option("--capabilities", svc_caps, "Capability config JSON");
    cmd->add_option("--k", svc_k, "Default number of suggestions")->capture_default_str();
  }
  serve->add_option("--port", svc_port, "Listen port")->capture_default_str();
  serve->add_option("--host", svc_host, "Listen address")->capture_default_str();
  repl->add_option("--request", repl_request, "Meeting request JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_universe) {
      const auto u = mm::gen::generate_universe(gen_params);
      write_output(universe_out, mm::to_json(u).dump(2) + "\n");
    } else if (*gen_instances) {
      const auto u = mm::load_universe(inst_universe);
      const auto list = mm::gen::generate_instances(u, inst_seed, inst_n);
      write_output(inst_out, mm::gen::instances_to_json(list, inst_seed).dump(2) + "\n");
    } else if (*solve) {
      const auto u = mm::load_universe(solve_universe);
      auto request = mm::session::request_from_json(read_json(solve_request));
      if (solve_k > 0) request.k = solve_k;
      auto view = std::make_shared<const mm::FreeBusyView>(u);
      mm::session::validate(request, *view);
      std::vector<mm::solver::PrioritizedConstraint> constraints;
      if (!solve_constraints.empty()) {
        std::istringstream lines(mm::read_text_file(solve_constraints));
        std::string line;
        while (std::getline(lines, line)) {
          const auto first = line.find_first_not_of(" \t\r");
          if (first == std::string::npos || line[first] == '#') continue;
          const auto text = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
          const int rank = static_cast<int>(constraints.size());
          constraints.push_back(
              mm::solver::make_constraint("c" + std::to_string(rank + 1), text, text, rank));
        }
      }
      const auto grid = mm::session::session_grid(request);
      const auto ctx = mm::session::session_context(request, view);
      mm::Json out = mm::Json::array();
      for (const auto& s : mm::solver::suggest(grid, constraints, ctx, request.k)) {
        out.push_back(mm::session::to_json(s));
      }
      std::cout << mm::Json{{"suggestions", out}}.dump(2) << "\n";
    } else if (*eval) {
      const auto u = mm::load_universe(eval_universe);
      const auto instances = mm::gen::load_instances(eval_instances);
      const auto corpus = mm::eval::load_corpus(eval_corpus);
      const auto records = mm::eval::build_dataset(corpus, instances, u, eval_seed);

      std::shared_ptr<const mm::llm::ChatClient> client;
      if (eval_coder == "llm" || eval_checker == "llm") client = llm_client();
      std::unique_ptr<mm::session::InfoChecker> checker;
      if (eval_checker == "labels") {
        checker = std::make_unique<mm::eval::LabelChecker>(records);
      } else if (eval_checker == "llm") {
        checker = std::make_unique<mm::llm::LlmChecker>(client);
      } else {
        checker = std::make_unique<mm::session::RuleChecker>(capabilities_from(eval_caps));
      }
      std::unique_ptr<mm::session::Coder> coder;
      if (eval_coder == "reference") {
        coder = std::make_unique<mm::eval::ReferenceCoder>(records);
      } else if (eval_coder == "llm") {
        coder = std::make_unique<mm::llm::LlmCoder>(client);
      } else {
        coder = std::make_unique<mm::session::RuleCoder>();
      }
      const auto report = mm::eval::evaluate(*checker, *coder, records, instances, u);
      write_output(eval_out, mm::eval::render_report(report, eval_coder + "/" + eval_checker));
    } else if (*serve || *repl) {
      mm::service::Engine engine(mm::load_universe(svc_universe), svc_store,
                                 components_for(svc_mode, svc_caps), svc_k);
      if (*repl) return mm::service::run_repl(engine, read_json(repl_request), std::cin, std::cout);
      mm::service::HttpService http(engine);
      const int port = http.bind(svc_host, svc_port);
      g_service = &http;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << svc_host << ":" << port << "\n";
      http.listen();
      g_service = nullptr;
    }
  } catch (const mm::Error& e) {
    std::cerr << "error (" << mm::to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  }
  return 0;
}
