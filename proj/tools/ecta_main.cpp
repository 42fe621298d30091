// ecta: span-level emotion-cause-category triplet extraction toolkit.
// One binary, subcommand per pipeline stage; all machine-readable output is
// JSON (or JSONL/CSV where noted) written to --out or standard output.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ecta/annotate.hpp"
#include "ecta/augmentor.hpp"
#include "ecta/config.hpp"
#include "ecta/corpus.hpp"
#include "ecta/gateway.hpp"
#include "ecta/gateway_http.hpp"
#include "ecta/json_io.hpp"
#include "ecta/lora.hpp"
#include "ecta/metrics.hpp"
#include "ecta/prompts.hpp"
#include "ecta/triplet_codec.hpp"

#ifndef ECTA_DEFAULT_TEMPLATE_DIR
#define ECTA_DEFAULT_TEMPLATE_DIR "assets/templates"
#endif

namespace {

using nlohmann::json;

std::string read_file_or_die(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ecta::Error(ecta::errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ecta::Error(ecta::errc::io_error, "cannot write " + out_path);
  out << content;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// Options shared by several subcommands, resolved against an optional config
// file (flags win over config values).
struct CommonOpts {
  std::string config_path;
  std::string categories_path;
  std::string delimiters;
  std::uint64_t seed = 42;

  ecta::config::RunConfig config() const {
    if (config_path.empty()) return {};
    return ecta::config::load_config_file(config_path);
  }

  ecta::CategorySet categories(const ecta::config::RunConfig& cfg) const {
    std::string path = categories_path;
    if (path.empty()) path = cfg.str("run.categories_path");
    return path.empty() ? ecta::CategorySet::standard() : ecta::CategorySet::from_file(path);
  }

  std::u32string clause_delimiters(const ecta::config::RunConfig& cfg) const {
    std::string raw = delimiters;
    if (raw.empty()) raw = cfg.str("run.delimiters");
    if (raw.empty()) return ecta::default_delimiters();
    const auto cps = ecta::unicode::decode(raw);
    return std::u32string(cps.begin(), cps.end());
  }
};

struct BackendOpts {
  std::string backend = "mock";
  std::string mock_table;
  bool echo = false;
  std::string base_url;
  std::string endpoint_path;
  std::string model_id;
  long timeout_ms = 0;
  long max_retries = -1;
  long parallelism = 0;
  double temperature = -1.0;
  long max_tokens = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--backend", backend, "generation backend: mock or http")
        ->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--mock-table", mock_table, "JSONL mock table of {digest, response}");
    cmd->add_flag("--echo", echo, "mock echoes the last user turn on table miss");
    cmd->add_option("--base-url", base_url, "HTTP backend base URL");
    cmd->add_option("--endpoint-path", endpoint_path, "chat-completions path");
    cmd->add_option("--model", model_id, "model identifier sent to the backend");
    cmd->add_option("--timeout-ms", timeout_ms, "request timeout");
    cmd->add_option("--max-retries", max_retries, "retry limit for transient failures");
    cmd->add_option("--parallelism", parallelism, "max in-flight requests");
    cmd->add_option("--temperature", temperature, "sampling temperature");
    cmd->add_option("--max-tokens", max_tokens, "completion token limit");
  }

  std::shared_ptr<ecta::llm::Backend> make_backend(const ecta::config::RunConfig& cfg) const {
    if (backend == "mock") {
      std::string table = mock_table;
      if (table.empty()) table = cfg.str("gateway.mock_table_path");
      if (table.empty()) return std::make_shared<ecta::llm::MockBackend>(true);
      return ecta::llm::MockBackend::from_table_file(table, echo);
    }
    ecta::llm::HttpBackendConfig http;
    http.base_url = base_url.empty() ? cfg.str("gateway.base_url") : base_url;
    if (http.base_url.empty())
      throw ecta::Error(ecta::errc::bad_config, "http backend needs --base-url or gateway.base_url");
    if (!endpoint_path.empty()) http.endpoint_path = endpoint_path;
    else if (cfg.has("gateway.endpoint_path")) http.endpoint_path = cfg.str("gateway.endpoint_path");
    http.timeout_ms = static_cast<int>(timeout_ms > 0 ? timeout_ms : cfg.integer("gateway.timeout_ms", 30000));
    return std::make_shared<ecta::llm::HttpBackend>(http);
  }

  ecta::llm::Gateway make_gateway(const ecta::config::RunConfig& cfg, std::uint64_t seed) const {
    ecta::llm::RetryPolicy policy;
    policy.max_retries =
        static_cast<int>(max_retries >= 0 ? max_retries : cfg.integer("gateway.max_retries", 3));
    policy.backoff_base_ms = static_cast<int>(cfg.integer("gateway.backoff_base_ms", 500));
    policy.jitter_seed = seed;
    return ecta::llm::Gateway(make_backend(cfg), policy);
  }

  int effective_parallelism(const ecta::config::RunConfig& cfg) const {
    return static_cast<int>(parallelism > 0 ? parallelism : cfg.integer("gateway.parallelism", 4));
  }

  double effective_temperature(const ecta::config::RunConfig& cfg, double fallback) const {
    return temperature >= 0.0 ? temperature : cfg.real("gateway.temperature", fallback);
  }

  int effective_max_tokens(const ecta::config::RunConfig& cfg) const {
    return static_cast<int>(max_tokens > 0 ? max_tokens : cfg.integer("gateway.max_tokens", 2048));
  }

  std::string effective_model(const ecta::config::RunConfig& cfg) const {
    return model_id.empty() ? cfg.str("gateway.model_id", "default-model") : model_id;
  }
};

const ecta::Document& find_document(const std::vector<ecta::Document>& docs,
                                    const std::string& id) {
  for (const ecta::Document& d : docs)
    if (d.id == id) return d;
  throw ecta::Error(ecta::errc::invariant_violation, "no document with id \"" + id + "\"");
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int run_validate(const CommonOpts& common, const std::string& corpus_path,
                 const std::string& out_path) {
  const auto cfg = common.config();
  const auto categories = common.categories(cfg);
  const auto delimiters = common.clause_delimiters(cfg);

  json violations = json::array();
  std::size_t documents = 0;
  std::set<std::string> seen_ids;
  std::ifstream in(corpus_path);
  if (!in) throw ecta::Error(ecta::errc::io_error, "cannot open " + corpus_path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (ecta::CategorySet::trim(line).empty()) continue;
    ++documents;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      violations.push_back({{"line", line_no}, {"id", nullptr},
                            {"code", "MALFORMED_RECORD"}, {"detail", e.what()}});
      continue;
    }
    ecta::Document doc;
    try {
      doc = ecta::document_from_json(record, delimiters);
    } catch (const ecta::Error& e) {
      violations.push_back({{"line", line_no}, {"id", nullptr},
                            {"code", "MALFORMED_RECORD"}, {"detail", e.what()}});
      continue;
    }
    if (!seen_ids.insert(doc.id).second)
      violations.push_back({{"line", line_no}, {"id", doc.id},
                            {"code", "DUPLICATE_ID"}, {"detail", "document id repeats"}});
    for (const ecta::Violation& v : ecta::validate_document(doc, categories).violations)
      violations.push_back({{"line", line_no}, {"id", doc.id}, {"code", v.code}, {"detail", v.detail}});
  }
  const json report = {
      {"documents", documents}, {"valid", violations.empty()}, {"violations", violations}};
  write_output(out_path, dump_json(report));
  return violations.empty() ? 0 : 1;
}

int run_segment(const CommonOpts& common, std::string text, const std::string& in_path,
                const std::string& out_path) {
  const auto cfg = common.config();
  if (!in_path.empty()) text = read_file_or_die(in_path);
  const auto clauses = ecta::segment_clauses(text, common.clause_delimiters(cfg));
  write_output(out_path, dump_json(ecta::io::clauses_to_json(clauses)));
  return 0;
}

int run_annotate(const CommonOpts& common, const std::string& corpus_path, const std::string& id,
                 const std::string& out_path) {
  const auto cfg = common.config();
  const auto docs =
      ecta::load_corpus(corpus_path, common.categories(cfg), common.clause_delimiters(cfg));
  if (!id.empty()) {
    write_output(out_path, ecta::annotation::annotate(find_document(docs, id)) + "\n");
    return 0;
  }
  std::string lines;
  for (const ecta::Document& doc : docs) {
    lines += json{{"id", doc.id}, {"annotated", ecta::annotation::annotate(doc)}}.dump();
    lines += "\n";
  }
  write_output(out_path, lines);
  return 0;
}

int run_render_prompt(const CommonOpts& common, const std::string& kind,
                      const std::string& template_path, const std::string& doc_text,
                      const std::string& annotated_path, const std::string& corpus_path,
                      const std::string& id, const std::vector<int>& drop_rules, bool as_json,
                      bool digest_only, const std::string& out_path) {
  const auto cfg = common.config();
  std::string tpl_path = template_path;
  if (tpl_path.empty()) {
    std::string dir = cfg.str("run.template_dir", ECTA_DEFAULT_TEMPLATE_DIR);
    tpl_path = dir + "/" + (kind == "extraction" ? "extraction_default.tmpl"
                                                 : "augmentation_default.tmpl");
  }
  ecta::prompts::PromptTemplate tpl = ecta::prompts::load_template_file(tpl_path);
  if (!drop_rules.empty())
    tpl = ecta::prompts::render_rule_ablation(tpl, std::set<int>(drop_rules.begin(), drop_rules.end()));

  std::vector<ecta::prompts::ChatTurn> turns;
  if (kind == "extraction") {
    std::string text = doc_text;
    if (text.empty() && !corpus_path.empty()) {
      const auto docs =
          ecta::load_corpus(corpus_path, common.categories(cfg), common.clause_delimiters(cfg));
      text = find_document(docs, id).text;
    }
    if (text.empty())
      throw ecta::Error(ecta::errc::bad_config, "extraction needs --doc-text or --corpus with --id");
    turns = ecta::prompts::render_extraction_instruction(tpl, text);
  } else {
    std::string annotated;
    if (!annotated_path.empty()) {
      annotated = read_file_or_die(annotated_path);
    } else if (!corpus_path.empty()) {
      const auto docs =
          ecta::load_corpus(corpus_path, common.categories(cfg), common.clause_delimiters(cfg));
      annotated = ecta::annotation::annotate(find_document(docs, id));
    } else {
      throw ecta::Error(ecta::errc::bad_config,
                        "augmentation needs --annotated or --corpus with --id");
    }
    turns = ecta::prompts::render_augmentation_prompt(tpl, annotated);
  }

  if (digest_only) {
    write_output(out_path, dump_json(json{{"digest", ecta::llm::digest_turns(turns)}}));
    return 0;
  }
  if (as_json) {
    json arr = json::array();
    for (const auto& t : turns)
      arr.push_back({{"role", std::string(ecta::prompts::to_string(t.role))}, {"content", t.content}});
    write_output(out_path, dump_json(json{{"turns", arr}}));
    return 0;
  }
  write_output(out_path, ecta::prompts::format_turns(turns));
  return 0;
}

int run_generate(const CommonOpts& common, const BackendOpts& backend,
                 const std::string& corpus_path, const std::string& template_path,
                 const std::string& out_path) {
  const auto cfg = common.config();
  const auto docs =
      ecta::load_corpus(corpus_path, common.categories(cfg), common.clause_delimiters(cfg));
  std::string tpl_path = template_path;
  if (tpl_path.empty())
    tpl_path = cfg.str("run.template_dir", ECTA_DEFAULT_TEMPLATE_DIR) + "/extraction_default.tmpl";
  const auto tpl = ecta::prompts::load_template_file(tpl_path);

  std::vector<ecta::llm::GenerationRequest> requests;
  for (const ecta::Document& doc : docs) {
    ecta::llm::GenerationRequest req;
    req.turns = ecta::prompts::render_extraction_instruction(tpl, doc.text);
    req.model_id = backend.effective_model(cfg);
    req.temperature = backend.effective_temperature(cfg, 0.0);
    req.max_tokens = backend.effective_max_tokens(cfg);
    req.request_tag = "gen-" + doc.id;
    requests.push_back(std::move(req));
  }

  auto gateway = backend.make_gateway(cfg, common.seed);
  const auto outcomes = gateway.complete_batch(requests, backend.effective_parallelism(cfg));

  std::string lines;
  bool any_failure = false;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].ok()) {
      const auto& r = *outcomes[i].result;
      lines += json{{"id", docs[i].id},
                    {"output", r.text},
                    {"backend", std::string(ecta::llm::to_string(r.backend))},
                    {"attempts", r.attempts},
                    {"latency_ms", r.latency_ms}}
                   .dump();
    } else {
      any_failure = true;
      lines += json{{"id", docs[i].id},
                    {"error", outcomes[i].error},
                    {"code", std::string(ecta::errc_name(outcomes[i].code))}}
                   .dump();
    }
    lines += "\n";
  }
  write_output(out_path, lines);
  return any_failure ? 3 : 0;
}

int run_augment(const CommonOpts& common, const BackendOpts& backend,
                const std::string& corpus_path, const std::string& template_path, int n_per_doc,
                const std::string& out_corpus, const std::string& report_path) {
  const auto cfg = common.config();
  const auto categories = common.categories(cfg);
  const auto delimiters = common.clause_delimiters(cfg);
  const auto docs = ecta::load_corpus(corpus_path, categories, delimiters);
  std::string tpl_path = template_path;
  if (tpl_path.empty())
    tpl_path = cfg.str("run.template_dir", ECTA_DEFAULT_TEMPLATE_DIR) + "/augmentation_default.tmpl";
  const auto tpl = ecta::prompts::load_template_file(tpl_path);

  auto gateway = backend.make_gateway(cfg, common.seed);
  const auto outcome = ecta::aug::run_augmentation(
      docs, tpl, gateway, n_per_doc, backend.effective_temperature(cfg, 0.8),
      backend.effective_max_tokens(cfg), backend.effective_parallelism(cfg), categories,
      delimiters);

  if (!out_corpus.empty()) ecta::save_corpus(out_corpus, outcome.corpus);
  write_output(report_path, dump_json(ecta::io::augment_report_to_json(outcome.report)));
  return 0;
}

int run_parse_output(const CommonOpts& common, std::string text, const std::string& in_path,
                     long max_issues, const std::string& out_path) {
  const auto cfg = common.config();
  if (!in_path.empty()) text = read_file_or_die(in_path);
  const auto result = ecta::codec::parse_triplets(text, common.categories(cfg));
  write_output(out_path, dump_json(ecta::io::parse_result_to_json(result)));
  if (max_issues >= 0 && static_cast<long>(result.issues.size()) > max_issues) return 1;
  return 0;
}

int run_eval(const CommonOpts& common, const std::string& pred_path,
             const std::string& pred_jsonl, const std::string& gold_path,
             const std::string& doc_id, const std::string& policy_name,
             const std::string& csv_path, const std::string& out_path) {
  const auto cfg = common.config();
  const auto categories = common.categories(cfg);
  const auto docs = ecta::load_corpus(gold_path, categories, common.clause_delimiters(cfg));
  const auto policy = policy_name == "penalize" ? ecta::metrics::MalformedPolicy::Penalize
                                                : ecta::metrics::MalformedPolicy::Exclude;

  if (!pred_path.empty()) {
    if (doc_id.empty())
      throw ecta::Error(ecta::errc::bad_config, "--pred needs --doc-id to pick the gold document");
    const auto report = ecta::metrics::evaluate_output(read_file_or_die(pred_path),
                                                       find_document(docs, doc_id), categories,
                                                       policy);
    write_output(out_path, dump_json(ecta::io::report_to_json(report)));
    return 0;
  }

  std::vector<ecta::metrics::MetricsReport> reports;
  std::ifstream in(pred_jsonl);
  if (!in) throw ecta::Error(ecta::errc::io_error, "cannot open " + pred_jsonl);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (ecta::CategorySet::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ecta::Error(ecta::errc::malformed_record,
                        pred_jsonl + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.contains("id") || !j.contains("output"))
      throw ecta::Error(ecta::errc::malformed_record,
                        pred_jsonl + ":" + std::to_string(line_no) + ": need id and output");
    reports.push_back(ecta::metrics::evaluate_output(j["output"].get<std::string>(),
                                                     find_document(docs, j["id"].get<std::string>()),
                                                     categories, policy));
  }
  if (reports.empty())
    throw ecta::Error(ecta::errc::empty_input, "no predictions in " + pred_jsonl);
  if (!csv_path.empty()) write_output(csv_path, ecta::io::reports_to_csv(reports));
  const auto summary = ecta::metrics::aggregate_folds(reports);
  write_output(out_path, dump_json(ecta::io::report_to_json(summary.micro)));
  return 0;
}

int run_kfold(const CommonOpts& common, const std::string& corpus_path, int k, int fold,
              const std::string& emit, const std::string& out_corpus,
              const std::string& out_path) {
  const auto cfg = common.config();
  const auto docs =
      ecta::load_corpus(corpus_path, common.categories(cfg), common.clause_delimiters(cfg));
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.id);
  const auto plan = ecta::metrics::kfold_split(ids, k, common.seed);

  if (emit.empty()) {
    write_output(out_path, dump_json(ecta::io::fold_plan_to_json(plan)));
    return 0;
  }
  if (fold < 0 || fold >= k)
    throw ecta::Error(ecta::errc::bad_config, "--fold must be in [0, k)");
  const auto selected = emit == "test" ? ecta::metrics::test_ids(plan, fold)
                                       : ecta::metrics::train_ids(plan, fold);
  if (!out_corpus.empty()) {
    const std::set<std::string> keep(selected.begin(), selected.end());
    std::vector<ecta::Document> subset;
    for (const auto& d : docs)
      if (keep.count(d.id)) subset.push_back(d);
    ecta::save_corpus(out_corpus, subset);
  }
  write_output(out_path, dump_json(json{{"fold", fold}, {"view", emit}, {"ids", selected}}));
  return 0;
}

int run_compare(const std::string& a_path, const std::string& b_path,
                const std::string& out_path) {
  const auto a = ecta::io::report_from_json(json::parse(read_file_or_die(a_path)));
  const auto b = ecta::io::report_from_json(json::parse(read_file_or_die(b_path)));
  write_output(out_path, dump_json(ecta::io::delta_to_json(ecta::metrics::compare(a, b))));
  return 0;
}

int run_lora_demo(const CommonOpts& common, std::size_t d, std::size_t k, std::size_t r,
                  double lr, int epochs, int samples, const std::string& trace_path,
                  const std::string& out_path) {
  using namespace ecta::lora;
  std::mt19937_64 rng(common.seed);
  Matrix base = random_matrix(d, k, rng);
  LoraLayer truth{base, random_matrix(r, k, rng, -0.5, 0.5), random_matrix(d, r, rng, -0.5, 0.5), r};
  std::vector<TrainSample> data;
  for (int i = 0; i < samples; ++i) {
    Vector x(k);
    for (auto& v : x) v = uniform(rng, -1.0, 1.0);
    data.push_back({x, lora_forward(truth, x)});
  }
  LoraLayer layer = LoraLayer::init(std::move(base), r, common.seed + 1);
  const auto trace = sgd_fit(layer, data, lr, epochs);

  std::string csv = "epoch,mean_loss\n";
  for (std::size_t epoch = 0; epoch < trace.size(); ++epoch) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.12g\n", epoch + 1, trace[epoch]);
    csv += buf;
  }
  const auto savings = param_savings(d, k, r);
  const json summary = {{"trainable", savings.trainable},
                        {"full", savings.full},
                        {"ratio", savings.ratio},
                        {"initial_loss", trace.front()},
                        {"final_loss", trace.back()},
                        {"epochs", epochs},
                        {"learning_rate", lr},
                        {"seed", common.seed}};
  if (trace_path.empty()) {
    write_output(out_path, csv);
    std::cerr << dump_json(summary);
  } else {
    write_output(trace_path, csv);
    write_output(out_path, dump_json(summary));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"span-level emotion-cause-category triplet extraction toolkit"};
  app.require_subcommand(1);

  CommonOpts common;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", common.config_path, "key=value config file");
    cmd->add_option("--categories", common.categories_path, "category label file (one per line)");
    cmd->add_option("--delimiters", common.delimiters, "clause delimiter characters");
    cmd->add_option("--seed", common.seed, "seed for folds, jitter and demos");
  };

  std::string corpus_path, out_path, id, text, in_path;

  auto* validate = app.add_subcommand("validate", "validate a corpus file");
  validate->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  validate->add_option("--out", out_path, "report destination");
  add_common(validate);

  auto* segment = app.add_subcommand("segment", "split text into clauses");
  segment->add_option("--text", text, "text to segment");
  segment->add_option("--in", in_path, "file with text to segment");
  segment->add_option("--out", out_path, "report destination");
  add_common(segment);

  auto* annotate = app.add_subcommand("annotate", "render the auxiliary labeling format");
  annotate->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  annotate->add_option("--id", id, "annotate a single document");
  annotate->add_option("--out", out_path, "destination");
  add_common(annotate);

  std::string kind = "extraction", template_path, annotated_path, doc_text;
  std::vector<int> drop_rules;
  bool as_json = false, digest_only = false;
  auto* render = app.add_subcommand("render-prompt", "render an instruction or augmentation prompt");
  render->add_option("--kind", kind, "extraction or augmentation")
      ->check(CLI::IsMember({"extraction", "augmentation"}));
  render->add_option("--template", template_path, "template asset file");
  render->add_option("--doc-text", doc_text, "document text (extraction)");
  render->add_option("--annotated", annotated_path, "annotated text file (augmentation)");
  render->add_option("--corpus", corpus_path, "corpus JSONL");
  render->add_option("--id", id, "document id within --corpus");
  render->add_option("--drop-rules", drop_rules, "rule ids to ablate")->delimiter(',');
  render->add_flag("--json", as_json, "emit turns as JSON");
  render->add_flag("--digest", digest_only, "emit only the mock-table digest of the turns");
  render->add_option("--out", out_path, "destination");
  add_common(render);

  BackendOpts backend;
  auto* generate = app.add_subcommand("generate", "run extraction prompts through a backend");
  generate->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  generate->add_option("--template", template_path, "extraction template");
  generate->add_option("--out", out_path, "generations JSONL destination");
  backend.attach(generate);
  add_common(generate);

  int n_per_doc = 1;
  std::string out_corpus, report_path;
  auto* augment = app.add_subcommand("augment", "annotate, prompt, generate, filter and merge");
  augment->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  augment->add_option("--template", template_path, "augmentation template");
  augment->add_option("--n-per-doc", n_per_doc, "candidates per source document")
      ->check(CLI::PositiveNumber);
  augment->add_option("--out-corpus", out_corpus, "merged corpus JSONL destination");
  augment->add_option("--report", report_path, "augmentation report destination");
  backend.attach(augment);
  add_common(augment);

  long max_issues = -1;
  auto* parse_output = app.add_subcommand("parse-output", "parse model output into triplets");
  parse_output->add_option("--text", text, "raw model output");
  parse_output->add_option("--in", in_path, "file with model output");
  parse_output->add_option("--max-issues", max_issues, "exit 1 when issues exceed this count");
  parse_output->add_option("--out", out_path, "destination");
  add_common(parse_output);

  std::string pred_path, pred_jsonl, gold_path, policy = "exclude", csv_path;
  auto* eval = app.add_subcommand("eval", "score predictions against gold triplets");
  eval->add_option("--pred", pred_path, "plain-text prediction file for one document");
  eval->add_option("--pred-jsonl", pred_jsonl, "JSONL of {id, output} predictions");
  eval->add_option("--gold", gold_path, "gold corpus JSONL")->required();
  eval->add_option("--doc-id", id, "gold document for --pred");
  eval->add_option("--policy", policy, "malformed-line policy")
      ->check(CLI::IsMember({"exclude", "penalize"}));
  eval->add_option("--csv", csv_path, "write per-document CSV rows");
  eval->add_option("--out", out_path, "report destination");
  add_common(eval);

  int k = 10, fold = -1;
  std::string emit;
  auto* kfold = app.add_subcommand("kfold", "deterministic k-fold corpus split");
  kfold->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  kfold->add_option("--k", k, "fold count");
  kfold->add_option("--fold", fold, "fold index for --emit");
  kfold->add_option("--emit", emit, "train or test view of --fold")
      ->check(CLI::IsMember({"train", "test"}));
  kfold->add_option("--out-corpus", out_corpus, "write the emitted view as JSONL");
  kfold->add_option("--out", out_path, "destination");
  add_common(kfold);

  std::string a_path, b_path;
  auto* compare = app.add_subcommand("compare", "delta between two metric reports");
  compare->add_option("--a", a_path, "report JSON")->required();
  compare->add_option("--b", b_path, "baseline report JSON")->required();
  compare->add_option("--out", out_path, "destination");

  std::size_t dim_out = 8, dim_in = 6, rank = 2;
  double lr = 1e-5;
  int epochs = 10, samples = 32;
  std::string trace_path;
  auto* lora = app.add_subcommand("lora-demo", "low-rank adaptation numerical demo");
  lora->add_option("--dim-out", dim_out, "output dimension d");
  lora->add_option("--dim-in", dim_in, "input dimension k");
  lora->add_option("--rank", rank, "adapter rank r");
  lora->add_option("--lr", lr, "learning rate");
  lora->add_option("--epochs", epochs, "training epochs")->check(CLI::PositiveNumber);
  lora->add_option("--samples", samples, "training samples")->check(CLI::PositiveNumber);
  lora->add_option("--trace", trace_path, "CSV trace destination");
  lora->add_option("--out", out_path, "summary JSON destination");
  add_common(lora);

  try {
    app.parse(argc, argv);

    if (*validate) return run_validate(common, corpus_path, out_path);
    if (*segment) return run_segment(common, text, in_path, out_path);
    if (*annotate) return run_annotate(common, corpus_path, id, out_path);
    if (*render)
      return run_render_prompt(common, kind, template_path, doc_text, annotated_path, corpus_path,
                               id, drop_rules, as_json, digest_only, out_path);
    if (*generate) return run_generate(common, backend, corpus_path, template_path, out_path);
    if (*augment)
      return run_augment(common, backend, corpus_path, template_path, n_per_doc, out_corpus,
                         report_path);
    if (*parse_output) return run_parse_output(common, text, in_path, max_issues, out_path);
    if (*eval)
      return run_eval(common, pred_path, pred_jsonl, gold_path, id, policy, csv_path, out_path);
    if (*kfold) return run_kfold(common, corpus_path, k, fold, emit, out_corpus, out_path);
    if (*compare) return run_compare(a_path, b_path, out_path);
    if (*lora)
      return run_lora_demo(common, dim_out, dim_in, rank, lr, epochs, samples, trace_path,
                           out_path);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ecta::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.klass());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
