#include "mlproxy/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mlproxy/error.hpp"
#include "mlproxy/eval_metrics.hpp"
#include "mlproxy/inference.hpp"
#include "mlproxy/serialization.hpp"

namespace mlproxy {

namespace {

std::string content_id(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyClass:
    case ErrorCode::EmptyDataset:
    case ErrorCode::EmptyIndex:
      return kExitDegenerateData;
    default:
      return kExitInputError;
  }
}

struct Options {
  std::string config, out, data, model, db, queries, input, report, csv, mode;
  std::size_t k = 10;
  std::size_t threads = 1;
};

int cmd_gen_data(const Options& o, std::ostream&) {
  const SynthConfig config = o.config.empty() ? SynthConfig{} : synth_config_from_json(read_json_file(o.config));
  save_dataset(o.out, generate(config));
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  const Dataset data = load_dataset(o.data);
  const TrainConfig config = o.config.empty() ? TrainConfig{} : train_config_from_json(read_json_file(o.config));
  const TrainedModel model = train(data, config);
  for (std::size_t e = 0; e < model.loss_curve.size(); ++e) {
    out << "epoch " << (e + 1) << " mean_loss " << format_real(model.loss_curve[e]) << '\n';
  }
  save_model(o.out, model);
  return kExitOk;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
  TrainedModel model = load_model(o.model);
  model.thresholds = calibrate_thresholds(model, load_dataset(o.data));
  out << "thresholds";
  for (double t : model.thresholds) out << ' ' << format_real(t);
  out << '\n';
  save_model(o.out, model);
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream&, std::ostream& err) {
  const std::string model_bytes = read_file(o.model);
  const TrainedModel model = model_from_json(read_json_file(o.model));
  const Dataset db = load_dataset(o.db);
  const Dataset queries = load_dataset(o.queries);
  const RelevanceMode mode = o.mode.empty()
                                 ? (model.config.use_negative_class ? RelevanceMode::Augmented : RelevanceMode::Raw)
                                 : parse_relevance_mode(o.mode);
  const RetrievalIndex index = build_index(model, db);
  EvalReport report = run_retrieval_eval(model, index, queries, o.k, mode, o.threads);
  add_classification_eval(report, model, queries);
  report.model_id = content_id(model_bytes);
  report.dataset_id = content_id(read_file(o.db)) + ":" + content_id(read_file(o.queries));
  report.seed = model.config.seed;
  if (report.overlapping_ids > 0) {
    err << "warning: " << report.overlapping_ids << " query ids also appear in the database\n";
  }
  write_file(o.report, report_to_json(report).dump(1) + "\n");
  if (!o.csv.empty()) {
    std::ostringstream ss;
    write_report_csv(ss, report);
    write_file(o.csv, ss.str());
  }
  return kExitOk;
}

int cmd_query(const Options& o, std::ostream& out) {
  const TrainedModel model = load_model(o.model);
  const Dataset db = load_dataset(o.db);
  const Sample sample = load_single_sample(o.input);
  const RetrievalIndex index = build_index(model, db);
  const RealVec q = embed(model, sample.features);
  const RetrievalResult hits = retrieve(index, q, o.k);
  for (std::size_t r = 0; r < hits.size(); ++r) {
    out << (r + 1) << ", " << hits[r].id << ", " << fixed6(hits[r].distance) << ", "
        << join_labels(hits[r].labels) << '\n';
  }
  out << "scores";
  for (double s : class_scores(model, sample.features)) out << ", " << fixed6(s);
  out << '\n';
  return kExitOk;
}

int cmd_export_embeddings(const Options& o, std::ostream&) {
  const TrainedModel model = load_model(o.model);
  const Dataset data = load_dataset(o.data);
  if (!data.empty() && data.input_dim != model.encoder.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "dataset feature dim does not match the encoder");
  }
  std::ostringstream ss;
  write_embeddings_csv(ss, model, data);
  write_file(o.out, ss.str());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-label proxy metric learning: training, classification and retrieval"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic multimorbidity dataset");
  gen->add_option("--config", o.config, "SynthConfig JSON (defaults when omitted)");
  gen->add_option("--out", o.out, "Output dataset file")->required();

  auto* trn = app.add_subcommand("train", "Train an encoder and proxy bank");
  trn->add_option("--data", o.data, "Training dataset")->required();
  trn->add_option("--config", o.config, "TrainConfig JSON (defaults when omitted)");
  trn->add_option("--out", o.out, "Output model file")->required();

  auto* cal = app.add_subcommand("calibrate", "Fit per-class thresholds on a validation set");
  cal->add_option("--model", o.model, "Model file")->required();
  cal->add_option("--data", o.data, "Validation dataset")->required();
  cal->add_option("--out", o.out, "Output model file")->required();

  auto* evl = app.add_subcommand("eval", "Evaluate retrieval and classification");
  evl->add_option("--model", o.model, "Model file")->required();
  evl->add_option("--db", o.db, "Retrieval database dataset")->required();
  evl->add_option("--queries", o.queries, "Query dataset")->required();
  evl->add_option("--k", o.k, "Number of retrieved samples")->check(CLI::PositiveNumber);
  evl->add_option("--mode", o.mode, "Relevance mode")->check(CLI::IsMember({"raw", "augmented"}));
  evl->add_option("--report", o.report, "Output report JSON")->required();
  evl->add_option("--csv", o.csv, "Optional per-query CSV");
  evl->add_option("--threads", o.threads, "Worker threads for per-query evaluation")->check(CLI::PositiveNumber);

  auto* qry = app.add_subcommand("query", "Retrieve the nearest database samples for one input");
  qry->add_option("--model", o.model, "Model file")->required();
  qry->add_option("--db", o.db, "Retrieval database dataset")->required();
  qry->add_option("--input", o.input, "File holding one sample")->required();
  qry->add_option("--k", o.k, "Number of retrieved samples")->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("export-embeddings", "Write unit embeddings as CSV");
  exp->add_option("--model", o.model, "Model file")->required();
  exp->add_option("--data", o.data, "Dataset to embed")->required();
  exp->add_option("--out", o.out, "Output CSV")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(o, out);
    if (trn->parsed()) return cmd_train(o, out);
    if (cal->parsed()) return cmd_calibrate(o, out);
    if (evl->parsed()) return cmd_eval(o, out, err);
    if (qry->parsed()) return cmd_query(o, out);
    if (exp->parsed()) return cmd_export_embeddings(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitInputError;
}

}  // namespace mlproxy
