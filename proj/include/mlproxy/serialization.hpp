#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "mlproxy/data_synth.hpp"
#include "mlproxy/dataset.hpp"
#include "mlproxy/eval_metrics.hpp"
#include "mlproxy/trainer.hpp"

namespace mlproxy {

using Json = nlohmann::ordered_json;

inline constexpr int kDatasetVersion = 1;
inline constexpr int kModelVersion = 1;

// Dataset files are NDJSON: a header {"version", "n_classes", "input_dim"}
// followed by one {"id", "features", "labels"} object per line.
void write_dataset(std::ostream& os, const Dataset& data);
Dataset read_dataset(std::istream& is);
void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path);

// First sample of a file holding either a dataset or bare sample lines.
// Labels may be omitted, in which case the returned sample has none.
Sample load_single_sample(const std::string& path);

// Missing fields keep their defaults; unknown or ill-typed fields throw
// InvalidConfig naming the field, as do out-of-range values.
SynthConfig synth_config_from_json(const Json& j);
Json to_json(const SynthConfig& config);
TrainConfig train_config_from_json(const Json& j);
Json to_json(const TrainConfig& config);

Json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const Json& j);
void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

Json report_to_json(const EvalReport& report);
void write_report_csv(std::ostream& os, const EvalReport& report);

// "id,labels,e0,...": labels joined with '|'.
void write_embeddings_csv(std::ostream& os, const TrainedModel& model, const Dataset& data);

std::string format_real(double value);
std::string join_labels(const LabelVector& labels);
Json read_json_file(const std::string& path);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace mlproxy
