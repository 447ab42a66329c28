#include "mlproxy/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mlproxy/error.hpp"
#include "mlproxy/inference.hpp"

namespace mlproxy {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, field + ": " + why);
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& what) {
  if (!j.is_object()) bad_field(what, "expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) bad_field(key, "unknown " + what + " field");
  }
}

template <typename T>
T get_field(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) bad_field(key, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) bad_field(key, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
          bad_field(key, "must be non-negative");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) bad_field(key, "expected a number");
    }
    return v.get<T>();
  } catch (const Json::exception& e) {
    bad_field(key, e.what());
  }
}

Json parse_json(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, where + ": " + e.what());
  }
}

Sample parse_sample(const Json& j, std::size_t line, bool labels_required) {
  const std::string where = "line " + std::to_string(line);
  if (!j.is_object() || !j.contains("id") || !j.at("id").is_string() || !j.contains("features") ||
      !j.at("features").is_array()) {
    throw Error(ErrorCode::ParseError, where + ": expected {\"id\", \"features\", \"labels\"}");
  }
  Sample s;
  s.id = j.at("id").get<std::string>();
  for (const auto& x : j.at("features")) {
    if (!x.is_number()) throw Error(ErrorCode::ParseError, where + ": non-numeric feature");
    s.features.push_back(x.get<double>());
  }
  if (j.contains("labels")) {
    if (!j.at("labels").is_array()) throw Error(ErrorCode::ParseError, where + ": labels must be an array");
    std::vector<LabelState> states;
    for (const auto& l : j.at("labels")) {
      if (!l.is_string()) throw Error(ErrorCode::ParseError, where + ": label must be a string");
      states.push_back(parse_label_state(l.get<std::string>()));
    }
    s.labels = LabelVector(std::move(states));
  } else if (labels_required) {
    throw Error(ErrorCode::ParseError, where + ": missing labels");
  }
  return s;
}

Json sample_to_json(const Sample& s) {
  Json labels = Json::array();
  for (LabelState state : s.labels.states()) labels.push_back(std::string(to_string(state)));
  return Json{{"id", s.id}, {"features", s.features}, {"labels", labels}};
}

std::vector<double> real_array(const Json& j, const std::string& field) {
  if (!j.is_array()) bad_field(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) bad_field(field, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::size_t> size_array(const Json& j, const std::string& field) {
  if (!j.is_array()) bad_field(field, "expected an array of integers");
  std::vector<std::size_t> out;
  for (const auto& x : j) {
    if (!x.is_number_unsigned()) bad_field(field, "expected an array of non-negative integers");
    out.push_back(x.get<std::size_t>());
  }
  return out;
}

Json optional_real(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

Json read_json_file(const std::string& path) { return parse_json(read_file(path), path); }

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string join_labels(const LabelVector& labels) {
  std::string out;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j) out += '|';
    out += to_string(labels[j]);
  }
  return out;
}

void write_dataset(std::ostream& os, const Dataset& data) {
  os << Json{{"version", kDatasetVersion}, {"n_classes", data.n_classes}, {"input_dim", data.input_dim}}.dump()
     << '\n';
  for (const auto& s : data.rows) os << sample_to_json(s).dump() << '\n';
}

Dataset read_dataset(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  Dataset data;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = parse_json(line, "line " + std::to_string(line_no));
    if (!have_header) {
      if (!j.is_object() || !j.contains("version") || !j.contains("n_classes") || !j.contains("input_dim")) {
        throw Error(ErrorCode::ParseError, "dataset header must hold version, n_classes and input_dim");
      }
      if (j.at("version") != kDatasetVersion) throw Error(ErrorCode::ParseError, "unsupported dataset version");
      if (!j.at("n_classes").is_number_unsigned() || !j.at("input_dim").is_number_unsigned()) {
        throw Error(ErrorCode::ParseError, "dataset header dims must be non-negative integers");
      }
      data.n_classes = j.at("n_classes").get<std::size_t>();
      data.input_dim = j.at("input_dim").get<std::size_t>();
      have_header = true;
      continue;
    }
    data.rows.push_back(parse_sample(j, line_no, true));
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "dataset file has no header line");
  data.validate();
  return data;
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ostringstream ss;
  write_dataset(ss, data);
  write_file(path, ss.str());
}

Dataset load_dataset(const std::string& path) {
  std::istringstream ss(read_file(path));
  try {
    return read_dataset(ss);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

Sample load_single_sample(const std::string& path) {
  std::istringstream ss(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = parse_json(line, path + ":" + std::to_string(line_no));
    if (j.is_object() && j.contains("version") && !j.contains("features")) continue;
    return parse_sample(j, line_no, false);
  }
  throw Error(ErrorCode::ParseError, path + ": no sample found");
}

SynthConfig synth_config_from_json(const Json& j) {
  reject_unknown(j,
                 {"n_samples", "n_classes", "input_dim", "cooccurrence_boost", "prevalence",
                  "negative_fraction", "uncertain_fraction", "modes_per_class", "noise_std", "seed"},
                 "synth config");
  SynthConfig c;
  c.n_samples = get_field(j, "n_samples", c.n_samples);
  c.n_classes = get_field(j, "n_classes", c.n_classes);
  c.input_dim = get_field(j, "input_dim", c.input_dim);
  if (j.contains("prevalence")) c.prevalence = real_array(j.at("prevalence"), "prevalence");
  if (j.contains("cooccurrence_boost")) {
    const Json& m = j.at("cooccurrence_boost");
    if (!m.is_array()) bad_field("cooccurrence_boost", "expected a matrix");
    for (const auto& row : m) c.cooccurrence_boost.push_back(real_array(row, "cooccurrence_boost"));
  }
  c.negative_fraction = get_field(j, "negative_fraction", c.negative_fraction);
  c.uncertain_fraction = get_field(j, "uncertain_fraction", c.uncertain_fraction);
  c.modes_per_class = get_field(j, "modes_per_class", c.modes_per_class);
  c.noise_std = get_field(j, "noise_std", c.noise_std);
  c.seed = get_field(j, "seed", c.seed);
  c.validate();
  return c;
}

Json to_json(const SynthConfig& c) {
  return Json{{"n_samples", c.n_samples},
              {"n_classes", c.n_classes},
              {"input_dim", c.input_dim},
              {"cooccurrence_boost", c.cooccurrence_boost},
              {"prevalence", c.prevalence},
              {"negative_fraction", c.negative_fraction},
              {"uncertain_fraction", c.uncertain_fraction},
              {"modes_per_class", c.modes_per_class},
              {"noise_std", c.noise_std},
              {"seed", c.seed}};
}

TrainConfig train_config_from_json(const Json& j) {
  reject_unknown(j,
                 {"epochs", "learning_rate", "batch_size", "sigma", "proxies_per_class",
                  "use_negative_class", "beta1", "beta2", "adam_epsilon", "seed", "loss", "hidden_dims",
                  "embedding_dim"},
                 "train config");
  TrainConfig c;
  if (j.contains("loss")) {
    if (!j.at("loss").is_string()) bad_field("loss", "expected a string");
    c.loss = parse_loss_kind(j.at("loss").get<std::string>());
  }
  if (c.loss == LossKind::MlProxyNca) c.proxies_per_class = 1;
  c.epochs = get_field(j, "epochs", c.epochs);
  c.learning_rate = get_field(j, "learning_rate", c.learning_rate);
  c.batch_size = get_field(j, "batch_size", c.batch_size);
  c.sigma = get_field(j, "sigma", c.sigma);
  c.proxies_per_class = get_field(j, "proxies_per_class", c.proxies_per_class);
  c.use_negative_class = get_field(j, "use_negative_class", c.use_negative_class);
  c.beta1 = get_field(j, "beta1", c.beta1);
  c.beta2 = get_field(j, "beta2", c.beta2);
  c.adam_epsilon = get_field(j, "adam_epsilon", c.adam_epsilon);
  c.seed = get_field(j, "seed", c.seed);
  if (j.contains("hidden_dims")) c.hidden_dims = size_array(j.at("hidden_dims"), "hidden_dims");
  c.embedding_dim = get_field(j, "embedding_dim", c.embedding_dim);
  c.validate();
  return c;
}

Json to_json(const TrainConfig& c) {
  return Json{{"epochs", c.epochs},
              {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"sigma", c.sigma},
              {"proxies_per_class", c.proxies_per_class},
              {"use_negative_class", c.use_negative_class},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"adam_epsilon", c.adam_epsilon},
              {"seed", c.seed},
              {"loss", std::string(to_string(c.loss))},
              {"hidden_dims", c.hidden_dims},
              {"embedding_dim", c.embedding_dim}};
}

Json model_to_json(const TrainedModel& model) {
  Json j{{"format", "mlproxy-model"},
         {"version", kModelVersion},
         {"n_classes", model.n_classes},
         {"config", to_json(model.config)},
         {"encoder",
          Json{{"layer_dims", model.encoder.layer_dims()},
               {"params", std::vector<double>(model.encoder.parameters().begin(), model.encoder.parameters().end())}}}};
  if (model.proxies) {
    const ProxyBank& b = *model.proxies;
    j["proxies"] = Json{{"m", b.proxies_per_class()},
                        {"c_total", b.class_count()},
                        {"d", b.dim()},
                        {"sigma", b.sigma()},
                        {"params", std::vector<double>(b.params().begin(), b.params().end())}};
  } else {
    j["proxies"] = nullptr;
  }
  if (model.head) {
    j["head"] = Json{{"layer_dims", model.head->layer_dims()},
                     {"params", std::vector<double>(model.head->parameters().begin(), model.head->parameters().end())}};
  } else {
    j["head"] = nullptr;
  }
  j["class_weights"] = Json{{"w_pos", model.weights.w_pos}, {"w_neg", model.weights.w_neg}};
  j["thresholds"] = model.thresholds;
  j["loss_curve"] = model.loss_curve;
  return j;
}

TrainedModel model_from_json(const Json& j) {
  auto corrupt = [](const std::string& why) -> Error { return Error(ErrorCode::ParseError, "model file: " + why); };
  try {
    if (!j.is_object() || j.value("format", "") != "mlproxy-model") throw corrupt("not a model file");
    if (j.at("version") != kModelVersion) throw corrupt("unsupported version");
    const std::size_t n_classes = j.at("n_classes").get<std::size_t>();
    const TrainConfig config = train_config_from_json(j.at("config"));
    const std::size_t c_total = config.class_total(n_classes);

    MlpEncoder encoder(size_array(j.at("encoder").at("layer_dims"), "encoder.layer_dims"),
                       real_array(j.at("encoder").at("params"), "encoder.params"));
    if (encoder.output_dim() != config.embedding_dim) throw corrupt("encoder output dim != embedding_dim");

    std::optional<ProxyBank> proxies;
    std::optional<MlpEncoder> head;
    if (!j.at("proxies").is_null()) {
      const Json& p = j.at("proxies");
      proxies.emplace(p.at("m").get<std::size_t>(), p.at("c_total").get<std::size_t>(),
                      p.at("d").get<std::size_t>(), p.at("sigma").get<double>(),
                      real_array(p.at("params"), "proxies.params"));
      if (proxies->class_count() != c_total || proxies->dim() != config.embedding_dim ||
          proxies->proxies_per_class() != config.proxies_per_class || proxies->sigma() != config.sigma) {
        throw corrupt("proxy bank shape disagrees with config");
      }
    }
    if (!j.at("head").is_null()) {
      head.emplace(size_array(j.at("head").at("layer_dims"), "head.layer_dims"),
                   real_array(j.at("head").at("params"), "head.params"));
      if (head->input_dim() != config.embedding_dim || head->output_dim() != c_total) {
        throw corrupt("head shape disagrees with config");
      }
    }
    if ((config.loss == LossKind::Bce) != head.has_value() || (config.loss == LossKind::Bce) == proxies.has_value()) {
      throw corrupt("parameters do not match the loss kind");
    }
    ClassWeights weights{real_array(j.at("class_weights").at("w_pos"), "w_pos"),
                         real_array(j.at("class_weights").at("w_neg"), "w_neg")};
    if (weights.w_pos.size() != c_total || weights.w_neg.size() != c_total) throw corrupt("class weight length");
    std::vector<double> thresholds = real_array(j.at("thresholds"), "thresholds");
    if (!thresholds.empty() && thresholds.size() != c_total) throw corrupt("threshold length");

    return TrainedModel{.n_classes = n_classes,
                        .config = config,
                        .encoder = std::move(encoder),
                        .proxies = std::move(proxies),
                        .head = std::move(head),
                        .weights = std::move(weights),
                        .loss_curve = real_array(j.at("loss_curve"), "loss_curve"),
                        .thresholds = std::move(thresholds)};
  } catch (const Json::exception& e) {
    throw corrupt(e.what());
  }
}

void save_model(const std::string& path, const TrainedModel& model) {
  write_file(path, model_to_json(model).dump(1) + "\n");
}

TrainedModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

Json report_to_json(const EvalReport& r) {
  Json per_query = Json::array();
  for (const auto& q : r.per_query) {
    per_query.push_back(Json{{"id", q.id}, {"ndcg", q.ndcg}, {"acg", optional_real(q.acg)}, {"precision", q.precision}});
  }
  Json class_auc = Json::array();
  for (const auto& a : r.class_auc) class_auc.push_back(optional_real(a));
  return Json{{"k", r.k},
              {"mode", std::string(to_string(r.mode))},
              {"n_queries", r.per_query.size()},
              {"metadata", Json{{"model_id", r.model_id}, {"dataset_id", r.dataset_id}, {"seed", r.seed}}},
              {"retrieval", Json{{"mean_ndcg", r.mean_ndcg},
                                 {"mean_acg", optional_real(r.mean_acg)},
                                 {"mean_precision", r.mean_precision},
                                 {"acg_skipped", r.acg_skipped},
                                 {"overlapping_query_ids", r.overlapping_ids}}},
              {"classification", Json{{"class_auc", class_auc},
                                      {"macro_auc", optional_real(r.macro_auc)},
                                      {"excluded_classes", r.auc_excluded_classes}}},
              {"per_query", per_query}};
}

void write_report_csv(std::ostream& os, const EvalReport& r) {
  os << "id,ndcg,acg,precision\n";
  for (const auto& q : r.per_query) {
    os << q.id << ',' << format_real(q.ndcg) << ',' << (q.acg ? format_real(*q.acg) : "") << ','
       << format_real(q.precision) << '\n';
  }
}

void write_embeddings_csv(std::ostream& os, const TrainedModel& model, const Dataset& data) {
  os << "id,labels";
  for (std::size_t k = 0; k < model.config.embedding_dim; ++k) os << ",e" << k;
  os << '\n';
  for (const auto& s : data.rows) {
    os << s.id << ',' << join_labels(s.labels);
    for (double x : embed(model, s.features)) os << ',' << format_real(x);
    os << '\n';
  }
}

}  // namespace mlproxy
