#include "texfuse/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "texfuse/io.hpp"

namespace texfuse {

namespace {

using nlohmann::json;

json svm_to_json(const SvmModel& m) {
  json pairs = json::array();
  for (const auto& p : m.pairs) {
    pairs.push_back({{"class_lo", p.class_lo},
                     {"class_hi", p.class_hi},
                     {"bias", p.bias},
                     {"alpha_y", p.alpha_y},
                     {"support_vectors", p.support_vectors}});
  }
  return {{"k", m.k},
          {"dim", m.dim},
          {"kernel", m.kernel == SvmKernel::rbf ? "rbf" : "linear"},
          {"c", m.c},
          {"rbf_gamma", m.rbf_gamma},
          {"view_tag", m.view_tag},
          {"norm_mean", m.norm_mean},
          {"norm_std", m.norm_std},
          {"pairs", pairs}};
}

SvmModel svm_from_json(const json& j) {
  SvmModel m;
  m.k = j.at("k").get<int>();
  m.dim = j.at("dim").get<int>();
  const std::string kernel = j.at("kernel").get<std::string>();
  if (kernel == "rbf") {
    m.kernel = SvmKernel::rbf;
  } else if (kernel == "linear") {
    m.kernel = SvmKernel::linear;
  } else {
    throw input_error("model: unknown kernel '" + kernel + "'");
  }
  m.c = j.at("c").get<double>();
  m.rbf_gamma = j.at("rbf_gamma").get<double>();
  m.view_tag = j.at("view_tag").get<std::string>();
  m.norm_mean = j.at("norm_mean").get<std::vector<double>>();
  m.norm_std = j.at("norm_std").get<std::vector<double>>();
  if (static_cast<int>(m.norm_mean.size()) != m.dim ||
      static_cast<int>(m.norm_std.size()) != m.dim)
    throw input_error("model: normalization constants do not match dim");
  for (const auto& pj : j.at("pairs")) {
    BinarySvm p;
    p.class_lo = pj.at("class_lo").get<int>();
    p.class_hi = pj.at("class_hi").get<int>();
    p.bias = pj.at("bias").get<double>();
    p.alpha_y = pj.at("alpha_y").get<std::vector<double>>();
    p.support_vectors =
        pj.at("support_vectors").get<std::vector<std::vector<double>>>();
    if (p.support_vectors.size() != p.alpha_y.size())
      throw input_error("model: support vector / coefficient count mismatch");
    for (const auto& sv : p.support_vectors)
      if (static_cast<int>(sv.size()) != m.dim)
        throw input_error("model: support vector dimension mismatch");
    m.pairs.push_back(std::move(p));
  }
  if (static_cast<int>(m.pairs.size()) != m.k * (m.k - 1) / 2)
    throw input_error("model: expected k(k-1)/2 binary classifiers");
  return m;
}

json net_to_json(const FusionNet& n) {
  return {{"k", n.k},          {"input_dim", n.input_dim},
          {"hidden1", kFusionHidden1}, {"hidden2", kFusionHidden2},
          {"w1", n.w1},        {"b1", n.b1},
          {"w2", n.w2},        {"b2", n.b2},
          {"w3", n.w3},        {"b3", n.b3}};
}

FusionNet net_from_json(const json& j) {
  FusionNet n;
  n.k = j.at("k").get<int>();
  n.input_dim = j.at("input_dim").get<int>();
  if (j.at("hidden1").get<int>() != kFusionHidden1 ||
      j.at("hidden2").get<int>() != kFusionHidden2)
    throw input_error("model: unsupported fusion-net hidden sizes");
  n.w1 = j.at("w1").get<std::vector<double>>();
  n.b1 = j.at("b1").get<std::vector<double>>();
  n.w2 = j.at("w2").get<std::vector<double>>();
  n.b2 = j.at("b2").get<std::vector<double>>();
  n.w3 = j.at("w3").get<std::vector<double>>();
  n.b3 = j.at("b3").get<std::vector<double>>();
  return n;
}

}  // namespace

void save_model(const TwoViewModel& model, const std::string& path) {
  json j = {{"format", "texfuse-model"},
            {"version", 1},
            {"k", model.k},
            {"svm_t", svm_to_json(model.svm_t)},
            {"svm_s", svm_to_json(model.svm_s)},
            {"net", net_to_json(model.net)},
            {"d_mean", model.d_mean},
            {"d_std", model.d_std},
            {"nn_restarts", model.nn_restarts}};
  write_text_atomic(path, j.dump(2) + "\n");
}

TwoViewModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open model: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw input_error("model parse failure: " + std::string(e.what()));
  }
  try {
    if (j.at("format").get<std::string>() != "texfuse-model" ||
        j.at("version").get<int>() != 1)
      throw input_error("not a texfuse model file: " + path);
    TwoViewModel m;
    m.k = j.at("k").get<int>();
    m.svm_t = svm_from_json(j.at("svm_t"));
    m.svm_s = svm_from_json(j.at("svm_s"));
    m.net = net_from_json(j.at("net"));
    m.d_mean = j.at("d_mean").get<std::vector<double>>();
    m.d_std = j.at("d_std").get<std::vector<double>>();
    m.nn_restarts = j.value("nn_restarts", 0);
    const std::size_t dim = m.svm_t.pairs.size() + m.svm_s.pairs.size();
    if (m.d_mean.size() != dim || m.d_std.size() != dim ||
        m.net.input_dim != static_cast<int>(dim))
      throw input_error("model: fusion input dimensions inconsistent");
    return m;
  } catch (const json::exception& e) {
    throw input_error("model field error: " + std::string(e.what()));
  }
}

}  // namespace texfuse
