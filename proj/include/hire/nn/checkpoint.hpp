#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hire/nn/mlp.hpp"
#include "hire/norm/running.hpp"

namespace hire {

// Checkpoints are two files: <prefix>.bin holds raw parameter data and
// <prefix>.json describes it (layer shapes, activations, byte offsets).
// Net parameters are little-endian float32 in Eigen column-major order;
// normalizer statistics are float64. Round-trips are bit-identical.

struct Checkpoint {
  std::map<std::string, MlpParams<float>> nets;
  std::map<std::string, RunningMeanStd> stats;
};

namespace detail {

inline void append_bytes(std::vector<char>& blob, const void* src, size_t n) {
  size_t at = blob.size();
  blob.resize(at + n);
  std::memcpy(blob.data() + at, src, n);
}

}  // namespace detail

inline void save_checkpoint(
    const std::string& prefix,
    const std::vector<std::pair<std::string, const MlpParams<float>*>>& nets,
    const std::vector<std::pair<std::string, const RunningMeanStd*>>& stats) {
  nlohmann::ordered_json manifest;
  manifest["format"] = "hire-checkpoint-v1";
  std::vector<char> blob;

  nlohmann::ordered_json jnets = nlohmann::ordered_json::object();
  for (const auto& [name, p] : nets) {
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (int l = 0; l < p->n_layers(); ++l) {
      nlohmann::ordered_json jl;
      jl["out"] = p->W[l].rows();
      jl["in"] = p->W[l].cols();
      jl["act"] = act_name(p->act[l]);
      jl["w_offset"] = blob.size();
      detail::append_bytes(blob, p->W[l].data(),
                           sizeof(float) * p->W[l].size());
      jl["b_offset"] = blob.size();
      detail::append_bytes(blob, p->b[l].data(),
                           sizeof(float) * p->b[l].size());
      layers.push_back(jl);
    }
    jnets[name] = {{"layers", layers}};
  }
  manifest["nets"] = jnets;

  nlohmann::ordered_json jstats = nlohmann::ordered_json::object();
  for (const auto& [name, s] : stats) {
    nlohmann::ordered_json js;
    js["dim"] = s->mean().size();
    js["epsilon"] = s->epsilon();
    double count = s->count();
    js["count_offset"] = blob.size();
    detail::append_bytes(blob, &count, sizeof(double));
    js["mean_offset"] = blob.size();
    detail::append_bytes(blob, s->mean().data(),
                         sizeof(double) * s->mean().size());
    js["var_offset"] = blob.size();
    detail::append_bytes(blob, s->var().data(),
                         sizeof(double) * s->var().size());
    jstats[name] = js;
  }
  manifest["stats"] = jstats;
  manifest["blob_bytes"] = blob.size();

  std::ofstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + prefix + ".bin");
  bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  std::ofstream js(prefix + ".json", std::ios::binary);
  if (!js) throw std::runtime_error("cannot write " + prefix + ".json");
  js << manifest.dump(2) << "\n";
}

inline Checkpoint load_checkpoint(const std::string& prefix) {
  std::ifstream js(prefix + ".json");
  if (!js) throw std::runtime_error("cannot read " + prefix + ".json");
  nlohmann::json manifest = nlohmann::json::parse(js);
  if (manifest.at("format") != "hire-checkpoint-v1")
    throw std::runtime_error("unrecognized checkpoint format");

  std::ifstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot read " + prefix + ".bin");
  std::vector<char> blob((std::istreambuf_iterator<char>(bin)),
                         std::istreambuf_iterator<char>());
  if (blob.size() != manifest.at("blob_bytes").get<size_t>())
    throw std::runtime_error("checkpoint blob size mismatch");

  auto take = [&](size_t offset, void* dst, size_t n) {
    if (offset + n > blob.size())
      throw std::runtime_error("checkpoint offset out of range");
    std::memcpy(dst, blob.data() + offset, n);
  };

  Checkpoint ck;
  for (const auto& [name, jn] : manifest.at("nets").items()) {
    MlpParams<float> p;
    for (const auto& jl : jn.at("layers")) {
      int out = jl.at("out"), in = jl.at("in");
      Matf w(out, in);
      Vecf b(out);
      take(jl.at("w_offset"), w.data(), sizeof(float) * w.size());
      take(jl.at("b_offset"), b.data(), sizeof(float) * b.size());
      p.W.push_back(std::move(w));
      p.b.push_back(std::move(b));
      p.act.push_back(act_from_name(jl.at("act")));
    }
    ck.nets.emplace(name, std::move(p));
  }
  for (const auto& [name, jst] : manifest.at("stats").items()) {
    int dim = jst.at("dim");
    double count;
    Eigen::VectorXd mean(dim), var(dim);
    take(jst.at("count_offset"), &count, sizeof(double));
    take(jst.at("mean_offset"), mean.data(), sizeof(double) * dim);
    take(jst.at("var_offset"), var.data(), sizeof(double) * dim);
    RunningMeanStd s(dim, jst.at("epsilon").get<double>());
    s.restore(count, std::move(mean), std::move(var));
    ck.stats.emplace(name, std::move(s));
  }
  return ck;
}

}  // namespace hire
