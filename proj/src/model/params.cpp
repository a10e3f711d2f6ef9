#include "forge/model/params.hpp"

#include <cmath>

#include "forge/rng.hpp"

namespace forge::model {

void ParamPack::add(const std::string& name, int rows, int cols, bool bias) {
  if (rows < 1 || cols < 1) throw ForgeError("tensor '" + name + "' needs positive shape");
  if (offsets_.count(name)) throw ForgeError("duplicate tensor '" + name + "'");
  TensorSpec spec;
  spec.name = name;
  spec.rows = rows;
  spec.cols = cols;
  spec.bias = bias;
  spec.offset = flat_.size();
  offsets_[name] = specs_.size();
  specs_.push_back(spec);
  flat_.resize(flat_.size() + static_cast<size_t>(rows) * cols, 0.0);
}

const TensorSpec& ParamPack::spec(const std::string& name) const {
  auto it = offsets_.find(name);
  if (it == offsets_.end()) throw ForgeError("unknown tensor '" + name + "'");
  return specs_[it->second];
}

Eigen::Map<Mat> ParamPack::mat(const std::string& name) {
  const TensorSpec& s = spec(name);
  return {flat_.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<const Mat> ParamPack::mat(const std::string& name) const {
  const TensorSpec& s = spec(name);
  return {flat_.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<Vec> ParamPack::vec(const std::string& name) {
  const TensorSpec& s = spec(name);
  if (s.cols != 1) throw ForgeError("tensor '" + name + "' is not a vector");
  return {flat_.data() + s.offset, s.rows};
}

Eigen::Map<const Vec> ParamPack::vec(const std::string& name) const {
  const TensorSpec& s = spec(name);
  if (s.cols != 1) throw ForgeError("tensor '" + name + "' is not a vector");
  return {flat_.data() + s.offset, s.rows};
}

ParamPack ParamPack::zeros_like() const {
  ParamPack out;
  out.specs_ = specs_;
  out.offsets_ = offsets_;
  out.flat_.assign(flat_.size(), 0.0);
  return out;
}

void ParamPack::set_zero() { std::fill(flat_.begin(), flat_.end(), 0.0); }

bool ParamPack::all_finite() const {
  for (double v : flat_)
    if (!std::isfinite(v)) return false;
  return true;
}

void ParamPack::init_xavier(uint64_t seed) {
  Lcg64 root(seed);
  for (size_t i = 0; i < specs_.size(); ++i) {
    const TensorSpec& s = specs_[i];
    double* data = flat_.data() + s.offset;
    size_t count = static_cast<size_t>(s.rows) * s.cols;
    if (s.bias) {
      std::fill(data, data + count, 0.0);
      continue;
    }
    Lcg64 rng(root.fork(i));
    double limit = std::sqrt(6.0 / (s.rows + s.cols));
    for (size_t j = 0; j < count; ++j) data[j] = (rng.next_unit() * 2.0 - 1.0) * limit;
  }
}

Json ParamPack::to_json() const {
  Json tensors = Json::array();
  for (const TensorSpec& s : specs_) {
    Json t = Json::object();
    t["name"] = s.name;
    t["rows"] = s.rows;
    t["cols"] = s.cols;
    t["bias"] = s.bias;
    Json data = Json::array();
    size_t count = static_cast<size_t>(s.rows) * s.cols;
    for (size_t j = 0; j < count; ++j) data.push_back(flat_[s.offset + j]);
    t["data"] = std::move(data);
    tensors.push_back(std::move(t));
  }
  Json v = Json::object();
  v["layout"] = "row_major";
  v["tensors"] = std::move(tensors);
  return v;
}

ParamPack ParamPack::from_json(const Json& v, const std::string& where) {
  if (!v.is_object() || !v.contains("tensors") || !v["tensors"].is_array())
    throw FormatError(where, "params must hold a tensor array");
  if (v.contains("layout") && v["layout"] != "row_major")
    throw FormatError(where, "unsupported tensor layout");
  ParamPack pack;
  for (const Json& t : v["tensors"]) {
    for (const char* f : {"name", "rows", "cols", "data"})
      if (!t.contains(f)) throw FormatError(where, std::string("tensor missing '") + f + "'");
    if (!t["name"].is_string() || !t["rows"].is_number_integer() ||
        !t["cols"].is_number_integer() || !t["data"].is_array())
      throw FormatError(where, "malformed tensor record");
    std::string name = t["name"].get<std::string>();
    int rows = t["rows"].get<int>();
    int cols = t["cols"].get<int>();
    bool bias = t.contains("bias") && t["bias"].is_boolean() && t["bias"].get<bool>();
    pack.add(name, rows, cols, bias);
    const Json& data = t["data"];
    size_t count = static_cast<size_t>(rows) * cols;
    if (data.size() != count)
      throw FormatError(where, "tensor '" + name + "' data length mismatch");
    const TensorSpec& s = pack.specs_.back();
    for (size_t j = 0; j < count; ++j) {
      if (!data[j].is_number()) throw FormatError(where, "tensor data must be numeric");
      pack.flat_[s.offset + j] = data[j].get<double>();
    }
  }
  return pack;
}

}  // namespace forge::model
