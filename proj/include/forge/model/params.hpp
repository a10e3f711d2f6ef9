#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "forge/error.hpp"
#include "forge/jsonl.hpp"

namespace forge::model {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
  bool bias = false;  // zero-initialized instead of Xavier
  size_t offset = 0;

  bool operator==(const TensorSpec&) const = default;
};

// All learnable tensors of one model in a single flat 64-bit float buffer.
// The optimizer, gradient checks, and serialization see the flat view;
// forward/backward code maps named row-major matrix views onto it.
class ParamPack {
 public:
  void add(const std::string& name, int rows, int cols, bool bias = false);
  bool has(const std::string& name) const { return offsets_.count(name) > 0; }

  Eigen::Map<Mat> mat(const std::string& name);
  Eigen::Map<const Mat> mat(const std::string& name) const;
  Eigen::Map<Vec> vec(const std::string& name);
  Eigen::Map<const Vec> vec(const std::string& name) const;

  const std::vector<TensorSpec>& specs() const { return specs_; }
  std::vector<double>& flat() { return flat_; }
  const std::vector<double>& flat() const { return flat_; }
  size_t size() const { return flat_.size(); }

  // Same shapes, all zeros. Gradient buffers are built this way.
  ParamPack zeros_like() const;
  void set_zero();
  bool all_finite() const;

  // Weights uniform in ±sqrt(6 / (fan_in + fan_out)) with fan_in = cols and
  // fan_out = rows; bias tensors stay zero. Each tensor draws from its own
  // forked stream, so adding a tensor never reseeds the others.
  void init_xavier(uint64_t seed);

  Json to_json() const;
  static ParamPack from_json(const Json& v, const std::string& where);

  bool operator==(const ParamPack&) const = default;

 private:
  const TensorSpec& spec(const std::string& name) const;

  std::vector<TensorSpec> specs_;
  std::map<std::string, size_t> offsets_;  // name -> index into specs_
  std::vector<double> flat_;
};

}  // namespace forge::model
