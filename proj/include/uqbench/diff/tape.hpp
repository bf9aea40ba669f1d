#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace uqb::diff {

// All numeric storage is dense, 64-bit and at most rank 2. Scalars are 1x1,
// column vectors n x 1.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Tape;
class Parameter;

/// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  double item() const;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode gradient tape. A graph is recorded forward, one node per
/// primitive, then `backward` walks it in reverse accumulating adjoints.
/// Tapes are single-use: build one per optimization step.
class Tape {
 public:
  using Backward =
      std::function<void(Tape&, const Matrix& out_value, const Matrix& out_grad)>;

  Tape() = default;
  /// With `track_gradients` off, parameters bind as constants and nothing is
  /// kept for a backward pass. Used for prediction.
  explicit Tape(bool track_gradients) : track_gradients_(track_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var constant(double value);
  /// Leaf that receives a gradient.
  Var variable(Matrix value);
  /// Materialized value of `p`. The gradient is routed to p's raw storage and
  /// copied into p.grad() by `backward`. Binding twice returns the same node.
  Var bind(Parameter& p);

  /// Appends a primitive. `backward` receives the node's value and adjoint and
  /// must `accumulate` into each input that requires a gradient.
  Var record(std::string_view op, Matrix value, std::initializer_list<Var> inputs,
             Backward backward);
  Var record(std::string_view op, Matrix value, std::span<const Var> inputs, Backward backward);

  /// Seeds d(output)/d(output) = 1 and propagates. `output` must be 1x1.
  /// Throws NumericError naming the node if a non-finite adjoint appears.
  void backward(const Var& output);

  /// Adjoint of `v` after backward. Zero matrix when no path reached it.
  Matrix grad(const Var& v) const;
  void accumulate(const Var& v, const Matrix& g);
  bool requires_grad(const Var& v) const;
  std::size_t size() const { return nodes_.size(); }

 private:
  friend class Var;

  struct Node {
    Matrix value;
    Matrix grad;
    bool has_grad = false;
    bool requires_grad = false;
    std::string_view op;
    Backward backward;
  };

  Var push(Node node);

  // deque keeps references returned by Var::value() stable while recording.
  std::deque<Node> nodes_;
  std::vector<std::pair<Parameter*, std::size_t>> leaves_;
  std::unordered_map<const Parameter*, Var> bound_;
  bool track_gradients_ = true;
};

}  // namespace uqb::diff
