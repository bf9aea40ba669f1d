#include "uqbench/diff/tape.hpp"

#include "uqbench/diff/ops.hpp"
#include "uqbench/diff/parameter.hpp"
#include "uqbench/errors.hpp"

#include <string>

namespace uqb::diff {

const Matrix& Var::value() const { return tape_->nodes_[id_].value; }

double Var::item() const {
  const Matrix& v = value();
  detail::require(v.rows() == 1 && v.cols() == 1, "Var::item: node is not 1x1");
  return v(0, 0);
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) {
  Node node;
  node.value = std::move(value);
  node.op = "constant";
  return push(std::move(node));
}

Var Tape::constant(double value) { return constant(Matrix::Constant(1, 1, value)); }

Var Tape::variable(Matrix value) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = true;
  node.op = "variable";
  return push(std::move(node));
}

Var Tape::bind(Parameter& p) {
  if (auto it = bound_.find(&p); it != bound_.end()) return it->second;
  Var out;
  if (!p.trainable() || !track_gradients_) {
    out = constant(p.value());
  } else {
    Var leaf = variable(p.raw());
    leaves_.emplace_back(&p, leaf.id());
    out = p.transform() == Transform::kPositive ? exp(leaf) : leaf;
  }
  bound_.emplace(&p, out);
  return out;
}

Var Tape::record(std::string_view op, Matrix value, std::initializer_list<Var> inputs,
                 Backward backward) {
  return record(op, std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(backward));
}

Var Tape::record(std::string_view op, Matrix value, std::span<const Var> inputs,
                 Backward backward) {
  Node node;
  node.value = std::move(value);
  node.op = op;
  for (const Var& in : inputs) {
    detail::require(in.tape_ == this, std::string("Tape::record(") + std::string(op) +
                                          "): input belongs to another tape");
    if (nodes_[in.id_].requires_grad) node.requires_grad = true;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  return push(std::move(node));
}

bool Tape::requires_grad(const Var& v) const { return nodes_[v.id_].requires_grad; }

void Tape::accumulate(const Var& v, const Matrix& g) {
  Node& node = nodes_[v.id_];
  if (!node.requires_grad) return;
  if (g.rows() != node.value.rows() || g.cols() != node.value.cols()) {
    throw ContractViolation("Tape::accumulate: adjoint shape mismatch at node " +
                            std::to_string(v.id_) + " (" + std::string(node.op) + ")");
  }
  if (node.has_grad) {
    node.grad += g;
  } else {
    node.grad = g;
    node.has_grad = true;
  }
}

Matrix Tape::grad(const Var& v) const {
  const Node& node = nodes_[v.id_];
  if (!node.has_grad) return Matrix::Zero(node.value.rows(), node.value.cols());
  return node.grad;
}

void Tape::backward(const Var& output) {
  detail::require(output.tape_ == this, "Tape::backward: output belongs to another tape");
  const Node& out = nodes_[output.id_];
  detail::require(out.value.rows() == 1 && out.value.cols() == 1,
                  "Tape::backward: seed output must be a scalar");
  for (Node& node : nodes_) {
    node.has_grad = false;
    node.grad.resize(0, 0);
  }
  if (!out.requires_grad) return;
  accumulate(output, Matrix::Ones(1, 1));

  for (std::size_t i = output.id_ + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.has_grad) continue;
    if (!node.grad.allFinite()) {
      throw NumericError("non-finite gradient at node " + std::to_string(i) + " (" +
                         std::string(node.op) + ")");
    }
    if (!node.backward) continue;
    const Matrix g = node.grad;
    node.backward(*this, node.value, g);
  }

  for (auto& [param, id] : leaves_) {
    const Node& leaf = nodes_[id];
    param->grad() = leaf.has_grad ? leaf.grad : Matrix::Zero(leaf.value.rows(), leaf.value.cols());
  }
}

}  // namespace uqb::diff
