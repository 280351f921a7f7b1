// Copyright 2026 The OVT Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode autodiff on a flat tape of matrix nodes. Values are double
// precision throughout so analytic gradients can be checked against central
// finite differences directly. Nodes are appended in topological order;
// backward() walks the tape in reverse.

#pragma once

#include "ovt/common.hpp"

#include <deque>
#include <functional>
#include <string>
#include <vector>

namespace ovt {

// A named trainable tensor with its gradient and optimizer slots.
struct Param {
  std::string name;
  Mat value;
  Mat grad;
  Mat adam_m;
  Mat adam_v;
  bool weight_decay = true;  // optimizer applies decay only when set

  void zero_grad() { grad.setZero(); }
};

// Owns parameters with stable addresses; lookup by name for checkpointing.
class ParamStore {
 public:
  Param& create(const std::string& name, int rows, int cols, Rng& rng,
                double stddev = 0.02, bool weight_decay = true);
  Param& create_constant(const std::string& name, int rows, int cols,
                         double fill, bool weight_decay = false);
  Param* find(const std::string& name);
  const std::deque<Param>& all() const { return params_; }
  std::deque<Param>& all() { return params_; }
  std::size_t count_scalars() const;
  void zero_grads();

 private:
  std::deque<Param> params_;
};

class Graph {
 public:
  using NodeId = int;

  // Leaves.
  NodeId input(Mat value);          // constant: no gradient flows
  NodeId param(Param& p);           // trainable leaf

  // Linear algebra.
  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId add_row_broadcast(NodeId a, NodeId row);  // row is 1 x D
  NodeId scale(NodeId a, double c);
  NodeId mul_scalar_node(NodeId a, NodeId s);      // s is 1 x 1
  NodeId transpose(NodeId a);

  // Shape ops.
  NodeId concat_rows(const std::vector<NodeId>& parts);
  NodeId concat_cols(const std::vector<NodeId>& parts);
  NodeId slice_rows(NodeId a, int r0, int n);
  NodeId slice_cols(NodeId a, int c0, int n);
  NodeId rows(NodeId a, std::vector<int> ids);     // gather rows (may repeat)
  NodeId pick(NodeId a, int r, int c);             // 1 x 1 view

  // Nonlinear.
  // add_mask, when non-null, is added to the logits before the softmax
  // (0 for allowed entries, a large negative constant for disallowed ones).
  NodeId softmax_rows(NodeId a, const Mat* add_mask = nullptr);
  NodeId log_softmax_rows(NodeId a);
  NodeId layer_norm_rows(NodeId x, NodeId gamma, NodeId beta,
                         double eps = 1e-5);
  NodeId gelu(NodeId a);
  NodeId l2_normalize_rows(NodeId a, double eps = 1e-12);

  // Losses / reductions (all return 1 x 1).
  // Mean of -logp over the listed (row, col) entries.
  NodeId nll_mean(NodeId logp, std::vector<std::pair<int, int>> entries);
  // Binary cross-entropy where p = softmax(logits_row)[1]; p is clamped to
  // [clamp, 1 - clamp] before the log. labels are 0/1 per row.
  NodeId bce_two_class(NodeId logits, std::vector<int> labels,
                       double clamp = 1e-7);
  NodeId sum_weighted(const std::vector<NodeId>& scalars,
                      const std::vector<double>& weights);

  const Mat& value(NodeId id) const { return nodes_[id].value; }
  const Mat& grad(NodeId id) const { return nodes_[id].grad; }
  bool tracked(NodeId id) const { return nodes_[id].track; }
  int size() const { return static_cast<int>(nodes_.size()); }

  // Seeds d(root)/d(root) = 1 and accumulates into every tracked ancestor;
  // parameter leaves add into Param::grad. root must be 1 x 1.
  void backward(NodeId root);

  void clear();

  // Gradient accumulation helpers used by op backward closures.
  void accum(NodeId id, const Mat& g);
  void accum_block(NodeId id, int r0, int c0, const Mat& g);

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool track = false;
    std::function<void(Graph&, NodeId)> vjp;  // may be empty (leaf/constant)
  };

  NodeId push(Mat value, bool track, std::function<void(Graph&, NodeId)> vjp);
  void ensure_grad(NodeId id);

  std::vector<Node> nodes_;
};

}  // namespace ovt
