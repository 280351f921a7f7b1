// Copyright 2026 The OVT Authors
// SPDX-License-Identifier: Apache-2.0

#include "ovt/graph.hpp"

#include <cmath>
#include <utility>

namespace ovt {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

// ---------------------------------------------------------------------------
// ParamStore
// ---------------------------------------------------------------------------

Param& ParamStore::create(const std::string& name, int rows, int cols,
                          Rng& rng, double stddev, bool weight_decay) {
  if (find(name)) throw Error("duplicate parameter name: " + name);
  Param p;
  p.name = name;
  p.value = Mat(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) p.value(r, c) = rng.normal(0.0, stddev);
  p.grad = Mat::Zero(rows, cols);
  p.adam_m = Mat::Zero(rows, cols);
  p.adam_v = Mat::Zero(rows, cols);
  p.weight_decay = weight_decay;
  params_.push_back(std::move(p));
  return params_.back();
}

Param& ParamStore::create_constant(const std::string& name, int rows, int cols,
                                   double fill, bool weight_decay) {
  if (find(name)) throw Error("duplicate parameter name: " + name);
  Param p;
  p.name = name;
  p.value = Mat::Constant(rows, cols, fill);
  p.grad = Mat::Zero(rows, cols);
  p.adam_m = Mat::Zero(rows, cols);
  p.adam_v = Mat::Zero(rows, cols);
  p.weight_decay = weight_decay;
  params_.push_back(std::move(p));
  return params_.back();
}

Param* ParamStore::find(const std::string& name) {
  for (auto& p : params_)
    if (p.name == name) return &p;
  return nullptr;
}

std::size_t ParamStore::count_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) p.zero_grad();
}

// ---------------------------------------------------------------------------
// Graph plumbing
// ---------------------------------------------------------------------------

Graph::NodeId Graph::push(Mat value, bool track,
                          std::function<void(Graph&, NodeId)> vjp) {
  Node n;
  n.value = std::move(value);
  n.track = track;
  n.vjp = std::move(vjp);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

void Graph::ensure_grad(NodeId id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0)
    n.grad = Mat::Zero(n.value.rows(), n.value.cols());
}

void Graph::accum(NodeId id, const Mat& g) {
  if (!nodes_[id].track) return;
  ensure_grad(id);
  nodes_[id].grad += g;
}

void Graph::accum_block(NodeId id, int r0, int c0, const Mat& g) {
  if (!nodes_[id].track) return;
  ensure_grad(id);
  nodes_[id].grad.block(r0, c0, g.rows(), g.cols()) += g;
}

void Graph::backward(NodeId root) {
  if (nodes_[root].value.size() != 1)
    throw Error("backward: root must be a scalar node");
  if (!nodes_[root].track) return;
  ensure_grad(root);
  nodes_[root].grad(0, 0) += 1.0;
  for (NodeId i = root; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.track || n.grad.size() == 0 || !n.vjp) continue;
    n.vjp(*this, i);
  }
}

void Graph::clear() { nodes_.clear(); }

// ---------------------------------------------------------------------------
// Leaves
// ---------------------------------------------------------------------------

Graph::NodeId Graph::input(Mat value) {
  return push(std::move(value), false, nullptr);
}

Graph::NodeId Graph::param(Param& p) {
  Param* ptr = &p;
  return push(p.value, true, [ptr](Graph& g, NodeId self) {
    ptr->grad += g.nodes_[self].grad;
  });
}

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

Graph::NodeId Graph::matmul(NodeId a, NodeId b) {
  const Mat& A = nodes_[a].value;
  const Mat& B = nodes_[b].value;
  if (A.cols() != B.rows()) throw Error("matmul: inner dimensions differ");
  Mat y = A * B;
  bool track = nodes_[a].track || nodes_[b].track;
  return push(std::move(y), track, [a, b](Graph& g, NodeId self) {
    const Mat& dy = g.nodes_[self].grad;
    if (g.nodes_[a].track) g.accum(a, dy * g.nodes_[b].value.transpose());
    if (g.nodes_[b].track) g.accum(b, g.nodes_[a].value.transpose() * dy);
  });
}

Graph::NodeId Graph::add(NodeId a, NodeId b) {
  const Mat& A = nodes_[a].value;
  const Mat& B = nodes_[b].value;
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw Error("add: shape mismatch");
  Mat y = A + B;
  bool track = nodes_[a].track || nodes_[b].track;
  return push(std::move(y), track, [a, b](Graph& g, NodeId self) {
    const Mat& dy = g.nodes_[self].grad;
    g.accum(a, dy);
    g.accum(b, dy);
  });
}

Graph::NodeId Graph::add_row_broadcast(NodeId a, NodeId row) {
  const Mat& A = nodes_[a].value;
  const Mat& R = nodes_[row].value;
  if (R.rows() != 1 || R.cols() != A.cols())
    throw Error("add_row_broadcast: row must be 1 x cols(a)");
  Mat y = A.rowwise() + R.row(0);
  bool track = nodes_[a].track || nodes_[row].track;
  return push(std::move(y), track, [a, row](Graph& g, NodeId self) {
    const Mat& dy = g.nodes_[self].grad;
    g.accum(a, dy);
    if (g.nodes_[row].track) g.accum(row, dy.colwise().sum());
  });
}

Graph::NodeId Graph::scale(NodeId a, double c) {
  Mat y = nodes_[a].value * c;
  return push(std::move(y), nodes_[a].track, [a, c](Graph& g, NodeId self) {
    g.accum(a, g.nodes_[self].grad * c);
  });
}

Graph::NodeId Graph::mul_scalar_node(NodeId a, NodeId s) {
  const Mat& S = nodes_[s].value;
  if (S.size() != 1) throw Error("mul_scalar_node: s must be 1 x 1");
  Mat y = nodes_[a].value * S(0, 0);
  bool track = nodes_[a].track || nodes_[s].track;
  return push(std::move(y), track, [a, s](Graph& g, NodeId self) {
    const Mat& dy = g.nodes_[self].grad;
    const double sv = g.nodes_[s].value(0, 0);
    if (g.nodes_[a].track) g.accum(a, dy * sv);
    if (g.nodes_[s].track) {
      Mat ds(1, 1);
      ds(0, 0) = (dy.array() * g.nodes_[a].value.array()).sum();
      g.accum(s, ds);
    }
  });
}

Graph::NodeId Graph::transpose(NodeId a) {
  Mat y = nodes_[a].value.transpose();
  return push(std::move(y), nodes_[a].track, [a](Graph& g, NodeId self) {
    g.accum(a, g.nodes_[self].grad.transpose());
  });
}

// ---------------------------------------------------------------------------
// Shape ops
// ---------------------------------------------------------------------------

Graph::NodeId Graph::concat_rows(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw Error("concat_rows: no parts");
  int total = 0;
  const int cols = static_cast<int>(nodes_[parts[0]].value.cols());
  bool track = false;
  for (NodeId p : parts) {
    if (nodes_[p].value.cols() != cols)
      throw Error("concat_rows: column mismatch");
    total += static_cast<int>(nodes_[p].value.rows());
    track = track || nodes_[p].track;
  }
  Mat y(total, cols);
  int r = 0;
  for (NodeId p : parts) {
    const Mat& v = nodes_[p].value;
    y.middleRows(r, v.rows()) = v;
    r += static_cast<int>(v.rows());
  }
  std::vector<NodeId> ps = parts;
  return push(std::move(y), track, [ps](Graph& g, NodeId self) {
    const Mat& dy = g.nodes_[self].grad;
    int r = 0;
    for (NodeId p : ps) {
      const int n = static_cast<int>(g.nodes_[p].value.rows());
      g.accum(p, dy.middleRows(r, n));
      r += n;
    }
  });
}

Graph::NodeId Graph::concat_cols(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw Error("concat_cols: no parts");
  int total = 0;
  const int rows_n = static_cast<int>(nodes_[parts[0]].value.rows());
  bool track = false;
  for (NodeId p : parts) {
    if (nodes_[p].value.rows() != rows_n)
      throw Error("concat_cols: row mismatch");
    total += static_cast<int>(nodes_[p].value.cols());
    track = track || nodes_[p].track;
  }
  Mat y(rows_n, total);
  int c = 0;
  for (NodeId p : parts) {
    const Mat& v = nodes_[p].value;
    y.middleCols(c, v.cols()) = v;
    c += static_cast<int>(v.cols());
  }
  std::vector<NodeId> ps = parts;
  return push(std::move(y), track, [ps](Graph& g, NodeId self) {
    const Mat& dy = g.nodes_[self].grad;
    int c = 0;
    for (NodeId p : ps) {
      const int n = static_cast<int>(g.nodes_[p].value.cols());
      g.accum(p, dy.middleCols(c, n));
      c += n;
    }
  });
}

Graph::NodeId Graph::slice_rows(NodeId a, int r0, int n) {
  Mat y = nodes_[a].value.middleRows(r0, n);
  return push(std::move(y), nodes_[a].track, [a, r0](Graph& g, NodeId self) {
    g.accum_block(a, r0, 0, g.nodes_[self].grad);
  });
}

Graph::NodeId Graph::slice_cols(NodeId a, int c0, int n) {
  Mat y = nodes_[a].value.middleCols(c0, n);
  return push(std::move(y), nodes_[a].track, [a, c0](Graph& g, NodeId self) {
    g.accum_block(a, 0, c0, g.nodes_[self].grad);
  });
}

Graph::NodeId Graph::rows(NodeId a, std::vector<int> ids) {
  const Mat& A = nodes_[a].value;
  Mat y(static_cast<int>(ids.size()), A.cols());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 0 || ids[k] >= A.rows())
      throw Error("rows: index out of range");
    y.row(static_cast<int>(k)) = A.row(ids[k]);
  }
  return push(std::move(y), nodes_[a].track,
              [a, ids = std::move(ids)](Graph& g, NodeId self) {
                const Mat& dy = g.nodes_[self].grad;
                for (std::size_t k = 0; k < ids.size(); ++k)
                  g.accum_block(a, ids[k], 0,
                                dy.row(static_cast<int>(k)));
              });
}

Graph::NodeId Graph::pick(NodeId a, int r, int c) {
  Mat y(1, 1);
  y(0, 0) = nodes_[a].value(r, c);
  return push(std::move(y), nodes_[a].track, [a, r, c](Graph& g, NodeId self) {
    g.accum_block(a, r, c, g.nodes_[self].grad);
  });
}

// ---------------------------------------------------------------------------
// Nonlinear ops
// ---------------------------------------------------------------------------

Graph::NodeId Graph::softmax_rows(NodeId a, const Mat* add_mask) {
  const Mat& A = nodes_[a].value;
  Mat logits = A;
  if (add_mask) {
    if (add_mask->rows() != A.rows() || add_mask->cols() != A.cols())
      throw Error("softmax_rows: mask shape mismatch");
    logits += *add_mask;
  }
  Mat y(logits.rows(), logits.cols());
  for (int r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    Eigen::ArrayXd e = (logits.row(r).array() - mx).exp();
    y.row(r) = (e / e.sum()).matrix();
  }
  return push(std::move(y), nodes_[a].track, [a](Graph& g, NodeId self) {
    const Mat& y = g.nodes_[self].value;
    const Mat& dy = g.nodes_[self].grad;
    Mat dx(y.rows(), y.cols());
    for (int r = 0; r < y.rows(); ++r) {
      const double dot = dy.row(r).dot(y.row(r));
      dx.row(r) = (dy.row(r).array() - dot) * y.row(r).array();
    }
    g.accum(a, dx);
  });
}

Graph::NodeId Graph::log_softmax_rows(NodeId a) {
  const Mat& A = nodes_[a].value;
  Mat y(A.rows(), A.cols());
  for (int r = 0; r < A.rows(); ++r) {
    const double mx = A.row(r).maxCoeff();
    const double lse =
        mx + std::log((A.row(r).array() - mx).exp().sum());
    y.row(r) = A.row(r).array() - lse;
  }
  return push(std::move(y), nodes_[a].track, [a](Graph& g, NodeId self) {
    const Mat& y = g.nodes_[self].value;
    const Mat& dy = g.nodes_[self].grad;
    Mat dx(y.rows(), y.cols());
    for (int r = 0; r < y.rows(); ++r) {
      const double s = dy.row(r).sum();
      dx.row(r) = dy.row(r).array() - s * y.row(r).array().exp();
    }
    g.accum(a, dx);
  });
}

Graph::NodeId Graph::layer_norm_rows(NodeId x, NodeId gamma, NodeId beta,
                                     double eps) {
  const Mat& X = nodes_[x].value;
  const Mat& G = nodes_[gamma].value;
  const Mat& B = nodes_[beta].value;
  if (G.rows() != 1 || B.rows() != 1 || G.cols() != X.cols() ||
      B.cols() != X.cols())
    throw Error("layer_norm_rows: gamma/beta must be 1 x cols(x)");
  Mat y(X.rows(), X.cols());
  for (int r = 0; r < X.rows(); ++r) {
    const double mu = X.row(r).mean();
    const double var =
        (X.row(r).array() - mu).square().sum() / X.cols();
    const double s = std::sqrt(var + eps);
    y.row(r) =
        (((X.row(r).array() - mu) / s) * G.row(0).array()) + B.row(0).array();
  }
  bool track = nodes_[x].track || nodes_[gamma].track || nodes_[beta].track;
  return push(std::move(y), track,
              [x, gamma, beta, eps](Graph& g, NodeId self) {
                const Mat& X = g.nodes_[x].value;
                const Mat& G = g.nodes_[gamma].value;
                const Mat& dy = g.nodes_[self].grad;
                const int D = static_cast<int>(X.cols());
                Mat dx = Mat::Zero(X.rows(), D);
                Mat dgamma = Mat::Zero(1, D);
                Mat dbeta = Mat::Zero(1, D);
                for (int r = 0; r < X.rows(); ++r) {
                  const double mu = X.row(r).mean();
                  const double var =
                      (X.row(r).array() - mu).square().sum() / D;
                  const double s = std::sqrt(var + eps);
                  Eigen::ArrayXd xhat = (X.row(r).array() - mu) / s;
                  Eigen::ArrayXd dyr = dy.row(r).array();
                  dbeta.row(0).array() += dyr;
                  dgamma.row(0).array() += dyr * xhat;
                  Eigen::ArrayXd dxhat = dyr * G.row(0).array();
                  const double m1 = dxhat.mean();
                  const double m2 = (dxhat * xhat).mean();
                  dx.row(r) = ((dxhat - m1 - xhat * m2) / s).matrix();
                }
                g.accum(x, dx);
                g.accum(gamma, dgamma);
                g.accum(beta, dbeta);
              });
}

Graph::NodeId Graph::gelu(NodeId a) {
  const Mat& A = nodes_[a].value;
  Mat y = A.unaryExpr([](double v) {
    return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
  });
  return push(std::move(y), nodes_[a].track, [a](Graph& g, NodeId self) {
    const Mat& X = g.nodes_[a].value;
    const Mat& dy = g.nodes_[self].grad;
    Mat dx = X.binaryExpr(dy, [](double v, double d) {
      const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
      return d * (cdf + v * pdf);
    });
    g.accum(a, dx);
  });
}

Graph::NodeId Graph::l2_normalize_rows(NodeId a, double eps) {
  const Mat& A = nodes_[a].value;
  Mat y(A.rows(), A.cols());
  for (int r = 0; r < A.rows(); ++r)
    y.row(r) = A.row(r) / (A.row(r).norm() + eps);
  return push(std::move(y), nodes_[a].track, [a, eps](Graph& g, NodeId self) {
    const Mat& X = g.nodes_[a].value;
    const Mat& dy = g.nodes_[self].grad;
    Mat dx(X.rows(), X.cols());
    for (int r = 0; r < X.rows(); ++r) {
      const double n = X.row(r).norm();
      const double s = n + eps;
      dx.row(r) = dy.row(r) / s;
      if (n > 0.0) {
        const double proj = dy.row(r).dot(X.row(r)) / (s * s * n);
        dx.row(r) -= proj * X.row(r);
      }
    }
    g.accum(a, dx);
  });
}

// ---------------------------------------------------------------------------
// Losses / reductions
// ---------------------------------------------------------------------------

Graph::NodeId Graph::nll_mean(NodeId logp,
                              std::vector<std::pair<int, int>> entries) {
  if (entries.empty()) throw Error("nll_mean: no entries");
  const Mat& L = nodes_[logp].value;
  double total = 0.0;
  for (auto& [r, c] : entries) {
    if (r < 0 || r >= L.rows() || c < 0 || c >= L.cols())
      throw Error("nll_mean: entry out of range");
    total -= L(r, c);
  }
  Mat y(1, 1);
  y(0, 0) = total / static_cast<double>(entries.size());
  return push(std::move(y), nodes_[logp].track,
              [logp, entries = std::move(entries)](Graph& g, NodeId self) {
                const double go = g.nodes_[self].grad(0, 0);
                const double w =
                    -go / static_cast<double>(entries.size());
                Mat one(1, 1);
                for (auto& [r, c] : entries) {
                  one(0, 0) = w;
                  g.accum_block(logp, r, c, one);
                }
              });
}

Graph::NodeId Graph::bce_two_class(NodeId logits, std::vector<int> labels,
                                   double clamp) {
  const Mat& Z = nodes_[logits].value;
  if (Z.cols() != 2) throw Error("bce_two_class: logits must be N x 2");
  if (static_cast<int>(labels.size()) != Z.rows())
    throw Error("bce_two_class: one label per row required");
  const int N = static_cast<int>(Z.rows());
  double total = 0.0;
  for (int r = 0; r < N; ++r) {
    // Two-class softmax probability of the "match" class.
    const double mx = std::max(Z(r, 0), Z(r, 1));
    const double e0 = std::exp(Z(r, 0) - mx);
    const double e1 = std::exp(Z(r, 1) - mx);
    double p = e1 / (e0 + e1);
    p = std::min(1.0 - clamp, std::max(clamp, p));
    const double y = labels[r] ? 1.0 : 0.0;
    total -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  Mat out(1, 1);
  out(0, 0) = total / N;
  return push(std::move(out), nodes_[logits].track,
              [logits, labels = std::move(labels), clamp](Graph& g,
                                                          NodeId self) {
                const Mat& Z = g.nodes_[logits].value;
                const int N = static_cast<int>(Z.rows());
                const double go = g.nodes_[self].grad(0, 0);
                Mat dz = Mat::Zero(N, 2);
                for (int r = 0; r < N; ++r) {
                  const double mx = std::max(Z(r, 0), Z(r, 1));
                  const double e0 = std::exp(Z(r, 0) - mx);
                  const double e1 = std::exp(Z(r, 1) - mx);
                  const double p = e1 / (e0 + e1);
                  if (p <= clamp || p >= 1.0 - clamp) continue;
                  const double y = labels[r] ? 1.0 : 0.0;
                  const double d = go * (p - y) / N;
                  dz(r, 1) = d;
                  dz(r, 0) = -d;
                }
                g.accum(logits, dz);
              });
}

Graph::NodeId Graph::sum_weighted(const std::vector<NodeId>& scalars,
                                  const std::vector<double>& weights) {
  if (scalars.empty() || scalars.size() != weights.size())
    throw Error("sum_weighted: size mismatch");
  double total = 0.0;
  bool track = false;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    const Mat& v = nodes_[scalars[i]].value;
    if (v.size() != 1) throw Error("sum_weighted: inputs must be scalars");
    total += weights[i] * v(0, 0);
    track = track || nodes_[scalars[i]].track;
  }
  Mat y(1, 1);
  y(0, 0) = total;
  std::vector<NodeId> ids = scalars;
  std::vector<double> ws = weights;
  return push(std::move(y), track,
              [ids = std::move(ids), ws = std::move(ws)](Graph& g,
                                                         NodeId self) {
                const double go = g.nodes_[self].grad(0, 0);
                Mat one(1, 1);
                for (std::size_t i = 0; i < ids.size(); ++i) {
                  one(0, 0) = go * ws[i];
                  g.accum(ids[i], one);
                }
              });
}

}  // namespace ovt
