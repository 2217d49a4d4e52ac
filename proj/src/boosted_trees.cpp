#include "namegender/boosted_trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "namegender/error.hpp"

namespace namegender {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Gains within this band of the incumbent count as ties.
bool improves(double gain, double best) {
  if (best == -std::numeric_limits<double>::infinity()) return true;
  return gain > best + 1e-12 * std::max(1.0, std::abs(best));
}

struct Entry {
  double value;
  std::uint32_t row;
};

struct NodeStats {
  double g = 0.0;
  double h = 0.0;
  std::size_t count = 0;
};

struct BestSplit {
  double gain = -std::numeric_limits<double>::infinity();
  int feature = -1;
  double threshold = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, const std::vector<std::vector<Entry>>& columns,
              const BoostParams& params)
      : x_(x), columns_(columns), params_(params) {}

  // Grows one tree; `node_of` receives the leaf index of every row.
  Tree build(const std::vector<double>& g, const std::vector<double>& h,
             std::vector<int>& node_of) {
    Tree tree;
    const std::size_t n = g.size();
    node_of.assign(n, 0);
    NodeStats root;
    for (std::size_t i = 0; i < n; ++i) {
      root.g += g[i];
      root.h += h[i];
    }
    root.count = n;
    tree.nodes.push_back(make_leaf(root));
    std::vector<NodeStats> stats{root};
    std::vector<int> active{0};

    for (int depth = 0; depth < params_.max_depth && !active.empty(); ++depth) {
      const auto best = find_splits(tree, stats, active, g, h, node_of);
      std::vector<int> next;
      std::vector<int> left_of(tree.nodes.size(), -1);
      for (std::size_t a = 0; a < active.size(); ++a) {
        if (best[a].feature < 0 || !(best[a].gain > 0.0)) continue;
        const int id = active[a];
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes.push_back({});
        stats.resize(tree.nodes.size());
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = best[a].feature;
        node.threshold = best[a].threshold;
        node.gain = best[a].gain;
        node.left = left;
        node.right = left + 1;
        node.weight = 0.0;
        left_of.resize(tree.nodes.size(), -1);
        left_of[static_cast<std::size_t>(id)] = left;
        next.push_back(left);
        next.push_back(left + 1);
      }
      // Route rows of split nodes to their children.
      for (std::size_t i = 0; i < n; ++i) {
        const auto parent = static_cast<std::size_t>(node_of[i]);
        if (left_of[parent] < 0) continue;
        const auto& node = tree.nodes[parent];
        const double v = x_.at(i, static_cast<std::size_t>(node.feature));
        const int child = v < node.threshold ? node.left : node.right;
        node_of[i] = child;
        auto& s = stats[static_cast<std::size_t>(child)];
        s.g += g[i];
        s.h += h[i];
        ++s.count;
      }
      for (int child : next) {
        tree.nodes[static_cast<std::size_t>(child)] = make_leaf(stats[static_cast<std::size_t>(child)]);
      }
      active = std::move(next);
    }
    return tree;
  }

 private:
  TreeNode make_leaf(const NodeStats& s) const {
    TreeNode leaf;
    leaf.weight = leaf_weight(s.g, s.h, params_.lambda);
    leaf.hessian = s.h;
    return leaf;
  }

  std::vector<BestSplit> find_splits(const Tree& tree, const std::vector<NodeStats>& stats,
                                     const std::vector<int>& active, const std::vector<double>& g,
                                     const std::vector<double>& h, const std::vector<int>& node_of) {
    std::vector<int> slot_of(tree.nodes.size(), -1);
    for (std::size_t a = 0; a < active.size(); ++a) {
      slot_of[static_cast<std::size_t>(active[a])] = static_cast<int>(a);
    }
    const std::size_t m = active.size();
    std::vector<BestSplit> best(m);
    std::vector<NodeStats> nonzero(m);
    std::vector<NodeStats> left(m);
    std::vector<double> prev(m, 0.0);
    std::vector<char> has_prev(m, 0);
    std::vector<char> touched_flag(m, 0);
    std::vector<std::size_t> touched;

    const double lambda = params_.lambda;
    const double mcw = params_.min_child_weight;

    for (std::size_t f = 0; f < columns_.size(); ++f) {
      const auto& col = columns_[f];
      if (col.empty()) continue;
      touched.clear();
      for (const auto& e : col) {
        const int slot = slot_of[static_cast<std::size_t>(node_of[e.row])];
        if (slot < 0) continue;
        const auto a = static_cast<std::size_t>(slot);
        if (!touched_flag[a]) {
          touched_flag[a] = 1;
          touched.push_back(a);
          nonzero[a] = {};
          left[a] = {};
          has_prev[a] = 0;
        }
        nonzero[a].g += g[e.row];
        nonzero[a].h += h[e.row];
        ++nonzero[a].count;
      }

      auto visit = [&](std::size_t a, double value, double gs, double hs, std::size_t count) {
        if (has_prev[a] && value != prev[a]) {
          const auto& total = stats[static_cast<std::size_t>(active[a])];
          const double hl = left[a].h;
          const double hr = total.h - hl;
          if (hl >= mcw && hr >= mcw) {
            const double gl = left[a].g;
            const double gr = total.g - gl;
            const double gain = split_gain(gl, hl, gr, hr, lambda) - params_.gamma;
            if (improves(gain, best[a].gain)) {
              double threshold = prev[a] + 0.5 * (value - prev[a]);
              if (!(threshold > prev[a])) threshold = value;
              best[a] = {gain, static_cast<int>(f), threshold};
            }
          }
        }
        left[a].g += gs;
        left[a].h += hs;
        left[a].count += count;
        prev[a] = value;
        has_prev[a] = 1;
      };

      std::size_t k = 0;
      for (; k < col.size() && col[k].value < 0.0; ++k) {
        const int slot = slot_of[static_cast<std::size_t>(node_of[col[k].row])];
        if (slot >= 0) visit(static_cast<std::size_t>(slot), col[k].value, g[col[k].row], h[col[k].row], 1);
      }
      // Rows absent from the column hold an implicit zero; they form one block
      // per node between the negative and positive entries.
      for (auto a : touched) {
        const auto& total = stats[static_cast<std::size_t>(active[a])];
        const std::size_t zeros = total.count - nonzero[a].count;
        if (zeros > 0) visit(a, 0.0, total.g - nonzero[a].g, total.h - nonzero[a].h, zeros);
      }
      for (; k < col.size(); ++k) {
        const int slot = slot_of[static_cast<std::size_t>(node_of[col[k].row])];
        if (slot >= 0) visit(static_cast<std::size_t>(slot), col[k].value, g[col[k].row], h[col[k].row], 1);
      }
      for (auto a : touched) touched_flag[a] = 0;
    }
    return best;
  }

  const FeatureMatrix& x_;
  const std::vector<std::vector<Entry>>& columns_;
  const BoostParams& params_;
};

void check_params(const BoostParams& p) {
  if (p.max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be at least 1");
  if (p.min_child_weight < 0.0 || p.gamma < 0.0 || p.lambda < 0.0 || !(p.eta > 0.0) || p.rounds < 0) {
    throw Error(ErrorCode::InvalidArgument, "boosting hyperparameters must be nonnegative");
  }
}

}  // namespace

double split_gain(double gl, double hl, double gr, double hr, double lambda) {
  const double g = gl + gr;
  const double h = hl + hr;
  return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (h + lambda));
}

double Tree::predict(const RowView& row) const {
  std::size_t id = 0;
  while (!nodes[id].is_leaf()) {
    const auto& node = nodes[id];
    id = static_cast<std::size_t>(row.at(static_cast<std::size_t>(node.feature)) < node.threshold
                                      ? node.left
                                      : node.right);
  }
  return nodes[id].weight;
}

int Tree::depth() const {
  int deepest = 0;
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[id].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes[id].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[id].right), d + 1);
    }
  }
  return deepest;
}

std::size_t Tree::splits() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

double BoostedModel::margin(const RowView& row) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(row);
  return base_score + params.eta * sum;
}

BoostedModel gbt_fit(const FeatureMatrix& x, std::span<const int> y, const BoostParams& params) {
  check_labels(x, y);
  check_params(params);
  if (!x.all_finite()) throw Error(ErrorCode::NonFiniteInput, "feature matrix has non-finite values");
  const auto male = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (male == 0 || male == y.size()) {
    throw Error(ErrorCode::SingleClassInput, "boosting needs samples of both classes");
  }

  // Column-major copy of the nonzeros, sorted by value then row.
  std::vector<std::vector<Entry>> columns(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.index.size(); ++k) {
      columns[r.index[k]].push_back({r.value[k], static_cast<std::uint32_t>(i)});
    }
  }
  for (auto& col : columns) {
    std::sort(col.begin(), col.end(), [](const Entry& a, const Entry& b) {
      return a.value != b.value ? a.value < b.value : a.row < b.row;
    });
  }

  BoostedModel model;
  model.params = params;
  model.width = x.cols();
  if (params.prior_base_score) {
    const double p = static_cast<double>(male) / static_cast<double>(y.size());
    model.base_score = std::log(p / (1.0 - p));
  }

  const std::size_t n = y.size();
  std::vector<double> margin(n, model.base_score);
  std::vector<double> g(n);
  std::vector<double> h(n);
  std::vector<int> node_of;
  TreeBuilder builder(x, columns, params);
  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      g[i] = p - y[i];
      h[i] = p * (1.0 - p);
    }
    Tree tree = builder.build(g, h, node_of);
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += params.eta * tree.nodes[static_cast<std::size_t>(node_of[i])].weight;
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double gbt_predict_proba(const BoostedModel& model, const RowView& row) {
  if (row.width != model.width) {
    throw Error(ErrorCode::WidthMismatch,
                fmt::format("row width {} but model expects {}", row.width, model.width));
  }
  return sigmoid(model.margin(row));
}

std::size_t count_splits(const BoostedModel& model) {
  std::size_t total = 0;
  for (const auto& t : model.trees) total += t.splits();
  return total;
}

void dump_trees(std::ostream& out, const BoostedModel& model,
                const std::vector<std::string>& feature_names) {
  out << fmt::format("base_score={} eta={} lambda={} trees={}\n", model.base_score,
                     model.params.eta, model.params.lambda, model.trees.size());
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    out << fmt::format("booster[{}]:\n", t);
    const auto& nodes = model.trees[t].nodes;
    std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
    while (!stack.empty()) {
      const auto [id, depth] = stack.back();
      stack.pop_back();
      const auto& node = nodes[id];
      const std::string indent(static_cast<std::size_t>(depth), '\t');
      if (node.is_leaf()) {
        out << fmt::format("{}{}:leaf={},cover={}\n", indent, id, node.weight, node.hessian);
        continue;
      }
      const auto f = static_cast<std::size_t>(node.feature);
      const std::string name =
          f < feature_names.size() ? fmt::format("'{}'", feature_names[f]) : fmt::format("f{}", f);
      out << fmt::format("{}{}:[{}<{}] yes={},no={},gain={}\n", indent, id, name, node.threshold,
                         node.left, node.right, node.gain);
      stack.emplace_back(static_cast<std::size_t>(node.right), depth + 1);
      stack.emplace_back(static_cast<std::size_t>(node.left), depth + 1);
    }
  }
}

}  // namespace namegender
