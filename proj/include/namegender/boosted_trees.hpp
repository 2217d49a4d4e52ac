#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "namegender/feature_matrix.hpp"

namespace namegender {

// Split nodes send rows with x[feature] < threshold to `left`.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double weight = 0.0;  // leaf output, -G / (H + lambda)
  double gain = 0.0;    // split gain net of gamma (split nodes only)
  double hessian = 0.0; // sum of second derivatives of the rows reaching the node

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const RowView& row) const;
  int depth() const;  // edges on the longest root-to-leaf path
  std::size_t splits() const;
};

struct BoostParams {
  int max_depth = 6;
  double min_child_weight = 1.0;
  double gamma = 0.0;
  double eta = 0.3;
  double lambda = 1.0;
  int rounds = 100;
  // Start from the logit of the training male fraction; otherwise from 0.
  bool prior_base_score = true;
};

struct BoostedModel {
  double base_score = 0.0;  // margin before any tree
  std::vector<Tree> trees;
  BoostParams params;
  std::size_t width = 0;

  double margin(const RowView& row) const;
};

// Structure score improvement of splitting a node with gradient/hessian sums
// (G, H) into (GL, HL) and (GR, HR), before subtracting gamma.
double split_gain(double gl, double hl, double gr, double hr, double lambda);

inline double leaf_weight(double g, double h, double lambda) { return -g / (h + lambda); }

// Second-order boosting of depth-limited trees on the logistic loss with exact
// greedy split enumeration. Split candidates sit at midpoints between
// consecutive distinct values; a split needs positive gain after gamma and at
// least min_child_weight hessian on each side. Equal gains keep the lowest
// feature index, then the lowest threshold.
BoostedModel gbt_fit(const FeatureMatrix& x, std::span<const int> y, const BoostParams& params);

double gbt_predict_proba(const BoostedModel& model, const RowView& row);

std::size_t count_splits(const BoostedModel& model);

// One node per line, indented by depth.
void dump_trees(std::ostream& out, const BoostedModel& model,
                const std::vector<std::string>& feature_names = {});

}  // namespace namegender
