#pragma once

// Exact Euclidean k-nearest-neighbor search and KNN-graph components.
//
// Neighbors are ordered by (squared distance, id); equal distances prefer the
// smaller id. Both the kd-tree and the brute-force path evaluate squared
// distances with the same accumulation order, so their tables are identical,
// not merely equivalent.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "core.hpp"
#include "parallel.hpp"

namespace lodd {

struct NeighborIndex {
  Index n = 0;
  int k = 0;
  /// Row-major n x k tables.
  std::vector<Index> neighbor_ids;
  std::vector<double> distances;

  Index id(Index i, int j) const { return neighbor_ids[static_cast<std::size_t>(i * k + j)]; }
  double distance(Index i, int j) const { return distances[static_cast<std::size_t>(i * k + j)]; }
};

struct ComponentPartition {
  std::vector<Index> component_of;
  std::vector<Index> sizes;

  Index count() const { return static_cast<Index>(sizes.size()); }
};

enum class SearchStrategy { Auto, KdTree, BruteForce };

/// Tree search is used up to this dimension, brute force above it.
inline constexpr Index kTreeMaxDim = 16;

namespace detail {

inline double squared_distance(const double* a, const double* b, Index d) {
  double s = 0.0;
  for (Index f = 0; f < d; ++f) {
    const double t = a[f] - b[f];
    s += t * t;
  }
  return s;
}

struct Candidate {
  double d2;
  Index id;
  bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && id < o.id); }
};

/// Bounded max-heap holding the k best candidates seen so far.
class KBest {
 public:
  explicit KBest(int k) : k_(static_cast<std::size_t>(k)) { heap_.reserve(k_); }

  double worst() const {
    return heap_.size() < k_ ? std::numeric_limits<double>::infinity() : heap_.front().d2;
  }

  void offer(double d2, Index id) {
    const Candidate c{d2, id};
    if (heap_.size() < k_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (c < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  std::vector<Candidate> sorted() {
    std::sort_heap(heap_.begin(), heap_.end());
    return heap_;
  }

  void clear() { heap_.clear(); }

 private:
  std::size_t k_;
  std::vector<Candidate> heap_;
};

/// Static kd-tree over a column-major d x n coordinate block. Splits on the
/// widest dimension at the median; leaves hold up to kLeafSize points. Each
/// child records its tight extent along its parent's split dimension, and the
/// search keeps a per-dimension lower bound on the offset from the query, so
/// the squared distance bound of a child is updated in O(1).
class KdTree {
 public:
  static constexpr Index kLeafSize = 16;

  explicit KdTree(const Matrix& points) : data_(points.data()), d_(points.rows()), n_(points.cols()) {
    perm_.resize(static_cast<std::size_t>(n_));
    std::iota(perm_.begin(), perm_.end(), Index{0});
    nodes_.reserve(static_cast<std::size_t>(4 * n_ / kLeafSize + 2));
    build(0, n_);
    packed_.resize(static_cast<std::size_t>(n_ * d_));
    for (Index j = 0; j < n_; ++j) {
      std::copy_n(coords(perm_[static_cast<std::size_t>(j)]), d_, packed_.data() + j * d_);
    }
  }

  /// Point ids in leaf order; consecutive ids are spatially close.
  const std::vector<Index>& leaf_order() const { return perm_; }

  void query(const double* q, Index self, KBest& best, std::vector<double>& offsets) const {
    offsets.assign(static_cast<std::size_t>(d_), 0.0);
    search(0, q, self, 0.0, best, offsets);
  }

 private:
  struct Node {
    Index begin, end;
    Index split_dim = -1;  // -1 marks a leaf
    Index child[2] = {-1, -1};
    // Tight extent of each child along split_dim.
    double lo[2] = {0.0, 0.0};
    double hi[2] = {0.0, 0.0};
  };

  const double* coords(Index id) const { return data_ + id * d_; }

  void extent(Index begin, Index end, Index f, double& lo, double& hi) const {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (Index j = begin; j < end; ++j) {
      const double v = coords(perm_[static_cast<std::size_t>(j)])[f];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  Index build(Index begin, Index end) {
    const auto node_id = static_cast<Index>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return node_id;

    Index best_dim = 0;
    double best_spread = -1.0;
    for (Index f = 0; f < d_; ++f) {
      double lo, hi;
      extent(begin, end, f, lo, hi);
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = f;
      }
    }
    if (best_spread <= 0.0) return node_id;  // all coincident: keep as a leaf

    const Index mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end, [&](Index a, Index b) {
      const double va = coords(a)[best_dim];
      const double vb = coords(b)[best_dim];
      return va < vb || (va == vb && a < b);
    });
    Node split{begin, end, best_dim};
    extent(begin, mid, best_dim, split.lo[0], split.hi[0]);
    extent(mid, end, best_dim, split.lo[1], split.hi[1]);
    split.child[0] = build(begin, mid);
    split.child[1] = build(mid, end);
    nodes_[static_cast<std::size_t>(node_id)] = split;
    return node_id;
  }

  void search(Index node_id, const double* q, Index self, double bound, KBest& best,
              std::vector<double>& offsets) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.split_dim < 0) {
      for (Index j = node.begin; j < node.end; ++j) {
        const Index id = perm_[static_cast<std::size_t>(j)];
        if (id == self) continue;
        best.offer(squared_distance(q, packed_.data() + j * d_, d_), id);
      }
      return;
    }
    const Index f = node.split_dim;
    const double v = q[f];
    const double old = offsets[static_cast<std::size_t>(f)];
    double off[2], sub[2];
    for (int c = 0; c < 2; ++c) {
      off[c] = v < node.lo[c] ? node.lo[c] - v : (v > node.hi[c] ? v - node.hi[c] : 0.0);
      sub[c] = bound - old * old + off[c] * off[c];
    }
    const int first = sub[1] < sub[0] ? 1 : 0;
    // Bounds equal to the current worst are still visited: a tie at that
    // distance can be won by a smaller id.
    for (int c : {first, 1 - first}) {
      if (sub[c] <= best.worst()) {
        offsets[static_cast<std::size_t>(f)] = off[c];
        search(node.child[c], q, self, sub[c], best, offsets);
      }
    }
    offsets[static_cast<std::size_t>(f)] = old;
  }

  const double* data_;
  Index d_;
  Index n_;
  std::vector<Index> perm_;
  std::vector<Node> nodes_;
  std::vector<double> packed_;
};

inline void fill_row(NeighborIndex& index, Index i, const std::vector<Candidate>& row) {
  for (int j = 0; j < index.k; ++j) {
    const auto slot = static_cast<std::size_t>(i * index.k + j);
    index.neighbor_ids[slot] = row[static_cast<std::size_t>(j)].id;
    index.distances[slot] = std::sqrt(row[static_cast<std::size_t>(j)].d2);
  }
}

}  // namespace detail

/// Exact nearest-neighbor queries of arbitrary points against a fixed
/// reference set, with the same (distance, id) ordering as build_index.
class NeighborSearcher {
 public:
  explicit NeighborSearcher(const PointSet& reference)
      : reference_(reference.points()), tree_(reference_) {}
  // The tree points into reference_.
  NeighborSearcher(const NeighborSearcher&) = delete;
  NeighborSearcher& operator=(const NeighborSearcher&) = delete;

  /// The k nearest reference ids to q (exclude is skipped when >= 0).
  std::vector<std::pair<Index, double>> query(const double* q, int k, Index exclude = -1) const {
    if (k < 1 || k > reference_.cols() - (exclude >= 0 ? 1 : 0)) {
      throw Error(ErrorCode::KTooLarge, "k exceeds the reference set size");
    }
    detail::KBest best(k);
    std::vector<double> offsets;
    tree_.query(q, exclude, best, offsets);
    std::vector<std::pair<Index, double>> out;
    for (const auto& c : best.sorted()) out.emplace_back(c.id, std::sqrt(c.d2));
    return out;
  }

  Index nearest(const double* q) const { return query(q, 1).front().first; }

 private:
  Matrix reference_;
  detail::KdTree tree_;
};

/// Exact k nearest neighbors of every point; the point itself is excluded by
/// id, coincident duplicates are kept at distance 0.
inline NeighborIndex build_index(const PointSet& point_set, int k,
                                 SearchStrategy strategy = SearchStrategy::Auto, unsigned threads = 0) {
  const Index n = point_set.size();
  const Index d = point_set.dim();
  if (k < 1 || k >= n) {
    throw Error(ErrorCode::KTooLarge, "k must satisfy 1 <= k <= n-1 (k=" + std::to_string(k) +
                                          ", n=" + std::to_string(n) + ")");
  }
  if (strategy == SearchStrategy::Auto) {
    strategy = d <= kTreeMaxDim ? SearchStrategy::KdTree : SearchStrategy::BruteForce;
  }

  NeighborIndex index;
  index.n = n;
  index.k = k;
  index.neighbor_ids.resize(static_cast<std::size_t>(n * k));
  index.distances.resize(static_cast<std::size_t>(n * k));
  const Matrix& pts = point_set.points();

  if (strategy == SearchStrategy::KdTree) {
    const detail::KdTree tree(pts);
    const auto& order = tree.leaf_order();
    // Queries run in leaf order so consecutive searches touch the same nodes.
    constexpr Index kBlock = 256;
    const Index blocks = (n + kBlock - 1) / kBlock;
    parallel_for(blocks, threads, [&](Index b) {
      detail::KBest best(k);
      std::vector<double> offsets;
      for (Index j = b * kBlock; j < std::min(n, (b + 1) * kBlock); ++j) {
        const Index i = order[static_cast<std::size_t>(j)];
        best.clear();
        tree.query(pts.col(i).data(), i, best, offsets);
        detail::fill_row(index, i, best.sorted());
      }
    });
  } else {
    constexpr Index kBlock = 64;
    const Index blocks = (n + kBlock - 1) / kBlock;
    parallel_for(blocks, threads, [&](Index b) {
      detail::KBest best(k);
      for (Index i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
        best.clear();
        const double* q = pts.col(i).data();
        for (Index j = 0; j < n; ++j) {
          if (j == i) continue;
          best.offer(detail::squared_distance(q, pts.col(j).data(), d), j);
        }
        detail::fill_row(index, i, best.sorted());
      }
    });
  }
  return index;
}

/// Connected components of the undirected KNN graph with edges
/// {(i, j) : j in KNN(i) or i in KNN(j)}. Component ids are numbered by the
/// smallest point id they contain.
inline ComponentPartition knn_graph_components(const NeighborIndex& index) {
  std::vector<Index> parent(static_cast<std::size_t>(index.n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& p = parent[static_cast<std::size_t>(x)];
      p = parent[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  };
  for (Index i = 0; i < index.n; ++i) {
    for (int j = 0; j < index.k; ++j) {
      const Index a = find(i);
      const Index b = find(index.id(i, j));
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  }

  ComponentPartition out;
  out.component_of.assign(static_cast<std::size_t>(index.n), -1);
  std::vector<Index> id_of_root(static_cast<std::size_t>(index.n), -1);
  for (Index i = 0; i < index.n; ++i) {
    const Index root = find(i);
    auto& cid = id_of_root[static_cast<std::size_t>(root)];
    if (cid < 0) {
      cid = static_cast<Index>(out.sizes.size());
      out.sizes.push_back(0);
    }
    out.component_of[static_cast<std::size_t>(i)] = cid;
    ++out.sizes[static_cast<std::size_t>(cid)];
  }
  return out;
}

}  // namespace lodd
