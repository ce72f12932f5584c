#include "cwls/multi_index.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "cwls/errors.hpp"

namespace cwls {

std::string to_string(IndexSetKind kind) {
  switch (kind) {
    case IndexSetKind::HyperbolicCross: return "hc";
    case IndexSetKind::TotalDegree: return "td";
    case IndexSetKind::TensorProduct: return "tp";
  }
  return "?";
}

IndexSetKind index_set_kind_from_string(const std::string& s) {
  if (s == "hc" || s == "hyperbolic_cross" || s == "hyperbolic-cross")
    return IndexSetKind::HyperbolicCross;
  if (s == "td" || s == "total_degree" || s == "total-degree")
    return IndexSetKind::TotalDegree;
  if (s == "tp" || s == "tensor" || s == "tensor_product")
    return IndexSetKind::TensorProduct;
  throw ConfigError("unknown index set kind '" + s + "'");
}

long long index_level(IndexSetKind kind, const MultiIndex& idx) {
  switch (kind) {
    case IndexSetKind::HyperbolicCross: {
      long long p = 1;
      for (int e : idx) p *= static_cast<long long>(e) + 1;
      return p;
    }
    case IndexSetKind::TotalDegree:
      return std::accumulate(idx.begin(), idx.end(), 0LL);
    case IndexSetKind::TensorProduct:
      return idx.empty() ? 0 : *std::max_element(idx.begin(), idx.end());
  }
  return 0;
}

bool canonical_less(IndexSetKind kind, const MultiIndex& a, const MultiIndex& b) {
  const long long la = index_level(kind, a);
  const long long lb = index_level(kind, b);
  if (la != lb) return la < lb;
  const long long sa = std::accumulate(a.begin(), a.end(), 0LL);
  const long long sb = std::accumulate(b.begin(), b.end(), 0LL);
  if (sa != sb) return sa < sb;
  return a < b;
}

MultiIndexSet::MultiIndexSet(IndexSetKind kind, int dimension, int order,
                             std::vector<MultiIndex> indices)
    : kind_(kind), dimension_(dimension), order_(order),
      indices_(std::move(indices)), max_degree_(0) {
  if (dimension_ < 1) throw ConfigError("index set dimension must be >= 1");
  for (const auto& idx : indices_) {
    if (static_cast<int>(idx.size()) != dimension_)
      throw ConfigError("multi-index length does not match dimension");
    for (int e : idx) {
      if (e < 0) throw ConfigError("multi-index entries must be non-negative");
      max_degree_ = std::max(max_degree_, e);
    }
  }
}

bool MultiIndexSet::has_prefix(const MultiIndexSet& other) const {
  if (other.size() > size()) return false;
  return std::equal(other.indices_.begin(), other.indices_.end(), indices_.begin());
}

namespace {

// Depth-first enumeration with pruning on the partial level, so large orders
// in low dimension never scan the full box.
void enumerate(IndexSetKind kind, int d, int order, MultiIndex& current, int pos,
               std::vector<MultiIndex>& out) {
  if (pos == d) {
    out.push_back(current);
    return;
  }
  for (int e = 0;; ++e) {
    current[pos] = e;
    bool feasible = true;
    switch (kind) {
      case IndexSetKind::HyperbolicCross: {
        long long p = 1;
        for (int k = 0; k <= pos; ++k) p *= static_cast<long long>(current[k]) + 1;
        feasible = p <= static_cast<long long>(order) + 1;
        break;
      }
      case IndexSetKind::TotalDegree: {
        long long s = 0;
        for (int k = 0; k <= pos; ++k) s += current[k];
        feasible = s <= order;
        break;
      }
      case IndexSetKind::TensorProduct:
        feasible = e <= order;
        break;
    }
    if (!feasible) break;
    enumerate(kind, d, order, current, pos + 1, out);
  }
  current[pos] = 0;
}

MultiIndexSet build(IndexSetKind kind, int d, int order) {
  if (d < 1) throw ConfigError("index set dimension must be >= 1");
  if (order < 0) throw ConfigError("index set order must be >= 0");
  std::vector<MultiIndex> indices;
  MultiIndex current(d, 0);
  enumerate(kind, d, order, current, 0, indices);
  std::sort(indices.begin(), indices.end(),
            [kind](const MultiIndex& a, const MultiIndex& b) {
              return canonical_less(kind, a, b);
            });
  return MultiIndexSet(kind, d, order, std::move(indices));
}

}  // namespace

MultiIndexSet hyperbolic_cross(int d, int order) {
  return build(IndexSetKind::HyperbolicCross, d, order);
}

MultiIndexSet total_degree(int d, int order) {
  return build(IndexSetKind::TotalDegree, d, order);
}

MultiIndexSet tensor_product(int d, int order) {
  return build(IndexSetKind::TensorProduct, d, order);
}

MultiIndexSet make_index_set(IndexSetKind kind, int d, int order) {
  return build(kind, d, order);
}

bool is_lower_set(const std::vector<MultiIndex>& indices, int d) {
  std::set<MultiIndex> members(indices.begin(), indices.end());
  for (const auto& idx : indices) {
    // It suffices to check the d immediate predecessors of each member.
    for (int k = 0; k < d; ++k) {
      if (idx[k] == 0) continue;
      MultiIndex pred = idx;
      --pred[k];
      if (members.find(pred) == members.end()) return false;
    }
  }
  return true;
}

bool is_lower_set(const MultiIndexSet& set) {
  return is_lower_set(set.indices(), set.dimension());
}

namespace {

std::pair<std::string, std::string> split_once(const std::string& s, char sep) {
  const auto pos = s.find(sep);
  if (pos == std::string::npos) return {s, ""};
  return {s.substr(0, pos), s.substr(pos + 1)};
}

}  // namespace

IndexFamily parse_index_family(const std::string& spec) {
  auto [head, rest] = split_once(spec, ':');
  IndexFamily fam;
  fam.kind = index_set_kind_from_string(head);
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto [key, value] = split_once(item, '=');
    try {
      if (key == "d") fam.d = std::stoi(value);
      else if (key == "n") fam.order = std::stoi(value);
      else throw ConfigError("unknown index set parameter '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad value for index set parameter '" + key + "'");
    }
  }
  if (fam.d < 1)
    throw ConfigError("index set spec '" + spec + "' needs d >= 1");
  return fam;
}

MultiIndexSet parse_index_set(const std::string& spec) {
  const IndexFamily fam = parse_index_family(spec);
  if (fam.order < 0)
    throw ConfigError("index set spec '" + spec + "' needs an order n");
  return make_index_set(fam.kind, fam.d, fam.order);
}

}  // namespace cwls
