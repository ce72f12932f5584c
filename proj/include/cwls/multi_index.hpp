#pragma once

#include <string>
#include <vector>

namespace cwls {

/// Exponents per coordinate; length is the ambient dimension d.
using MultiIndex = std::vector<int>;

enum class IndexSetKind { HyperbolicCross, TotalDegree, TensorProduct };

std::string to_string(IndexSetKind kind);
IndexSetKind index_set_kind_from_string(const std::string& s);

/// The functional whose sublevel sets define the family: prod(n_k+1) for
/// hyperbolic cross, sum n_k for total degree, max n_k for tensor product.
long long index_level(IndexSetKind kind, const MultiIndex& idx);

/// Ordered, downward-closed (lower) set of multi-indices defining a
/// polynomial approximation space of dimension N = size().
///
/// Members are sorted by (level, |n|_1, lexicographic).  Keying on the level
/// first makes the set of order n a strict prefix of the set of any higher
/// order of the same kind, which the adaptive method's nested spaces
/// P_1 c P_2 c ... rely on.
class MultiIndexSet {
public:
  MultiIndexSet(IndexSetKind kind, int dimension, int order,
                std::vector<MultiIndex> indices);

  IndexSetKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& operator[](int i) const { return indices_[i]; }

  /// Largest exponent appearing in any coordinate.
  int max_degree() const { return max_degree_; }

  /// True iff the first other.size() members of *this equal other's, in
  /// order.  Lower-order sets of the same kind are prefixes of higher ones.
  bool has_prefix(const MultiIndexSet& other) const;

private:
  IndexSetKind kind_;
  int dimension_;
  int order_;
  std::vector<MultiIndex> indices_;
  int max_degree_;
};

/// All n with prod_k (n_k + 1) <= order + 1, canonical order.
MultiIndexSet hyperbolic_cross(int d, int order);

/// All n with n_1 + ... + n_d <= order, canonical order.
MultiIndexSet total_degree(int d, int order);

/// The full box {0..order}^d, canonical order.
MultiIndexSet tensor_product(int d, int order);

MultiIndexSet make_index_set(IndexSetKind kind, int d, int order);

bool is_lower_set(const MultiIndexSet& set);
bool is_lower_set(const std::vector<MultiIndex>& indices, int d);

/// Comparison implementing the canonical order for the given kind.
bool canonical_less(IndexSetKind kind, const MultiIndex& a, const MultiIndex& b);

/// Kind + dimension of a config string, e.g. "hc:d=2" or "hc:d=2,n=30".
struct IndexFamily {
  IndexSetKind kind;
  int d = 0;
  int order = -1;  // -1 when the string carries no n
};

/// Parse "hc:d=2,n=30" / "td:d=3,n=5" / "tp:d=2,n=4"; n may be omitted.
IndexFamily parse_index_family(const std::string& spec);

/// Parse a full config string (n required) into a constructed set.
MultiIndexSet parse_index_set(const std::string& spec);

}  // namespace cwls
