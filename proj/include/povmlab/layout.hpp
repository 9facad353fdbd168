#ifndef POVMLAB_LAYOUT_HPP
#define POVMLAB_LAYOUT_HPP

#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "povmlab/common.hpp"

namespace povmlab {

struct Factor {
  std::string label;
  int dim = 0;
};

// Ordered tensor factorization of a product space. Product-basis indices are
// mixed-radix with the most significant factor first; this ordering is fixed
// globally and matches row-major Kronecker products.
class SpaceLayout {
 public:
  SpaceLayout() = default;

  explicit SpaceLayout(std::vector<Factor> factors)
      : factors_(std::move(factors)) {
    std::unordered_set<std::string> seen;
    for (const Factor& f : factors_) {
      if (f.dim < 1)
        throw dimension_error("SpaceLayout: factor '" + f.label +
                              "' has dim < 1");
      if (f.label.empty())
        throw std::invalid_argument("SpaceLayout: empty factor label");
      if (!seen.insert(f.label).second)
        throw std::invalid_argument("SpaceLayout: duplicate label '" +
                                    f.label + "'");
    }
    strides_.assign(factors_.size(), 1);
    for (int i = static_cast<int>(factors_.size()) - 2; i >= 0; --i)
      strides_[i] = strides_[i + 1] * factors_[i + 1].dim;
    total_ = factors_.empty() ? 1 : strides_[0] * factors_[0].dim;
  }

  int factor_count() const { return static_cast<int>(factors_.size()); }
  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(int i) const { return factors_.at(i); }
  int total_dim() const { return total_; }

  // Stride of factor i in the product-basis index.
  int stride(int i) const { return strides_.at(i); }

  bool has(const std::string& label) const {
    for (const Factor& f : factors_)
      if (f.label == label) return true;
    return false;
  }

  int index_of(const std::string& label) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (factors_[i].label == label) return static_cast<int>(i);
    throw std::invalid_argument("SpaceLayout: unknown label '" + label + "'");
  }

  int dim_of(const std::string& label) const {
    return factors_[index_of(label)].dim;
  }

  // Sub-layout of the given labels, preserving this layout's factor order.
  SpaceLayout sub_layout(const std::vector<std::string>& labels) const {
    std::unordered_set<std::string> want;
    for (const std::string& l : labels) {
      index_of(l);  // throws on unknown
      if (!want.insert(l).second)
        throw std::invalid_argument("SpaceLayout: duplicate label '" + l +
                                    "' in selection");
    }
    std::vector<Factor> kept;
    for (const Factor& f : factors_)
      if (want.count(f.label)) kept.push_back(f);
    return SpaceLayout(std::move(kept));
  }

  bool operator==(const SpaceLayout& other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (factors_[i].label != other.factors_[i].label ||
          factors_[i].dim != other.factors_[i].dim)
        return false;
    return true;
  }
  bool operator!=(const SpaceLayout& other) const { return !(*this == other); }

 private:
  std::vector<Factor> factors_;
  std::vector<int> strides_;
  int total_ = 1;
};

struct StateVector {
  SpaceLayout layout;
  ComplexVector amplitudes;

  double norm() const { return amplitudes.norm(); }
  bool is_normalized(double tol = kEqualityTol) const {
    return std::abs(norm() - 1.0) <= tol;
  }
};

}  // namespace povmlab

#endif  // POVMLAB_LAYOUT_HPP
