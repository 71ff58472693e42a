#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <vector>

namespace knlayer {

/// Multi-index alpha = (alpha_1, ..., alpha_D), all components >= 0.
/// The second component alpha_2 plays a special role throughout: it counts
/// the Hermite degree in the wall-normal direction, and its parity splits
/// the moment set into an even and an odd part.
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> components);
    explicit MultiIndex(std::vector<int> components);

    int dim() const { return static_cast<int>(c_.size()); }
    int norm() const; ///< |alpha| = sum of components
    int operator[](int d) const { return c_[static_cast<std::size_t>(d)]; }
    const std::vector<int> &components() const { return c_; }

    /// alpha_2, the wall-normal degree. Requires dim() >= 2.
    int normal_degree() const;

    MultiIndex raised() const;  ///< alpha + e2
    MultiIndex lowered() const; ///< alpha - e2; requires alpha_2 > 0

    bool operator==(const MultiIndex &other) const = default;

private:
    std::vector<int> c_;
};

/// Canonical total order on multi-indices of equal dimension:
///   1. even alpha_2 before odd alpha_2,
///   2. then by |alpha|,
///   3. then anti-lexicographic: at the first differing component the
///      larger value sorts earlier.
/// Throws std::invalid_argument on dimension mismatch.
std::strong_ordering compare_indices(const MultiIndex &a, const MultiIndex &b);

struct IndexLess {
    bool operator()(const MultiIndex &a, const MultiIndex &b) const {
        return compare_indices(a, b) == std::strong_ordering::less;
    }
};

/// An ordered moment index set split into even/odd parts. Valid sets close
/// each member's whole chain along the second component up to norm M
/// (condition validate_c1 checks); this guarantees m >= n and makes the
/// transport matrix assume its anti-diagonal block form.
class IndexSet {
public:
    /// Wraps explicit even/odd lists. Parts must be internally sorted under
    /// compare_indices with correct parities; positions are assigned even
    /// part first, 0-based. Use build_index_set for closure construction.
    IndexSet(std::vector<MultiIndex> even_part, std::vector<MultiIndex> odd_part,
             int order_M, int dimension_D);

    int order() const { return order_M_; }
    int dim() const { return dimension_D_; }
    const std::vector<MultiIndex> &even_part() const { return even_; }
    const std::vector<MultiIndex> &odd_part() const { return odd_; }

    int m() const { return static_cast<int>(even_.size()); }
    int n() const { return static_cast<int>(odd_.size()); }
    int size() const { return m() + n(); }

    /// Global 0-based position (even part first), or -1 if absent.
    int position(const MultiIndex &alpha) const;
    bool contains(const MultiIndex &alpha) const { return position(alpha) >= 0; }
    const MultiIndex &at(int position) const;

private:
    int order_M_ = 0;
    int dimension_D_ = 0;
    std::vector<MultiIndex> even_, odd_;
    std::map<MultiIndex, int, IndexLess> positions_;
};

/// Closure construction: every generator gamma contributes the full chain
/// gamma - gamma_2 e2 + a2 e2 for 0 <= a2 <= M - |gamma| + gamma_2.
/// Generators closing to the same chain are merged. Throws
/// std::invalid_argument if a generator has norm > M or wrong dimension.
IndexSet build_index_set(const std::vector<MultiIndex> &generators, int M, int D);

/// True iff the set contains, for each member, its entire wall-normal chain.
bool validate_c1(const IndexSet &set);

} // namespace knlayer
