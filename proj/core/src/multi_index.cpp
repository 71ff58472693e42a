#include "knlayer/multi_index.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace knlayer {

MultiIndex::MultiIndex(std::initializer_list<int> components) : c_(components) {
    for (int v : c_)
        if (v < 0) throw std::invalid_argument("multi-index components must be nonnegative");
}

MultiIndex::MultiIndex(std::vector<int> components) : c_(std::move(components)) {
    for (int v : c_)
        if (v < 0) throw std::invalid_argument("multi-index components must be nonnegative");
}

int MultiIndex::norm() const {
    return std::accumulate(c_.begin(), c_.end(), 0);
}

int MultiIndex::normal_degree() const {
    if (dim() < 2) throw std::invalid_argument("normal degree needs dimension >= 2");
    return c_[1];
}

MultiIndex MultiIndex::raised() const {
    std::vector<int> c = c_;
    if (c.size() < 2) throw std::invalid_argument("raised() needs dimension >= 2");
    ++c[1];
    return MultiIndex(std::move(c));
}

MultiIndex MultiIndex::lowered() const {
    std::vector<int> c = c_;
    if (c.size() < 2 || c[1] == 0) throw std::invalid_argument("lowered() needs alpha_2 > 0");
    --c[1];
    return MultiIndex(std::move(c));
}

std::strong_ordering compare_indices(const MultiIndex &a, const MultiIndex &b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("compare_indices: dimension mismatch");
    if (a.dim() < 2)
        throw std::invalid_argument("compare_indices: dimension must be >= 2");

    const int pa = a[1] % 2, pb = b[1] % 2;
    if (pa != pb) return pa <=> pb; // even normal degree first
    if (a.norm() != b.norm()) return a.norm() <=> b.norm();
    for (int d = 0; d < a.dim(); ++d)
        if (a[d] != b[d]) return b[d] <=> a[d]; // larger component sorts earlier
    return std::strong_ordering::equal;
}

IndexSet::IndexSet(std::vector<MultiIndex> even_part, std::vector<MultiIndex> odd_part,
                   int order_M, int dimension_D)
    : order_M_(order_M), dimension_D_(dimension_D),
      even_(std::move(even_part)), odd_(std::move(odd_part)) {
    if (dimension_D_ < 2)
        throw std::invalid_argument("index set dimension must be >= 2");
    auto check_part = [&](const std::vector<MultiIndex> &part, int parity) {
        for (std::size_t i = 0; i < part.size(); ++i) {
            if (part[i].dim() != dimension_D_)
                throw std::invalid_argument("index set: dimension mismatch");
            if (part[i].norm() > order_M_)
                throw std::invalid_argument("index set: norm exceeds order M");
            if (part[i].normal_degree() % 2 != parity)
                throw std::invalid_argument("index set: wrong parity in part");
            if (i > 0 && compare_indices(part[i - 1], part[i]) != std::strong_ordering::less)
                throw std::invalid_argument("index set: part not strictly sorted");
        }
    };
    check_part(even_, 0);
    check_part(odd_, 1);
    int pos = 0;
    for (const auto &alpha : even_) positions_.emplace(alpha, pos++);
    for (const auto &alpha : odd_) positions_.emplace(alpha, pos++);
}

int IndexSet::position(const MultiIndex &alpha) const {
    auto it = positions_.find(alpha);
    return it == positions_.end() ? -1 : it->second;
}

const MultiIndex &IndexSet::at(int position) const {
    if (position < 0 || position >= size())
        throw std::out_of_range("index set position out of range");
    const int m_ = m();
    return position < m_ ? even_[static_cast<std::size_t>(position)]
                         : odd_[static_cast<std::size_t>(position - m_)];
}

IndexSet build_index_set(const std::vector<MultiIndex> &generators, int M, int D) {
    if (M < 0) throw std::invalid_argument("build_index_set: order M must be >= 0");
    if (D < 2) throw std::invalid_argument("build_index_set: dimension must be >= 2");

    std::set<MultiIndex, IndexLess> members;
    for (const auto &gamma : generators) {
        if (gamma.dim() != D)
            throw std::invalid_argument("build_index_set: generator dimension mismatch");
        if (gamma.norm() > M)
            throw std::invalid_argument("build_index_set: generator norm exceeds M");
        std::vector<int> base = gamma.components();
        base[1] = 0;
        const MultiIndex base_index{std::vector<int>(base)};
        const int max_a2 = M - base_index.norm();
        for (int a2 = 0; a2 <= max_a2; ++a2) {
            std::vector<int> c = base;
            c[1] = a2;
            members.insert(MultiIndex(std::move(c)));
        }
    }

    std::vector<MultiIndex> even, odd;
    for (const auto &alpha : members)
        (alpha.normal_degree() % 2 == 0 ? even : odd).push_back(alpha);
    return IndexSet(std::move(even), std::move(odd), M, D);
}

bool validate_c1(const IndexSet &set) {
    auto check = [&](const std::vector<MultiIndex> &part) {
        for (const auto &gamma : part) {
            std::vector<int> base = gamma.components();
            base[1] = 0;
            const int base_norm = gamma.norm() - gamma.normal_degree();
            for (int a2 = 0; a2 <= set.order() - base_norm; ++a2) {
                std::vector<int> c = base;
                c[1] = a2;
                if (!set.contains(MultiIndex(std::move(c)))) return false;
            }
        }
        return true;
    };
    return check(set.even_part()) && check(set.odd_part());
}

} // namespace knlayer
