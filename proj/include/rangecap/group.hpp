#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace rangecap {

enum class Backend { IntegerLattice, Heisenberg, FreeProductZ2 };

std::string_view backend_name(Backend b) noexcept;

using Coord = std::int32_t;

/// Canonical value of a group element. The meaning of the coordinates depends
/// on the backend:
///   integer lattice   d integers
///   heisenberg        (a, b, c), the upper-triangular entries
///   free product Z2   reduced word over letters 1..N (no equal neighbours)
/// Equality is structural, so two values are equal iff the elements are.
class GroupElement {
public:
    using Storage = boost::container::small_vector<Coord, 8>;

    GroupElement() = default;
    GroupElement(std::initializer_list<Coord> values) : data_(values) {}
    explicit GroupElement(Storage data) : data_(std::move(data)) {}
    explicit GroupElement(std::span<const Coord> values) : data_(values.begin(), values.end()) {}

    std::span<const Coord> values() const noexcept { return {data_.data(), data_.size()}; }
    std::size_t size() const noexcept { return data_.size(); }
    Coord operator[](std::size_t i) const noexcept { return data_[i]; }
    Coord& operator[](std::size_t i) noexcept { return data_[i]; }

    Storage& storage() noexcept { return data_; }
    const Storage& storage() const noexcept { return data_; }

    friend bool operator==(const GroupElement& a, const GroupElement& b) noexcept
    {
        return a.data_ == b.data_;
    }
    friend std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b) noexcept;

    /// Deterministic 64-bit digest of the canonical value.
    std::uint64_t digest() const noexcept;

private:
    Storage data_;
};

struct ElementHash {
    std::size_t operator()(const GroupElement& g) const noexcept { return static_cast<std::size_t>(g.digest()); }
};

using ElementSet = std::unordered_set<GroupElement, ElementHash>;
template <class V>
using ElementMap = std::unordered_map<GroupElement, V, ElementHash>;

/// A group backend together with a finite symmetric generating set.
/// Immutable after construction; copies share nothing mutable.
class Group {
public:
    /// Integer lattice Z^dim with the given generators (validated).
    static Group lattice(int dim, std::vector<GroupElement> generators);
    /// Z^dim with {+-e_1, ..., +-e_dim}.
    static Group lattice_standard(int dim);
    /// Discrete Heisenberg group; the default generators are {x, y, x^-1, y^-1}.
    static Group heisenberg();
    static Group heisenberg(std::vector<GroupElement> generators);
    /// Free product of `arity` copies of Z/2 generated by its letters.
    static Group free_product_z2(int arity);
    static Group free_product_z2(int arity, std::vector<GroupElement> generators);

    Backend backend() const noexcept { return backend_; }
    int dim() const noexcept { return dim_; }
    int arity() const noexcept { return arity_; }

    const std::vector<GroupElement>& generators() const noexcept { return generators_; }
    std::size_t generator_count() const noexcept { return generators_.size(); }
    /// Index of the inverse of generator i inside the generator list.
    std::size_t inverse_generator(std::size_t i) const noexcept { return inverse_index_[i]; }

    /// True when the identity was passed as a generator (lazy walk).
    bool lazy() const noexcept { return lazy_; }
    /// Lattice with exactly {+-e_1, ..., +-e_d}, in any order.
    bool is_standard_lattice() const noexcept { return standard_lattice_; }

    GroupElement identity() const;
    GroupElement multiply(const GroupElement& g, const GroupElement& h) const;
    GroupElement inverse(const GroupElement& g) const;
    /// g <- g * generators()[gen], in place.
    void step(GroupElement& g, std::size_t gen) const;

    /// True if `g` is a well-formed canonical value for this backend.
    bool is_element(const GroupElement& g) const noexcept;

    /// Canonical text encoding, e.g. "[1,-2,0]".
    std::string encode(const GroupElement& g) const;

private:
    Group() = default;
    void validate_and_index();

    Backend backend_ = Backend::IntegerLattice;
    int dim_ = 0;
    int arity_ = 0;
    std::vector<GroupElement> generators_;
    std::vector<std::size_t> inverse_index_;
    bool lazy_ = false;
    bool standard_lattice_ = false;
};

/// Validated construction from a backend id and parameters. `param` is the
/// lattice dimension or the free-product arity (ignored for Heisenberg).
/// An empty generator list selects the standard generators.
Group make_group(Backend backend, int param, std::vector<GroupElement> generators);

/// Left translate every element of `set` by h.
std::vector<GroupElement> translate(const Group& group, const GroupElement& h, std::span<const GroupElement> set);

}  // namespace rangecap
