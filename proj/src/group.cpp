#include "rangecap/group.hpp"

#include <algorithm>

#include "rangecap/errors.hpp"
#include "rangecap/rng.hpp"

namespace rangecap {

std::string_view backend_name(Backend b) noexcept
{
    switch (b) {
    case Backend::IntegerLattice:
        return "lattice";
    case Backend::Heisenberg:
        return "heisenberg";
    case Backend::FreeProductZ2:
        return "free_product_z2";
    }
    return "unknown";
}

std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b) noexcept
{
    auto av = a.values();
    auto bv = b.values();
    if (auto c = av.size() <=> bv.size(); c != 0) {
        return c;
    }
    return std::lexicographical_compare_three_way(av.begin(), av.end(), bv.begin(), bv.end());
}

std::uint64_t GroupElement::digest() const noexcept
{
    std::uint64_t h = 0x243F6A8885A308D3ULL ^ data_.size();
    for (Coord c : data_) {
        h = (h ^ static_cast<std::uint32_t>(c)) * 0x100000001B3ULL;
        h ^= h >> 29;
    }
    return mix64(h);
}

Group Group::lattice(int dim, std::vector<GroupElement> generators)
{
    if (dim < 1) {
        throw ValidationError("lattice dimension must be >= 1");
    }
    Group g;
    g.backend_ = Backend::IntegerLattice;
    g.dim_ = dim;
    g.generators_ = std::move(generators);
    g.validate_and_index();
    return g;
}

Group Group::lattice_standard(int dim)
{
    std::vector<GroupElement> gens;
    for (int j = 0; j < dim; ++j) {
        for (Coord sign : {1, -1}) {
            GroupElement::Storage v(static_cast<std::size_t>(dim), 0);
            v[static_cast<std::size_t>(j)] = sign;
            gens.emplace_back(std::move(v));
        }
    }
    return lattice(dim, std::move(gens));
}

Group Group::heisenberg()
{
    return heisenberg({{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}});
}

Group Group::heisenberg(std::vector<GroupElement> generators)
{
    Group g;
    g.backend_ = Backend::Heisenberg;
    g.dim_ = 3;
    g.generators_ = std::move(generators);
    g.validate_and_index();
    return g;
}

Group Group::free_product_z2(int arity)
{
    std::vector<GroupElement> gens;
    for (Coord letter = 1; letter <= arity; ++letter) {
        gens.push_back(GroupElement{letter});
    }
    return free_product_z2(arity, std::move(gens));
}

Group Group::free_product_z2(int arity, std::vector<GroupElement> generators)
{
    if (arity < 1) {
        throw ValidationError("free product arity must be >= 1");
    }
    Group g;
    g.backend_ = Backend::FreeProductZ2;
    g.arity_ = arity;
    g.generators_ = std::move(generators);
    g.validate_and_index();
    return g;
}

void Group::validate_and_index()
{
    if (generators_.empty()) {
        throw EmptyGeneratorSet("generator set is empty");
    }
    for (const auto& s : generators_) {
        if (!is_element(s)) {
            throw ValidationError("generator " + encode(s) + " is not a valid element of the " +
                                  std::string(backend_name(backend_)) + " backend");
        }
    }
    ElementMap<std::size_t> index;
    for (std::size_t i = 0; i < generators_.size(); ++i) {
        if (!index.emplace(generators_[i], i).second) {
            throw DuplicateGenerator("duplicate generator " + encode(generators_[i]));
        }
    }
    const GroupElement e = identity();
    inverse_index_.resize(generators_.size());
    for (std::size_t i = 0; i < generators_.size(); ++i) {
        GroupElement inv = inverse(generators_[i]);
        auto it = index.find(inv);
        if (it == index.end()) {
            throw NonSymmetricGenerators("inverse " + encode(inv) + " of generator " + encode(generators_[i]) +
                                         " is missing");
        }
        if (multiply(generators_[i], inv) != e) {
            throw NonSymmetricGenerators("generator " + encode(generators_[i]) + " times its inverse is not e");
        }
        inverse_index_[i] = it->second;
        if (generators_[i] == e) {
            lazy_ = true;
        }
    }
    if (backend_ == Backend::IntegerLattice && generators_.size() == 2 * static_cast<std::size_t>(dim_)) {
        standard_lattice_ = std::all_of(generators_.begin(), generators_.end(), [](const GroupElement& s) {
            int nonzero = 0;
            bool unit = true;
            for (Coord c : s.values()) {
                if (c != 0) {
                    ++nonzero;
                    unit = unit && (c == 1 || c == -1);
                }
            }
            return nonzero == 1 && unit;
        });
    }
}

GroupElement Group::identity() const
{
    switch (backend_) {
    case Backend::IntegerLattice:
        return GroupElement(GroupElement::Storage(static_cast<std::size_t>(dim_), 0));
    case Backend::Heisenberg:
        return GroupElement{0, 0, 0};
    case Backend::FreeProductZ2:
        return GroupElement{};
    }
    return {};
}

GroupElement Group::multiply(const GroupElement& g, const GroupElement& h) const
{
    GroupElement out = g;
    switch (backend_) {
    case Backend::IntegerLattice:
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] += h[j];
        }
        break;
    case Backend::Heisenberg:
        out[2] += h[2] + g[0] * h[1];
        out[0] += h[0];
        out[1] += h[1];
        break;
    case Backend::FreeProductZ2: {
        auto& w = out.storage();
        for (Coord letter : h.values()) {
            if (!w.empty() && w.back() == letter) {
                w.pop_back();
            } else {
                w.push_back(letter);
            }
        }
        break;
    }
    }
    return out;
}

GroupElement Group::inverse(const GroupElement& g) const
{
    switch (backend_) {
    case Backend::IntegerLattice: {
        GroupElement out = g;
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] = -out[j];
        }
        return out;
    }
    case Backend::Heisenberg:
        return GroupElement{-g[0], -g[1], -g[2] + g[0] * g[1]};
    case Backend::FreeProductZ2: {
        GroupElement out = g;
        std::reverse(out.storage().begin(), out.storage().end());
        return out;
    }
    }
    return g;
}

void Group::step(GroupElement& g, std::size_t gen) const
{
    const GroupElement& s = generators_[gen];
    switch (backend_) {
    case Backend::IntegerLattice:
        for (std::size_t j = 0; j < g.size(); ++j) {
            g[j] += s[j];
        }
        return;
    case Backend::Heisenberg:
        g[2] += s[2] + g[0] * s[1];
        g[0] += s[0];
        g[1] += s[1];
        return;
    case Backend::FreeProductZ2: {
        auto& w = g.storage();
        for (Coord letter : s.values()) {
            if (!w.empty() && w.back() == letter) {
                w.pop_back();
            } else {
                w.push_back(letter);
            }
        }
        return;
    }
    }
}

bool Group::is_element(const GroupElement& g) const noexcept
{
    switch (backend_) {
    case Backend::IntegerLattice:
        return g.size() == static_cast<std::size_t>(dim_);
    case Backend::Heisenberg:
        return g.size() == 3;
    case Backend::FreeProductZ2: {
        Coord prev = 0;
        for (Coord letter : g.values()) {
            if (letter < 1 || letter > arity_ || letter == prev) {
                return false;
            }
            prev = letter;
        }
        return true;
    }
    }
    return false;
}

std::string Group::encode(const GroupElement& g) const
{
    std::string s = "[";
    bool first = true;
    for (Coord c : g.values()) {
        if (!first) {
            s += ',';
        }
        s += std::to_string(c);
        first = false;
    }
    s += ']';
    return s;
}

Group make_group(Backend backend, int param, std::vector<GroupElement> generators)
{
    switch (backend) {
    case Backend::IntegerLattice:
        return generators.empty() ? Group::lattice_standard(param) : Group::lattice(param, std::move(generators));
    case Backend::Heisenberg:
        return generators.empty() ? Group::heisenberg() : Group::heisenberg(std::move(generators));
    case Backend::FreeProductZ2:
        return generators.empty() ? Group::free_product_z2(param)
                                  : Group::free_product_z2(param, std::move(generators));
    }
    throw ValidationError("unknown backend");
}

std::vector<GroupElement> translate(const Group& group, const GroupElement& h, std::span<const GroupElement> set)
{
    std::vector<GroupElement> out;
    out.reserve(set.size());
    for (const auto& g : set) {
        out.push_back(group.multiply(h, g));
    }
    return out;
}

}  // namespace rangecap
